"""Teaching sets for ridge regression, SVM and logistic regression."""

from ._core import (
    BoundReport,
    Example,
    FalsificationReport,
    LearnerSpec,
    SolveResult,
    TargetModel,
    TdValue,
    TeachingSet,
    TeachdimError,
    VerifyReport,
    boundary_scale,
    bound_report,
    falsify_smaller_sets,
    finite_difference_grad_check,
    kkt_residual,
    lambert_w0,
    lb1,
    lb2,
    lb3,
    lower_bound,
    objective,
    tau_inverse,
    tau_inverse_bisection,
    tau_max,
    td_formula,
    teach,
    train,
    verify_construction,
    verify_teaching_set,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

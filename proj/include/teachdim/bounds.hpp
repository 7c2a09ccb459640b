#pragma once

// Lower bounds on the teaching dimension and the closed-form TD values.
//
//   LB1 (degree of freedom):     d_eff - Rank(A_eff) [+ 1 if A_eff theta* != 0]
//   LB2 (regularization):        ceil(lambda / sup_{alpha, y, g in -d loss(alpha s, y)} alpha g)
//   LB3 (inhomogeneous margin):  LB2's formula applied to w* alone
//
// with s = ||theta*||_A^2. LB1/LB2 accept any PSD regularizer; the exact TD
// formulas are only known for A = I.

#include <optional>

#include "teachdim/model.hpp"

namespace teachdim {

/// Integer TD value; lo == hi unless the construction and LB3 differ by
/// rounding (inhomogeneous svm/logistic).
struct TdValue {
  long lo = 0;
  long hi = 0;

  bool exact() const { return lo == hi; }
  bool operator==(const TdValue&) const = default;
};

struct BoundReport {
  long lb1 = 0;
  long lb2 = 0;
  std::optional<long> lb3;   // not applicable outside inhomogeneous margin losses
  long combined = 0;
  std::optional<TdValue> td; // absent for non-identity regularizers
};

/// ceil(z) after a relative 1e-12 downward nudge, so floating noise on an
/// intended integer does not round up.
long guarded_ceil(double z);

/// Denominator of LB2/LB3 for s = ||theta*||_A^2 > 0; +inf for squared loss.
double sup_coefficient(LossKind loss, double s);

long lb1(const LearnerSpec& spec, const TargetModel& target);
long lb2(const LearnerSpec& spec, const TargetModel& target);
std::optional<long> lb3(const LearnerSpec& spec, const TargetModel& target);
long lower_bound(const LearnerSpec& spec, const TargetModel& target);

TdValue td_formula(const LearnerSpec& spec, const TargetModel& target);

BoundReport bound_report(const LearnerSpec& spec, const TargetModel& target);

}  // namespace teachdim

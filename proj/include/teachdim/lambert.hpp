#pragma once

namespace teachdim {

/// Principal branch of the Lambert W function, x >= -1/e.
/// Arguments below -1/e by at most 1e-15 are clamped to the branch point.
double lambert_w0(double x);

/// max_t t / (1 + e^t) = W(1/e) ~= 0.278465.
double tau_max();

/// Point where t / (1 + e^t) attains tau_max(); equals 1 + tau_max().
double tau_argmax();

/// Solution t of a = t / (1 + e^t) on the rising branch, t = a - W(-a e^a),
/// for 0 < a <= tau_max().
double tau_inverse(double a);

struct TauValue {
  double a;
  double t;
};

TauValue tau_point(double a);

}  // namespace teachdim

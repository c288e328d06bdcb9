#pragma once

namespace dwave::specfun::detail {

/// sin(pi x) with exact zeros at the integers.
double sinpi(double x);

bool is_nonpositive_integer(double x);

/// log|1/Gamma(x)|; sign receives the sign of 1/Gamma(x) (0 at the poles).
double log_abs_rgamma(double x, int& sign);

}  // namespace dwave::specfun::detail

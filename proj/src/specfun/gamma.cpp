#include <cmath>
#include <limits>
#include <numbers>

#include "dwave/error.hpp"
#include "dwave/specfun.hpp"
#include "specfun_detail.hpp"

namespace dwave::specfun {

namespace detail {

double sinpi(double x) {
  const double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
  if (r == 0.0 || std::abs(r) == 1.0) return 0.0;
  // fold into [-1/2, 1/2] so the result keeps full relative accuracy near zeros
  if (r > 0.5) return std::sin(std::numbers::pi * (1.0 - r));
  if (r < -0.5) return -std::sin(std::numbers::pi * (1.0 + r));
  return std::sin(std::numbers::pi * r);
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

double log_abs_rgamma(double x, int& sign) {
  if (is_nonpositive_integer(x)) {
    sign = 0;
    return -std::numeric_limits<double>::infinity();
  }
  if (x > 0.0) {
    sign = 1;
    return -std::lgamma(x);
  }
  // 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
  const double s = sinpi(x);
  sign = s > 0.0 ? 1 : -1;
  return std::log(std::abs(s)) - std::log(std::numbers::pi) + std::lgamma(1.0 - x);
}

}  // namespace detail

double gamma_fn(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::Domain, "gamma: non-finite argument");
  if (detail::is_nonpositive_integer(x)) fail(ErrorCode::Domain, "gamma: pole at non-positive integer");
  if (x >= 0.5) return std::tgamma(x);
  return std::numbers::pi / (detail::sinpi(x) * std::tgamma(1.0 - x));
}

double rgamma(double x) {
  if (detail::is_nonpositive_integer(x)) return 0.0;
  if (x > 0.0) {
    if (x > 171.5) return 0.0;
    return 1.0 / std::tgamma(x);
  }
  if (1.0 - x < 171.0) return detail::sinpi(x) * std::tgamma(1.0 - x) / std::numbers::pi;
  int sign = 0;
  const double l = detail::log_abs_rgamma(x, sign);
  return sign * std::exp(l);
}

}  // namespace dwave::specfun

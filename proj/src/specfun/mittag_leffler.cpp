#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dwave/error.hpp"
#include "dwave/specfun.hpp"
#include "specfun_detail.hpp"

namespace dwave::specfun {

namespace {

using detail::log_abs_rgamma;
using detail::sinpi;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;

// Accept the asymptotic expansion once its truncation bound drops below this
// fraction of the value.
constexpr double kAsymptoticAcceptRel = 1e-14;

double cospi(double x) { return sinpi(x + 0.5); }

bool is_integer_order(double alpha) { return alpha == 1.0 || alpha == 2.0; }

MlValue series(double a, double b, double x) {
  MlValue out{0.0, 0.0, Branch::Series};
  if (x == 0.0) {
    out.value = rgamma(b);
    return out;
  }
  const double logx = std::log(x);
  double sum = 0.0;
  double abs_sum = 0.0;
  double last = 0.0;
  for (int k = 0; k < 20000; ++k) {
    const double y = a * k + b;
    int sign = 0;
    const double l = log_abs_rgamma(y, sign);
    const double mag = std::exp(k * logx + l);
    const double term = (k % 2 == 0 ? 1.0 : -1.0) * sign * mag;
    sum += term;
    abs_sum += mag;
    last = mag;
    // Gamma is increasing past y ~ 1.46, so once there a tiny term stays tiny.
    if (y > 2.0 && mag <= 1e-18 * std::abs(sum)) break;
    if (y > 2.0 && mag == 0.0) break;
  }
  out.value = sum;
  out.est_abs_error = last + 4.0 * kEps * abs_sum;
  return out;
}

// (2/a) Re( s^{1-b} e^{s} ) with s = x^{1/a} e^{i pi/a}: residues of
// e^s s^{a-b}/(s^a + x) at its two poles on the principal sheet (1 < a < 2).
// The error carries the rounding of the phase and of exp(), both of order
// eps * r relative to the magnitude.
struct Poles {
  double value = 0.0;
  double err = 0.0;
};

Poles pole_terms(double a, double b, double x) {
  if (a <= 1.0 || a >= 2.0) return {};
  const double r = std::pow(x, 1.0 / a);
  const double re = r * cospi(1.0 / a);
  const double mag = (2.0 / a) * std::pow(r, 1.0 - b) * std::exp(re);
  if (mag == 0.0) return {};
  const double phase = (1.0 - b) * kPi / a + r * sinpi(1.0 / a);
  return {mag * std::cos(phase), 4.0 * kEps * (2.0 + r) * mag};
}

MlValue asymptotic(double a, double b, double x) {
  MlValue out{0.0, std::numeric_limits<double>::infinity(), Branch::Asymptotic};
  const double logx = std::log(x);
  // |1/Gamma(b - a k)| <= Gamma(1 - b + a k)/pi for b - a k < 1; this bound
  // drives truncation because individual terms may vanish at the poles.
  auto bound = [&](int k) {
    const double y = b - a * k;
    if (y >= 1.0) {
      int s = 0;
      return std::exp(-k * logx + log_abs_rgamma(y, s));
    }
    return std::exp(-k * logx + std::lgamma(1.0 - y)) / kPi;
  };
  double alg = 0.0;
  double alg_abs = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  int k = 1;
  for (; k <= 80; ++k) {
    const double bk = bound(k);
    if (bk > prev && a * k - b > 1.0) break;  // past the smallest term
    const double y = b - a * k;
    int sign = 0;
    const double l = log_abs_rgamma(y, sign);
    const double mag = sign == 0 ? 0.0 : std::exp(-k * logx + l);
    // -z^{-k}/Gamma(b - a k) with z = -x
    alg += (k % 2 == 0 ? -1.0 : 1.0) * sign * mag;
    alg_abs += mag;
    // b - a k carries a rounding of eps (|b| + a k), amplified near a pole
    if (y < 0.5 && mag > 0.0) alg_abs += mag * (std::abs(b) + a * k) / std::abs(y - std::round(y));
    prev = bk;
    if (bk <= 1e-18 * std::abs(alg)) {
      ++k;
      break;
    }
  }
  const Poles poles = pole_terms(a, b, x);
  out.value = alg + poles.value;
  out.est_abs_error = bound(k) + 16.0 * kEps * alg_abs + poles.err;
  return out;
}

MlValue integral(double a, double b, double x) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;

  const double sin_b = sinpi(b);
  const double sin_ab = sinpi(a - b);
  const double cos_a = cospi(a);
  const double sin_a = sinpi(a);

  // Jump of e^s s^{a-b}/(s^a + x) across the negative real axis, s = -r.
  auto ray = [&](double r) {
    const double ra = std::pow(r, a);
    const double re = ra + x * cos_a;
    const double im = x * sin_a;
    const double den = re * re + im * im;
    return std::exp(-r) * std::pow(r, a - b) * (ra * sin_b - x * sin_ab) / (kPi * den);
  };

  const double rho = std::pow(x, 1.0 / a);
  const double eps = std::min(0.5, 0.5 * rho);

  std::vector<double> pts{eps};
  double far = eps;
  if (cos_a < 0.0) {
    // |s^a + x| is smallest where r^a = -x cos(pi a); resolve that bump.
    const double peak = std::pow(-x * cos_a, 1.0 / a);
    if (peak > eps) {
      const double w = std::max(peak * std::abs(sin_a) / a, 1e-6 * peak);
      pts.push_back(peak);
      for (double d = w; d < 64.0; d *= 4.0) {
        if (peak - d > eps) pts.push_back(peak - d);
        pts.push_back(peak + d);
        far = peak + d;
      }
    }
  }
  pts.push_back(far + 60.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  double ray_sum = 0.0;
  double ray_err = 0.0;
  double ray_l1 = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double err = 0.0;
    double l1 = 0.0;
    ray_sum += gauss_kronrod<double, 31>::integrate(ray, pts[i], pts[i + 1], 12, 1e-14, &err, &l1);
    ray_err += err;
    ray_l1 += l1;
  }

  // Circle |s| = eps; the integrand's real part is even in the angle.
  auto circle = [&](double phi) {
    const std::complex<double> s = std::polar(eps, phi);
    const std::complex<double> v = std::exp(s) * std::pow(s, a - b + 1.0) / (std::pow(s, a) + x);
    return v.real();
  };
  const double c_fine = gauss<double, 30>::integrate(circle, 0.0, 0.5 * kPi) +
                        gauss<double, 30>::integrate(circle, 0.5 * kPi, kPi);
  const double c_coarse = gauss<double, 20>::integrate(circle, 0.0, 0.5 * kPi) +
                          gauss<double, 20>::integrate(circle, 0.5 * kPi, kPi);
  const double circ = c_fine / kPi;

  const Poles poles = pole_terms(a, b, x);
  MlValue out{ray_sum + circ + poles.value, 0.0, Branch::Integral};
  out.est_abs_error = ray_err + std::abs(c_fine - c_coarse) / kPi + 8.0 * kEps * (ray_l1 + std::abs(circ)) +
                      poles.err;
  return out;
}

MlValue closed(double a, double b, double x) {
  MlValue out{0.0, 0.0, Branch::Closed};
  if (a == 1.0) {
    out.value = b == 1.0 ? std::exp(-x) : -std::expm1(-x) / x;
  } else {
    const double s = std::sqrt(x);
    out.value = b == 1.0 ? std::cos(s) : std::sin(s) / s;
    out.est_abs_error = 2.0 * kEps * (1.0 + s);
  }
  if (x != 0.0) out.est_abs_error = std::max(out.est_abs_error, 2.0 * kEps * std::abs(out.value));
  return out;
}

bool has_closed_form(double a, double b) { return is_integer_order(a) && (b == 1.0 || b == 2.0); }

double check_argument(double z) {
  if (!std::isfinite(z)) fail(ErrorCode::Domain, "ml_eval: non-finite argument");
  if (z > 0.0) fail(ErrorCode::Domain, "ml_eval: only z <= 0 is supported, got z = " + std::to_string(z));
  return -z;
}

}  // namespace

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::Series: return "series";
    case Branch::Asymptotic: return "asymptotic";
    case Branch::Integral: return "integral";
    case Branch::Closed: return "closed";
  }
  return "unknown";
}

Branch branch_from_string(std::string_view s) {
  if (s == "series") return Branch::Series;
  if (s == "asymptotic") return Branch::Asymptotic;
  if (s == "integral") return Branch::Integral;
  if (s == "closed") return Branch::Closed;
  fail(ErrorCode::InvalidArgument, "unknown Mittag-Leffler branch '" + std::string(s) + "'");
}

MlParams::MlParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    fail(ErrorCode::InvalidArgument, "MlParams: alpha must lie in (0, 2], got " + std::to_string(alpha));
  if (!(beta > 0.0) || !std::isfinite(beta))
    fail(ErrorCode::InvalidArgument, "MlParams: beta must be positive, got " + std::to_string(beta));
}

MlValue ml_eval(const MlParams& params, double z) {
  const double x = check_argument(z);
  const double a = params.alpha();
  const double b = params.beta();
  if (x <= 1.0) return series(a, b, x);
  if (is_integer_order(a)) return has_closed_form(a, b) ? closed(a, b, x) : series(a, b, x);
  const MlValue asym = asymptotic(a, b, x);
  if (std::isfinite(asym.value) && asym.est_abs_error <= kAsymptoticAcceptRel * std::abs(asym.value))
    return asym;
  return integral(a, b, x);
}

MlValue ml_eval(const MlParams& params, double z, Branch branch) {
  const double x = check_argument(z);
  const double a = params.alpha();
  const double b = params.beta();
  switch (branch) {
    case Branch::Series: return series(a, b, x);
    case Branch::Closed:
      if (!has_closed_form(a, b))
        fail(ErrorCode::Domain, "ml_eval: closed form exists only for alpha in {1,2}, beta in {1,2}");
      return closed(a, b, x);
    case Branch::Asymptotic:
    case Branch::Integral:
      if (is_integer_order(a))
        fail(ErrorCode::Domain, "ml_eval: contour branches need a non-integer alpha");
      if (x == 0.0) return series(a, b, x);
      return branch == Branch::Asymptotic ? asymptotic(a, b, x) : integral(a, b, x);
  }
  fail(ErrorCode::InvalidArgument, "ml_eval: bad branch");
}

double ml(double alpha, double beta, double z) { return ml_eval(MlParams(alpha, beta), z).value; }

double ml_recurrence_residual(const MlParams& params, double z) {
  const double lhs = ml_eval(params, z).value;
  const double shifted = ml_eval(MlParams(params.alpha(), params.alpha() + params.beta()), z).value;
  return lhs - rgamma(params.beta()) - z * shifted;
}

}  // namespace dwave::specfun

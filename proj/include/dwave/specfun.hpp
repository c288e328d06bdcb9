#pragma once

// Two-parameter Mittag-Leffler function on the non-positive real axis.
//
//   E_{a,b}(z) = sum_k z^k / Gamma(a k + b),   z <= 0, 0 < a <= 2, b > 0.
//
// Three evaluation routes are available and any one can be forced:
//   Series      Taylor series, used for |z| <= 1.
//   Asymptotic  algebraic expansion -sum z^{-k}/Gamma(b - a k) plus, for
//               1 < a < 2, the two decaying oscillatory pole contributions.
//               Picked automatically once its truncation estimate is below
//               the accuracy target.
//   Integral    Hankel-contour representation of the inverse Laplace
//               transform s^{a-b}/(s^a - z): two rays along the branch cut,
//               a small circle around the origin, plus the same pole
//               contributions. Valid for every |z| > 0.
// The integer orders a = 1 and a = 2 degenerate (the poles sit on the cut or
// on the imaginary axis) and are handled in closed form for b in {1, 2}.

#include <cstdint>
#include <string_view>

namespace dwave::specfun {

enum class Branch : std::uint8_t { Series, Asymptotic, Integral, Closed };

std::string_view to_string(Branch b);
Branch branch_from_string(std::string_view s);

class MlParams {
 public:
  /// Throws dwave::Error(InvalidArgument) unless 0 < alpha <= 2 and beta > 0.
  MlParams(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

 private:
  double alpha_;
  double beta_;
};

struct MlValue {
  double value = 0.0;
  double est_abs_error = 0.0;
  Branch branch = Branch::Series;
};

/// Evaluates E_{alpha,beta}(z) for z <= 0, choosing the branch automatically.
/// Throws dwave::Error(Domain) for z > 0 or non-finite z.
MlValue ml_eval(const MlParams& params, double z);

/// Same, but forces a branch. Forcing Series far outside its radius of
/// usefulness is allowed; the error estimate then reports the cancellation.
MlValue ml_eval(const MlParams& params, double z, Branch branch);

/// Shorthand returning only the value.
double ml(double alpha, double beta, double z);

/// Residual of E_{a,b}(z) - 1/Gamma(b) - z E_{a,a+b}(z); zero up to rounding.
double ml_recurrence_residual(const MlParams& params, double z);

/// Gamma function with reflection for negative arguments. Throws
/// dwave::Error(Domain) at the poles 0, -1, -2, ...
double gamma_fn(double x);

/// 1/Gamma(x), an entire function: exactly zero at the poles of Gamma.
double rgamma(double x);

}  // namespace dwave::specfun

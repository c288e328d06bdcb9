#pragma once

// Forward solvers for  d_t^alpha u - Laplace u = f,  u(0) = a, u_t(0) = b.
//
//   evolve_exact_modal   u_j(t) = E_{a,1}(-l_j t^a) a_j + t E_{a,2}(-l_j t^a) b_j
//   evolve_cq_modal      backward Euler convolution quadrature, one scalar
//                        recursion per mode
//   evolve_cq_fem        the same scheme in matrix form, one SPD solve per step
//
// The CQ recursions are written for the deviation W_n = U_n - a - t_n b:
//   tau^-a sum_{j=0}^{n} b_j W_{n-j} + A W_n = f_n - A (a + t_n b),  W_0 = 0.

#include <functional>
#include <optional>
#include <vector>

#include "dwave/fem.hpp"
#include "dwave/spectral.hpp"

namespace dwave::forward {

using fem::Vec;

/// Coefficients of (1 - xi)^alpha, b_0 = 1, b_j = b_{j-1} (j - 1 - alpha)/j.
class CqWeights {
 public:
  /// alpha must lie in (0, 2].
  CqWeights(double alpha, int n_max);

  double alpha() const noexcept { return alpha_; }
  int n_max() const noexcept { return static_cast<int>(b_.size()) - 1; }
  double operator[](int j) const { return b_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& values() const noexcept { return b_; }

 private:
  double alpha_;
  std::vector<double> b_;
};

enum class Scheme { ExactModal, SemidiscreteModal, FullyDiscreteCQ };

/// States on t_n = n tau (or on the requested times for exact evolution).
struct Trajectory {
  Scheme scheme = Scheme::FullyDiscreteCQ;
  std::vector<double> times;
  std::vector<Vec> states;
};

/// Coefficient-wise exact evolution to time t on the basis shared by a and b.
spectral::ModalField evolve_exact_modal(const spectral::ModalField& a, const spectral::ModalField& b, double alpha,
                                        double t);

/// Scalar multipliers (E_{a,1}(-l t^a), t E_{a,2}(-l t^a)).
std::pair<double, double> exact_operators(double lambda, double alpha, double t);

/// Per-mode CQ recursion on the given eigenvalues. f_modal, if present, holds
/// the modal load at t_0..t_N (entry 0 is ignored).
Trajectory evolve_cq_modal(const std::vector<double>& lambdas, const Vec& a, const Vec& b, double alpha, double tau,
                           int N, const std::vector<Vec>* f_modal = nullptr);

struct CqFemOptions {
  double cg_tol = 1e-12;
  int cg_max_iter = 5000;
  /// Drops the stiffness matrix; U_n must then equal a + t_n b.
  bool mass_only = false;
  /// Keep only these step indices in the returned trajectory (all if empty).
  std::vector<int> keep;
};

/// Matrix-form CQ: (tau^-a M + K) W_n = M f_n - K (a + t_n b)
///                                     - tau^-a M sum_{j>=1} b_j W_{n-j}.
/// `load` returns the load vector M f_n at step n (optional).
Trajectory evolve_cq_fem(const fem::FemSystem& sys, const Vec& a, const Vec& b, double alpha, double tau, int N,
                         const std::function<Vec(int)>& load = {}, const CqFemOptions& opt = {});

/// (F_tau^n(lambda), Fbar_tau^n(lambda)): the CQ solution at step n for the
/// data (1, 0) and (0, 1) respectively.
std::pair<double, double> discrete_operator_f(double lambda, double alpha, double tau, int n);

/// Both sequences for n = 0..N in one O(N^2) pass.
struct DiscreteOperators {
  std::vector<double> F;
  std::vector<double> Fbar;
};
DiscreteOperators discrete_operator_series(double lambda, double alpha, double tau, int N);

/// Number of steps n with n tau == t, or an error suggesting a usable tau.
int steps_for(double t, double tau);

}  // namespace dwave::forward

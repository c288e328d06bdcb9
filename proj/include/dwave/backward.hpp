#pragma once

// Recovery of (a, b) = (u(0), u_t(0)) from u(T1) = g1 and u(T2) = g2.
//
// Per mode the forward map is the 2x2 matrix
//   G = [ F1  Fb1 ]    F_i = E_{a,1}(-l T_i^a),  Fb_i = T_i E_{a,2}(-l T_i^a)
//       [ F2  Fb2 ]    (or their semidiscrete / CQ counterparts)
// with determinant psi = F1 Fb2 - Fb1 F2. The quasi-boundary-value scheme
// solves (gamma I + G)(a, b) = (g1, g2) with I = diag(-1, +1); its
// determinant is psi_tilde = psi - gamma^2 + gamma (F1 - Fb2).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dwave/fem.hpp"
#include "dwave/forward.hpp"

namespace dwave::backward {

using fem::Vec;

/// Entries of G for one mode.
struct ModeMatrix {
  double F1 = 0.0;
  double Fb1 = 0.0;
  double F2 = 0.0;
  double Fb2 = 0.0;

  double det() const noexcept { return F1 * Fb2 - Fb1 * F2; }
  /// det(gamma I + G), I = diag(-1, 1)
  double det_regularized(double gamma) const noexcept { return (F1 - gamma) * (Fb2 + gamma) - Fb1 * F2; }
  /// Solves (gamma I + G)(a, b) = (g1, g2); returns false if the determinant
  /// is below `threshold` in magnitude.
  bool solve(double gamma, double g1, double g2, double& a, double& b, double threshold = 1e-300) const;
};

ModeMatrix exact_mode_matrix(double T1, double T2, double lambda, double alpha);
ModeMatrix cq_mode_matrix(int N1, int N2, double tau, double lambda, double alpha);

double psi(double T1, double T2, double lambda, double alpha);
double psi_tilde(double T1, double T2, double lambda, double alpha, double gamma);

enum class Representation { Modal, Nodal };

struct ObservationPair {
  Vec g1;
  Vec g2;
  double T1 = 1.0;
  double T2 = 1.2;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
  Representation rep = Representation::Modal;

  void validate() const;
};

struct RegularizationConfig {
  double gamma = 0.0;
  double krylov_tol = 1e-8;
  int krylov_max_iter = 500;
  /// Treat any mode with psi_tilde >= 0 as a failure.
  bool require_negative_psi_tilde = false;
  /// Modes with |psi_tilde| below this are a hard error.
  double singular_threshold = 1e-300;
};

struct Diagnostics {
  double residual1 = 0.0;  // ||-gamma a + U(T1) - g1||
  double residual2 = 0.0;  // || gamma b + U(T2) - g2||
  double min_abs_psi_tilde = 0.0;
  int min_abs_psi_tilde_mode = -1;
  int positive_psi_tilde_modes = 0;
  int iterations = 0;
  std::string krylov_status;
  std::string path;

  std::string to_json() const;
};

struct ReconstructionResult {
  Vec a;
  Vec b;
  Diagnostics diagnostics;
  std::optional<forward::Trajectory> trajectory;
};

/// Unregularized inverse with the exact ML operators on the given
/// eigenvalues. Throws Singular naming the mode if |psi| < 1e-300.
std::pair<Vec, Vec> invert_exact_modal(const ObservationPair& obs, const std::vector<double>& lambdas, double alpha);

/// Regularized modal inverse with the exact-in-time ML operators. Passing
/// continuous eigenvalues gives the continuous scheme, FEM eigenvalues the
/// semidiscrete one.
ReconstructionResult invert_regularized_modal(const ObservationPair& obs, const std::vector<double>& lambdas,
                                              double alpha, const RegularizationConfig& cfg);

/// Fully discrete inverse, per mode with the CQ operators (1D modal path).
ReconstructionResult invert_fully_discrete_modal(const ObservationPair& obs, const std::vector<double>& lambdas,
                                                 double alpha, double tau, const RegularizationConfig& cfg);

/// Fully discrete inverse on nodal data, any dimension: matrix-free BiCGStab
/// on (gamma I + G_{h,tau}), one CQ run to T2 per application. If
/// `with_trajectory`, a final forward run from the result is attached.
ReconstructionResult invert_fully_discrete_krylov(const ObservationPair& obs, const fem::FemSystem& sys, double alpha,
                                                  double tau, const RegularizationConfig& cfg,
                                                  bool with_trajectory = false);

enum class Method { Auto, Modal, Krylov };

/// Nodal entry point. Auto uses the modal path in 1D and Krylov in 2D; the
/// modal result is mapped back to nodal values.
ReconstructionResult invert_fully_discrete(const ObservationPair& obs, const fem::FemSystem& sys, double alpha,
                                           double tau, const RegularizationConfig& cfg, Method method = Method::Auto);

}  // namespace dwave::backward

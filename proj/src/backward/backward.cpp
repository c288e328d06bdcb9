#include <cmath>
#include <limits>
#include "json.hpp"
#include <string>

#include "dwave/backward.hpp"
#include "dwave/error.hpp"
#include "dwave/specfun.hpp"
#include "dwave/spectral.hpp"

namespace dwave::backward {

namespace {

double norm2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void check_times(double T1, double T2) {
  require(T1 > 0.0 && T1 < T2, "observation times must satisfy 0 < T1 < T2");
}

// Shared per-mode driver for the modal paths.
ReconstructionResult solve_modes(const ObservationPair& obs, const std::vector<ModeMatrix>& G,
                                 const RegularizationConfig& cfg, const char* path) {
  const std::size_t J = G.size();
  require(obs.g1.size() == J && obs.g2.size() == J, "modal inverse: observation length differs from mode count");
  ReconstructionResult res;
  res.a.resize(J);
  res.b.resize(J);
  Diagnostics& d = res.diagnostics;
  d.path = path;
  d.min_abs_psi_tilde = std::numeric_limits<double>::infinity();
  Vec r1(J), r2(J);
  for (std::size_t j = 0; j < J; ++j) {
    const ModeMatrix& m = G[j];
    const double pt = m.det_regularized(cfg.gamma);
    if (std::abs(pt) < d.min_abs_psi_tilde) {
      d.min_abs_psi_tilde = std::abs(pt);
      d.min_abs_psi_tilde_mode = static_cast<int>(j) + 1;
    }
    if (pt >= 0.0) ++d.positive_psi_tilde_modes;
    if (!m.solve(cfg.gamma, obs.g1[j], obs.g2[j], res.a[j], res.b[j], cfg.singular_threshold))
      fail(ErrorCode::Singular, std::string(path) + ": |psi_tilde| = " + std::to_string(std::abs(pt)) +
                                    " below threshold at mode " + std::to_string(j + 1) +
                                    "; larger T1, T2 or gamma may help");
    r1[j] = (m.F1 - cfg.gamma) * res.a[j] + m.Fb1 * res.b[j] - obs.g1[j];
    r2[j] = m.F2 * res.a[j] + (m.Fb2 + cfg.gamma) * res.b[j] - obs.g2[j];
  }
  if (cfg.require_negative_psi_tilde && d.positive_psi_tilde_modes > 0)
    fail(ErrorCode::Singular, std::string(path) + ": psi_tilde >= 0 on " + std::to_string(d.positive_psi_tilde_modes) +
                                  " mode(s); the sign condition needs larger T1, T2");
  d.residual1 = norm2(r1);
  d.residual2 = norm2(r2);
  d.krylov_status = "none";
  return res;
}

}  // namespace

bool ModeMatrix::solve(double gamma, double g1, double g2, double& a, double& b, double threshold) const {
  const double d = det_regularized(gamma);
  if (!(std::abs(d) >= threshold)) return false;
  a = ((Fb2 + gamma) * g1 - Fb1 * g2) / d;
  b = (-F2 * g1 + (F1 - gamma) * g2) / d;
  return true;
}

ModeMatrix exact_mode_matrix(double T1, double T2, double lambda, double alpha) {
  check_times(T1, T2);
  const auto [F1, Fb1] = forward::exact_operators(lambda, alpha, T1);
  const auto [F2, Fb2] = forward::exact_operators(lambda, alpha, T2);
  return {F1, Fb1, F2, Fb2};
}

ModeMatrix cq_mode_matrix(int N1, int N2, double tau, double lambda, double alpha) {
  require(0 < N1 && N1 < N2, "cq_mode_matrix: need 0 < N1 < N2");
  const forward::DiscreteOperators d = forward::discrete_operator_series(lambda, alpha, tau, N2);
  return {d.F[static_cast<std::size_t>(N1)], d.Fbar[static_cast<std::size_t>(N1)], d.F[static_cast<std::size_t>(N2)],
          d.Fbar[static_cast<std::size_t>(N2)]};
}

double psi(double T1, double T2, double lambda, double alpha) {
  require(T1 > 0.0 && T1 <= T2, "psi: need 0 < T1 <= T2");
  if (T1 == T2) return 0.0;
  return exact_mode_matrix(T1, T2, lambda, alpha).det();
}

double psi_tilde(double T1, double T2, double lambda, double alpha, double gamma) {
  require(gamma >= 0.0, "psi_tilde: gamma must be non-negative");
  require(T1 > 0.0 && T1 <= T2, "psi_tilde: need 0 < T1 <= T2");
  if (T1 == T2) return -gamma * gamma;
  return exact_mode_matrix(T1, T2, lambda, alpha).det_regularized(gamma);
}

void ObservationPair::validate() const {
  check_times(T1, T2);
  require(g1.size() == g2.size(), "observations g1 and g2 differ in length");
  require(noise_level >= 0.0, "noise level must be non-negative");
}

std::string Diagnostics::to_json() const {
  nlohmann::ordered_json j;
  j["path"] = path;
  j["residual1"] = residual1;
  j["residual2"] = residual2;
  if (std::isfinite(min_abs_psi_tilde)) {
    j["min_abs_psi_tilde"] = min_abs_psi_tilde;
    j["min_abs_psi_tilde_mode"] = min_abs_psi_tilde_mode;
    j["positive_psi_tilde_modes"] = positive_psi_tilde_modes;
  }
  j["iterations"] = iterations;
  j["krylov_status"] = krylov_status;
  return j.dump();
}

std::pair<Vec, Vec> invert_exact_modal(const ObservationPair& obs, const std::vector<double>& lambdas, double alpha) {
  obs.validate();
  require(obs.g1.size() == lambdas.size(), "invert_exact_modal: observation length differs from mode count");
  Vec a(lambdas.size()), b(lambdas.size());
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    const ModeMatrix m = exact_mode_matrix(obs.T1, obs.T2, lambdas[j], alpha);
    if (!m.solve(0.0, obs.g1[j], obs.g2[j], a[j], b[j]))
      fail(ErrorCode::Singular, "invert_exact_modal: psi vanishes at mode " + std::to_string(j + 1) +
                                    " (uniqueness fails for these T1, T2)");
  }
  return {a, b};
}

ReconstructionResult invert_regularized_modal(const ObservationPair& obs, const std::vector<double>& lambdas,
                                              double alpha, const RegularizationConfig& cfg) {
  obs.validate();
  require(cfg.gamma >= 0.0, "gamma must be non-negative");
  std::vector<ModeMatrix> G;
  G.reserve(lambdas.size());
  for (double l : lambdas) G.push_back(exact_mode_matrix(obs.T1, obs.T2, l, alpha));
  return solve_modes(obs, G, cfg, "modal");
}

ReconstructionResult invert_fully_discrete_modal(const ObservationPair& obs, const std::vector<double>& lambdas,
                                                 double alpha, double tau, const RegularizationConfig& cfg) {
  obs.validate();
  require(cfg.gamma >= 0.0, "gamma must be non-negative");
  const int N1 = forward::steps_for(obs.T1, tau);
  const int N2 = forward::steps_for(obs.T2, tau);
  std::vector<ModeMatrix> G;
  G.reserve(lambdas.size());
  for (double l : lambdas) G.push_back(cq_mode_matrix(N1, N2, tau, l, alpha));
  return solve_modes(obs, G, cfg, "cq_modal");
}

ReconstructionResult invert_fully_discrete_krylov(const ObservationPair& obs, const fem::FemSystem& sys, double alpha,
                                                  double tau, const RegularizationConfig& cfg, bool with_trajectory) {
  obs.validate();
  require(cfg.gamma >= 0.0, "gamma must be non-negative");
  const std::size_t n = sys.dof_count();
  require(obs.g1.size() == n, "invert_fully_discrete: observation length differs from dof count");
  const int N1 = forward::steps_for(obs.T1, tau);
  const int N2 = forward::steps_for(obs.T2, tau);
  forward::CqFemOptions opt;
  opt.keep = {N1, N2};

  // (a, b) -> (-gamma a + U_N1, gamma b + U_N2)
  const fem::LinearOperator apply = [&](const Vec& x, Vec& y) {
    const Vec a(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    const Vec b(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
    const forward::Trajectory tr = forward::evolve_cq_fem(sys, a, b, alpha, tau, N2, {}, opt);
    y.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = -cfg.gamma * a[i] + tr.states[0][i];
      y[n + i] = cfg.gamma * b[i] + tr.states[1][i];
    }
  };
  Vec rhs(obs.g1);
  rhs.insert(rhs.end(), obs.g2.begin(), obs.g2.end());
  const fem::SolveReport rep = fem::bicgstab(apply, rhs, cfg.krylov_tol, cfg.krylov_max_iter);

  ReconstructionResult res;
  res.a.assign(rep.x.begin(), rep.x.begin() + static_cast<std::ptrdiff_t>(n));
  res.b.assign(rep.x.begin() + static_cast<std::ptrdiff_t>(n), rep.x.end());
  Diagnostics& d = res.diagnostics;
  d.path = "krylov";
  d.iterations = rep.iterations;
  d.krylov_status = fem::to_string(rep.status);
  d.min_abs_psi_tilde = std::numeric_limits<double>::infinity();
  Vec y;
  apply(rep.x, y);
  Vec r1(n), r2(n);
  for (std::size_t i = 0; i < n; ++i) {
    r1[i] = y[i] - obs.g1[i];
    r2[i] = y[n + i] - obs.g2[i];
  }
  d.residual1 = sys.l2_norm(r1);
  d.residual2 = sys.l2_norm(r2);
  if (rep.status != fem::SolveStatus::Converged)
    fail(rep.status == fem::SolveStatus::Breakdown ? ErrorCode::Breakdown : ErrorCode::NotConverged,
         "invert_fully_discrete: BiCGStab " + fem::to_string(rep.status) + " after " +
             std::to_string(rep.iterations) + " iterations, relative residual " +
             std::to_string(rep.relative_residual));
  if (with_trajectory) res.trajectory = forward::evolve_cq_fem(sys, res.a, res.b, alpha, tau, N2);
  return res;
}

ReconstructionResult invert_fully_discrete(const ObservationPair& obs, const fem::FemSystem& sys, double alpha,
                                           double tau, const RegularizationConfig& cfg, Method method) {
  if (method == Method::Krylov || (method == Method::Auto && sys.dim() == 2))
    return invert_fully_discrete_krylov(obs, sys, alpha, tau, cfg);
  require(sys.dim() == 1, "invert_fully_discrete: the modal path is 1D only");
  require(obs.rep == Representation::Nodal, "invert_fully_discrete: expects nodal observations");
  const auto basis = spectral::EigenBasis::fem_1d(sys.h());
  ObservationPair modal = obs;
  modal.rep = Representation::Modal;
  modal.g1 = spectral::project_nodal(obs.g1, basis).coeffs;
  modal.g2 = spectral::project_nodal(obs.g2, basis).coeffs;
  ReconstructionResult res = invert_fully_discrete_modal(modal, basis->eigenvalues(), alpha, tau, cfg);
  res.a = spectral::reconstruct_nodal(spectral::ModalField(basis, res.a));
  res.b = spectral::reconstruct_nodal(spectral::ModalField(basis, res.b));
  return res;
}

}  // namespace dwave::backward

#include <cmath>
#include <string>

#include "dwave/error.hpp"
#include "dwave/forward.hpp"
#include "dwave/specfun.hpp"

namespace dwave::forward {

CqWeights::CqWeights(double alpha, int n_max) : alpha_(alpha) {
  require(alpha > 0.0 && alpha <= 2.0, "CqWeights: alpha must lie in (0, 2]");
  require(n_max >= 0, "CqWeights: n_max must be non-negative");
  b_.resize(static_cast<std::size_t>(n_max) + 1);
  b_[0] = 1.0;
  for (int j = 1; j <= n_max; ++j)
    b_[static_cast<std::size_t>(j)] = b_[static_cast<std::size_t>(j - 1)] * (j - 1 - alpha) / j;
}

std::pair<double, double> exact_operators(double lambda, double alpha, double t) {
  require(t >= 0.0, "exact_operators: t must be non-negative");
  if (t == 0.0) return {1.0, 0.0};
  const double z = -lambda * std::pow(t, alpha);
  return {specfun::ml(alpha, 1.0, z), t * specfun::ml(alpha, 2.0, z)};
}

spectral::ModalField evolve_exact_modal(const spectral::ModalField& a, const spectral::ModalField& b, double alpha,
                                        double t) {
  require(a.basis == b.basis || (a.basis && b.basis && a.basis->eigenvalues() == b.basis->eigenvalues()),
          "evolve_exact_modal: a and b live on different bases");
  spectral::ModalField u = spectral::ModalField::zeros(a.basis);
  for (std::size_t j = 0; j < u.coeffs.size(); ++j) {
    const auto [F, Fb] = exact_operators(a.basis->eigenvalues()[j], alpha, t);
    u.coeffs[j] = F * a.coeffs[j] + Fb * b.coeffs[j];
  }
  return u;
}

Trajectory evolve_cq_modal(const std::vector<double>& lambdas, const Vec& a, const Vec& b, double alpha, double tau,
                           int N, const std::vector<Vec>* f_modal) {
  const std::size_t J = lambdas.size();
  require(a.size() == J && b.size() == J, "evolve_cq_modal: coefficient count differs from eigenvalue count");
  require(tau > 0.0 && N >= 1, "evolve_cq_modal: need tau > 0 and N >= 1");
  require(f_modal == nullptr || f_modal->size() == static_cast<std::size_t>(N) + 1,
          "evolve_cq_modal: load series must cover t_0..t_N");
  const CqWeights w(alpha, N);
  const double ta = std::pow(tau, -alpha);

  Trajectory tr;
  tr.scheme = Scheme::FullyDiscreteCQ;
  tr.times.resize(static_cast<std::size_t>(N) + 1);
  tr.states.assign(static_cast<std::size_t>(N) + 1, Vec(J, 0.0));
  for (int n = 0; n <= N; ++n) tr.times[static_cast<std::size_t>(n)] = n * tau;
  tr.states[0] = a;

  std::vector<double> W(static_cast<std::size_t>(N) + 1);
  for (std::size_t m = 0; m < J; ++m) {
    const double lam = lambdas[m];
    W[0] = 0.0;
    for (int n = 1; n <= N; ++n) {
      const double tn = n * tau;
      double hist = 0.0;
      for (int j = 1; j <= n; ++j) hist += w[j] * W[static_cast<std::size_t>(n - j)];
      const double f = f_modal ? (*f_modal)[static_cast<std::size_t>(n)][m] : 0.0;
      const double drift = a[m] + tn * b[m];
      W[static_cast<std::size_t>(n)] = (f - lam * drift - ta * hist) / (ta + lam);
      tr.states[static_cast<std::size_t>(n)][m] = W[static_cast<std::size_t>(n)] + drift;
    }
  }
  return tr;
}

Trajectory evolve_cq_fem(const fem::FemSystem& sys, const Vec& a, const Vec& b, double alpha, double tau, int N,
                         const std::function<Vec(int)>& load, const CqFemOptions& opt) {
  const std::size_t n_dof = sys.dof_count();
  require(a.size() == n_dof && b.size() == n_dof, "evolve_cq_fem: data length differs from dof count");
  require(tau > 0.0 && N >= 1, "evolve_cq_fem: need tau > 0 and N >= 1");
  const CqWeights w(alpha, N);
  const double ta = std::pow(tau, -alpha);
  const fem::CsrMatrix& M = sys.mass();
  const fem::CsrMatrix& K = sys.stiffness();
  const fem::CsrMatrix A = opt.mass_only ? fem::combine(ta, M, 0.0, K) : fem::combine(ta, M, 1.0, K);
  Vec inv_diag = A.diagonal();
  for (double& d : inv_diag) d = 1.0 / d;
  const fem::LinearOperator apply = [&](const Vec& x, Vec& y) { A.multiply(x, y); };

  std::vector<bool> keep(static_cast<std::size_t>(N) + 1, opt.keep.empty());
  for (int k : opt.keep)
    if (k >= 0 && k <= N) keep[static_cast<std::size_t>(k)] = true;

  Trajectory tr;
  tr.scheme = Scheme::FullyDiscreteCQ;
  if (keep[0]) {
    tr.times.push_back(0.0);
    tr.states.push_back(a);
  }

  std::vector<Vec> W(static_cast<std::size_t>(N) + 1, Vec(n_dof, 0.0));
  const Vec Ka = opt.mass_only ? Vec(n_dof, 0.0) : K * a;
  const Vec Kb = opt.mass_only ? Vec(n_dof, 0.0) : K * b;
  Vec hist(n_dof), rhs(n_dof), Mh(n_dof);
  for (int n = 1; n <= N; ++n) {
    const double tn = n * tau;
    std::fill(hist.begin(), hist.end(), 0.0);
    for (int j = 1; j < n; ++j) {  // W_0 = 0
      const double bj = w[j];
      const Vec& Wp = W[static_cast<std::size_t>(n - j)];
      for (std::size_t i = 0; i < n_dof; ++i) hist[i] += bj * Wp[i];
    }
    M.multiply(hist, Mh);
    Vec f;
    if (load) {
      f = load(n);
      require(f.size() == n_dof, "evolve_cq_fem: load vector has the wrong length");
    }
    for (std::size_t i = 0; i < n_dof; ++i) rhs[i] = (f.empty() ? 0.0 : f[i]) - Ka[i] - tn * Kb[i] - ta * Mh[i];
    const fem::SolveReport r = fem::cg(apply, rhs, inv_diag, opt.cg_tol, opt.cg_max_iter, W[static_cast<std::size_t>(n - 1)]);
    if (r.status != fem::SolveStatus::Converged)
      fail(ErrorCode::NotConverged, "evolve_cq_fem: CG " + fem::to_string(r.status) + " at step " + std::to_string(n) +
                                        " (relative residual " + std::to_string(r.relative_residual) + ")");
    W[static_cast<std::size_t>(n)] = r.x;
    if (keep[static_cast<std::size_t>(n)]) {
      Vec u(n_dof);
      for (std::size_t i = 0; i < n_dof; ++i) u[i] = r.x[i] + a[i] + tn * b[i];
      tr.times.push_back(tn);
      tr.states.push_back(std::move(u));
    }
  }
  return tr;
}

DiscreteOperators discrete_operator_series(double lambda, double alpha, double tau, int N) {
  require(tau > 0.0 && N >= 0, "discrete_operator_series: need tau > 0 and N >= 0");
  const CqWeights w(alpha, N);
  const double ta = std::pow(tau, -alpha);
  DiscreteOperators d;
  d.F.assign(static_cast<std::size_t>(N) + 1, 0.0);
  d.Fbar.assign(static_cast<std::size_t>(N) + 1, 0.0);
  d.F[0] = 1.0;
  // deviations from the drifts 1 and t_n
  std::vector<double> wa(static_cast<std::size_t>(N) + 1, 0.0), wb(static_cast<std::size_t>(N) + 1, 0.0);
  for (int n = 1; n <= N; ++n) {
    double ha = 0.0, hb = 0.0;
    for (int j = 1; j < n; ++j) {
      ha += w[j] * wa[static_cast<std::size_t>(n - j)];
      hb += w[j] * wb[static_cast<std::size_t>(n - j)];
    }
    const double tn = n * tau;
    wa[static_cast<std::size_t>(n)] = (-lambda - ta * ha) / (ta + lambda);
    wb[static_cast<std::size_t>(n)] = (-lambda * tn - ta * hb) / (ta + lambda);
    d.F[static_cast<std::size_t>(n)] = wa[static_cast<std::size_t>(n)] + 1.0;
    d.Fbar[static_cast<std::size_t>(n)] = wb[static_cast<std::size_t>(n)] + tn;
  }
  return d;
}

std::pair<double, double> discrete_operator_f(double lambda, double alpha, double tau, int n) {
  const DiscreteOperators d = discrete_operator_series(lambda, alpha, tau, n);
  return {d.F.back(), d.Fbar.back()};
}

int steps_for(double t, double tau) {
  require(tau > 0.0, "steps_for: tau must be positive");
  const double r = t / tau;
  const long n = std::lround(r);
  if (std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r)) {
    fail(ErrorCode::InvalidArgument, "t = " + std::to_string(t) + " is not a multiple of tau = " + std::to_string(tau) +
                                         "; try tau = " + std::to_string(t / std::ceil(r)));
  }
  return static_cast<int>(n);
}

}  // namespace dwave::forward

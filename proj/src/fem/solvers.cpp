#include <cmath>
#include <limits>

#include "dwave/error.hpp"
#include "dwave/fem.hpp"

namespace dwave::fem {

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Breakdown: return "breakdown";
  }
  return "unknown";
}

SolveReport cg(const LinearOperator& apply, const Vec& rhs, const Vec& inv_diag, double tol, int max_iter,
               const Vec& x0) {
  const std::size_t n = rhs.size();
  require(inv_diag.empty() || inv_diag.size() == n, "cg: preconditioner size mismatch");
  require(x0.empty() || x0.size() == n, "cg: initial guess size mismatch");
  SolveReport rep;
  rep.x = x0.empty() ? Vec(n, 0.0) : x0;
  const double bnorm = norm(rhs);
  if (bnorm == 0.0) {
    rep.x.assign(n, 0.0);
    return rep;
  }
  Vec r(n), ax(n), z(n), p(n), ap(n);
  apply(rep.x, ax);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
  auto precond = [&](const Vec& in, Vec& out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = inv_diag.empty() ? in[i] : inv_diag[i] * in[i];
  };
  double rn = norm(r);
  if (rn <= tol * bnorm) {
    rep.relative_residual = rn / bnorm;
    return rep;
  }
  precond(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      rep.status = SolveStatus::Breakdown;
      rep.iterations = it;
      rep.relative_residual = rn / bnorm;
      return rep;
    }
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      rep.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    rn = norm(r);
    rep.iterations = it;
    if (rn <= tol * bnorm) {
      rep.relative_residual = rn / bnorm;
      return rep;
    }
    precond(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.status = SolveStatus::MaxIterations;
  rep.relative_residual = rn / bnorm;
  return rep;
}

SolveReport cg(const CsrMatrix& A, const Vec& rhs, double tol, int max_iter, const Vec& x0) {
  Vec inv = A.diagonal();
  for (double& d : inv) d = 1.0 / d;
  return cg([&](const Vec& x, Vec& y) { A.multiply(x, y); }, rhs, inv, tol, max_iter, x0);
}

SolveReport bicgstab(const LinearOperator& apply, const Vec& rhs, double tol, int max_iter) {
  const std::size_t n = rhs.size();
  SolveReport rep;
  rep.x.assign(n, 0.0);
  const double bnorm = norm(rhs);
  if (bnorm == 0.0) return rep;

  // x0 = 0, so r0 = rhs
  Vec r = rhs, r0 = rhs, p(n, 0.0), v(n, 0.0), s(n), t(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double rn = bnorm;
  for (int it = 1; it <= max_iter; ++it) {
    const double rho_new = dot(r0, r);
    if (std::abs(rho_new) <= tiny || std::abs(rho_new) < 1e-300 * bnorm * bnorm) {
      rep.status = SolveStatus::Breakdown;
      break;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    apply(p, v);
    const double r0v = dot(r0, v);
    if (std::abs(r0v) <= tiny) {
      rep.status = SolveStatus::Breakdown;
      break;
    }
    alpha = rho / r0v;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    rep.iterations = it;
    const double sn = norm(s);
    if (sn <= tol * bnorm) {
      for (std::size_t i = 0; i < n; ++i) rep.x[i] += alpha * p[i];
      rep.relative_residual = sn / bnorm;
      rep.status = SolveStatus::Converged;
      return rep;
    }
    apply(s, t);
    const double tt = dot(t, t);
    if (tt <= tiny) {
      rep.status = SolveStatus::Breakdown;
      break;
    }
    omega = dot(t, s) / tt;
    for (std::size_t i = 0; i < n; ++i) {
      rep.x[i] += alpha * p[i] + omega * s[i];
      r[i] = s[i] - omega * t[i];
    }
    rn = norm(r);
    if (rn <= tol * bnorm) {
      rep.relative_residual = rn / bnorm;
      rep.status = SolveStatus::Converged;
      return rep;
    }
    if (omega == 0.0) {
      rep.status = SolveStatus::Breakdown;
      break;
    }
    rep.status = SolveStatus::MaxIterations;
  }
  rep.relative_residual = rn / bnorm;
  if (rep.iterations == 0 && rep.status == SolveStatus::Converged) rep.status = SolveStatus::MaxIterations;
  return rep;
}

Vec l2_project(const Function1D& f, const FemSystem& sys, const std::vector<double>& breakpoints) {
  const SolveReport r = cg(sys.mass(), sys.load(f, breakpoints), 1e-14, 10 * static_cast<int>(sys.dof_count()) + 100);
  if (r.status != SolveStatus::Converged) fail(ErrorCode::NotConverged, "l2_project: mass solve did not converge");
  return r.x;
}

Vec l2_project(const Function2D& f, const FemSystem& sys) {
  const SolveReport r = cg(sys.mass(), sys.load(f), 1e-14, 10 * static_cast<int>(sys.dof_count()) + 100);
  if (r.status != SolveStatus::Converged) fail(ErrorCode::NotConverged, "l2_project: mass solve did not converge");
  return r.x;
}

Vec ritz_project(const Function1D& minus_laplacian, const FemSystem& sys) {
  const SolveReport r =
      cg(sys.stiffness(), sys.load(minus_laplacian), 1e-14, 10 * static_cast<int>(sys.dof_count()) + 100);
  if (r.status != SolveStatus::Converged) fail(ErrorCode::NotConverged, "ritz_project: stiffness solve did not converge");
  return r.x;
}

Vec ritz_project(const Function2D& minus_laplacian, const FemSystem& sys) {
  const SolveReport r =
      cg(sys.stiffness(), sys.load(minus_laplacian), 1e-14, 10 * static_cast<int>(sys.dof_count()) + 100);
  if (r.status != SolveStatus::Converged) fail(ErrorCode::NotConverged, "ritz_project: stiffness solve did not converge");
  return r.x;
}

Vec interpolate(const Function1D& f, const FemSystem& sys) {
  require(sys.dim() == 1, "interpolate: 1D function on a 2D system");
  Vec v;
  for (const Point& p : sys.nodes()) v.push_back(f(p.x));
  return v;
}

Vec interpolate(const Function2D& f, const FemSystem& sys) {
  require(sys.dim() == 2, "interpolate: 2D function on a 1D system");
  Vec v;
  for (const Point& p : sys.nodes()) v.push_back(f(p.x, p.y));
  return v;
}

}  // namespace dwave::fem

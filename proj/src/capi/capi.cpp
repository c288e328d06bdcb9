#include <cmath>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "dwave/backward.hpp"
#include "dwave/config.hpp"
#include "dwave/dwave.h"
#include "dwave/error.hpp"
#include "dwave/fem.hpp"
#include "dwave/forward.hpp"
#include "dwave/harness.hpp"
#include "dwave/specfun.hpp"
#include "dwave/spectral.hpp"

using namespace dwave;

struct dwave_fem {
  fem::FemSystem sys;
  spectral::BasisPtr basis;  // 1D only
};

struct dwave_trajectory {
  forward::Trajectory tr;
};

struct dwave_reconstruction {
  backward::ReconstructionResult res;
  std::string diagnostics;
};

struct dwave_study {
  harness::ConvergenceReport rep;
};

namespace {

thread_local std::string g_last_error;

dwave_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return DWAVE_ERR_INVALID_ARGUMENT;
    case ErrorCode::Domain: return DWAVE_ERR_DOMAIN;
    case ErrorCode::NotConverged: return DWAVE_ERR_NOT_CONVERGED;
    case ErrorCode::Breakdown: return DWAVE_ERR_BREAKDOWN;
    case ErrorCode::Singular: return DWAVE_ERR_SINGULAR;
    case ErrorCode::Io: return DWAVE_ERR_IO;
  }
  return DWAVE_ERR_INTERNAL;
}

template <class F>
dwave_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return DWAVE_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return DWAVE_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

fem::Vec vec(const double* p, std::size_t n) { return fem::Vec(p, p + n); }

const spectral::BasisPtr& basis_1d(const dwave_fem* f) {
  if (!f->basis) fail(ErrorCode::InvalidArgument, "modal representation is available in 1D only");
  return f->basis;
}

forward::Trajectory semidiscrete(const dwave_fem* f, const fem::Vec& a, const fem::Vec& b, double alpha,
                                 const std::vector<double>& times) {
  const auto& B = basis_1d(f);
  const spectral::ModalField am = spectral::project_nodal(a, B), bm = spectral::project_nodal(b, B);
  forward::Trajectory tr;
  tr.scheme = forward::Scheme::SemidiscreteModal;
  for (double t : times) {
    tr.times.push_back(t);
    tr.states.push_back(spectral::reconstruct_nodal(forward::evolve_exact_modal(am, bm, alpha, t)));
  }
  return tr;
}

}  // namespace

extern "C" {

const char* dwave_last_error(void) { return g_last_error.c_str(); }

const char* dwave_status_name(dwave_status s) {
  switch (s) {
    case DWAVE_OK: return "ok";
    case DWAVE_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case DWAVE_ERR_DOMAIN: return "domain";
    case DWAVE_ERR_NOT_CONVERGED: return "not_converged";
    case DWAVE_ERR_BREAKDOWN: return "breakdown";
    case DWAVE_ERR_SINGULAR: return "singular";
    case DWAVE_ERR_IO: return "io";
    case DWAVE_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* dwave_branch_name(int branch) {
  switch (branch) {
    case DWAVE_BRANCH_SERIES: return "series";
    case DWAVE_BRANCH_ASYMPTOTIC: return "asymptotic";
    case DWAVE_BRANCH_INTEGRAL: return "integral";
    case DWAVE_BRANCH_CLOSED: return "closed";
    default: return "auto";
  }
}

dwave_status dwave_ml(double alpha, double beta, double z, int branch, double* value, double* est_abs_error,
                      int* used_branch) {
  return guard([&] {
    need(value, "value");
    const specfun::MlParams p(alpha, beta);
    specfun::MlValue v;
    if (branch == DWAVE_BRANCH_AUTO) {
      v = specfun::ml_eval(p, z);
    } else {
      require(branch >= DWAVE_BRANCH_SERIES && branch <= DWAVE_BRANCH_CLOSED, "unknown branch");
      v = specfun::ml_eval(p, z, static_cast<specfun::Branch>(branch));
    }
    *value = v.value;
    if (est_abs_error) *est_abs_error = v.est_abs_error;
    if (used_branch) *used_branch = static_cast<int>(v.branch);
  });
}

dwave_status dwave_psi_tilde(double T1, double T2, double lambda, double alpha, double gamma, double* out) {
  return guard([&] {
    need(out, "out");
    *out = backward::psi_tilde(T1, T2, lambda, alpha, gamma);
  });
}

dwave_status dwave_fem_create(int dim, double h, dwave_fem** out) {
  return guard([&] {
    need(out, "out");
    auto f = std::make_unique<dwave_fem>(dwave_fem{fem::FemSystem::assemble(dim, h), nullptr});
    if (dim == 1) f->basis = spectral::EigenBasis::fem_1d(h);
    *out = f.release();
  });
}

void dwave_fem_destroy(dwave_fem* fem) { delete fem; }
int dwave_fem_dim(const dwave_fem* fem) { return fem ? fem->sys.dim() : 0; }
double dwave_fem_h(const dwave_fem* fem) { return fem ? fem->sys.h() : 0.0; }
size_t dwave_fem_dof_count(const dwave_fem* fem) { return fem ? fem->sys.dof_count() : 0; }

dwave_status dwave_fem_node(const dwave_fem* fem, size_t i, double* x, double* y) {
  return guard([&] {
    need(fem, "fem");
    require(i < fem->sys.dof_count(), "node index out of range");
    if (x) *x = fem->sys.nodes()[i].x;
    if (y) *y = fem->sys.nodes()[i].y;
  });
}

dwave_status dwave_fem_export_matrix(const dwave_fem* fem, const char* which, const char* path) {
  return guard([&] {
    need(fem, "fem");
    need(which, "which");
    need(path, "path");
    const std::string w(which);
    require(w == "mass" || w == "stiffness", "matrix must be 'mass' or 'stiffness'");
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, std::string("cannot write '") + path + "'");
    (w == "mass" ? fem->sys.mass() : fem->sys.stiffness()).write_coordinate(out);
    if (!out) fail(ErrorCode::Io, std::string("write failed for '") + path + "'");
  });
}

dwave_status dwave_fem_project_preset(const dwave_fem* fem, const char* preset, const char* field, double* out) {
  return guard([&] {
    need(fem, "fem");
    need(preset, "preset");
    need(field, "field");
    need(out, "out");
    const harness::PresetData d = harness::preset_data(harness::example_from_string(preset));
    const std::string fld(field);
    require(fld == "a" || fld == "b", "field must be 'a' or 'b'");
    require(d.dim == fem->sys.dim(), std::string("preset '") + preset + "' is " + std::to_string(d.dim) + "D");
    const fem::Vec v = d.dim == 1 ? fem::l2_project(fld == "a" ? d.a1 : d.b1, fem->sys, d.breakpoints)
                                  : fem::l2_project(fld == "a" ? d.a2 : d.b2, fem->sys);
    std::copy(v.begin(), v.end(), out);
  });
}

dwave_status dwave_fem_to_modal(const dwave_fem* fem, const double* nodal, double* modal) {
  return guard([&] {
    need(fem, "fem");
    need(nodal, "nodal");
    need(modal, "modal");
    const auto c = spectral::project_nodal(vec(nodal, fem->sys.dof_count()), basis_1d(fem)).coeffs;
    std::copy(c.begin(), c.end(), modal);
  });
}

dwave_status dwave_fem_from_modal(const dwave_fem* fem, const double* modal, double* nodal) {
  return guard([&] {
    need(fem, "fem");
    need(nodal, "nodal");
    need(modal, "modal");
    const auto v =
        spectral::reconstruct_nodal(spectral::ModalField(basis_1d(fem), vec(modal, fem->sys.dof_count())));
    std::copy(v.begin(), v.end(), nodal);
  });
}

dwave_status dwave_fem_eigenvalue(const dwave_fem* fem, size_t j, double* lambda) {
  return guard([&] {
    need(fem, "fem");
    need(lambda, "lambda");
    require(j < fem->sys.dof_count(), "mode index out of range");
    *lambda = basis_1d(fem)->lambda(static_cast<int>(j));
  });
}

dwave_status dwave_fem_write_modal_csv(const dwave_fem* fem, const double* nodal, const char* path) {
  return guard([&] {
    need(fem, "fem");
    need(nodal, "nodal");
    need(path, "path");
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, std::string("cannot write '") + path + "'");
    spectral::write_csv(out, spectral::project_nodal(vec(nodal, fem->sys.dof_count()), basis_1d(fem)));
  });
}

dwave_status dwave_forward(const dwave_fem* fem, const double* a, const double* b, double alpha, double tau, int N,
                           int scheme, dwave_trajectory** out) {
  return guard([&] {
    need(fem, "fem");
    need(a, "a");
    need(b, "b");
    need(out, "out");
    require(tau > 0.0 && N >= 0, "forward: need tau > 0 and N >= 0");
    const std::size_t n = fem->sys.dof_count();
    auto t = std::make_unique<dwave_trajectory>();
    if (scheme == DWAVE_SCHEME_CQ) {
      t->tr = forward::evolve_cq_fem(fem->sys, vec(a, n), vec(b, n), alpha, tau, N);
    } else {
      require(scheme == DWAVE_SCHEME_SEMIDISCRETE, "unknown scheme");
      std::vector<double> times;
      for (int k = 0; k <= N; ++k) times.push_back(k * tau);
      t->tr = semidiscrete(fem, vec(a, n), vec(b, n), alpha, times);
    }
    *out = t.release();
  });
}

void dwave_trajectory_destroy(dwave_trajectory* tr) { delete tr; }
size_t dwave_trajectory_count(const dwave_trajectory* tr) { return tr ? tr->tr.states.size() : 0; }
size_t dwave_trajectory_size(const dwave_trajectory* tr) {
  return tr && !tr->tr.states.empty() ? tr->tr.states.front().size() : 0;
}
double dwave_trajectory_time(const dwave_trajectory* tr, size_t k) {
  return tr && k < tr->tr.times.size() ? tr->tr.times[k] : std::nan("");
}
const double* dwave_trajectory_state(const dwave_trajectory* tr, size_t k) {
  return tr && k < tr->tr.states.size() ? tr->tr.states[k].data() : nullptr;
}

dwave_status dwave_trajectory_write_csv(const dwave_trajectory* tr, const dwave_fem* fem, const char* path, int stride,
                                        int modal) {
  return guard([&] {
    need(tr, "trajectory");
    need(fem, "fem");
    need(path, "path");
    require(stride >= 1, "stride must be >= 1");
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, std::string("cannot write '") + path + "'");
    out.precision(17);
    out << "n,t,dof_or_mode,value\n";
    const std::size_t K = tr->tr.states.size();
    for (std::size_t k = 0; k < K; ++k) {
      if (k % static_cast<std::size_t>(stride) != 0 && k + 1 != K) continue;
      const fem::Vec v = modal ? spectral::project_nodal(tr->tr.states[k], basis_1d(fem)).coeffs : tr->tr.states[k];
      const double t = tr->tr.times[k];
      for (std::size_t i = 0; i < v.size(); ++i) out << k << ',' << t << ',' << (modal ? i + 1 : i) << ',' << v[i] << '\n';
    }
    if (!out) fail(ErrorCode::Io, std::string("write failed for '") + path + "'");
  });
}

dwave_status dwave_observe(const dwave_fem* fem, const double* a, const double* b, double alpha, double T1, double T2,
                           double tau, double delta, uint64_t seed, double* g1, double* g2) {
  return guard([&] {
    need(fem, "fem");
    need(a, "a");
    need(b, "b");
    need(g1, "g1");
    need(g2, "g2");
    require(0.0 < T1 && T1 < T2, "observe: need 0 < T1 < T2");
    require(delta >= 0.0, "observe: delta must be non-negative");
    const std::size_t n = fem->sys.dof_count();
    fem::Vec u1, u2;
    if (tau == 0.0) {
      const forward::Trajectory tr = semidiscrete(fem, vec(a, n), vec(b, n), alpha, {T1, T2});
      u1 = tr.states[0];
      u2 = tr.states[1];
    } else {
      const int N1 = forward::steps_for(T1, tau), N2 = forward::steps_for(T2, tau);
      forward::CqFemOptions opt;
      opt.keep = {N1, N2};
      const forward::Trajectory tr = forward::evolve_cq_fem(fem->sys, vec(a, n), vec(b, n), alpha, tau, N2, {}, opt);
      u1 = tr.states[0];
      u2 = tr.states[1];
    }
    auto sup = [](const fem::Vec& v) {
      double m = 0.0;
      for (double x : v) m = std::max(m, std::abs(x));
      return m;
    };
    const fem::Vec n1 = harness::add_noise(u1, sup(u1), delta, seed, 1);
    const fem::Vec n2 = harness::add_noise(u2, sup(u2), delta, seed, 2);
    std::copy(n1.begin(), n1.end(), g1);
    std::copy(n2.begin(), n2.end(), g2);
  });
}

void dwave_backward_options_init(dwave_backward_options* opt) {
  if (!opt) return;
  const backward::RegularizationConfig d;
  opt->gamma = 1e-3;
  opt->T1 = 1.0;
  opt->T2 = 1.2;
  opt->tau = 0.0;
  opt->method = 0;
  opt->krylov_tol = d.krylov_tol;
  opt->krylov_max_iter = d.krylov_max_iter;
  opt->require_negative_psi_tilde = 0;
}

dwave_status dwave_backward(const dwave_fem* fem, const double* g1, const double* g2, double alpha,
                            const dwave_backward_options* opt, dwave_reconstruction** out) {
  return guard([&] {
    need(fem, "fem");
    need(g1, "g1");
    need(g2, "g2");
    need(opt, "options");
    need(out, "out");
    const std::size_t n = fem->sys.dof_count();
    backward::ObservationPair obs;
    obs.g1 = vec(g1, n);
    obs.g2 = vec(g2, n);
    obs.T1 = opt->T1;
    obs.T2 = opt->T2;
    obs.rep = backward::Representation::Nodal;
    backward::RegularizationConfig rc;
    rc.gamma = opt->gamma;
    rc.krylov_tol = opt->krylov_tol;
    rc.krylov_max_iter = opt->krylov_max_iter;
    rc.require_negative_psi_tilde = opt->require_negative_psi_tilde != 0;
    require(opt->method >= 0 && opt->method <= 2, "unknown backward method");

    auto r = std::make_unique<dwave_reconstruction>();
    if (opt->tau == 0.0) {
      const auto& B = basis_1d(fem);
      backward::ObservationPair m = obs;
      m.rep = backward::Representation::Modal;
      m.g1 = spectral::project_nodal(obs.g1, B).coeffs;
      m.g2 = spectral::project_nodal(obs.g2, B).coeffs;
      r->res = backward::invert_regularized_modal(m, B->eigenvalues(), alpha, rc);
      r->res.a = spectral::reconstruct_nodal(spectral::ModalField(B, r->res.a));
      r->res.b = spectral::reconstruct_nodal(spectral::ModalField(B, r->res.b));
    } else {
      r->res = backward::invert_fully_discrete(obs, fem->sys, alpha, opt->tau, rc,
                                               static_cast<backward::Method>(opt->method));
    }
    r->diagnostics = r->res.diagnostics.to_json();
    *out = r.release();
  });
}

void dwave_reconstruction_destroy(dwave_reconstruction* rec) { delete rec; }
size_t dwave_reconstruction_size(const dwave_reconstruction* rec) { return rec ? rec->res.a.size() : 0; }
const double* dwave_reconstruction_a(const dwave_reconstruction* rec) { return rec ? rec->res.a.data() : nullptr; }
const double* dwave_reconstruction_b(const dwave_reconstruction* rec) { return rec ? rec->res.b.data() : nullptr; }
const char* dwave_reconstruction_diagnostics(const dwave_reconstruction* rec) {
  return rec ? rec->diagnostics.c_str() : "";
}

dwave_status dwave_study_run(const char* config_path, int workers, dwave_study** out) {
  return guard([&] {
    need(config_path, "config_path");
    need(out, "out");
    const harness::ExperimentConfig cfg =
        harness::ExperimentConfig::from_table(config::Table::parse_file(config_path));
    auto s = std::make_unique<dwave_study>();
    s->rep = harness::run_study(cfg, workers > 0 ? workers : harness::workers_from_env());
    *out = s.release();
  });
}

void dwave_study_destroy(dwave_study* st) { delete st; }

dwave_status dwave_study_write(const dwave_study* st, const char* out_dir) {
  return guard([&] {
    need(st, "study");
    need(out_dir, "out_dir");
    harness::write_outputs(out_dir, st->rep);
  });
}

size_t dwave_study_order_count(const dwave_study* st) { return st ? st->rep.orders.size() : 0; }

dwave_status dwave_study_order(const dwave_study* st, size_t k, double* alpha, const char** metric, double* order) {
  return guard([&] {
    need(st, "study");
    require(k < st->rep.orders.size(), "order index out of range");
    const harness::OrderFit& f = st->rep.orders[k];
    if (alpha) *alpha = f.alpha;
    if (metric) *metric = f.metric == "e_ini" ? "e_ini" : "e_t";
    if (order) *order = f.order;
  });
}

size_t dwave_study_failed_cells(const dwave_study* st) {
  if (!st) return 0;
  std::size_t n = 0;
  for (const harness::Row& r : st->rep.rows)
    if (r.status != "ok") ++n;
  return n / 2;
}

}  // extern "C"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <thread>

#include "dwave/error.hpp"
#include "dwave/forward.hpp"
#include "dwave/harness.hpp"
#include "dwave/spectral.hpp"

namespace dwave::harness {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Vec mass_solve(const fem::FemSystem& sys, const Vec& load) {
  const fem::SolveReport r = fem::cg(sys.mass(), load, 1e-14, 10 * static_cast<int>(sys.dof_count()) + 100);
  if (r.status != fem::SolveStatus::Converged) fail(ErrorCode::NotConverged, "mass solve did not converge");
  return r.x;
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Noise-free data on the reference discretization, kept as fine nodal
// vectors for u(T1), u(T2), u(t_eval).
struct Reference {
  std::shared_ptr<const fem::FemSystem> fine;
  Vec uT1, uT2, ut;
};

Reference build_reference_1d(const PresetData& d, double alpha, const ExperimentConfig& cfg) {
  Reference ref;
  ref.fine = std::make_shared<fem::FemSystem>(fem::FemSystem::assemble(1, cfg.h_ref));
  const auto basis = spectral::EigenBasis::fem_1d(ref.fine->h());
  const auto a = spectral::project_to_basis(d.a1, basis, d.breakpoints);
  const auto b = spectral::project_to_basis(d.b1, basis, d.breakpoints);
  ref.uT1 = spectral::reconstruct_nodal(forward::evolve_exact_modal(a, b, alpha, cfg.T1));
  ref.uT2 = spectral::reconstruct_nodal(forward::evolve_exact_modal(a, b, alpha, cfg.T2));
  ref.ut = spectral::reconstruct_nodal(forward::evolve_exact_modal(a, b, alpha, cfg.t_eval));
  return ref;
}

Reference build_reference_2d(const PresetData& d, double alpha, double tau, const ExperimentConfig& cfg) {
  Reference ref;
  ref.fine = std::make_shared<fem::FemSystem>(fem::FemSystem::assemble(2, cfg.h_ref));
  const fem::FemSystem& sys = *ref.fine;
  const Vec a = fem::l2_project(d.a2, sys);
  const Vec b = fem::l2_project(d.b2, sys);
  const int N1 = forward::steps_for(cfg.T1, tau);
  const int N2 = forward::steps_for(cfg.T2, tau);
  const int Nt = forward::steps_for(cfg.t_eval, tau);
  forward::CqFemOptions opt;
  opt.keep = {N1, N2, Nt};
  const forward::Trajectory tr = forward::evolve_cq_fem(sys, a, b, alpha, tau, N2, {}, opt);
  auto pick = [&](int n) {
    for (std::size_t k = 0; k < tr.times.size(); ++k)
      if (std::abs(tr.times[k] - n * tau) < 1e-12) return tr.states[k];
    fail(ErrorCode::InvalidArgument, "reference: missing time step");
  };
  ref.uT1 = pick(N1);
  ref.uT2 = pick(N2);
  ref.ut = pick(Nt);
  return ref;
}

class ReferenceCache {
 public:
  ReferenceCache(const ExperimentConfig& cfg, PresetData data) : cfg_(cfg), data_(std::move(data)) {}

  std::shared_ptr<const Reference> get(double alpha, double tau) {
    const auto key = std::make_pair(alpha, data_.dim == 1 ? 0.0 : tau);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto ref = std::make_shared<const Reference>(data_.dim == 1 ? build_reference_1d(data_, alpha, cfg_)
                                                                : build_reference_2d(data_, alpha, tau, cfg_));
    cache_[key] = ref;
    return ref;
  }

  const PresetData& data() const { return data_; }

 private:
  const ExperimentConfig& cfg_;
  PresetData data_;
  std::mutex mu_;
  std::map<std::pair<double, double>, std::shared_ptr<const Reference>> cache_;
};

struct CellResult {
  Params params;
  double e_ini = 0.0;
  double e_t = 0.0;
  std::string status = "ok";
  int iterations = 0;
};

CellResult run_cell_1d(const ExperimentConfig& cfg, ReferenceCache& cache, double alpha, const Params& p, double delta,
                       std::uint64_t seed) {
  CellResult out;
  out.params = p;
  const PresetData& d = cache.data();
  const auto ref = cache.get(alpha, p.tau);
  const fem::FemSystem sys = fem::FemSystem::assemble(1, p.h);
  const auto basis = spectral::EigenBasis::fem_1d(sys.h());

  const Vec Pa = fem::l2_project(d.a1, sys, d.breakpoints);
  const Vec Pb = fem::l2_project(d.b1, sys, d.breakpoints);
  const Vec PuT1 = mass_solve(sys, sys.load_from(*ref->fine, ref->uT1));
  const Vec PuT2 = mass_solve(sys, sys.load_from(*ref->fine, ref->uT2));
  const Vec Put = mass_solve(sys, sys.load_from(*ref->fine, ref->ut));

  backward::ObservationPair obs;
  obs.T1 = cfg.T1;
  obs.T2 = cfg.T2;
  obs.noise_level = delta;
  obs.seed = seed;
  obs.rep = backward::Representation::Modal;
  obs.g1 = spectral::project_nodal(add_noise(PuT1, max_abs(ref->uT1), delta, seed, 1), basis).coeffs;
  obs.g2 = spectral::project_nodal(add_noise(PuT2, max_abs(ref->uT2), delta, seed, 2), basis).coeffs;

  backward::RegularizationConfig rc;
  rc.gamma = p.gamma;
  const std::vector<double>& lam = basis->eigenvalues();
  backward::ReconstructionResult rec;
  Vec ut(lam.size());
  if (cfg.scheme == Scheme::Semidiscrete) {
    rec = backward::invert_regularized_modal(obs, lam, alpha, rc);
    for (std::size_t j = 0; j < lam.size(); ++j) {
      const auto [F, Fb] = forward::exact_operators(lam[j], alpha, cfg.t_eval);
      ut[j] = F * rec.a[j] + Fb * rec.b[j];
    }
  } else {
    rec = backward::invert_fully_discrete_modal(obs, lam, alpha, p.tau, rc);
    const int n = forward::steps_for(cfg.t_eval, p.tau);
    for (std::size_t j = 0; j < lam.size(); ++j) {
      const auto [F, Fb] = forward::discrete_operator_f(lam[j], alpha, p.tau, n);
      ut[j] = F * rec.a[j] + Fb * rec.b[j];
    }
  }
  const Vec Pa_m = spectral::project_nodal(Pa, basis).coeffs;
  const Vec Pb_m = spectral::project_nodal(Pb, basis).coeffs;
  const Vec Put_m = spectral::project_nodal(Put, basis).coeffs;
  out.e_ini = relative_error(rec.a, Pa_m) + relative_error(rec.b, Pb_m);
  out.e_t = relative_error(ut, Put_m);
  return out;
}

CellResult run_cell_2d(const ExperimentConfig& cfg, ReferenceCache& cache, double alpha, const Params& p, double delta,
                       std::uint64_t seed) {
  require(cfg.scheme == Scheme::FullyDiscrete, "2D studies support only the fully discrete scheme");
  CellResult out;
  out.params = p;
  const PresetData& d = cache.data();
  const auto ref = cache.get(alpha, p.tau);
  const fem::FemSystem sys = fem::FemSystem::assemble(2, p.h);
  require(ref->fine->intervals() % sys.intervals() == 0,
          "2D reference mesh must be nested in the working mesh (1/h_ref a multiple of 1/h)");

  const Vec Pa = fem::l2_project(d.a2, sys);
  const Vec Pb = fem::l2_project(d.b2, sys);
  const Vec PuT1 = mass_solve(sys, sys.load_from(*ref->fine, ref->uT1));
  const Vec PuT2 = mass_solve(sys, sys.load_from(*ref->fine, ref->uT2));
  const Vec Put = mass_solve(sys, sys.load_from(*ref->fine, ref->ut));

  backward::ObservationPair obs;
  obs.T1 = cfg.T1;
  obs.T2 = cfg.T2;
  obs.noise_level = delta;
  obs.seed = seed;
  obs.rep = backward::Representation::Nodal;
  obs.g1 = add_noise(PuT1, max_abs(ref->uT1), delta, seed, 1);
  obs.g2 = add_noise(PuT2, max_abs(ref->uT2), delta, seed, 2);

  backward::RegularizationConfig rc;
  rc.gamma = p.gamma;
  rc.krylov_tol = cfg.krylov_tol;
  rc.krylov_max_iter = cfg.krylov_max_iter;
  const backward::ReconstructionResult rec = backward::invert_fully_discrete_krylov(obs, sys, alpha, p.tau, rc);
  out.iterations = rec.diagnostics.iterations;
  const int n = forward::steps_for(cfg.t_eval, p.tau);
  forward::CqFemOptions opt;
  opt.keep = {n};
  const forward::Trajectory tr = forward::evolve_cq_fem(sys, rec.a, rec.b, alpha, p.tau, n, {}, opt);
  out.e_ini = relative_error(rec.a, Pa, &sys) + relative_error(rec.b, Pb, &sys);
  out.e_t = relative_error(tr.states.back(), Put, &sys);
  return out;
}

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return s;
}

}  // namespace

std::string to_string(Example e) {
  switch (e) {
    case Example::Smooth1D: return "smooth1d";
    case Example::Nonsmooth1D: return "nonsmooth1d";
    case Example::Smooth2D: return "smooth2d";
    case Example::Custom: return "custom";
  }
  return "unknown";
}

std::string to_string(Rule r) {
  switch (r) {
    case Rule::InitialSmooth: return "initial_smooth";
    case Rule::InitialNonsmooth: return "initial_nonsmooth";
    case Rule::TrajectoryT: return "trajectory";
    case Rule::Manual: return "manual";
  }
  return "unknown";
}

std::string to_string(Scheme s) { return s == Scheme::Semidiscrete ? "semidiscrete" : "fully_discrete"; }

Example example_from_string(const std::string& s) {
  for (Example e : {Example::Smooth1D, Example::Nonsmooth1D, Example::Smooth2D, Example::Custom})
    if (s == to_string(e)) return e;
  fail(ErrorCode::InvalidArgument, "unknown example '" + s + "' (smooth1d, nonsmooth1d, smooth2d)");
}

Rule rule_from_string(const std::string& s) {
  for (Rule r : {Rule::InitialSmooth, Rule::InitialNonsmooth, Rule::TrajectoryT, Rule::Manual})
    if (s == to_string(r)) return r;
  fail(ErrorCode::InvalidArgument,
       "unknown parameter rule '" + s + "' (initial_smooth, initial_nonsmooth, trajectory, manual)");
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "semidiscrete") return Scheme::Semidiscrete;
  if (s == "fully_discrete") return Scheme::FullyDiscrete;
  fail(ErrorCode::InvalidArgument, "unknown scheme '" + s + "' (semidiscrete, fully_discrete)");
}

PresetData preset_data(Example e) {
  PresetData d;
  switch (e) {
    case Example::Smooth1D:
      d.a1 = [](double x) { return -std::sin(kPi * x); };
      d.b1 = [](double x) { return x * (1.0 - x); };
      return d;
    case Example::Nonsmooth1D:
      d.a1 = [](double x) { return x <= 0.5 ? 0.0 : 1.0; };
      d.b1 = [](double x) { return x <= 0.5 ? 1.0 : 0.0; };
      d.breakpoints = {0.5};
      return d;
    case Example::Smooth2D:
      d.dim = 2;
      d.a2 = [](double x, double y) { return std::sin(2.0 * kPi * x) * std::sin(2.0 * kPi * y); };
      d.b2 = [](double x, double y) { return 4.0 * x * (1.0 - x) * y * (1.0 - y); };
      return d;
    case Example::Custom: break;
  }
  fail(ErrorCode::InvalidArgument, "preset_data: the custom example has no built-in data");
}

Params parameter_rule(Rule rule, double delta, const RuleConstants& c) {
  if (rule == Rule::Manual) return {c.c_gamma, c.c_h, c.c_tau};
  require(delta > 0.0 && delta < 1.0, "parameter_rule: delta must lie in (0, 1)");
  const double sd = std::sqrt(delta);
  switch (rule) {
    case Rule::InitialSmooth: return {c.c_gamma * sd, c.c_h * sd, c.c_tau * sd};
    case Rule::TrajectoryT: return {c.c_gamma * delta, c.c_h * sd, c.c_tau * delta};
    case Rule::InitialNonsmooth: return {c.c_gamma * std::pow(delta, 0.8), c.c_h * sd, c.c_tau * std::pow(delta, 0.2)};
    case Rule::Manual: break;
  }
  return {};
}

Params snap(const Params& p, double unit) {
  Params s = p;
  s.h = 1.0 / std::max(2.0, std::round(1.0 / p.h));
  if (p.tau > 0.0) s.tau = unit / std::ceil(unit / p.tau - 1e-9);
  return s;
}

RuleConstants caption_constants(Example e, Rule r, Scheme s, double alpha) {
  auto pick = [&](double c125, double c15, double c175) {
    if (std::abs(alpha - 1.25) < 1e-12) return c125;
    if (std::abs(alpha - 1.5) < 1e-12) return c15;
    if (std::abs(alpha - 1.75) < 1e-12) return c175;
    return 1.0;
  };
  const bool semi = s == Scheme::Semidiscrete;
  if (e == Example::Smooth1D) {
    if (r == Rule::InitialSmooth && semi) return {pick(1.0 / 12, 1.0, 0.5), 1.0, 1.0};
    if (r == Rule::TrajectoryT && semi) return {pick(0.2, 0.2, 0.5), 1.0, 1.0};
    if (r == Rule::InitialSmooth) return {pick(0.1, 0.1, 1.0 / 15), 1.0, 0.5};
    if (r == Rule::TrajectoryT) return {pick(1.0, 0.5, 0.5), 1.0, 10.0};
  }
  if (e == Example::Nonsmooth1D) {
    if (r == Rule::InitialNonsmooth && semi) return {pick(1.0 / 15, 1.0 / 15, 1.0 / 8), 1.0, 1.0};
    if (r == Rule::TrajectoryT && semi) return {pick(0.1, 0.2, 0.2), 1.0, 1.0};
    if (r == Rule::InitialNonsmooth) return {pick(0.5, 1.0 / 15, 0.5), 1.0, 0.05};
    if (r == Rule::TrajectoryT) return {pick(0.1, 1.0, 0.5), 1.0, 10.0};
  }
  if (e == Example::Smooth2D && r == Rule::InitialSmooth) return {1.0 / 4000, 0.25, 0.05};
  return {};
}

Vec add_noise(const Vec& u, double sup_abs, double delta, std::uint64_t seed, std::uint64_t stream) {
  Vec g(u);
  if (delta == 0.0) return g;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> eps(0.0, 1.0);
  for (double& x : g) x += eps(rng) * delta * sup_abs;
  return g;
}

double fit_order(const std::vector<double>& deltas, const std::vector<double>& errors) {
  require(deltas.size() == errors.size(), "fit_order: size mismatch");
  require(deltas.size() >= 3, "fit_order: need at least 3 pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    require(deltas[i] > 0.0 && errors[i] > 0.0, "fit_order: values must be positive");
    const double x = std::log(deltas[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  require(den > 0.0, "fit_order: deltas must not all be equal");
  return (n * sxy - sx * sy) / den;
}

double relative_error(const Vec& rec, const Vec& truth, const fem::FemSystem* sys) {
  require(rec.size() == truth.size(), "relative_error: size mismatch");
  Vec diff(rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) diff[i] = rec[i] - truth[i];
  auto norm = [&](const Vec& v) {
    if (sys) return sys->l2_norm(v);
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  const double nt = norm(truth);
  if (!(nt > 0.0)) fail(ErrorCode::Domain, "relative_error: the reference has zero norm");
  return norm(diff) / nt;
}

ExperimentConfig ExperimentConfig::from_table(const config::Table& t) {
  static const std::set<std::string> known{
      "example", "scheme", "rule", "alphas", "deltas", "seeds", "T1", "T2", "t_eval", "h_ref", "c_gamma",
      "c_h", "c_tau", "gamma", "h", "tau", "krylov_tol", "krylov_max_iter"};
  for (const std::string& k : t.keys())
    if (!known.count(k)) fail(ErrorCode::InvalidArgument, "config: unknown key '" + k + "'");
  ExperimentConfig c;
  c.example = example_from_string(t.string("example", to_string(c.example)));
  c.scheme = scheme_from_string(t.string("scheme", to_string(c.scheme)));
  c.rule = rule_from_string(t.string("rule", to_string(c.rule)));
  c.alphas = t.numbers("alphas", c.alphas);
  c.deltas = t.numbers("deltas", c.deltas);
  if (t.has("seeds")) {
    c.seeds.clear();
    for (double s : t.numbers("seeds", {})) {
      require(s >= 0.0 && s == std::floor(s), "config: seeds must be non-negative integers");
      c.seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  c.T1 = t.number("T1", c.T1);
  c.T2 = t.number("T2", c.T2);
  c.t_eval = t.number("t_eval", c.t_eval);
  if (c.example == Example::Smooth2D && !t.has("h_ref")) c.h_ref = 1.0 / 96.0;
  c.h_ref = t.number("h_ref", c.h_ref);
  c.c_gamma = t.numbers("c_gamma", {});
  c.c_h = t.numbers("c_h", {});
  c.c_tau = t.numbers("c_tau", {});
  c.manual = {t.number("gamma", 0.0), t.number("h", 0.0), t.number("tau", 0.0)};
  c.krylov_tol = t.number("krylov_tol", c.krylov_tol);
  c.krylov_max_iter = static_cast<int>(t.number("krylov_max_iter", c.krylov_max_iter));

  require(!c.alphas.empty() && !c.deltas.empty() && !c.seeds.empty(), "config: alphas, deltas and seeds must be non-empty");
  for (double a : c.alphas) require(a > 1.0 && a < 2.0, "config: alpha must lie in (1, 2)");
  for (std::size_t i = 0; i < c.deltas.size(); ++i) {
    require(c.deltas[i] > 0.0 && c.deltas[i] < 1.0, "config: deltas must lie in (0, 1)");
    if (i > 0) require(c.deltas[i] < c.deltas[i - 1], "config: deltas must be strictly descending");
  }
  require(0.0 < c.T1 && c.T1 < c.T2, "config: need 0 < T1 < T2");
  require(c.t_eval > 0.0 && c.t_eval <= c.T2, "config: t_eval must lie in (0, T2]");
  for (const auto* v : {&c.c_gamma, &c.c_h, &c.c_tau})
    require(v->empty() || v->size() == c.alphas.size(), "config: per-alpha constants must match the alpha list");
  if (c.rule == Rule::Manual)
    require(c.manual.gamma > 0.0 && c.manual.h > 0.0 && (c.scheme == Scheme::Semidiscrete || c.manual.tau > 0.0),
            "config: the manual rule needs gamma, h and tau");
  return c;
}

RuleConstants ExperimentConfig::constants_for(std::size_t i) const {
  if (rule == Rule::Manual) return {manual.gamma, manual.h, manual.tau};
  RuleConstants k = caption_constants(example, rule, scheme, alphas.at(i));
  if (!c_gamma.empty()) k.c_gamma = c_gamma[i];
  if (!c_h.empty()) k.c_h = c_h[i];
  if (!c_tau.empty()) k.c_tau = c_tau[i];
  return k;
}

int workers_from_env() {
  if (const char* s = std::getenv("DWAVE_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v >= 1) return static_cast<int>(std::min(v, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ConvergenceReport run_study(const ExperimentConfig& cfg, int workers) {
  ReferenceCache cache(cfg, preset_data(cfg.example));

  struct Cell {
    std::size_t ia, id, is;
  };
  std::vector<Cell> cells;
  for (std::size_t ia = 0; ia < cfg.alphas.size(); ++ia)
    for (std::size_t id = 0; id < cfg.deltas.size(); ++id)
      for (std::size_t is = 0; is < cfg.seeds.size(); ++is) cells.push_back({ia, id, is});
  std::vector<CellResult> results(cells.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      const Cell& c = cells[k];
      const double alpha = cfg.alphas[c.ia];
      const double delta = cfg.deltas[c.id];
      CellResult& r = results[k];
      try {
        Params p = parameter_rule(cfg.rule, delta, cfg.constants_for(c.ia));
        p = cfg.rule == Rule::Manual ? p : snap(p);
        if (cfg.scheme == Scheme::Semidiscrete && cfg.rule != Rule::Manual) p.tau = 0.0;
        r.params = p;
        r = cache.data().dim == 1 ? run_cell_1d(cfg, cache, alpha, p, delta, cfg.seeds[c.is])
                                  : run_cell_2d(cfg, cache, alpha, p, delta, cfg.seeds[c.is]);
      } catch (const std::exception& e) {
        r.status = std::string("failed: ") + csv_safe(e.what());
        r.e_ini = r.e_t = std::nan("");
      }
    }
  };
  const int nw = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
  if (nw == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nw; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  ConvergenceReport rep;
  rep.config = cfg;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const Cell& c = cells[k];
    const CellResult& r = results[k];
    for (int m = 0; m < 2; ++m) {
      Row row;
      row.alpha = cfg.alphas[c.ia];
      row.delta = cfg.deltas[c.id];
      row.seed = cfg.seeds[c.is];
      row.params = r.params;
      row.metric = m == 0 ? "e_ini" : "e_t";
      row.t_eval = m == 0 ? 0.0 : cfg.t_eval;
      row.value = m == 0 ? r.e_ini : r.e_t;
      row.status = r.status;
      row.iterations = r.iterations;
      rep.rows.push_back(row);
    }
  }

  // geometric mean over seeds per delta, then a log-log fit
  for (double alpha : cfg.alphas) {
    for (const std::string metric : {"e_ini", "e_t"}) {
      std::vector<double> ds, es;
      for (double delta : cfg.deltas) {
        double logsum = 0.0;
        int n = 0;
        for (const Row& row : rep.rows)
          if (row.alpha == alpha && row.delta == delta && row.metric == metric && row.status == "ok" && row.value > 0.0) {
            logsum += std::log(row.value);
            ++n;
          }
        if (n > 0) {
          ds.push_back(delta);
          es.push_back(std::exp(logsum / n));
        }
      }
      OrderFit f;
      f.alpha = alpha;
      f.metric = metric;
      f.n_deltas = static_cast<int>(ds.size());
      if (ds.size() >= 3) {
        f.order = fit_order(ds, es);
      } else {
        f.order = std::nan("");
        f.status = "insufficient_data";
      }
      rep.orders.push_back(f);
    }
  }
  return rep;
}

void write_results_csv(std::ostream& out, const ConvergenceReport& rep) {
  out << "example,alpha,delta,seed,gamma,h,tau,metric,t_eval,value,status\n";
  const std::string ex = to_string(rep.config.example);
  for (const Row& r : rep.rows) {
    out << ex << ',' << fmt(r.alpha) << ',' << fmt(r.delta) << ',' << r.seed << ',' << fmt(r.params.gamma) << ','
        << fmt(r.params.h) << ',' << fmt(r.params.tau) << ',' << r.metric << ',' << fmt(r.t_eval) << ','
        << fmt(r.value) << ',' << r.status << '\n';
  }
}

void write_report_csv(std::ostream& out, const ConvergenceReport& rep) {
  out << "example,scheme,rule,alpha,metric,order,n_deltas,status\n";
  for (const OrderFit& f : rep.orders)
    out << to_string(rep.config.example) << ',' << to_string(rep.config.scheme) << ',' << to_string(rep.config.rule)
        << ',' << fmt(f.alpha) << ',' << f.metric << ',' << fmt(f.order) << ',' << f.n_deltas << ',' << f.status
        << '\n';
}

void write_plot_script(std::ostream& out, const ConvergenceReport& rep, const std::string& results_file) {
  const ExperimentConfig& c = rep.config;
  out << "# gnuplot script: " << to_string(c.example) << ", " << to_string(c.scheme) << ", rule "
      << to_string(c.rule) << "\n# per-delta geometric means over seeds; raw rows in " << results_file << "\n";
  out << "set terminal pngcairo size 1000,420\nset output 'report.png'\n";
  out << "set logscale xy\nset xlabel 'delta'\nset key left top\nset multiplot layout 1,2\n";
  int block = 0;
  for (const std::string metric : {"e_ini", "e_t"}) {
    std::vector<std::string> names;
    for (double alpha : c.alphas) {
      const std::string name = "$d" + std::to_string(block++);
      out << name << " << EOD\n";
      for (double delta : c.deltas) {
        double logsum = 0.0;
        int n = 0;
        for (const Row& r : rep.rows)
          if (r.alpha == alpha && r.delta == delta && r.metric == metric && r.status == "ok" && r.value > 0.0) {
            logsum += std::log(r.value);
            ++n;
          }
        if (n > 0) out << fmt(delta) << ' ' << fmt(std::exp(logsum / n)) << '\n';
      }
      out << "EOD\n";
      names.push_back(name);
    }
    out << "set title '" << metric << "'\nplot ";
    for (std::size_t i = 0; i < names.size(); ++i) {
      double order = 0.0;
      for (const OrderFit& f : rep.orders)
        if (f.alpha == c.alphas[i] && f.metric == metric) order = f.order;
      out << names[i] << " using 1:2 with linespoints title 'alpha=" << fmt(c.alphas[i]) << " (order "
          << fmt(std::round(order * 100.0) / 100.0) << ")', ";
    }
    const double lead = metric == "e_ini" ? (c.rule == Rule::InitialNonsmooth ? 0.2 : 0.5) : 1.0;
    out << "x**" << lead << " with lines dashtype 2 title 'slope " << lead << "'\n";
  }
  out << "unset multiplot\n";
}

void write_outputs(const std::string& dir, const ConvergenceReport& rep) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(std::filesystem::path(dir) / name);
    if (!f) fail(ErrorCode::Io, "cannot write '" + (std::filesystem::path(dir) / name).string() + "'");
    return f;
  };
  {
    auto f = open("results.csv");
    write_results_csv(f, rep);
  }
  {
    auto f = open("report.csv");
    write_report_csv(f, rep);
  }
  {
    auto f = open("report.plt");
    write_plot_script(f, rep, "results.csv");
  }
}

}  // namespace dwave::harness

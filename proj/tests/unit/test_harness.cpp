#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dwave/config.hpp"
#include "dwave/error.hpp"
#include "dwave/fem.hpp"
#include "dwave/harness.hpp"

using namespace dwave;
using namespace dwave::harness;
using std::numbers::pi;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return ExperimentConfig::from_table(config::Table::parse(in));
}

std::string results_text(const ConvergenceReport& r) {
  std::ostringstream out;
  write_results_csv(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("presets") {
  const PresetData s = preset_data(Example::Smooth1D);
  CHECK(s.dim == 1);
  CHECK(s.a1(0.5) == doctest::Approx(-1.0));
  CHECK(s.b1(0.5) == doctest::Approx(0.25));
  const PresetData n = preset_data(Example::Nonsmooth1D);
  CHECK(n.a1(0.25) == 0.0);
  CHECK(n.a1(0.75) == 1.0);
  CHECK(n.b1(0.25) == 1.0);
  CHECK(n.b1(0.75) == 0.0);
  CHECK(n.breakpoints == std::vector<double>{0.5});
  const PresetData t = preset_data(Example::Smooth2D);
  CHECK(t.dim == 2);
  CHECK(t.a2(0.25, 0.25) == doctest::Approx(1.0));
  CHECK(t.b2(0.5, 0.5) == doctest::Approx(0.25));
  CHECK_THROWS_AS(preset_data(Example::Custom), Error);
}

TEST_CASE("parameter rules") {
  const RuleConstants one{};
  Params p = parameter_rule(Rule::InitialSmooth, 0.01, one);
  CHECK(p.gamma == doctest::Approx(0.1));
  CHECK(p.h == doctest::Approx(0.1));
  CHECK(p.tau == doctest::Approx(0.1));
  p = parameter_rule(Rule::TrajectoryT, 0.01, {2.0, 1.0, 10.0});
  CHECK(p.gamma == doctest::Approx(0.02));
  CHECK(p.h == doctest::Approx(0.1));
  CHECK(p.tau == doctest::Approx(0.1));
  p = parameter_rule(Rule::InitialNonsmooth, 1e-5, one);
  CHECK(p.gamma == doctest::Approx(1e-4));
  CHECK(p.tau == doctest::Approx(0.1));
  p = parameter_rule(Rule::Manual, 0.3, {1e-3, 0.05, 0.01});
  CHECK(p.gamma == 1e-3);
  CHECK(p.h == 0.05);
  CHECK_THROWS_AS(parameter_rule(Rule::InitialSmooth, 0.0, one), Error);
  CHECK_THROWS_AS(parameter_rule(Rule::InitialSmooth, 1.5, one), Error);

  const Params s = snap({0.1, 0.07, 0.03});
  CHECK(s.h == doctest::Approx(1.0 / 14));
  CHECK(s.tau == doctest::Approx(0.025));
  CHECK(snap({0.1, 0.9, 0.1}).h == 0.5);
  CHECK(snap({0.1, 0.1, 0.1}).tau == doctest::Approx(0.1));

  CHECK(caption_constants(Example::Smooth1D, Rule::InitialSmooth, Scheme::Semidiscrete, 1.25).c_gamma ==
        doctest::Approx(1.0 / 12));
  CHECK(caption_constants(Example::Smooth1D, Rule::TrajectoryT, Scheme::FullyDiscrete, 1.5).c_tau == 10.0);
  CHECK(caption_constants(Example::Smooth2D, Rule::InitialSmooth, Scheme::FullyDiscrete, 1.5).c_gamma ==
        doctest::Approx(1.0 / 4000));
  CHECK(caption_constants(Example::Smooth1D, Rule::InitialSmooth, Scheme::Semidiscrete, 1.3).c_gamma == 1.0);
}

TEST_CASE("noise") {
  const fem::Vec u(1000, 2.0);
  CHECK(add_noise(u, 5.0, 0.0, 1, 1) == u);
  const fem::Vec g = add_noise(u, 5.0, 0.01, 7, 1);
  CHECK(g == add_noise(u, 5.0, 0.01, 7, 1));
  CHECK(g != add_noise(u, 5.0, 0.01, 7, 2));
  CHECK(g != add_noise(u, 5.0, 0.01, 8, 1));
  double mx = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    mx = std::max(mx, std::abs(g[i] - u[i]));
    s2 += (g[i] - u[i]) * (g[i] - u[i]);
  }
  // relative to delta * sup|u|
  CHECK(mx / 0.05 >= 0.5);
  CHECK(mx / 0.05 <= 5.0);
  CHECK(std::sqrt(s2 / 1000) / 0.05 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("order fit") {
  const std::vector<double> d{0.04, 0.02, 0.01, 0.005};
  std::vector<double> e1, e5;
  for (double x : d) e1.push_back(3 * x), e5.push_back(0.7 * std::sqrt(x));
  CHECK(fit_order(d, e1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit_order(d, e5) == doctest::Approx(0.5).epsilon(1e-12));

  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  std::vector<double> dd, ee;
  for (double x = 0.1; x > 1e-4; x /= 2) {
    dd.push_back(x);
    ee.push_back(std::pow(x, 0.2) * (1 + jitter(gen)));
  }
  const double q = fit_order(dd, ee);
  CHECK(q >= 0.17);
  CHECK(q <= 0.23);
  CHECK_THROWS_AS(fit_order({0.1, 0.2}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(fit_order({0.1, 0.1, 0.1}, {1.0, 2.0, 3.0}), Error);
  CHECK_THROWS_AS(fit_order({0.1, 0.05, 0.02}, {1.0, 0.0, 3.0}), Error);
}

TEST_CASE("relative error") {
  const fem::Vec t{1.0, -2.0, 2.0};
  CHECK(relative_error(t, t) == 0.0);
  CHECK(relative_error({0.5, -1.0, 1.0}, t) == doctest::Approx(0.5));
  CHECK_THROWS_AS(relative_error(t, {0.0, 0.0, 0.0}), Error);
  const fem::FemSystem sys = fem::FemSystem::assemble(1, 0.25);
  CHECK(relative_error({2.0, -4.0, 4.0}, t, &sys) == doctest::Approx(1.0));
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse(R"(
# smooth, fully discrete
example = "smooth1d"
scheme = "fully_discrete"
rule = "trajectory"
alphas = [1.25, 1.5]
deltas = [0.02, 0.01, 0.005]
seeds = [1, 2]
c_gamma = [1.0, 0.5]
)");
  CHECK(c.example == Example::Smooth1D);
  CHECK(c.rule == Rule::TrajectoryT);
  CHECK(c.alphas.size() == 2);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(c.constants_for(1).c_gamma == 0.5);
  CHECK(c.constants_for(1).c_tau == 10.0);  // from the caption table
  CHECK(parse("example = \"smooth2d\"\nrule = \"initial_smooth\"\n").h_ref == doctest::Approx(1.0 / 96));

  CHECK_THROWS_AS(parse("alpha = [1.5]\n"), Error);
  CHECK_THROWS_AS(parse("deltas = [0.01, 0.02, 0.005]\n"), Error);
  CHECK_THROWS_AS(parse("alphas = [2.5]\n"), Error);
  CHECK_THROWS_AS(parse("alphas = [1.5]\nc_gamma = [1, 2]\n"), Error);
  CHECK_THROWS_AS(parse("rule = \"manual\"\n"), Error);
  CHECK_THROWS_AS(parse("T1 = 2\nT2 = 1\n"), Error);
  CHECK_THROWS_AS(parse("example = smooth1d\n"), Error);
}

TEST_CASE("study: determinism across worker counts, flagged failures") {
  const ExperimentConfig c = parse(R"(
example = "nonsmooth1d"
scheme = "fully_discrete"
rule = "initial_nonsmooth"
alphas = [1.25, 1.75]
deltas = [0.04, 0.02, 0.01]
seeds = [1, 2]
h_ref = 0.002
)");
  const ConvergenceReport r1 = run_study(c, 1);
  const ConvergenceReport r3 = run_study(c, 3);
  CHECK(results_text(r1) == results_text(r3));
  CHECK(r1.rows.size() == 2 * 3 * 2 * 2);
  CHECK(r1.orders.size() == 4);
  for (const Row& r : r1.rows) {
    CHECK(r.status == "ok");
    CHECK(r.value > 0.0);
    CHECK(std::fmod(1.0 / r.params.h, 1.0) == doctest::Approx(0.0));
  }
  for (const OrderFit& f : r1.orders) CHECK(std::isfinite(f.order));

  // semidiscrete is the only unsupported 2D combination; every cell fails
  ExperimentConfig bad = parse("example = \"smooth2d\"\nscheme = \"semidiscrete\"\nrule = \"initial_smooth\"\n"
                               "deltas = [0.04, 0.02, 0.01]\nseeds = [1]\n");
  const ConvergenceReport rb = run_study(bad, 2);
  for (const Row& r : rb.rows) CHECK(r.status.rfind("failed:", 0) == 0);
  for (const OrderFit& f : rb.orders) CHECK(f.status == "insufficient_data");
}

TEST_CASE("study: the reference mesh is fine enough") {
  // halving h_ref moves the errors by well under 10% at these deltas
  ExperimentConfig c = parse(R"(
example = "smooth1d"
scheme = "semidiscrete"
rule = "initial_smooth"
alphas = [1.5]
deltas = [0.04, 0.01, 0.0025]
seeds = [3]
h_ref = 0.001
)");
  const ConvergenceReport fine = run_study(c, 1);
  c.h_ref = 0.002;
  const ConvergenceReport coarse = run_study(c, 1);
  for (std::size_t i = 0; i < fine.rows.size(); ++i) {
    INFO(fine.rows[i].metric << " delta=" << fine.rows[i].delta);
    CHECK(std::abs(fine.rows[i].value - coarse.rows[i].value) < 0.1 * fine.rows[i].value);
  }
}

TEST_CASE("outputs") {
  const ExperimentConfig c = parse(R"(
example = "smooth1d"
scheme = "semidiscrete"
rule = "trajectory"
alphas = [1.5]
deltas = [0.04, 0.02, 0.01]
seeds = [1]
h_ref = 0.005
)");
  const ConvergenceReport r = run_study(c, 1);
  const auto dir = std::filesystem::temp_directory_path() / "dwave_test_harness_out";
  std::filesystem::remove_all(dir);
  write_outputs(dir.string(), r);
  std::ifstream res(dir / "results.csv"), rep(dir / "report.csv"), plt(dir / "report.plt");
  std::string head;
  std::getline(res, head);
  CHECK(head == "example,alpha,delta,seed,gamma,h,tau,metric,t_eval,value,status");
  std::getline(rep, head);
  CHECK(head == "example,scheme,rule,alpha,metric,order,n_deltas,status");
  std::stringstream p;
  p << plt.rdbuf();
  CHECK(p.str().find("plot $d0") != std::string::npos);
  CHECK(results_text(r) == results_text(run_study(c, 2)));
  std::filesystem::remove_all(dir);
}

TEST_CASE("worker count from the environment") {
  setenv("DWAVE_WORKERS", "3", 1);
  CHECK(workers_from_env() == 3);
  setenv("DWAVE_WORKERS", "zero", 1);
  CHECK(workers_from_env() >= 1);
  unsetenv("DWAVE_WORKERS");
  CHECK(workers_from_env() >= 1);
}

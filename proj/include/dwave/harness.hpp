#pragma once

// Convergence studies for the backward problem: reference solutions, noisy
// observations, a-priori parameter rules, error metrics and order fits.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dwave/backward.hpp"
#include "dwave/config.hpp"
#include "dwave/fem.hpp"

namespace dwave::harness {

using fem::Vec;

enum class Example { Smooth1D, Nonsmooth1D, Smooth2D, Custom };
enum class Rule { InitialSmooth, InitialNonsmooth, TrajectoryT, Manual };
enum class Scheme { Semidiscrete, FullyDiscrete };

std::string to_string(Example e);
std::string to_string(Rule r);
std::string to_string(Scheme s);
Example example_from_string(const std::string& s);
Rule rule_from_string(const std::string& s);
Scheme scheme_from_string(const std::string& s);

struct PresetData {
  int dim = 1;
  fem::Function1D a1, b1;
  fem::Function2D a2, b2;
  /// Jump locations of a1, b1 (used to split quadrature panels).
  std::vector<double> breakpoints;
};

PresetData preset_data(Example e);

struct RuleConstants {
  double c_gamma = 1.0;
  double c_h = 1.0;
  double c_tau = 1.0;
};

struct Params {
  double gamma = 0.0;
  double h = 0.0;
  double tau = 0.0;
};

/// InitialSmooth    (c_g d^1/2, c_h d^1/2, c_t d^1/2)
/// TrajectoryT      (c_g d,     c_h d^1/2, c_t d)
/// InitialNonsmooth (c_g d^4/5, c_h d^1/2, c_t d^1/5)
/// Manual returns the constants themselves as (gamma, h, tau).
Params parameter_rule(Rule rule, double delta, const RuleConstants& c);

/// Rounds h to 1/round(1/h) (at least 2 intervals) and tau down to
/// `unit`/ceil(`unit`/tau), so that multiples of `unit` are grid times.
Params snap(const Params& p, double unit = 0.1);

/// Per-alpha constants used in the published figures for this example, rule
/// and scheme (the 2D example has its own fixed set). All ones if unknown.
RuleConstants caption_constants(Example e, Rule r, Scheme s, double alpha);

/// g = u + eps * delta * sup_abs, eps i.i.d. standard normal per entry, drawn
/// from a generator seeded by (seed, stream).
Vec add_noise(const Vec& u, double sup_abs, double delta, std::uint64_t seed, std::uint64_t stream);

/// Least-squares slope of log(error) against log(delta); needs >= 3 pairs.
double fit_order(const std::vector<double>& deltas, const std::vector<double>& errors);

/// ||rec - truth|| / ||truth|| in the given inner product (Euclidean if sys
/// is null). Throws on a zero truth.
double relative_error(const Vec& rec, const Vec& truth, const fem::FemSystem* sys = nullptr);

struct ExperimentConfig {
  Example example = Example::Smooth1D;
  Scheme scheme = Scheme::FullyDiscrete;
  Rule rule = Rule::TrajectoryT;
  std::vector<double> alphas{1.5};
  std::vector<double> deltas{0.04, 0.02, 0.01, 0.005, 0.0025};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double T1 = 1.0;
  double T2 = 1.2;
  double t_eval = 0.5;
  /// Reference mesh width (1D: exact semidiscrete modal reference; 2D: CQ
  /// reference on a nested mesh with the working tau).
  double h_ref = 1.0 / 2000.0;
  /// Per-alpha constants; empty means caption defaults.
  std::vector<double> c_gamma, c_h, c_tau;
  /// Rule::Manual values.
  Params manual;
  double krylov_tol = 1e-8;
  int krylov_max_iter = 500;

  static ExperimentConfig from_table(const config::Table& t);
  RuleConstants constants_for(std::size_t alpha_index) const;
};

struct Row {
  double alpha = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  Params params;
  std::string metric;  // "e_ini" or "e_t"
  double t_eval = 0.0;
  double value = 0.0;
  std::string status = "ok";
  int iterations = 0;
};

struct OrderFit {
  double alpha = 0.0;
  std::string metric;
  double order = 0.0;
  int n_deltas = 0;
  std::string status = "ok";
};

struct ConvergenceReport {
  ExperimentConfig config;
  std::vector<Row> rows;
  std::vector<OrderFit> orders;
};

/// Worker count from DWAVE_WORKERS, else the hardware concurrency.
int workers_from_env();

/// Runs every (alpha, delta, seed) cell on `workers` threads. Failed cells
/// are flagged, not fatal. Rows come out in a fixed order.
ConvergenceReport run_study(const ExperimentConfig& cfg, int workers = 1);

void write_results_csv(std::ostream& out, const ConvergenceReport& rep);
void write_report_csv(std::ostream& out, const ConvergenceReport& rep);
void write_plot_script(std::ostream& out, const ConvergenceReport& rep, const std::string& results_file);

/// Writes results.csv, report.csv and report.plt into dir (created if needed).
void write_outputs(const std::string& dir, const ConvergenceReport& rep);

}  // namespace dwave::harness

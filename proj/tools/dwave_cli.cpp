// Command-line front end. Talks to the library only through dwave.h.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dwave/dwave.h"
#include "json.hpp"

namespace {

struct Failure {
  dwave_status status;
  std::string message;
};

void check(dwave_status s) {
  if (s != DWAVE_OK) throw Failure{s, dwave_last_error()};
}

[[noreturn]] void usage_error(const std::string& msg) { throw Failure{DWAVE_ERR_INVALID_ARGUMENT, msg}; }

using FemPtr = std::unique_ptr<dwave_fem, decltype(&dwave_fem_destroy)>;

FemPtr make_fem(int dim, double h) {
  dwave_fem* f = nullptr;
  check(dwave_fem_create(dim, h, &f));
  return FemPtr(f, &dwave_fem_destroy);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

// Reads "<index>,<c1>,<c2>" with the given header. Indices are 0-based dofs,
// or 1-based modes when modal.
void read_pair_csv(const std::string& path, const std::string& header, std::size_t n, bool modal,
                   std::vector<double>& c1, std::vector<double>& c2) {
  std::ifstream in(path);
  if (!in) throw Failure{DWAVE_ERR_IO, "cannot open '" + path + "'"};
  std::string line;
  if (!std::getline(in, line) || split(line) != split(header))
    usage_error(path + ": expected header '" + header + "'");
  c1.assign(n, std::nan(""));
  c2.assign(n, std::nan(""));
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != 3) usage_error(path + ":" + std::to_string(lineno) + ": expected 3 columns");
    try {
      const long idx = std::stol(cells[0]) - (modal ? 1 : 0);
      if (idx < 0 || static_cast<std::size_t>(idx) >= n)
        usage_error(path + ":" + std::to_string(lineno) + ": index out of range for " + std::to_string(n) +
                    (modal ? " modes" : " dofs"));
      c1[static_cast<std::size_t>(idx)] = std::stod(cells[1]);
      c2[static_cast<std::size_t>(idx)] = std::stod(cells[2]);
    } catch (const std::logic_error&) {
      usage_error(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (std::isnan(c1[i]) || std::isnan(c2[i]))
      usage_error(path + ": missing row for " + (modal ? "mode " + std::to_string(i + 1) : "dof " + std::to_string(i)));
}

void write_pair_csv(const std::string& path, const std::string& header, const double* c1, const double* c2,
                    std::size_t n, bool modal) {
  std::ofstream out(path);
  if (!out) throw Failure{DWAVE_ERR_IO, "cannot write '" + path + "'"};
  out << header << '\n';
  for (std::size_t i = 0; i < n; ++i) out << (modal ? i + 1 : i) << ',' << fmt(c1[i]) << ',' << fmt(c2[i]) << '\n';
}

// Initial data from a preset name or a "node_or_mode,a,b" file.
void initial_data(const dwave_fem* fem, const std::string& ic, bool modal, std::vector<double>& a,
                  std::vector<double>& b) {
  const std::size_t n = dwave_fem_dof_count(fem);
  if (ic == "smooth1d" || ic == "nonsmooth1d" || ic == "smooth2d") {
    a.resize(n);
    b.resize(n);
    check(dwave_fem_project_preset(fem, ic.c_str(), "a", a.data()));
    check(dwave_fem_project_preset(fem, ic.c_str(), "b", b.data()));
    return;
  }
  read_pair_csv(ic, "node_or_mode,a,b", n, modal, a, b);
  if (modal) {
    std::vector<double> na(n), nb(n);
    check(dwave_fem_from_modal(fem, a.data(), na.data()));
    check(dwave_fem_from_modal(fem, b.data(), nb.data()));
    a.swap(na);
    b.swap(nb);
  }
}

std::vector<double> to_modal(const dwave_fem* fem, const std::vector<double>& v) {
  std::vector<double> m(v.size());
  check(dwave_fem_to_modal(fem, v.data(), m.data()));
  return m;
}

int steps(double T, double tau) {
  const double r = T / tau;
  const long n = std::lround(r);
  if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
    usage_error("T = " + fmt(T) + " is not a multiple of tau = " + fmt(tau));
  return static_cast<int>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional diffusion-wave equation: forward solves, backward recovery, convergence studies"};
  app.require_subcommand(1);
  // -h would clash with the mesh width option
  app.set_help_flag("--help", "Print this help message and exit");

  // ml
  auto* ml = app.add_subcommand("ml", "Mittag-Leffler function E_{alpha,beta}(z), z <= 0; prints "
                                      "alpha,beta,z,value,est_abs_error,branch");
  double ml_alpha = 0, ml_beta = 1, ml_z = 0;
  std::string ml_branch = "auto";
  bool ml_header = false;
  ml->add_option("--alpha", ml_alpha, "0 < alpha <= 2")->required();
  ml->add_option("--beta", ml_beta, "beta > 0")->capture_default_str();
  ml->add_option("--z", ml_z, "argument, z <= 0")->required()->allow_extra_args(false);
  ml->add_option("--branch", ml_branch, "auto, series, asymptotic, integral or closed")
      ->check(CLI::IsMember({"auto", "series", "asymptotic", "integral", "closed"}))
      ->capture_default_str();
  ml->add_flag("--header", ml_header, "print a header line first");

  // shared mesh options
  int dim = 1;
  double alpha = 1.5, h = 0.05, tau = 0.01;
  auto mesh_opts = [&](CLI::App* s) {
    s->add_option("--dim", dim, "1 or 2")->check(CLI::IsMember({1, 2}))->capture_default_str();
    s->add_option("--alpha", alpha, "fractional order in (1, 2)")->required();
    s->add_option("--h", h, "mesh width, 1/h an integer")->required();
  };

  // forward
  auto* fw = app.add_subcommand("forward", "Forward solve; writes n,t,dof_or_mode,value");
  mesh_opts(fw);
  double fw_T = 1.0;
  std::string fw_ic, fw_out, fw_scheme = "cq", fw_modal_out;
  int fw_stride = 1;
  bool fw_modal = false;
  fw->add_option("--tau", tau, "time step")->required();
  fw->add_option("--T", fw_T, "final time, a multiple of tau")->required();
  fw->add_option("--ic", fw_ic, "smooth1d, nonsmooth1d, smooth2d or a node_or_mode,a,b file")->required();
  fw->add_option("--out", fw_out, "trajectory CSV")->required();
  fw->add_option("--scheme", fw_scheme, "cq or semidiscrete (1D)")
      ->check(CLI::IsMember({"cq", "semidiscrete"}))
      ->capture_default_str();
  fw->add_option("--stride", fw_stride, "write every k-th step (and the last)")->check(CLI::PositiveNumber);
  fw->add_flag("--modal", fw_modal, "1D: --ic file and output hold modal coefficients");
  fw->add_option("--modal-out", fw_modal_out, "1D: final state as j,lambda,coeff");

  // observe
  auto* ob = app.add_subcommand("observe", "Noisy observations u(T1), u(T2); writes node_or_mode,g1,g2");
  mesh_opts(ob);
  double ob_T1 = 1.0, ob_T2 = 1.2, ob_delta = 0.0, ob_tau = 0.0;
  std::uint64_t ob_seed = 1;
  std::string ob_ic, ob_out;
  bool ob_modal = false;
  ob->add_option("--ic", ob_ic, "smooth1d, nonsmooth1d, smooth2d or a node_or_mode,a,b file")->required();
  ob->add_option("--T1", ob_T1)->capture_default_str();
  ob->add_option("--T2", ob_T2)->capture_default_str();
  ob->add_option("--tau", ob_tau, "0: semidiscrete (1D); otherwise CQ step")->capture_default_str();
  ob->add_option("--delta", ob_delta, "relative noise level")->capture_default_str();
  ob->add_option("--seed", ob_seed)->capture_default_str();
  ob->add_option("--out", ob_out)->required();
  ob->add_flag("--modal", ob_modal, "1D: write modal coefficients");

  // backward
  auto* bw = app.add_subcommand("backward", "Recover (a, b) from u(T1), u(T2); writes node_or_mode,a,b");
  mesh_opts(bw);
  double bw_gamma = 0, bw_T1 = 1.0, bw_T2 = 1.2, bw_tau = 0.0;
  std::string bw_obs, bw_out, bw_diag, bw_method = "auto";
  double bw_ktol = 1e-8;
  int bw_kmax = 500;
  bool bw_modal = false, bw_neg = false;
  bw->add_option("--tau", bw_tau, "0: semidiscrete (1D); otherwise fully discrete with this step")
      ->capture_default_str();
  bw->add_option("--gamma", bw_gamma, "regularization parameter")->required();
  bw->add_option("--obs", bw_obs, "node_or_mode,g1,g2 file")->required();
  bw->add_option("--out", bw_out, "reconstruction CSV")->required();
  bw->add_option("--diag", bw_diag, "JSON-lines diagnostics (default: <out>.diag.jsonl)");
  bw->add_option("--T1", bw_T1)->capture_default_str();
  bw->add_option("--T2", bw_T2)->capture_default_str();
  bw->add_option("--method", bw_method, "auto, modal (1D) or krylov")
      ->check(CLI::IsMember({"auto", "modal", "krylov"}))
      ->capture_default_str();
  bw->add_option("--krylov-tol", bw_ktol)->capture_default_str();
  bw->add_option("--krylov-max-iter", bw_kmax)->capture_default_str();
  bw->add_flag("--modal", bw_modal, "1D: observations and output are modal coefficients");
  bw->add_flag("--require-negative-psi", bw_neg, "fail if any mode has psi_tilde >= 0");

  // study
  auto* st = app.add_subcommand("study", "Convergence study from a TOML config (workers: DWAVE_WORKERS)");
  std::string st_config, st_out = "results";
  st->add_option("--config", st_config)->required()->check(CLI::ExistingFile);
  st->add_option("--out-dir", st_out)->capture_default_str();

  // matrix
  auto* mx = app.add_subcommand("matrix", "Export the mass or stiffness matrix as 'i j value'");
  int mx_dim = 1;
  double mx_h = 0.25;
  std::string mx_which = "stiffness", mx_out;
  mx->add_option("--dim", mx_dim)->check(CLI::IsMember({1, 2}))->capture_default_str();
  mx->add_option("--h", mx_h)->required();
  mx->add_option("--which", mx_which)->check(CLI::IsMember({"mass", "stiffness"}))->capture_default_str();
  mx->add_option("--out", mx_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ml) {
      const std::map<std::string, int> branches{{"auto", DWAVE_BRANCH_AUTO},
                                                {"series", DWAVE_BRANCH_SERIES},
                                                {"asymptotic", DWAVE_BRANCH_ASYMPTOTIC},
                                                {"integral", DWAVE_BRANCH_INTEGRAL},
                                                {"closed", DWAVE_BRANCH_CLOSED}};
      double v = 0, err = 0;
      int used = 0;
      check(dwave_ml(ml_alpha, ml_beta, ml_z, branches.at(ml_branch), &v, &err, &used));
      if (ml_header) std::cout << "alpha,beta,z,value,est_abs_error,branch\n";
      std::cout << fmt(ml_alpha) << ',' << fmt(ml_beta) << ',' << fmt(ml_z) << ',' << fmt(v) << ',' << fmt(err) << ','
                << dwave_branch_name(used) << '\n';
    } else if (*fw) {
      const FemPtr fem = make_fem(dim, h);
      std::vector<double> a, b;
      initial_data(fem.get(), fw_ic, fw_modal, a, b);
      dwave_trajectory* raw = nullptr;
      check(dwave_forward(fem.get(), a.data(), b.data(), alpha, tau, steps(fw_T, tau),
                          fw_scheme == "cq" ? DWAVE_SCHEME_CQ : DWAVE_SCHEME_SEMIDISCRETE, &raw));
      std::unique_ptr<dwave_trajectory, decltype(&dwave_trajectory_destroy)> tr(raw, &dwave_trajectory_destroy);
      check(dwave_trajectory_write_csv(tr.get(), fem.get(), fw_out.c_str(), fw_stride, fw_modal ? 1 : 0));
      if (!fw_modal_out.empty()) {
        const double* last = dwave_trajectory_state(tr.get(), dwave_trajectory_count(tr.get()) - 1);
        check(dwave_fem_write_modal_csv(fem.get(), last, fw_modal_out.c_str()));
      }
      std::cerr << "wrote " << dwave_trajectory_count(tr.get()) << " steps x " << dwave_trajectory_size(tr.get())
                << " dofs to " << fw_out << '\n';
    } else if (*ob) {
      const FemPtr fem = make_fem(dim, h);
      std::vector<double> a, b;
      initial_data(fem.get(), ob_ic, false, a, b);
      const std::size_t n = dwave_fem_dof_count(fem.get());
      std::vector<double> g1(n), g2(n);
      check(dwave_observe(fem.get(), a.data(), b.data(), alpha, ob_T1, ob_T2, ob_tau, ob_delta, ob_seed, g1.data(),
                          g2.data()));
      if (ob_modal) {
        g1 = to_modal(fem.get(), g1);
        g2 = to_modal(fem.get(), g2);
      }
      write_pair_csv(ob_out, "node_or_mode,g1,g2", g1.data(), g2.data(), n, ob_modal);
    } else if (*bw) {
      const FemPtr fem = make_fem(dim, h);
      const std::size_t n = dwave_fem_dof_count(fem.get());
      std::vector<double> g1, g2;
      read_pair_csv(bw_obs, "node_or_mode,g1,g2", n, bw_modal, g1, g2);
      if (bw_modal) {
        std::vector<double> n1(n), n2(n);
        check(dwave_fem_from_modal(fem.get(), g1.data(), n1.data()));
        check(dwave_fem_from_modal(fem.get(), g2.data(), n2.data()));
        g1.swap(n1);
        g2.swap(n2);
      }
      dwave_backward_options opt;
      dwave_backward_options_init(&opt);
      opt.gamma = bw_gamma;
      opt.T1 = bw_T1;
      opt.T2 = bw_T2;
      opt.tau = bw_tau;
      opt.method = bw_method == "auto" ? 0 : bw_method == "modal" ? 1 : 2;
      opt.krylov_tol = bw_ktol;
      opt.krylov_max_iter = bw_kmax;
      opt.require_negative_psi_tilde = bw_neg ? 1 : 0;
      dwave_reconstruction* raw = nullptr;
      check(dwave_backward(fem.get(), g1.data(), g2.data(), alpha, &opt, &raw));
      std::unique_ptr<dwave_reconstruction, decltype(&dwave_reconstruction_destroy)> rec(
          raw, &dwave_reconstruction_destroy);
      std::vector<double> a(dwave_reconstruction_a(rec.get()), dwave_reconstruction_a(rec.get()) + n);
      std::vector<double> b(dwave_reconstruction_b(rec.get()), dwave_reconstruction_b(rec.get()) + n);
      if (bw_modal) {
        a = to_modal(fem.get(), a);
        b = to_modal(fem.get(), b);
      }
      write_pair_csv(bw_out, "node_or_mode,a,b", a.data(), b.data(), n, bw_modal);

      nlohmann::ordered_json line;
      line["dim"] = dim;
      line["alpha"] = alpha;
      line["h"] = h;
      line["tau"] = bw_tau;
      line["gamma"] = bw_gamma;
      line["T1"] = bw_T1;
      line["T2"] = bw_T2;
      const auto diag_json = nlohmann::ordered_json::parse(dwave_reconstruction_diagnostics(rec.get()));
      for (const auto& [k, v] : diag_json.items()) line[k] = v;
      const std::string diag = bw_diag.empty() ? bw_out + ".diag.jsonl" : bw_diag;
      std::ofstream d(diag, std::ios::app);
      if (!d) throw Failure{DWAVE_ERR_IO, "cannot write '" + diag + "'"};
      d << line.dump() << '\n';
    } else if (*st) {
      dwave_study* raw = nullptr;
      check(dwave_study_run(st_config.c_str(), 0, &raw));
      std::unique_ptr<dwave_study, decltype(&dwave_study_destroy)> study(raw, &dwave_study_destroy);
      check(dwave_study_write(study.get(), st_out.c_str()));
      std::cout << "alpha,metric,order\n";
      for (std::size_t k = 0; k < dwave_study_order_count(study.get()); ++k) {
        double al = 0, order = 0;
        const char* metric = nullptr;
        check(dwave_study_order(study.get(), k, &al, &metric, &order));
        std::cout << fmt(al) << ',' << metric << ',' << fmt(order) << '\n';
      }
      if (const std::size_t f = dwave_study_failed_cells(study.get()))
        std::cerr << f << " cell(s) failed; see the status column of " << st_out << "/results.csv\n";
    } else if (*mx) {
      const FemPtr fem = make_fem(mx_dim, mx_h);
      check(dwave_fem_export_matrix(fem.get(), mx_which.c_str(), mx_out.c_str()));
    }
  } catch (const Failure& f) {
    std::cerr << "error (" << dwave_status_name(f.status) << "): " << f.message << '\n';
    return static_cast<int>(f.status) == 0 ? 1 : static_cast<int>(f.status);
  }
  return 0;
}

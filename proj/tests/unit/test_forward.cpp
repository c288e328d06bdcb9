#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dwave/error.hpp"
#include "dwave/fem.hpp"
#include "dwave/forward.hpp"
#include "dwave/specfun.hpp"
#include "dwave/spectral.hpp"

using namespace dwave;
using namespace dwave::forward;
using std::numbers::pi;

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Vec random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> N;
  Vec v(n);
  for (double& x : v) x = N(gen);
  return v;
}

}  // namespace

TEST_CASE("CQ weights") {
  const CqWeights w(1.5, 4);
  const double want[] = {1.0, -1.5, 0.375, 0.0625, 0.0234375};
  for (int j = 0; j <= 4; ++j) CHECK(w[j] == doctest::Approx(want[j]).epsilon(1e-15));

  const CqWeights one(1.0, 5);
  CHECK(one[0] == 1.0);
  CHECK(one[1] == -1.0);
  for (int j = 2; j <= 5; ++j) CHECK(one[j] == 0.0);

  // sum_{j<=n} b_j = Gamma(n+1-a) / (Gamma(1-a) Gamma(n+1))
  for (double a : {1.25, 1.5, 1.75}) {
    const int n = 10000;
    const CqWeights ww(a, n);
    double s = 0.0;
    for (int j = 0; j <= n; ++j) s += ww[j];
    const double want_s =
        std::exp(std::lgamma(n + 1 - a) - std::lgamma(n + 1.0)) * specfun::rgamma(1 - a);
    CHECK(std::abs(s - want_s) < 1e-5);
    CHECK(std::abs(s - want_s) < 1e-9 * std::abs(want_s) + 1e-15);
    for (int j = 2; j <= 50; ++j) CHECK(ww[j] > 0.0);
  }
  CHECK_THROWS_AS(CqWeights(0.0, 3), Error);
  CHECK_THROWS_AS(CqWeights(2.1, 3), Error);
}

TEST_CASE("exact modal evolution") {
  const auto B = spectral::EigenBasis::continuous_1d(3);
  const spectral::ModalField a(B, {1.0, 0.0, 2.0}), b(B, {0.0, 1.0, 0.0});
  const spectral::ModalField u0 = evolve_exact_modal(a, b, 1.5, 0.0);
  CHECK(u0.coeffs == a.coeffs);

  // frozen oracle values E_{1.5,1}(-pi^2), E_{1.5,2}(-pi^2)
  const auto [F, Fb] = exact_operators(pi * pi, 1.5, 1.0);
  CHECK(F == doctest::Approx(-0.11527434844270768).epsilon(1e-12));
  CHECK(Fb == doctest::Approx(0.047280700116898278).epsilon(1e-12));
  const spectral::ModalField u1 = evolve_exact_modal(a, b, 1.5, 1.0);
  CHECK(u1.coeffs[0] == doctest::Approx(F).epsilon(1e-15));

  // alpha = 1 is exponential decay, alpha = 2 the wave equation
  CHECK(exact_operators(4.0, 1.0, 0.5).first == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(exact_operators(4.0, 2.0, 0.5).first == doctest::Approx(std::cos(1.0)).epsilon(1e-14));
  CHECK(exact_operators(4.0, 2.0, 0.5).second == doctest::Approx(std::sin(1.0) / 2).epsilon(1e-14));

  const auto C = spectral::EigenBasis::continuous_1d(4);
  CHECK_THROWS_AS(evolve_exact_modal(a, spectral::ModalField::zeros(C), 1.5, 1.0), Error);
}

TEST_CASE("CQ recursion, closed cases") {
  const double a = 1.5, tau = 0.1;
  // lambda = 0 keeps the initial drift
  const Trajectory z = evolve_cq_modal({0.0}, {1.0}, {2.0}, a, tau, 10);
  for (int n = 0; n <= 10; ++n) CHECK(z.states[static_cast<std::size_t>(n)][0] == doctest::Approx(1.0 + 2.0 * n * tau));

  // one step: W_1 = -lambda (a + tau b) / (tau^-a + lambda)
  const double lam = 7.0;
  const Trajectory one = evolve_cq_modal({lam}, {1.0}, {3.0}, a, tau, 1);
  const double w1 = -lam * (1.0 + tau * 3.0) / (std::pow(tau, -a) + lam);
  CHECK(one.states[1][0] == doctest::Approx(1.0 + tau * 3.0 + w1).epsilon(1e-14));

  const auto [F1, Fb1] = discrete_operator_f(lam, a, tau, 1);
  CHECK(F1 == doctest::Approx(1.0 - lam / (std::pow(tau, -a) + lam)).epsilon(1e-14));
  CHECK(Fb1 == doctest::Approx(tau - lam * tau / (std::pow(tau, -a) + lam)).epsilon(1e-14));
  const auto [F0, Fb0] = discrete_operator_f(lam, a, tau, 0);
  CHECK(F0 == 1.0);
  CHECK(Fb0 == 0.0);
}

TEST_CASE("CQ against a brute-force discrete Duhamel sum") {
  // (tau^-a (1 - xi)^a + lambda) U(xi) = F(xi): invert the series directly
  const double a = 1.25, tau = 0.02, lam = 30.0;
  const int N = 60;
  const CqWeights w(a, N);
  std::vector<double> c(N + 1), e(N + 1);
  for (int j = 0; j <= N; ++j) c[static_cast<std::size_t>(j)] = std::pow(tau, -a) * w[j] + (j == 0 ? lam : 0.0);
  e[0] = 1.0 / c[0];
  for (int n = 1; n <= N; ++n) {
    double s = 0.0;
    for (int j = 1; j <= n; ++j) s += c[static_cast<std::size_t>(j)] * e[static_cast<std::size_t>(n - j)];
    e[static_cast<std::size_t>(n)] = -s / c[0];
  }
  std::vector<Vec> f(N + 1, Vec{1.0});
  const Trajectory tr = evolve_cq_modal({lam}, {0.0}, {0.0}, a, tau, N, &f);
  for (int n = 1; n <= N; ++n) {
    double u = 0.0;
    for (int k = 1; k <= n; ++k) u += e[static_cast<std::size_t>(n - k)];
    CHECK(tr.states[static_cast<std::size_t>(n)][0] == doctest::Approx(u).epsilon(1e-12));
  }
}

TEST_CASE("CQ converges to the Mittag-Leffler operators at first order") {
  // max error over t in {0.25, 0.3, ..., 1}; at a single t the error can
  // pass through zero and spoil the fit. Coarser steps are pre-asymptotic
  // for alpha = 1.75, lambda = 100.
  for (double a : {1.25, 1.5, 1.75})
    for (double lam : {pi * pi, 4 * pi * pi, 100.0}) {
      std::vector<double> taus, eF, eFb;
      for (int N : {160, 320, 640, 1280, 2560}) {
        const DiscreteOperators d = discrete_operator_series(lam, a, 1.0 / N, N);
        double mf = 0, mb = 0;
        for (int k = 5; k <= 20; ++k) {
          const int n = k * N / 20;
          const auto [E, Eb] = exact_operators(lam, a, k / 20.0);
          mf = std::max(mf, std::abs(d.F[static_cast<std::size_t>(n)] - E));
          mb = std::max(mb, std::abs(d.Fbar[static_cast<std::size_t>(n)] - Eb));
        }
        taus.push_back(1.0 / N);
        eF.push_back(mf);
        eFb.push_back(mb);
      }
      INFO("alpha=" << a << " lambda=" << lam);
      CHECK(slope(taus, eF) >= 0.9);
      CHECK(slope(taus, eFb) >= 0.9);
    }
}

TEST_CASE("weighted CQ error bound, regression constant") {
  // lambda^-1 |E(t_n) - F^n| <= C tau t_n^(a-1); max over this grid measured
  // at 0.3234 (alpha = 1.75)
  double worst = 0.0;
  for (double a : {1.25, 1.5, 1.75})
    for (double lam : {pi * pi, 4 * pi * pi, 100.0})
      for (int N : {40, 160, 640}) {
        const double tau = 1.0 / N;
        const DiscreteOperators d = discrete_operator_series(lam, a, tau, N);
        for (int n : {N / 4, N / 2, N}) {
          const double t = n * tau;
          const double E = specfun::ml(a, 1.0, -lam * std::pow(t, a));
          worst = std::max(worst, std::abs(E - d.F[static_cast<std::size_t>(n)]) / lam / (tau * std::pow(t, a - 1)));
        }
      }
  CHECK(worst <= 0.33);
  CHECK(worst >= 0.30);
}

TEST_CASE("sign of the discrete operators on [1, 1.2]") {
  // holds for alpha = 1.25 and 1.5; for 1.75 F changes sign at some lambda
  for (double a : {1.25, 1.5})
    for (double tau : {0.01, 0.005})
      for (double lam : {pi * pi, 4 * pi * pi, 100.0, 1e3, 1e4, 1e6}) {
        const int N2 = static_cast<int>(std::lround(1.2 / tau));
        const DiscreteOperators d = discrete_operator_series(lam, a, tau, N2);
        for (int n = static_cast<int>(std::lround(1.0 / tau)); n <= N2; ++n) {
          INFO("alpha=" << a << " lambda=" << lam << " n=" << n);
          CHECK(d.F[static_cast<std::size_t>(n)] < 0.0);
          CHECK(d.Fbar[static_cast<std::size_t>(n)] > 0.0);
        }
      }
  bool flips = false;
  const DiscreteOperators d = discrete_operator_series(pi * pi, 1.75, 0.01, 120);
  for (int n = 100; n <= 120; ++n) flips = flips || d.F[static_cast<std::size_t>(n)] >= 0.0 || d.Fbar[static_cast<std::size_t>(n)] <= 0.0;
  CHECK(flips);
}

TEST_CASE("FEM recursion agrees with the modal recursion") {
  const double h = 1.0 / 8, a = 1.5, tau = 0.05;
  const int N = 20;
  const fem::FemSystem sys = fem::FemSystem::assemble(1, h);
  const auto B = spectral::EigenBasis::fem_1d(h);
  const Vec a0 = random_vec(sys.dof_count(), 1), b0 = random_vec(sys.dof_count(), 2);
  const Vec fn = random_vec(sys.dof_count(), 3);
  const Vec load = sys.mass() * fn;

  const Trajectory tf = evolve_cq_fem(sys, a0, b0, a, tau, N, [&](int) { return load; });
  std::vector<Vec> fm(N + 1, spectral::modal_from_load(load, B).coeffs);
  const Trajectory tm = evolve_cq_modal(B->eigenvalues(), spectral::project_nodal(a0, B).coeffs,
                                        spectral::project_nodal(b0, B).coeffs, a, tau, N, &fm);
  REQUIRE(tf.states.size() == static_cast<std::size_t>(N + 1));
  for (int n : {1, 7, N}) {
    const Vec back = spectral::reconstruct_nodal(spectral::ModalField(B, tm.states[static_cast<std::size_t>(n)]));
    double e = 0, s = 0;
    for (std::size_t i = 0; i < back.size(); ++i) {
      e = std::max(e, std::abs(back[i] - tf.states[static_cast<std::size_t>(n)][i]));
      s = std::max(s, std::abs(back[i]));
    }
    CHECK(e < 1e-9 * s);
  }
}

TEST_CASE("FEM recursion: mass-only hook, superposition, kept steps") {
  const fem::FemSystem sys = fem::FemSystem::assemble(2, 1.0 / 6);
  const Vec a0 = random_vec(sys.dof_count(), 4), b0 = random_vec(sys.dof_count(), 5);
  const double tau = 0.1;
  CqFemOptions mo;
  mo.mass_only = true;
  const Trajectory m = evolve_cq_fem(sys, a0, b0, 1.5, tau, 8, {}, mo);
  for (int n = 0; n <= 8; ++n)
    for (std::size_t i = 0; i < a0.size(); ++i)
      CHECK(m.states[static_cast<std::size_t>(n)][i] == doctest::Approx(a0[i] + n * tau * b0[i]).epsilon(1e-10));

  const Trajectory ua = evolve_cq_fem(sys, a0, Vec(a0.size(), 0.0), 1.5, tau, 8);
  const Trajectory ub = evolve_cq_fem(sys, Vec(a0.size(), 0.0), b0, 1.5, tau, 8);
  const Trajectory uab = evolve_cq_fem(sys, a0, b0, 1.5, tau, 8);
  for (std::size_t i = 0; i < a0.size(); ++i)
    CHECK(std::abs(uab.states[8][i] - ua.states[8][i] - ub.states[8][i]) < 1e-10);

  CqFemOptions keep;
  keep.keep = {3, 8};
  const Trajectory k = evolve_cq_fem(sys, a0, b0, 1.5, tau, 8, {}, keep);
  REQUIRE(k.states.size() == 2);
  CHECK(k.times[0] == doctest::Approx(0.3));
  for (std::size_t i = 0; i < a0.size(); ++i) CHECK(std::abs(k.states[1][i] - uab.states[8][i]) < 1e-14);
}

TEST_CASE("step counts") {
  CHECK(steps_for(1.2, 0.01) == 120);
  CHECK(steps_for(1.0, 1.0 / 256) == 256);
  CHECK_THROWS_AS(steps_for(1.2, 1.0 / 256), Error);
  try {
    steps_for(1.2, 1.0 / 512);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("tau") != std::string::npos);
  }
}

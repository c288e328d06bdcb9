#include <array>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "doctest.h"
#include "dwave/error.hpp"
#include "dwave/specfun.hpp"
#include "oracle/ml_oracle.hpp"

using namespace dwave::specfun;
using std::numbers::pi;

namespace {
double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }
}  // namespace

TEST_CASE("parameters are validated") {
  CHECK_THROWS_AS(MlParams(0.0, 1.0), dwave::Error);
  CHECK_THROWS_AS(MlParams(2.5, 1.0), dwave::Error);
  CHECK_THROWS_AS(MlParams(1.5, 0.0), dwave::Error);
  CHECK_THROWS_AS(MlParams(1.5, -1.0), dwave::Error);
  CHECK_NOTHROW(MlParams(2.0, 1.0));
  try {
    ml_eval(MlParams(1.5, 1.0), 0.5);
    FAIL("positive argument accepted");
  } catch (const dwave::Error& e) {
    CHECK(e.code() == dwave::ErrorCode::Domain);
  }
}

TEST_CASE("gamma with reflection") {
  CHECK(rel(gamma_fn(0.5), std::sqrt(pi)) < 1e-15);
  CHECK(rel(gamma_fn(-0.5), -2.0 * std::sqrt(pi)) < 1e-14);
  CHECK(rel(gamma_fn(1.0 - 1.5), -2.0 * std::sqrt(pi)) < 1e-14);
  CHECK_THROWS_AS(gamma_fn(0.0), dwave::Error);
  CHECK_THROWS_AS(gamma_fn(-3.0), dwave::Error);
  CHECK(rgamma(-2.0) == 0.0);
  CHECK(rel(rgamma(-0.25), 1.0 / std::tgamma(-0.25)) < 1e-14);
}

TEST_CASE("frozen values from the extended-precision oracle") {
  struct Case {
    double a, b, z, want;
  };
  // minted with a 60+ digit series sum
  const std::array<Case, 6> cases{{
      {1.0, 1.0, -1.0, 0.36787944117144233},
      {1.5, 2.0, -50.0, 0.011167669745851065},
      {1.5, 1.0, -pi * pi, -0.11527434844270768},
      {1.5, 2.0, -pi * pi, 0.047280700116898278},
      {1.25, 1.0, -10.0, -0.033192071062565767},
      {1.75, 2.0, -30.0, 0.019033966465866220},
  }};
  for (const auto& c : cases) {
    const MlValue v = ml_eval(MlParams(c.a, c.b), c.z);
    INFO("a=" << c.a << " b=" << c.b << " z=" << c.z << " branch=" << to_string(v.branch));
    CHECK(rel(v.value, c.want) < 1e-12);
    CHECK(v.est_abs_error <= 1e-12 * std::abs(v.value));
  }
}

TEST_CASE("trivial values") {
  for (double a : {0.3, 1.0, 1.25, 1.5, 1.75, 2.0}) CHECK(ml(a, 1.0, 0.0) == 1.0);
  CHECK(std::abs(ml(2.0, 1.0, -pi * pi / 4.0)) < 1e-15);
  // leading asymptotic term 1/(Gamma(1/2) 50) within 5%
  const double lead = 1.0 / (std::tgamma(0.5) * 50.0);
  CHECK(rel(ml(1.5, 2.0, -50.0), lead) < 0.05);
}

TEST_CASE("agreement with the MPFR series oracle across branches") {
  const std::vector<double> alphas{0.5, 0.9, 1.0001, 1.25, 1.5, 1.75, 1.95};
  for (double a : alphas) {
    for (double b : {1.0, 2.0, a, a + 1.0, 2.5}) {
      for (double x : {0.5, 1.5, 5.0, 20.0, 80.0, 300.0}) {
        if (std::pow(x, 1.0 / a) > 400.0) continue;  // oracle cost
        const MlValue v = ml_eval(MlParams(a, b), -x);
        const double want = oracle::ml_series(a, b, -x);
        INFO("a=" << a << " b=" << b << " x=" << x << " branch=" << to_string(v.branch));
        CHECK(std::abs(v.value - want) <= 1e-12 * std::abs(want) + 1e-15);
        CHECK(std::abs(v.value - want) <= 10.0 * v.est_abs_error + 1e-300);
      }
    }
  }
}

TEST_CASE("branch agreement in the overlap windows") {
  for (double a : {1.25, 1.5, 1.75}) {
    for (double b : {1.0, 2.0}) {
      const MlParams p(a, b);
      for (double x : {0.25, 0.5, 1.0, 1.5, 2.0}) {
        const double s = ml_eval(p, -x, Branch::Series).value;
        const double i = ml_eval(p, -x, Branch::Integral).value;
        INFO("series/integral a=" << a << " b=" << b << " x=" << x);
        CHECK(rel(i, s) < 1e-8);
      }
      for (double x : {2e3, 1e4, 1e5}) {
        const double s = ml_eval(p, -x, Branch::Asymptotic).value;
        const double i = ml_eval(p, -x, Branch::Integral).value;
        INFO("asymptotic/integral a=" << a << " b=" << b << " x=" << x);
        CHECK(rel(i, s) < 1e-8);
      }
    }
  }
}

TEST_CASE("every evaluation records a branch and a finite error estimate") {
  for (double a : {0.7, 1.0, 1.3, 1.6, 1.9, 2.0}) {
    for (double x : {0.0, 0.3, 3.0, 30.0, 3e3, 3e5, 1e8}) {
      if (a == 2.0 && x > 30.0) continue;
      const MlValue v = ml_eval(MlParams(a, 1.0), -x);
      CHECK(std::isfinite(v.est_abs_error));
      CHECK(v.est_abs_error >= 0.0);
      if (x <= 1.0) CHECK(v.branch == Branch::Series);
    }
  }
}

TEST_CASE("recurrence identity") {
  CHECK(std::abs(ml_recurrence_residual(MlParams(1.5, 1.0), -2.0)) <= 1e-11);
  CHECK(ml_recurrence_residual(MlParams(1.25, 2.0), 0.0) == 0.0);
  const MlParams p(1.75, 1.0);
  const double e = ml(1.75, 1.0, -1e4);
  CHECK(rel(e, -2.0675604082918123e-05) < 1e-12);
  CHECK(std::abs(ml_recurrence_residual(p, -1e4)) <= 1e-9 * std::abs(e));
  CHECK(rel(ml(1.75, 2.75, -1e4), 1.0000206756040829e-04) < 1e-12);
  for (double a : {0.6, 1.3, 1.7})
    for (double x : {0.5, 4.0, 60.0, 5e3})
      CHECK(std::abs(ml_recurrence_residual(MlParams(a, 1.0), -x)) <= 1e-12);
}

TEST_CASE("boundedness against measured constants") {
  // max over z = 10^k, k = 0..6 of |E_{a,b}(-z)| (1 + z), measured once
  struct Bound {
    double a, b, c;
  };
  const std::array<Bound, 6> bounds{{{1.25, 1, 0.731069},
                                     {1.25, 2, 1.36457},
                                     {1.5, 1, 1.20684},
                                     {1.5, 2, 1.47496},
                                     {1.75, 1, 4.99313},
                                     {1.75, 2, 1.58434}}};
  for (const auto& bd : bounds) {
    double worst = 0.0;
    for (int k = 0; k <= 6; ++k) {
      const double z = std::pow(10.0, k);
      worst = std::max(worst, std::abs(ml(bd.a, bd.b, -z)) * (1.0 + z));
    }
    CHECK(worst <= bd.c * (1.0 + 1e-5));
    CHECK(worst >= bd.c * (1.0 - 1e-5));
  }
}

TEST_CASE("asymptotic limits at z = 1e8") {
  for (double a : {1.25, 1.5, 1.75}) {
    const double z = 1e8;
    CHECK(rel(z * ml(a, 1.0, -z), 1.0 / gamma_fn(1.0 - a)) < 1e-3);
    CHECK(rel(z * ml(a, 2.0, -z), 1.0 / gamma_fn(2.0 - a)) < 1e-3);
    // sign structure beyond the crossover
    CHECK(ml(a, 1.0, -z) < 0.0);
    CHECK(ml(a, 2.0, -z) > 0.0);
  }
}

TEST_CASE("classical identities") {
  for (double x = 0.0; x <= 25.0; x += 0.25) {
    CHECK(std::abs(ml(1.0, 1.0, -x) - std::exp(-x)) < 1e-10);
    CHECK(std::abs(ml(2.0, 1.0, -x) - std::cos(std::sqrt(x))) < 1e-10);
  }
  // the general contour machinery approaches the exponential as alpha -> 1
  for (double x : {2.0, 5.0, 10.0}) CHECK(std::abs(ml(1.0 + 1e-6, 1.0, -x) - std::exp(-x)) < 1e-5);
}

TEST_CASE("concurrent evaluation is consistent") {
  std::vector<double> serial;
  for (int i = 0; i < 64; ++i) serial.push_back(ml(1.5, 1.0, -0.37 * i * i));
  std::vector<double> par(serial.size());
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      for (std::size_t i = t; i < par.size(); i += 4) par[i] = ml(1.5, 1.0, -0.37 * i * i);
    });
  for (auto& th : threads) th.join();
  CHECK(par == serial);
}

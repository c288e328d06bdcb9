#pragma once

// Extended-precision Mittag-Leffler oracle for tests only. It sums the
// defining power series in MPFR with enough guard bits to absorb the
// cancellation (the largest term is about exp(x^{1/a})), so it shares no code
// path with the library evaluator.

#include <mpfr.h>

#include <algorithm>
#include <cmath>

namespace oracle {

inline double ml_series(double alpha, double beta, double z, long min_bits = 512) {
  const double x = -z;
  const double peak = x > 0 ? std::pow(x, 1.0 / alpha) : 0.0;
  const long bits = std::max(min_bits, static_cast<long>(160 + 1.6 * peak * 1.4427));

  mpfr_t a, b, zz, sum, term, g, arg, pw, prev;
  for (mpfr_ptr p : {a, b, zz, sum, term, g, arg, pw, prev}) mpfr_init2(p, bits);
  mpfr_set_d(a, alpha, MPFR_RNDN);
  mpfr_set_d(b, beta, MPFR_RNDN);
  mpfr_set_d(zz, z, MPFR_RNDN);
  mpfr_set_ui(sum, 0, MPFR_RNDN);
  mpfr_set_ui(pw, 1, MPFR_RNDN);
  mpfr_set_inf(prev, 1);

  for (long k = 0; k < 2000000; ++k) {
    mpfr_mul_si(arg, a, k, MPFR_RNDN);  // a*k in full precision
    mpfr_add(arg, arg, b, MPFR_RNDN);
    mpfr_gamma(g, arg, MPFR_RNDN);
    mpfr_div(term, pw, g, MPFR_RNDN);
    mpfr_add(sum, sum, term, MPFR_RNDN);
    mpfr_mul(pw, pw, zz, MPFR_RNDN);

    mpfr_abs(term, term, MPFR_RNDN);
    const bool past_peak = mpfr_get_d(arg, MPFR_RNDN) > peak + 2.0 && mpfr_cmp(term, prev) < 0;
    if (past_peak && !mpfr_zero_p(sum)) {
      // stop when the term is far below the (possibly tiny) sum
      mpfr_t ratio;
      mpfr_init2(ratio, 64);
      mpfr_div(ratio, term, sum, MPFR_RNDN);
      mpfr_abs(ratio, ratio, MPFR_RNDN);
      const bool done = mpfr_get_d(ratio, MPFR_RNDN) < 1e-40;
      mpfr_clear(ratio);
      if (done) break;
    }
    if (x == 0.0) break;
    mpfr_set(prev, term, MPFR_RNDN);
  }
  const double out = mpfr_get_d(sum, MPFR_RNDN);
  for (mpfr_ptr p : {a, b, zz, sum, term, g, arg, pw, prev}) mpfr_clear(p);
  return out;
}

}  // namespace oracle

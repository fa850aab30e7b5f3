#pragma once

// Independent numeric oracle: sum c_j sqrt(p_j) evaluated with MPFR at about
// 100 decimal digits.

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <vector>

namespace oracle {

inline int mpfr_sign_of(const std::vector<mpq_class>& coeffs, const std::vector<std::uint32_t>& radicands) {
  constexpr mpfr_prec_t kBits = 340;
  mpfr_t acc, term, root;
  mpfr_inits2(kBits, acc, term, root, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_zero(acc, 1);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    mpfr_set_ui(root, radicands[j], MPFR_RNDN);
    mpfr_sqrt(root, root, MPFR_RNDN);
    mpfr_set_q(term, coeffs[j].get_mpq_t(), MPFR_RNDN);
    mpfr_mul(term, term, root, MPFR_RNDN);
    mpfr_add(acc, acc, term, MPFR_RNDN);
  }
  int s = mpfr_zero_p(acc) ? 0 : mpfr_sgn(acc);
  // Anything this small is treated as an exact cancellation.
  if (s != 0 && mpfr_get_exp(acc) < -300) s = 0;
  mpfr_clears(acc, term, root, static_cast<mpfr_ptr>(nullptr));
  return s;
}

inline double mpfr_value_of(const std::vector<mpq_class>& coeffs, const std::vector<std::uint32_t>& radicands) {
  mpfr_t acc, term, root;
  mpfr_inits2(340, acc, term, root, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_zero(acc, 1);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    mpfr_set_ui(root, radicands[j], MPFR_RNDN);
    mpfr_sqrt(root, root, MPFR_RNDN);
    mpfr_set_q(term, coeffs[j].get_mpq_t(), MPFR_RNDN);
    mpfr_mul(term, term, root, MPFR_RNDN);
    mpfr_add(acc, acc, term, MPFR_RNDN);
  }
  double out = mpfr_get_d(acc, MPFR_RNDN);
  mpfr_clears(acc, term, root, static_cast<mpfr_ptr>(nullptr));
  return out;
}

}  // namespace oracle

#pragma once

// Pointwise oracle for derivations: a point of the final chart is pulled back
// to the initial chart by evaluating each step's defining equation, so that
// identities can be checked without the library's substitution code.

#include <gmpxx.h>

#include <variant>
#include <vector>

#include "vforge/chart.hpp"
#include "vforge/poly.hpp"

namespace oracle {

using Point = std::vector<mpq_class>;

inline mpq_class power(const mpq_class& base, std::int64_t e) {
  mpq_class out = 1;
  for (std::int64_t k = 0; k < e; ++k) out *= base;
  return out;
}

inline mpq_class monomial_at(const vforge::Exponents& e, const Point& p) {
  mpq_class out = 1;
  for (std::size_t k = 0; k < e.size(); ++k) out *= power(p[k], e[k]);
  return out;
}

inline mpq_class evaluate(const vforge::Poly& f, const Point& p) {
  mpq_class out = 0;
  for (const auto& [e, c] : f.terms()) out += c * monomial_at(e, p);
  return out;
}

inline Point pull_back(const vforge::Derivation& d, Point p) {
  const auto& steps = d.steps();
  for (std::size_t k = steps.size(); k-- > 0;) {
    const vforge::StepRecord& rec = steps[k];
    Point old = p;
    if (std::holds_alternative<vforge::Primitive>(rec.step)) {
      old[rec.positions[0]] = p[rec.positions[0]] * p[rec.divisor];
    } else if (const auto* m1 = std::get_if<vforge::Mono1>(&rec.step)) {
      for (std::size_t i = 0; i < rec.positions.size(); ++i) {
        mpq_class v = 1;
        for (std::size_t l = 0; l < rec.positions.size(); ++l) v *= power(p[rec.positions[l]], m1->matrix[i][l]);
        old[rec.positions[i]] = v;
      }
    } else if (const auto* mk = std::get_if<vforge::Monomial>(&rec.step)) {
      mpq_class v = p[rec.positions[0]];
      for (std::size_t i = 0; i < rec.support.size(); ++i) v *= power(p[rec.support[i]], mk->exponents[i]);
      old[rec.positions[0]] = v;
    } else if (const auto* tr = std::get_if<vforge::Translate>(&rec.step)) {
      old[rec.positions[0]] = p[rec.positions[0]] + tr->lambda * monomial_at(tr->shift, p);
    } else if (const auto* rn = std::get_if<vforge::Rename>(&rec.step)) {
      old[rec.positions[0]] = evaluate(rn->num, p) / evaluate(rn->den, p);
    }
    p = std::move(old);
  }
  return p;
}

}  // namespace oracle

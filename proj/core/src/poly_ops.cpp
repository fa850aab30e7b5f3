#include "vforge/poly_ops.hpp"

#include <algorithm>

#include "vforge/errors.hpp"

namespace vforge {

GroupValue value_of(const Poly& f, const Chart& chart, int level) {
  GroupValue best = GroupValue::infinity();
  for (const auto& [e, c] : f.terms()) {
    GroupValue v = truncate_at_level(chart.monomial_value(e), level);
    if (compare(v, best, chart.frame()) == std::strong_ordering::less) best = v;
  }
  return best;
}

GroupValue full_value_of(const Poly& f, const Chart& chart) {
  GroupValue best = GroupValue::infinity();
  for (const auto& [e, c] : f.terms()) {
    GroupValue v = chart.monomial_value(e);
    if (chart.compare(v, best) == std::strong_ordering::less) best = v;
  }
  return best;
}

Poly initial_form(const Poly& f, const Chart& chart, int level) {
  if (f.is_zero()) throw PreconditionError("initial-form", "zero polynomial");
  GroupValue best = value_of(f, chart, level);
  Poly out(f.field(), f.arity());
  for (const auto& [e, c] : f.terms()) {
    GroupValue v = truncate_at_level(chart.monomial_value(e), level);
    if (compare(v, best, chart.frame()) == std::strong_ordering::equal) out.add_term(e, c);
  }
  return out;
}

Exponents minimal_monomial(const Poly& f, const Chart& chart) {
  if (f.is_zero()) throw PreconditionError("minimal-monomial", "zero polynomial");
  const Exponents* best = nullptr;
  GroupValue best_value;
  for (const auto& [e, c] : f.terms()) {
    GroupValue v = chart.monomial_value(e);
    if (!best || chart.compare(v, best_value) == std::strong_ordering::less) {
      best = &e;
      best_value = v;
    }
  }
  return *best;
}

namespace {

Poly translate_image(const Poly& f, const StepRecord& rec, const Translate& t) {
  std::size_t v = rec.positions[0];
  Poly repl = Poly::variable(f.field(), f.arity(), v) + Poly::monomial(f.field(), t.shift, t.lambda);
  return f.compose_var(v, repl);
}

// p(var = n/d) * d^deg, the numerator of the composite.
Poly homogenized(const Poly& p, std::size_t var, const Poly& n, const Poly& d, std::int64_t deg) {
  auto coeffs = p.coefficients_in(var);
  Poly out(p.field(), p.arity());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k].is_zero()) continue;
    out += coeffs[k] * n.pow(static_cast<unsigned>(k)) * d.pow(static_cast<unsigned>(deg - static_cast<std::int64_t>(k)));
  }
  return out;
}

}  // namespace

Poly substitute_step(const Poly& f, const StepRecord& rec) {
  if (const auto* t = std::get_if<Translate>(&rec.step)) return translate_image(f, rec, *t);
  if (const auto* rn = std::get_if<Rename>(&rec.step)) {
    std::size_t v = rec.positions[0];
    if (f.degree_in(v) <= 0) return f;
    if (rn->den.size() != 1 || !is_local_unit(rn->den)) {
      throw PreconditionError("substitute", "rename with a non-constant denominator needs fraction substitution");
    }
    mpq_class inv = 1 / rn->den.constant_term();
    return f.compose_var(v, rn->num.scaled(inv));
  }
  return f.map_exponents(f.arity(), [&](const Exponents& e) { return monomial_image_step(e, rec); });
}

LocalFraction substitute_step(const LocalFraction& f, const StepRecord& rec) {
  if (const auto* rn = std::get_if<Rename>(&rec.step)) {
    std::size_t v = rec.positions[0];
    std::int64_t dn = std::max<std::int64_t>(f.num.degree_in(v), 0);
    std::int64_t dd = std::max<std::int64_t>(f.den.degree_in(v), 0);
    Poly a = homogenized(f.num, v, rn->num, rn->den, dn);
    Poly b = homogenized(f.den, v, rn->num, rn->den, dd);
    LocalFraction out = dn >= dd ? LocalFraction{a, b * rn->den.pow(static_cast<unsigned>(dn - dd))}
                                 : LocalFraction{a * rn->den.pow(static_cast<unsigned>(dd - dn)), b};
    if (!is_local_unit(out.den)) throw PreconditionError("substitute", "denominator stopped being a unit");
    return out;
  }
  LocalFraction out{substitute_step(f.num, rec), substitute_step(f.den, rec)};
  if (!is_local_unit(out.den)) throw PreconditionError("substitute", "denominator stopped being a unit");
  return out;
}

Poly substitute(const Poly& f, const Derivation& d, std::size_t from_step, std::size_t to_step) {
  Poly out = f;
  for (std::size_t k = from_step; k < to_step; ++k) out = substitute_step(out, d.steps()[k]);
  return out;
}

Poly substitute(const Poly& f, const Derivation& d) { return substitute(f, d, 0, d.size()); }

LocalFraction substitute_fraction(const LocalFraction& f, const Derivation& d, std::size_t from_step) {
  LocalFraction out = f;
  for (std::size_t k = from_step; k < d.size(); ++k) out = substitute_step(out, d.steps()[k]);
  return out;
}

std::string canonical_string(const Poly& f, const Chart& chart) {
  std::vector<std::pair<GroupValue, Exponents>> keyed;
  for (const auto& [e, c] : f.terms()) keyed.emplace_back(chart.monomial_value(e), e);
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    auto ord = chart.compare(a.first, b.first);
    if (ord != std::strong_ordering::equal) return ord == std::strong_ordering::less;
    return a.second < b.second;
  });
  std::vector<Exponents> order;
  for (auto& [v, e] : keyed) order.push_back(e);
  return render_terms(f, chart.names(), order);
}

}  // namespace vforge

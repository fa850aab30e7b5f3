#include "vforge/perron.hpp"

#include <algorithm>
#include <sstream>

#include "vforge/errors.hpp"
#include "vforge/poly_ops.hpp"

namespace vforge {

namespace {

void check_limits(const Derivation& d, std::size_t start, const Limits& limits) {
  if (limits.stop.stop_requested()) throw Cancelled();
  if (d.size() - start > limits.max_steps) {
    std::ostringstream trace;
    trace << "chart after " << d.size() << " steps:";
    for (const auto& v : d.current().variables()) {
      trace << ' ' << v.name << '=' << (v.value ? to_string(*v.value) : "?");
    }
    trace << "\nlast steps:";
    std::size_t from = d.size() > 20 ? d.size() - 20 : 0;
    for (std::size_t k = from; k < d.size(); ++k) {
      trace << "\n  " << k + 1 << ": " << kind_name(d.steps()[k].step) << ' ' << d.steps()[k].outputs.at(0).name;
    }
    throw StepCapExceeded(limits.max_steps, trace.str());
  }
}

const GroupValue& finite_value(const Chart& chart, std::size_t k) {
  const auto& v = chart.variable(k).value;
  if (!v || v->is_infinite()) throw PreconditionError("perron", chart.variable(k).name + " has no finite value");
  return *v;
}

// Block indices ordered by ascending value.
std::vector<std::size_t> sorted_block(const Chart& chart, int block) {
  auto idx = chart.block_indices(block);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return compare(finite_value(chart, a), finite_value(chart, b), chart.frame()) == std::strong_ordering::less;
  });
  return idx;
}

Exponents difference(const Exponents& a, const Exponents& b) {
  Exponents out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = checked_add(a[k], -b[k]);
  return out;
}

bool is_nonnegative(const Exponents& e) {
  return std::all_of(e.begin(), e.end(), [](std::int64_t v) { return v >= 0; });
}

void require_finite_support(const Chart& chart, const Exponents& e, const char* op) {
  if (chart.monomial_value(e).is_infinite()) {
    throw PreconditionError(op, "monomial " + exponents_to_string(e) + " has infinite value");
  }
}

}  // namespace

Derivation perron_step(const Chart& chart, int block) {
  auto idx = sorted_block(chart, block);
  if (idx.size() < 2) throw PreconditionError("perron", "block " + std::to_string(block) + " has a single variable");
  if (compare(finite_value(chart, idx[0]), finite_value(chart, idx[1]), chart.frame()) ==
      std::strong_ordering::equal) {
    throw InternalError("tie for the minimum value in block " + std::to_string(block));
  }
  Derivation d(chart);
  const std::string pivot = chart.variable(idx[0]).name;
  auto ordered = chart.block_indices(block);
  for (std::size_t k : ordered) {
    if (k == idx[0]) continue;
    d.apply(Primitive{d.current().variable(k).name, pivot}, "perron:step");
  }
  return d;
}

void brun_step(Derivation& d, int block, const std::string& annotation) {
  auto idx = sorted_block(d.current(), block);
  if (idx.size() < 2) throw PreconditionError("perron", "block " + std::to_string(block) + " has a single variable");
  const auto& names = d.current();
  std::string top = names.variable(idx.back()).name;
  std::string second = names.variable(idx[idx.size() - 2]).name;
  d.apply(Primitive{top, second}, annotation);
}

Exponents clear_deficit(Derivation& d, const Exponents& deficit, const Limits& limits, const std::string& op) {
  const std::size_t start = d.size();
  Exponents e = deficit;
  if (e.size() != d.current().arity()) throw std::invalid_argument("deficit arity does not match chart");
  while (true) {
    check_limits(d, start, limits);
    const Chart& chart = d.current();
    int top = 0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      int b = chart.variable(k).block;
      if (b == 0) {
        if (e[k] < 0) {
          throw PreconditionError(op, "negative exponent on free variable " + chart.variable(k).name);
        }
        continue;
      }
      if (e[k] != 0) top = std::max(top, b);
    }
    if (top == 0) return e;
    auto idx = chart.block_indices(top);
    bool block_clear = std::all_of(idx.begin(), idx.end(), [&](std::size_t k) { return e[k] >= 0; });
    if (!block_clear) {
      Exponents restricted(e.size(), 0);
      for (std::size_t k : idx) restricted[k] = e[k];
      GroupValue v = chart.monomial_value(restricted);
      if (chart.frame().sign_in_block(top, v.block(top)) != Sign::positive) {
        throw PreconditionError(op, "deficit has negative value");
      }
      if (idx.size() == 1) throw InternalError("positive single-variable deficit with a negative exponent");
      brun_step(d, top, op + ":phase-a");
      e = monomial_image_step(e, d.steps().back());
      continue;
    }
    // Block `top` is clear; lower-block deficits are absorbed by the block.
    std::size_t donor = *std::find_if(idx.begin(), idx.end(), [&](std::size_t k) { return e[k] > 0; });
    for (std::size_t k = 0; k < e.size(); ++k) {
      int b = d.current().variable(k).block;
      if (b == 0 || b >= top) continue;
      while (e[k] < 0) {
        check_limits(d, start, limits);
        d.apply(Primitive{d.current().variable(donor).name, d.current().variable(k).name}, op + ":phase-b");
        e = monomial_image_step(e, d.steps().back());
      }
    }
    if (is_nonnegative(e)) return e;
    throw InternalError("deficit not cleared after domination phases");
  }
}

Derivation dominate(const Chart& chart, const Exponents& m1, const Exponents& m2, const Limits& limits) {
  require_finite_support(chart, m1, "dominate");
  GroupValue v1 = chart.monomial_value(m1);
  GroupValue v2 = chart.monomial_value(m2);
  auto ord = chart.compare(v1, v2);
  if (ord == std::strong_ordering::greater) throw PreconditionError("dominate", "value(M1) > value(M2)");
  Derivation d(chart);
  if (ord == std::strong_ordering::equal && v2.is_finite()) {
    if (m1 != m2 && chart.level() == 1) {
      throw InternalError("distinct monomials " + exponents_to_string(m1) + " and " + exponents_to_string(m2) +
                          " share a value");
    }
    if (m1 == m2) return d;
  }
  clear_deficit(d, difference(m2, m1), limits, "dominate");
  return d;
}

Principalization principalize(const Chart& chart, const std::vector<Exponents>& generators, const Limits& limits) {
  if (generators.empty()) throw PreconditionError("principalize", "no generators");
  std::size_t best = 0;
  for (std::size_t k = 0; k < generators.size(); ++k) {
    require_finite_support(chart, generators[k], "principalize");
    if (chart.compare(chart.monomial_value(generators[k]), chart.monomial_value(generators[best])) ==
        std::strong_ordering::less) {
      best = k;
    }
  }
  Derivation d(chart);
  for (std::size_t k = 0; k < generators.size(); ++k) {
    if (k == best) continue;
    Exponents g = transport(d, 0, generators[k]);
    Exponents m = transport(d, 0, generators[best]);
    if (divides(m, g)) continue;
    clear_deficit(d, difference(g, m), limits, "principalize");
  }
  Exponents principal = transport(d, 0, generators[best]);
  return {std::move(d), std::move(principal), best};
}

namespace {

std::vector<Exponents> support_of(const Poly& f) {
  std::vector<Exponents> out;
  for (const auto& [e, c] : f.terms()) out.push_back(e);
  return out;
}

}  // namespace

Monomialization monomialize_element(const Poly& f, const Chart& chart, const Limits& limits) {
  if (f.is_zero()) throw PreconditionError("monomialize", "zero polynomial");
  auto p = principalize(chart, support_of(f), limits);
  Poly image = substitute(f, p.derivation);
  Poly unit = divide_by_monomial(image, p.principal);
  if (!is_local_unit(unit)) throw InternalError("monomialization produced a non-unit cofactor");
  return {std::move(p.derivation), std::move(p.principal), std::move(unit)};
}

FractionMonomialization monomialize_fraction(const Poly& g, const Poly& h, const Chart& chart,
                                             const Limits& limits) {
  if (g.is_zero() || h.is_zero()) throw PreconditionError("fraction", "zero numerator or denominator");
  Exponents mg = minimal_monomial(g, chart);
  Exponents mh = minimal_monomial(h, chart);
  if (chart.compare(chart.monomial_value(mg), chart.monomial_value(mh)) == std::strong_ordering::less) {
    throw PreconditionError("fraction", "value(g) < value(h): the fraction is not in the valuation ring");
  }
  auto pg = principalize(chart, support_of(g), limits);
  Derivation d = std::move(pg.derivation);
  std::vector<Exponents> hs;
  for (const auto& e : support_of(h)) hs.push_back(transport(d, 0, e));
  auto ph = principalize(d.current(), hs, limits);
  d.append(ph.derivation);
  Exponents ig = transport(d, 0, mg);
  Exponents ih = transport(d, 0, mh);
  clear_deficit(d, difference(ig, ih), limits, "fraction");
  ig = transport(d, 0, mg);
  ih = transport(d, 0, mh);
  Exponents diff = difference(ig, ih);
  if (!is_nonnegative(diff)) throw InternalError("fraction exponent is negative after domination");
  LocalFraction unit{divide_by_monomial(substitute(g, d), ig), divide_by_monomial(substitute(h, d), ih)};
  if (!is_local_unit(unit.num) || !is_local_unit(unit.den)) throw InternalError("fraction cofactor is not a unit");
  return {std::move(d), std::move(diff), std::move(unit)};
}

std::vector<std::size_t> prime_variables(const Chart& chart, int level) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < chart.arity(); ++k) {
    const auto& v = chart.variable(k).value;
    if (!v || truncate_at_level(*v, level).is_infinite()) out.push_back(k);
  }
  return out;
}

Monomialization monomialize_mod_prime(const Poly& f, const Chart& chart, int level,
                                      const std::optional<GroupValue>& threshold, const Limits& limits) {
  if (f.is_zero()) throw PreconditionError("mod-prime", "zero polynomial");
  auto primes = prime_variables(chart, level);
  auto is_prime_var = [&](std::size_t k) { return std::find(primes.begin(), primes.end(), k) != primes.end(); };
  std::vector<Exponents> free_terms;
  std::vector<std::size_t> used_primes;
  for (const auto& [e, c] : f.terms()) {
    bool has_prime = false;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      if (is_prime_var(k)) {
        has_prime = true;
        if (std::find(used_primes.begin(), used_primes.end(), k) == used_primes.end()) used_primes.push_back(k);
      } else if (chart.variable(k).block != level) {
        throw PreconditionError("mod-prime", chart.variable(k).name + " is neither prime nor in block " +
                                                 std::to_string(level));
      }
    }
    if (!has_prime) free_terms.push_back(e);
  }
  std::sort(used_primes.begin(), used_primes.end());
  auto block = chart.block_indices(level);

  Derivation d(chart);
  Exponents m(chart.arity(), 0);
  if (!free_terms.empty()) {
    auto p = principalize(chart, free_terms, limits);
    d = std::move(p.derivation);
    m = p.principal;
    std::vector<std::int64_t> a;
    for (std::size_t k : block) a.push_back(m[k]);
    if (std::any_of(a.begin(), a.end(), [](std::int64_t v) { return v != 0; })) {
      for (std::size_t k : used_primes) {
        d.apply(Monomial{2, d.current().variable(k).name, level, a}, "mod-prime:push");
      }
    }
    Poly unit = divide_by_monomial(substitute(f, d), m);
    if (!is_local_unit(unit)) throw InternalError("mod-prime cofactor is not a unit");
    return {std::move(d), std::move(m), std::move(unit)};
  }

  if (!threshold) throw PreconditionError("mod-prime", "f lies in the prime ideal and no threshold was given");
  GroupValue target = truncate_at_level(*threshold, level);
  if (target.is_infinite()) throw PreconditionError("mod-prime", "threshold is infinite at this level");
  const GroupValue& unit_value = *chart.variable(block.at(0)).value;
  std::int64_t n = 1;
  while (compare(truncate_at_level(unit_value.scaled(n), level), target, chart.frame()) !=
         std::strong_ordering::greater) {
    ++n;
    if (static_cast<std::size_t>(n) > limits.max_steps) throw StepCapExceeded(limits.max_steps, "threshold search");
  }
  std::vector<std::int64_t> a(block.size(), 0);
  a[0] = n;
  for (std::size_t k : used_primes) d.apply(Monomial{2, d.current().variable(k).name, level, a}, "mod-prime:threshold");
  m[block[0]] = n;
  Poly cofactor = divide_by_monomial(substitute(f, d), m);
  return {std::move(d), std::move(m), std::move(cofactor)};
}

namespace {

struct Entry {
  bool present = false;
  LocalFraction value{Poly(CoefficientField::rationals(), 0), Poly(CoefficientField::rationals(), 0)};
};

}  // namespace

Diagonalization diagonalize_parameters(const Chart& chart, int level, const std::vector<std::string>& ys,
                                       const std::vector<std::vector<LinearCoefficient>>& relations,
                                       const Limits& limits) {
  const std::size_t m = ys.size();
  if (relations.size() != m) throw PreconditionError("diagonalize", "the system must be square");
  std::vector<std::size_t> ypos;
  auto primes = prime_variables(chart, level);
  for (const auto& y : ys) {
    std::size_t k = chart.index_of(y);
    if (std::find(primes.begin(), primes.end(), k) == primes.end()) {
      throw PreconditionError("diagonalize", y + " is not a prime variable at level " + std::to_string(level));
    }
    ypos.push_back(k);
  }
  auto block = chart.block_indices(level);
  auto x_only = [&](const Poly& p) {
    for (const auto& [e, c] : p.terms()) {
      for (std::size_t k = 0; k < e.size(); ++k) {
        if (e[k] != 0 && chart.variable(k).block != level) {
          throw PreconditionError("diagonalize", "coefficients must involve block " + std::to_string(level) +
                                                     " variables only");
        }
      }
    }
  };

  Derivation d(chart);
  std::size_t synced = 0;
  std::vector<std::vector<Entry>> g(m, std::vector<Entry>(m));
  std::vector<std::vector<Exponents>> den_monos(m, std::vector<Exponents>(m));
  std::vector<std::vector<bool>> present(m, std::vector<bool>(m, false));
  for (std::size_t j = 0; j < m; ++j) {
    if (relations[j].size() != m) throw PreconditionError("diagonalize", "the system must be square");
    for (std::size_t k = 0; k < m; ++k) {
      x_only(relations[j][k].num);
      x_only(relations[j][k].den);
      if (relations[j][k].den.is_zero()) throw PreconditionError("diagonalize", "zero denominator");
      present[j][k] = !relations[j][k].num.is_zero();
    }
  }

  // Stage 0: monomialize the denominators and push the y's above them.
  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      if (!present[j][k]) continue;
      Poly c = substitute(relations[j][k].den, d);
      auto mono = monomialize_element(c, d.current(), limits);
      std::size_t before = d.size();
      d.append(mono.derivation);
      for (auto [pj, pk] : order) den_monos[pj][pk] = transport(d, before, den_monos[pj][pk]);
      den_monos[j][k] = mono.monomial;
      order.emplace_back(j, k);
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      if (!present[j][k]) continue;
      Poly c = substitute(relations[j][k].den, d);
      Poly u = divide_by_monomial(c, den_monos[j][k]);
      g[j][k] = {true, {substitute(relations[j][k].num, d), u}};
    }
  }
  synced = d.size();
  std::vector<Exponents> col_exp(m, Exponents(chart.arity(), 0));
  for (std::size_t k = 0; k < m; ++k) {
    Exponents e(chart.arity(), 0);
    for (std::size_t j = 0; j < m; ++j) {
      if (!present[j][k]) continue;
      for (std::size_t v = 0; v < e.size(); ++v) e[v] = std::max(e[v], den_monos[j][k][v]);
    }
    col_exp[k] = e;
  }

  auto advance = [&]() {
    for (std::size_t s = synced; s < d.size(); ++s) {
      for (auto& row : g) {
        for (auto& entry : row) {
          if (entry.present) entry.value = substitute_step(entry.value, d.steps()[s]);
        }
      }
    }
    synced = d.size();
  };
  auto block_part = [&](const Exponents& e) {
    std::vector<std::int64_t> a;
    for (std::size_t k : block) a.push_back(e[k]);
    return a;
  };
  auto is_zero_vec = [](const Exponents& e) {
    return std::all_of(e.begin(), e.end(), [](std::int64_t v) { return v == 0; });
  };
  const CoefficientField field = relations.empty() || relations[0].empty() ? CoefficientField::rationals()
                                                                          : relations[0][0].num.field();

  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!g[j][k].present) continue;
      Exponents shift = difference(col_exp[k], den_monos[j][k]);
      g[j][k].value.num = g[j][k].value.num.times_monomial(shift);
    }
    if (!is_zero_vec(col_exp[k])) {
      d.apply(Monomial{2, d.current().variable(ypos[k]).name, level, block_part(col_exp[k])}, "diagonalize:clear");
    }
  }
  advance();

  std::vector<bool> active(m, true);
  std::vector<Exponents> row_exp(m);
  std::vector<std::size_t> owner(m, m);  // column -> row whose parameter it became
  for (std::size_t s = 0; s < m; ++s) {
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < m; ++k) {
      if (active[k] && g[s][k].present && !g[s][k].value.is_zero()) cols.push_back(k);
    }
    if (cols.empty()) {
      throw PreconditionError("diagonalize", "coefficient determinant is not a unit (stage " + std::to_string(s + 1) + ")");
    }
    std::vector<Exponents> monos;
    for (std::size_t k : cols) {
      auto mono = monomialize_element(g[s][k].value.num, d.current(), limits);
      std::size_t before = d.size();
      d.append(mono.derivation);
      advance();
      for (auto& e : monos) e = transport(d, before, e);
      monos.push_back(mono.monomial);
    }
    auto p = principalize(d.current(), monos, limits);
    std::size_t before = d.size();
    d.append(p.derivation);
    advance();
    for (auto& e : row_exp) {
      if (!e.empty()) e = transport(d, before, e);
    }
    const Exponents beta = p.principal;
    const std::size_t pivot = cols[p.index];

    // Finished columns appearing in this row are pushed above x^beta.
    for (std::size_t q = 0; q < m; ++q) {
      if (active[q] || !g[s][q].present || g[s][q].value.is_zero() || is_zero_vec(beta)) continue;
      d.apply(Monomial{2, d.current().variable(ypos[q]).name, level, block_part(beta)}, "diagonalize:push");
      advance();
      for (std::size_t r = 0; r < m; ++r) {
        if (g[r][q].present) g[r][q].value.num = g[r][q].value.num.times_monomial(beta);
      }
      std::size_t row = owner[q];
      for (std::size_t v = 0; v < beta.size(); ++v) row_exp[row][v] += beta[v];
    }

    // q_k = g_sk / x^beta over every column present in the row.
    std::vector<std::optional<LocalFraction>> q(m);
    for (std::size_t k = 0; k < m; ++k) {
      if (!g[s][k].present || g[s][k].value.is_zero()) continue;
      q[k] = LocalFraction{divide_by_monomial(g[s][k].value.num, beta), g[s][k].value.den};
    }
    const LocalFraction& qp = *q[pivot];
    if (!is_local_unit(qp.num)) throw InternalError("diagonalization pivot is not a unit");

    bool trivial = qp.num == qp.den;
    for (std::size_t k = 0; k < m; ++k) {
      if (k != pivot && q[k]) trivial = false;
    }
    if (!trivial) {
      const std::size_t arity = d.current().arity();
      Poly others = Poly::constant(field, arity, 1);
      for (std::size_t k = 0; k < m; ++k) {
        if (k != pivot && q[k]) others = others * q[k]->den;
      }
      Poly num = others * Poly::variable(field, arity, ypos[pivot]);
      for (std::size_t k = 0; k < m; ++k) {
        if (k == pivot || !q[k]) continue;
        Poly rest = Poly::constant(field, arity, 1);
        for (std::size_t l = 0; l < m; ++l) {
          if (l != pivot && l != k && q[l]) rest = rest * q[l]->den;
        }
        num -= q[k]->num * rest * Poly::variable(field, arity, ypos[k]);
      }
      num = num * qp.den;
      Poly den = others * qp.num;
      d.apply(Rename{d.current().variable(ypos[pivot]).name, num, den, d.current().variable(ypos[pivot]).value},
              "diagonalize:rename");
      advance();
      // Later rows: g_rk -= g_rp q_k / q_p, g_rp /= q_p.
      for (std::size_t r = s + 1; r < m; ++r) {
        if (!g[r][pivot].present || g[r][pivot].value.is_zero()) continue;
        LocalFraction grp = g[r][pivot].value;
        LocalFraction factor = grp / qp;
        for (std::size_t k = 0; k < m; ++k) {
          if (k == pivot || !q[k]) continue;
          LocalFraction delta = factor * *q[k];
          if (g[r][k].present) {
            g[r][k].value = g[r][k].value - delta;
          } else {
            g[r][k] = {true, LocalFraction{-delta.num, delta.den}};
          }
        }
        g[r][pivot].value = factor;
      }
    }
    active[pivot] = false;
    owner[pivot] = s;
    row_exp[s] = beta;
  }

  Diagonalization out{d, {}, {}};
  for (std::size_t s = 0; s < m; ++s) {
    out.exponents.push_back(row_exp[s]);
  }
  for (std::size_t s = 0; s < m; ++s) {
    std::size_t col = std::find(owner.begin(), owner.end(), s) - owner.begin();
    out.parameters.push_back(d.current().variable(ypos[col]).name);
  }
  return out;
}

}  // namespace vforge

#include "vforge/reduction.hpp"

#include <algorithm>
#include <tuple>

#include "vforge/poly_ops.hpp"

namespace vforge {

namespace {

RationalVector level_coords(const GroupValue& v, int level) {
  RationalVector out;
  for (auto c : v.block(level)) out.emplace_back(static_cast<long>(c));
  return out;
}

RationalVector axpy(const RationalVector& a, const mpq_class& s, const RationalVector& b) {
  RationalVector out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + s * b[k];
  return out;
}

Sign sign_of(const Chart& chart, int level, const RationalVector& v) {
  return chart.frame().sign_in_block(level, std::span<const mpq_class>(v));
}

void check_relation_variables(const Poly& f, const Chart& chart, int level, std::size_t zpos, const char* op) {
  for (const auto& [e, c] : f.terms()) {
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (k == zpos || e[k] == 0) continue;
      if (chart.variable(k).block != level) {
        throw PreconditionError(op, "coefficient variable " + chart.variable(k).name + " is not in block " +
                                        std::to_string(level));
      }
    }
  }
}

std::size_t free_position(const Chart& chart, const std::string& z, const char* op) {
  std::size_t pos = chart.index_of(z);
  if (chart.variable(pos).block != 0) throw PreconditionError(op, z + " is not a free variable");
  return pos;
}

// Quotient by (T - a) with the remainder in out.back().
std::vector<mpq_class> synthetic_division(const std::vector<mpq_class>& c, const mpq_class& a,
                                          const CoefficientField& field) {
  std::vector<mpq_class> out(c.size());
  mpq_class acc = 0;
  for (std::size_t k = c.size(); k-- > 0;) {
    acc = field.normalize(acc * a + c[k]);
    out[k] = acc;
  }
  // out[k] holds the quotient coefficient of T^(k-1); out[0] is the remainder.
  std::vector<mpq_class> shifted(out.begin() + 1, out.end());
  shifted.push_back(out[0]);
  return shifted;
}

int root_multiplicity(std::vector<mpq_class> c, const mpq_class& a, const CoefficientField& field) {
  int m = 0;
  while (c.size() > 1) {
    auto q = synthetic_division(c, a, field);
    if (q.back() != 0) break;
    q.pop_back();
    c = std::move(q);
    ++m;
  }
  return m;
}

std::vector<mpz_class> divisors_of(mpz_class n) {
  if (n < 0) n = -n;
  std::vector<mpz_class> low, high;
  for (mpz_class d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      low.push_back(d);
      if (d * d != n) high.push_back(n / d);
    }
  }
  low.insert(low.end(), high.rbegin(), high.rend());
  return low;
}

Exponents zero_exponents(std::size_t n) { return Exponents(n, 0); }

Exponents term_deficit(const Exponents& m, std::size_t zpos, std::int64_t j, const Exponents& e, const Exponents& g) {
  Exponents out(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    out[k] = k == zpos ? 0 : checked_add(checked_add(m[k], checked_mul(j, e[k])), -g[k]);
  }
  return out;
}

std::vector<std::int64_t> block_part(const Chart& chart, int level, const Exponents& e) {
  std::vector<std::int64_t> out;
  for (std::size_t k : chart.block_indices(level)) out.push_back(e[k]);
  return out;
}

// Edge slope as a signed exponent vector over the chart.
Exponents slope_monomial(const Chart& chart, int level, const RationalVector& slope) {
  auto idx = chart.block_indices(level);
  std::vector<BlockVector> basis;
  for (std::size_t k : idx) basis.push_back(chart.variable(k).value->block(level));
  std::vector<std::int64_t> coords;
  try {
    coords = integer_representation(std::span<const mpq_class>(slope), std::span<const BlockVector>(basis));
  } catch (const MathError&) {
    std::string text;
    for (std::size_t k = 0; k < slope.size(); ++k) text += (k ? "," : "") + slope[k].get_str();
    throw MathError(FailureKind::ValueNotInGroup, "edge slope (" + text + ") is not in the value group");
  }
  Exponents e = zero_exponents(chart.arity());
  for (std::size_t k = 0; k < idx.size(); ++k) e[idx[k]] = coords[k];
  return e;
}

ReductionOutcome run_stage(Derivation& d, const Poly& f, int level, const std::string& z, const NewtonData& nd,
                           const NewtonEdge& edge, std::size_t root_index, const Limits& limits) {
  const std::size_t before = d.size();
  const Chart& start = d.current();
  const std::size_t zpos = start.index_of(z);
  Exponents e0 = slope_monomial(start, level, edge.slope);
  auto roots = residue_roots(edge.residue, f.field());
  if (roots.empty()) {
    throw MathError(FailureKind::ResidueNotInField, "residue polynomial has no nonzero root in " + f.field().to_string());
  }
  const ResidueRoot& root = roots[std::min(root_index, roots.size() - 1)];

  ReductionOutcome out;
  out.lambda = root.value;
  if (root.multiplicity == nd.mu) {
    Exponents e = clear_deficit(d, e0, limits, "reduce");
    Poly cur = substitute(f, d, before, d.size());
    const Chart& chart = d.current();
    out.monomial = e;
    out.ascent = chart.monomial_value(e);
    d.apply(Translate{chart.variable(zpos).name, root.value, e, std::nullopt}, "reduce:ascend");
    out.kind = OutcomeKind::Translated;
    out.f = substitute_step(cur, d.steps().back());
    out.z = d.current().variable(zpos).name;
    out.mu = nd.mu;
    out.divisor = zero_exponents(chart.arity());
    if (order_at_origin(out.f, zpos) != nd.mu) throw InternalError("translation changed the reduction order");
    return out;
  }

  Poly cur = f;
  Exponents e, g;
  while (true) {
    if (limits.stop.stop_requested()) throw Cancelled();
    cur = substitute(f, d, before, d.size());
    const Chart& chart = d.current();
    e = transport(d, before, e0);
    bool have = false;
    GroupValue best;
    for (const auto& [m, c] : cur.terms()) {
      Exponents t = term_deficit(m, zpos, m[zpos], e, zero_exponents(m.size()));
      GroupValue v = chart.monomial_value(t);
      if (!have || compare(v, best, chart.frame()) == std::strong_ordering::less) {
        best = v;
        g = t;
        have = true;
      }
    }
    std::vector<Exponents> deficits{e};
    for (const auto& [m, c] : cur.terms()) deficits.push_back(term_deficit(m, zpos, m[zpos], e, g));
    auto negative = std::find_if(deficits.begin(), deficits.end(), [](const Exponents& x) {
      return std::any_of(x.begin(), x.end(), [](std::int64_t v) { return v < 0; });
    });
    if (negative == deficits.end()) break;
    clear_deficit(d, *negative, limits, "reduce");
  }

  const std::size_t scale_from = d.size();
  const Chart& chart = d.current();
  out.monomial = e;
  out.ascent = chart.monomial_value(e);
  d.apply(Monomial{3, chart.variable(zpos).name, level, block_part(chart, level, e)}, "reduce:scale");
  d.apply(Translate{d.current().variable(zpos).name, root.value, zero_exponents(chart.arity()), std::nullopt},
          "reduce:translate");
  Poly moved = substitute(cur, d, scale_from, d.size());
  out.kind = OutcomeKind::Reduced;
  out.f = divide_by_monomial(moved, g);
  out.z = d.current().variable(zpos).name;
  out.mu = order_at_origin(out.f, zpos);
  out.divisor = g;
  if (out.mu != root.multiplicity) {
    throw InternalError("reduction order " + std::to_string(out.mu) + " differs from the root multiplicity " +
                        std::to_string(root.multiplicity));
  }
  return out;
}

GroupValue largest_term_value(const Poly& s, const Chart& chart) {
  GroupValue best;
  bool have = false;
  for (const auto& [e, c] : s.terms()) {
    GroupValue v = chart.monomial_value(e);
    if (!have || chart.compare(v, best) == std::strong_ordering::greater) {
      best = v;
      have = true;
    }
  }
  return best;
}

Poly root_series(std::size_t zpos, const Derivation& d, std::size_t from, const CoefficientField& field) {
  Poly s = substitute(Poly::variable(field, d.current().arity(), zpos), d, from, d.size());
  return s.evaluate_var(zpos, 0);
}

void certify(const Poly& f, const Derivation& d, std::size_t from, std::size_t zpos, int level, RootStatus status,
             const GroupValue& bound) {
  Poly residual = substitute(f, d, from, d.size()).evaluate_var(zpos, 0);
  if (status == RootStatus::Exact) {
    if (!residual.is_zero()) throw InternalError("exact root does not annihilate the relation");
    return;
  }
  if (status != RootStatus::Truncated || bound.is_infinite()) return;
  GroupValue v = value_of(residual, d.current(), level);
  if (compare(v, truncate_at_level(bound, level), d.current().frame()) != std::strong_ordering::greater) {
    throw InternalError("truncated root residual does not exceed the bound " + to_string(bound));
  }
}

}  // namespace

std::string to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Reduced: return "Reduced";
    case OutcomeKind::Translated: return "Translated";
    case OutcomeKind::NewVariable: return "NewVariable";
    case OutcomeKind::InfiniteBranch: return "InfiniteBranch";
    case OutcomeKind::Failed: return "Failed";
  }
  return "?";
}

std::string to_string(RootStatus status) {
  switch (status) {
    case RootStatus::Exact: return "exact";
    case RootStatus::Truncated: return "truncated";
    case RootStatus::Failed: return "failed";
  }
  return "?";
}

std::int64_t order_at_origin(const Poly& f, std::size_t z) {
  std::int64_t best = -1;
  for (const auto& [e, c] : f.terms()) {
    bool pure = true;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (k != z && e[k] != 0) pure = false;
    }
    if (pure && (best < 0 || e[z] < best)) best = e[z];
  }
  return best;
}

NewtonData newton_data(const Poly& f, const Chart& chart, int level, const std::string& z) {
  const std::size_t zpos = free_position(chart, z, "newton");
  check_relation_variables(f, chart, level, zpos, "newton");
  NewtonData nd;
  nd.mu = order_at_origin(f, zpos);
  if (nd.mu < 0) throw PreconditionError("newton", "f(0, " + z + ") vanishes identically");
  if (nd.mu == 0) throw MathError(FailureKind::NotInMaximalIdeal, "f(0, " + z + ") has a nonzero constant term");

  auto coeffs = f.coefficients_in(zpos);
  std::vector<RationalVector> values(coeffs.size());
  std::vector<bool> present(coeffs.size(), false);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (coeffs[j].is_zero()) continue;
    GroupValue v = value_of(coeffs[j], chart, level);
    nd.points.emplace_back(static_cast<std::int64_t>(j), v);
    values[j] = level_coords(v, level);
    present[j] = true;
  }
  const std::int64_t j0 = nd.points.front().first;

  std::int64_t cur = nd.mu;
  while (cur > j0) {
    std::int64_t best = -1;
    RationalVector best_slope;
    for (std::int64_t k = cur - 1; k >= j0; --k) {
      if (!present[k]) continue;
      RationalVector slope = axpy(values[k], -1, values[cur]);
      for (auto& c : slope) c /= cur - k;
      if (best < 0) {
        best = k;
        best_slope = slope;
        continue;
      }
      Sign s = sign_of(chart, level, axpy(slope, -1, best_slope));
      if (s != Sign::positive) {
        best = k;
        best_slope = slope;
      }
    }
    NewtonEdge edge;
    edge.slope = best_slope;
    RationalVector rho = axpy(values[cur], cur, best_slope);
    edge.residue.assign(static_cast<std::size_t>(cur) + 1, 0);
    for (std::int64_t j = best; j <= cur; ++j) {
      if (!present[j] || axpy(values[j], j, best_slope) != rho) continue;
      edge.minimal.push_back(j);
      Poly lead = initial_form(coeffs[j], chart, level);
      if (lead.size() != 1) {
        throw PreconditionError("newton", "initial form of the coefficient of " + z + "^" + std::to_string(j) +
                                              " is not a monomial");
      }
      edge.residue[j] = lead.terms().begin()->second;
    }
    nd.edges.push_back(std::move(edge));
    cur = best;
  }
  if (j0 > 0) {
    NewtonEdge inf;
    inf.infinite = true;
    inf.minimal = {j0};
    nd.edges.push_back(std::move(inf));
  }
  return nd;
}

std::vector<ResidueRoot> residue_roots(const std::vector<mpq_class>& residue, const CoefficientField& field) {
  std::size_t lo = 0;
  while (lo < residue.size() && residue[lo] == 0) ++lo;
  std::vector<mpq_class> c(residue.begin() + static_cast<std::ptrdiff_t>(std::min(lo, residue.size())), residue.end());
  while (!c.empty() && c.back() == 0) c.pop_back();
  std::vector<ResidueRoot> out;
  if (c.size() < 2) return out;

  if (!field.is_rational()) {
    for (std::uint32_t a = 1; a < field.characteristic(); ++a) {
      int m = root_multiplicity(c, mpq_class(a), field);
      if (m > 0) out.push_back({mpq_class(a), m});
    }
    return out;
  }

  mpz_class scale = 1;
  for (const auto& x : c) scale = lcm(scale, mpz_class(x.get_den()));
  std::vector<mpz_class> ints;
  for (const auto& x : c) ints.push_back(mpz_class(x * scale));
  mpz_class content = 0;
  for (const auto& x : ints) content = gcd(content, x);
  for (auto& x : ints) x /= content;

  // Low degrees in closed form; divisor enumeration is exponential in the
  // size of the coefficients, which grow along a series expansion.
  std::vector<mpq_class> candidates;
  if (ints.size() == 2) {
    candidates.push_back(mpq_class(-ints[0], ints[1]));
  } else if (ints.size() == 3) {
    mpz_class disc = ints[1] * ints[1] - 4 * ints[0] * ints[2];
    if (disc >= 0 && mpz_perfect_square_p(disc.get_mpz_t())) {
      mpz_class root = sqrt(disc);
      candidates.push_back(mpq_class(-ints[1] + root, 2 * ints[2]));
      candidates.push_back(mpq_class(-ints[1] - root, 2 * ints[2]));
    }
  } else {
    auto ps = divisors_of(ints.front());
    auto qs = divisors_of(ints.back());
    for (const auto& q : qs) {
      for (const auto& p : ps) {
        if (gcd(p, q) == 1) {
          candidates.push_back(mpq_class(p, q));
          candidates.push_back(mpq_class(-p, q));
        }
      }
    }
  }
  for (auto& a : candidates) a.canonicalize();
  // Denominator, then numerator magnitude, positive first.
  auto key = [](const mpq_class& a) { return std::make_tuple(mpz_class(a.get_den()), mpz_class(abs(a.get_num())), sgn(a) < 0); };
  std::sort(candidates.begin(), candidates.end(), [&](const mpq_class& a, const mpq_class& b) { return key(a) < key(b); });
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (const auto& a : candidates) {
    int m = root_multiplicity(c, a, field);
    if (m > 0) out.push_back({a, m});
  }
  return out;
}

ReductionStep reduction_step(const Poly& f, const Chart& chart, int level, const std::string& z, BranchChoice choice,
                             const Limits& limits) {
  ReductionStep result{Derivation(chart), {}};
  ReductionOutcome& out = result.outcome;
  out.f = f;
  out.z = z;
  try {
    NewtonData nd = newton_data(f, chart, level, z);
    out.mu = nd.mu;
    out.divisor = zero_exponents(chart.arity());
    const NewtonEdge& edge = nd.edges[std::min(choice.edge, nd.edges.size() - 1)];
    if (nd.mu == 1 || edge.infinite) {
      out.kind = OutcomeKind::NewVariable;
      return result;
    }
    out = run_stage(result.derivation, f, level, z, nd, edge, choice.root, limits);
  } catch (const MathError& e) {
    if (e.kind() == FailureKind::PreconditionViolated) throw;
    out.kind = OutcomeKind::Failed;
    out.failure = e.kind();
    out.detail = e.detail();
  }
  return result;
}

RootExpansion expand_root(const Poly& f, const Chart& chart, int level, const std::string& z,
                          const BranchPolicy& policy, std::size_t order, const Limits& limits) {
  if (order < 1) throw PreconditionError("expand", "order must be at least 1");
  const std::size_t zpos = free_position(chart, z, "expand");
  RootExpansion out{Derivation(chart), RootStatus::Failed, {}, f, z, Poly(f.field(), f.arity()),
                    GroupValue::infinity(), std::nullopt, {}};
  while (true) {
    if (limits.stop.stop_requested()) throw Cancelled();
    try {
      NewtonData nd = newton_data(out.f, out.derivation.current(), level, out.z);
      BranchChoice choice = policy.at(out.stages.size());
      const NewtonEdge& edge = nd.edges[std::min(choice.edge, nd.edges.size() - 1)];
      if (edge.infinite) {
        out.status = RootStatus::Exact;
        break;
      }
      if (out.stages.size() >= order) {
        out.status = RootStatus::Truncated;
        break;
      }
      ReductionOutcome o = run_stage(out.derivation, out.f, level, out.z, nd, edge, choice.root, limits);
      if (!out.stages.empty() && o.kind == OutcomeKind::Translated &&
          out.stages.back().outcome.kind == OutcomeKind::Translated &&
          compare(o.ascent, out.stages.back().outcome.ascent, chart.frame()) != std::strong_ordering::greater) {
        throw InternalError("translation values are not increasing");
      }
      out.f = o.f;
      out.z = o.z;
      out.stages.push_back({out.derivation.size(), std::move(o)});
    } catch (const MathError& e) {
      if (e.kind() == FailureKind::PreconditionViolated) throw;
      out.status = RootStatus::Failed;
      out.failure = e.kind();
      out.detail = e.detail();
      break;
    }
  }
  out.series = root_series(zpos, out.derivation, 0, f.field());
  out.bound = out.status == RootStatus::Truncated ? largest_term_value(out.series, out.derivation.current())
                                                  : GroupValue::infinity();
  certify(f, out.derivation, 0, zpos, level, out.status, out.bound);
  return out;
}

std::string render_series(const std::string& z, const Poly& series, const Chart& chart, const GroupValue& bound) {
  std::string out = stem_of(z) + " = " + (series.is_zero() ? std::string("0") : canonical_string(series, chart));
  if (bound.is_finite()) out += " + O(" + to_string(bound) + ")";
  return out;
}

Preparation prepare_monic(const Poly& g, const Chart& chart, int level, const std::string& z, const Limits& limits) {
  const std::size_t zpos = free_position(chart, z, "prepare");
  check_relation_variables(g, chart, level, zpos, "prepare");
  const std::int64_t n = g.degree_in(zpos);
  auto coeffs = g.coefficients_in(zpos);
  if (n < 1 || coeffs.back() != Poly::constant(g.field(), g.arity(), 1)) {
    throw PreconditionError("prepare", "relation is not monic in " + z);
  }
  for (std::int64_t t = 0; t < n; ++t) {
    if (coeffs[t].constant_term() != 0) {
      throw PreconditionError("prepare", "coefficient of " + z + "^" + std::to_string(t) + " is a unit");
    }
  }
  auto block = chart.block_indices(level);
  Preparation out{Derivation(chart), g, false, zero_exponents(chart.arity()), z};
  auto ready = [&](const Poly& f) {
    auto cs = f.coefficients_in(zpos);
    for (std::int64_t t = 0; t < n; ++t) {
      for (const auto& [e, c] : cs[t].terms()) {
        bool above = false;
        for (std::size_t k : block) {
          if (e[k] < n - t) return false;
          if (e[k] > n - t) above = true;
        }
        if (t == 0 && !above) return false;
      }
    }
    return true;
  };
  Poly cur = g;
  while (!ready(cur)) {
    if (block.size() < 2) return out;
    if (limits.stop.stop_requested()) throw Cancelled();
    if (out.derivation.size() >= limits.max_steps) {
      throw StepCapExceeded(limits.max_steps, "monic preparation in block " + std::to_string(level));
    }
    brun_step(out.derivation, level, "prepare:perron");
    cur = substitute_step(cur, out.derivation.steps().back());
  }
  const Chart& c = out.derivation.current();
  std::vector<std::int64_t> ones(block.size(), 1);
  out.derivation.apply(Monomial{4, c.variable(zpos).name, level, ones}, "prepare:scale");
  cur = substitute_step(cur, out.derivation.steps().back());
  for (std::size_t k : block) out.divisor[k] = n;
  out.f = divide_by_monomial(cur, out.divisor);
  out.z = out.derivation.current().variable(zpos).name;
  out.prepared = true;
  return out;
}

Uniformization uniformize_presentation(const std::vector<std::pair<std::string, Poly>>& relations, const Chart& chart,
                                       int level, std::size_t order, const std::vector<BranchPolicy>& policies,
                                       const Limits& limits) {
  Uniformization out{Derivation(chart), {}, false};
  for (std::size_t j = 0; j < relations.size(); ++j) {
    const auto& [zname, g] = relations[j];
    const std::size_t zpos = free_position(chart, zname, "uniformize");
    Derivation& d = out.derivation;
    const std::size_t begin = d.size();
    Poly cur = substitute(g, d);
    const std::string z = d.current().variable(zpos).name;
    Preparation prep = prepare_monic(cur, d.current(), level, z, limits);
    d.append(prep.derivation);
    const std::size_t prepared_step = d.size();
    BranchPolicy policy = j < policies.size() ? policies[j] : BranchPolicy{};
    RootExpansion exp = expand_root(prep.f, d.current(), level, prep.z, policy, order, limits);
    d.append(exp.derivation);
    RelationReport rep{zname, prep.prepared, prep.divisor, prep.z, order_at_origin(prep.f, zpos),
                       begin, prepared_step, d.size(), exp,
                       root_series(zpos, d, begin, g.field()), GroupValue::infinity()};
    if (exp.status == RootStatus::Truncated) rep.bound = largest_term_value(rep.series, d.current());
    certify(cur, d, begin, zpos, level, exp.status, rep.bound);
    out.relations.push_back(std::move(rep));
    if (exp.status == RootStatus::Failed) {
      out.failed = true;
      break;
    }
  }
  return out;
}

}  // namespace vforge

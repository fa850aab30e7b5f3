#include "vforge/chart.hpp"

#include <algorithm>
#include <set>

#include "vforge/errors.hpp"
#include "vforge/rational.hpp"

namespace vforge {

std::string stem_of(const std::string& name) { return name.substr(0, name.find('@')); }

namespace {

using Matrix = std::vector<std::vector<mpq_class>>;

// Inverse over Q; nullopt when singular.
std::optional<Matrix> invert(Matrix m) {
  const std::size_t n = m.size();
  Matrix inv(n, std::vector<mpq_class>(n, 0));
  for (std::size_t k = 0; k < n; ++k) inv[k][k] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && sgn(m[pivot][c]) == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(m[pivot], m[c]);
    std::swap(inv[pivot], inv[c]);
    mpq_class p = m[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      m[c][k] /= p;
      inv[c][k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || sgn(m[r][c]) == 0) continue;
      mpq_class f = m[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        m[r][k] -= f * m[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

mpq_class determinant(Matrix m) {
  const std::size_t n = m.size();
  mpq_class det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && sgn(m[pivot][c]) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != c) {
      std::swap(m[pivot], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (sgn(m[r][c]) == 0) continue;
      mpq_class f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

std::string fresh_name(const std::string& name, int generation) {
  return stem_of(name) + "@" + std::to_string(generation);
}

}  // namespace

Chart::Chart(FramePtr frame, std::vector<Variable> vars, int level, int generation)
    : frame_(std::move(frame)), vars_(std::move(vars)), level_(level), generation_(generation) {
  validate();
}

Chart Chart::standard(FramePtr frame, const std::vector<std::vector<std::string>>& names,
                      const std::vector<std::string>& free_names, int level) {
  if (static_cast<int>(names.size()) != frame->num_blocks()) {
    throw PreconditionError("chart", "one name list per block is required");
  }
  std::vector<Variable> vars;
  for (int b = 1; b <= frame->num_blocks(); ++b) {
    const auto& block = names[b - 1];
    if (static_cast<int>(block.size()) != frame->block_size(b)) {
      throw PreconditionError("chart", "block " + std::to_string(b) + " needs " +
                                           std::to_string(frame->block_size(b)) + " names");
    }
    for (std::size_t k = 0; k < block.size(); ++k) {
      vars.push_back({block[k], GroupValue::generator(*frame, b, static_cast<int>(k)), b});
    }
  }
  for (const auto& n : free_names) vars.push_back({n, std::nullopt, 0});
  return Chart(std::move(frame), std::move(vars), level);
}

void Chart::validate() const {
  if (!frame_) throw PreconditionError("chart", "missing frame");
  const ValuationFrame& f = *frame_;
  if (level_ < 1 || level_ > f.num_blocks()) throw PreconditionError("chart", "level out of range");
  std::set<std::string> seen;
  for (const Variable& v : vars_) {
    if (v.name.empty()) throw PreconditionError("chart", "empty variable name");
    if (!seen.insert(v.name).second) throw PreconditionError("chart", "duplicate name " + v.name);
    if (v.block < 0 || v.block > f.num_blocks()) throw PreconditionError("chart", "bad block label on " + v.name);
    if (v.value) check_conforms(*v.value, f);
  }
  GroupValue zero = GroupValue::zero(f);
  for (int j = 1; j <= f.num_blocks(); ++j) {
    auto idx = block_indices(j);
    if (idx.empty() && j < level_) continue;
    if (static_cast<int>(idx.size()) != f.block_size(j)) {
      throw PreconditionError("very-good", "block " + std::to_string(j) + " has " + std::to_string(idx.size()) +
                                               " variables, expected " + std::to_string(f.block_size(j)));
    }
    Matrix m;
    for (std::size_t k : idx) {
      const Variable& v = vars_[k];
      if (!v.value || v.value->is_infinite()) {
        throw PreconditionError("very-good", v.name + " must have a finite value");
      }
      if (v.value->top_block() > j) {
        throw PreconditionError("very-good", v.name + " has a value above its block");
      }
      std::vector<mpq_class> row;
      for (auto c : v.value->block(j)) row.emplace_back(to_mpz(c));
      m.push_back(std::move(row));
    }
    mpq_class det = determinant(m);
    if (det != 1 && det != -1) {
      throw PreconditionError("very-good", "block " + std::to_string(j) + " values do not form a Z-basis");
    }
  }
  for (const Variable& v : vars_) {
    if (!v.value || v.value->is_infinite()) continue;
    auto ord = compare(*v.value, zero);
    if (v.block >= level_ && ord != std::strong_ordering::greater) {
      throw PreconditionError("positivity", v.name + " must have positive value");
    }
    if (v.block == 0 && ord == std::strong_ordering::less) {
      throw PreconditionError("positivity", v.name + " has negative value");
    }
  }
}

std::vector<std::string> Chart::names() const {
  std::vector<std::string> out;
  for (const auto& v : vars_) out.push_back(v.name);
  return out;
}

std::optional<std::size_t> Chart::find(const std::string& name) const {
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    if (vars_[k].name == name) return k;
  }
  return std::nullopt;
}

std::size_t Chart::index_of(const std::string& name) const {
  auto k = find(name);
  if (!k) throw PreconditionError("chart", "unknown variable " + name);
  return *k;
}

std::vector<std::size_t> Chart::block_indices(int block) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    if (vars_[k].block == block) out.push_back(k);
  }
  return out;
}

GroupValue Chart::monomial_value(const Exponents& e) const {
  if (e.size() != vars_.size()) throw std::invalid_argument("exponent arity does not match chart");
  GroupValue total = GroupValue::zero(*frame_);
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k] == 0) continue;
    const auto& v = vars_[k].value;
    if (!v || v->is_infinite()) {
      if (e[k] < 0) throw PreconditionError("value", "negative power of a variable of infinite value");
      return GroupValue::infinity();
    }
    total = total + v->scaled(e[k]);
  }
  return total;
}

std::strong_ordering Chart::compare(const GroupValue& a, const GroupValue& b) const {
  return compare_at_level(a, b, *frame_, level_);
}

Chart Chart::with_variables(std::vector<Variable> vars) const {
  return Chart(frame_, std::move(vars), level_, generation_ + 1);
}

std::string kind_name(const TransformStep& step) {
  struct {
    std::string operator()(const Primitive&) const { return "Primitive"; }
    std::string operator()(const Mono1&) const { return "Mono1"; }
    std::string operator()(const Monomial& m) const { return "Mono" + std::to_string(m.kind); }
    std::string operator()(const Translate&) const { return "Translate"; }
    std::string operator()(const Rename&) const { return "Rename"; }
  } visitor;
  return std::visit(visitor, step);
}

namespace {

GroupValue block_monomial_value(const Chart& chart, const std::vector<std::size_t>& idx,
                                const std::vector<std::int64_t>& a) {
  GroupValue m = GroupValue::zero(chart.frame());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (a[k] < 0) throw PreconditionError("monomial", "exponents must be natural numbers");
    if (a[k] != 0) m = m + chart.variable(idx[k]).value->scaled(a[k]);
  }
  return m;
}

std::vector<std::size_t> checked_block(const Chart& chart, int block) {
  if (block < 1 || block > chart.frame().num_blocks()) {
    throw PreconditionError("block", "block " + std::to_string(block) + " out of range");
  }
  auto idx = chart.block_indices(block);
  if (idx.empty()) throw PreconditionError("block", "block " + std::to_string(block) + " has no variables");
  return idx;
}

}  // namespace

Chart apply_step(const Chart& chart, const TransformStep& step, StepRecord* record) {
  std::vector<Variable> vars = chart.variables();
  const int gen = chart.generation() + 1;
  StepRecord rec;
  rec.step = step;
  const GroupValue zero = GroupValue::zero(chart.frame());

  if (const auto* p = std::get_if<Primitive>(&step)) {
    std::size_t t = chart.index_of(p->target);
    std::size_t d = chart.index_of(p->divisor);
    if (t == d) throw PreconditionError("primitive", "target equals divisor");
    const auto& vt = vars[t].value;
    const auto& vd = vars[d].value;
    if (!vt || !vd || vt->is_infinite() || vd->is_infinite()) {
      throw PreconditionError("primitive", "values must be finite");
    }
    if (chart.compare(*vt, *vd) != std::strong_ordering::greater) {
      throw PreconditionError("primitive", "value(" + p->target + ") must exceed value(" + p->divisor + ")");
    }
    vars[t] = {fresh_name(vars[t].name, gen), *vt - *vd, vars[t].block};
    rec.positions = {t};
    rec.divisor = d;
  } else if (const auto* m1 = std::get_if<Mono1>(&step)) {
    auto idx = checked_block(chart, m1->block);
    const std::size_t r = idx.size();
    if (m1->matrix.size() != r) throw PreconditionError("mono1", "matrix size does not match block");
    Matrix a;
    for (const auto& row : m1->matrix) {
      if (row.size() != r) throw PreconditionError("mono1", "matrix must be square");
      std::vector<mpq_class> q;
      for (auto v : row) {
        if (v < 0) throw PreconditionError("mono1", "matrix entries must be natural numbers");
        q.emplace_back(to_mpz(v));
      }
      a.push_back(std::move(q));
    }
    mpq_class det = determinant(a);
    if (det != 1 && det != -1) throw PreconditionError("mono1", "determinant must be +-1");
    Matrix inv = *invert(a);
    for (std::size_t l = 0; l < r; ++l) {
      GroupValue v = zero;
      for (std::size_t k = 0; k < r; ++k) {
        if (sgn(inv[l][k]) == 0) continue;
        v = v + chart.variable(idx[k]).value->scaled(to_int64(inv[l][k].get_num()));
      }
      if (chart.compare(v, zero) != std::strong_ordering::greater) {
        throw PreconditionError("mono1", "new value of " + vars[idx[l]].name + " is not positive");
      }
      vars[idx[l]] = {fresh_name(vars[idx[l]].name, gen), v, vars[idx[l]].block};
    }
    rec.positions = idx;
    rec.support = idx;
  } else if (const auto* mo = std::get_if<Monomial>(&step)) {
    if (mo->kind < 2 || mo->kind > 4) throw PreconditionError("monomial", "kind must be 2, 3 or 4");
    std::string rule = "mono" + std::to_string(mo->kind);
    std::size_t u = chart.index_of(mo->var);
    auto idx = checked_block(chart, mo->block);
    if (std::find(idx.begin(), idx.end(), u) != idx.end()) {
      throw PreconditionError(rule, mo->var + " belongs to the block it is divided by");
    }
    if (mo->exponents.size() != idx.size()) throw PreconditionError(rule, "exponent count does not match block");
    GroupValue m = block_monomial_value(chart, idx, mo->exponents);
    std::optional<GroupValue> vu = vars[u].value;
    std::optional<GroupValue> out;
    if (mo->kind == 2) {
      if (vu && !truncate_at_level(*vu, mo->block).is_infinite()) {
        throw PreconditionError(rule, mo->var + " is not infinitely large at level " + std::to_string(mo->block));
      }
      if (vu) out = *vu - m;
    } else if (mo->kind == 3) {
      if (!vu) {
        vu = m;
        out = zero;
      } else {
        if (vu->is_infinite()) throw PreconditionError(rule, mo->var + " has infinite value");
        GroupValue rest = *vu - m;
        GroupValue tr = truncate_at_level(rest, mo->block);
        if (!tr.is_zero()) {
          throw PreconditionError(rule, "value(" + mo->var + ") differs from the monomial at level " +
                                            std::to_string(mo->block));
        }
        if (chart.compare(rest, zero) == std::strong_ordering::less) {
          throw PreconditionError(rule, "value(" + mo->var + ") is below the monomial");
        }
        out = rest;
      }
    } else {
      if (vu) {
        if (vu->is_infinite()) {
          out = vu;
        } else {
          GroupValue rest = *vu - m;
          if (chart.compare(rest, zero) != std::strong_ordering::greater) {
            throw PreconditionError(rule, "value(" + mo->var + ") must exceed the monomial");
          }
          out = rest;
        }
      }
    }
    vars[u] = {fresh_name(vars[u].name, gen), out, vars[u].block};
    rec.positions = {u};
    rec.support = idx;
  } else if (const auto* tr = std::get_if<Translate>(&step)) {
    std::size_t v = chart.index_of(tr->var);
    if (vars[v].block != 0) throw PreconditionError("translate", "only free variables can be translated");
    if (tr->shift.size() != chart.arity()) throw PreconditionError("translate", "shift arity mismatch");
    if (tr->shift[v] != 0) throw PreconditionError("translate", "shift involves the translated variable");
    for (auto e : tr->shift) {
      if (e < 0) throw PreconditionError("translate", "shift exponents must be natural numbers");
    }
    if (sgn(tr->lambda) == 0) throw PreconditionError("translate", "zero translation constant");
    vars[v] = {fresh_name(vars[v].name, gen), tr->new_value, 0};
    rec.positions = {v};
  } else {
    const auto& rn = std::get<Rename>(step);
    std::size_t v = chart.index_of(rn.var);
    if (vars[v].block != 0) throw PreconditionError("rename", "only free variables can be renamed");
    if (rn.num.arity() != chart.arity() || rn.den.arity() != chart.arity()) {
      throw PreconditionError("rename", "polynomial arity mismatch");
    }
    if (!is_local_unit(rn.den)) throw PreconditionError("rename", "denominator is not a local unit");
    vars[v] = {fresh_name(vars[v].name, gen), rn.new_value, 0};
    rec.positions = {v};
  }

  for (std::size_t k : rec.positions) rec.outputs.push_back(vars[k]);
  Chart out = chart.with_variables(std::move(vars));
  if (record) {
    rec.annotation = record->annotation;
    *record = std::move(rec);
  }
  return out;
}

bool Derivation::has_translate() const {
  return std::any_of(steps_.begin(), steps_.end(), [](const StepRecord& r) {
    return std::holds_alternative<Translate>(r.step) || std::holds_alternative<Rename>(r.step);
  });
}

void Derivation::apply(const TransformStep& step, std::string annotation) {
  StepRecord rec;
  rec.annotation = std::move(annotation);
  current_ = apply_step(current_, step, &rec);
  steps_.push_back(std::move(rec));
}

void Derivation::append(const Derivation& tail) {
  if (!tail.initial().same_values(current_)) {
    throw InternalError("appended derivation starts from a different chart");
  }
  for (const auto& rec : tail.steps()) steps_.push_back(rec);
  current_ = tail.current();
}

Exponents monomial_image_step(const Exponents& e, const StepRecord& rec) {
  Exponents out = e;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Primitive>) {
          out[rec.divisor] = checked_add(out[rec.divisor], e[rec.positions[0]]);
        } else if constexpr (std::is_same_v<T, Mono1>) {
          const auto& idx = rec.support;
          for (std::size_t l = 0; l < idx.size(); ++l) {
            std::int64_t v = 0;
            for (std::size_t k = 0; k < idx.size(); ++k) v = checked_add(v, checked_mul(e[idx[k]], s.matrix[k][l]));
            out[idx[l]] = v;
          }
        } else if constexpr (std::is_same_v<T, Monomial>) {
          std::int64_t eu = e[rec.positions[0]];
          for (std::size_t k = 0; k < rec.support.size(); ++k) {
            out[rec.support[k]] = checked_add(out[rec.support[k]], checked_mul(eu, s.exponents[k]));
          }
        } else {
          if (e[rec.positions[0]] != 0) {
            throw PreconditionError("monomial-image", "monomials are not stable under " + kind_name(rec.step));
          }
        }
      },
      rec.step);
  return out;
}

Exponents monomial_image(const Derivation& d, std::size_t from_step, const Exponents& e) {
  Exponents out = e;
  for (std::size_t k = from_step; k < d.steps().size(); ++k) {
    const auto& rec = d.steps()[k];
    if (std::holds_alternative<Translate>(rec.step) || std::holds_alternative<Rename>(rec.step)) {
      throw PreconditionError("monomial-image", "derivation contains " + kind_name(rec.step) + " steps");
    }
    out = monomial_image_step(out, rec);
  }
  return out;
}

Exponents transport(const Derivation& d, std::size_t from_step, const Exponents& e) {
  Exponents out = e;
  for (std::size_t k = from_step; k < d.steps().size(); ++k) out = monomial_image_step(out, d.steps()[k]);
  return out;
}

Exponents monomial_image(const Derivation& d, const Exponents& e) { return monomial_image(d, 0, e); }

Chart localize(const Chart& chart, int level) {
  std::vector<Variable> vars;
  for (const Variable& v : chart.variables()) {
    if (v.block != 0 && v.block < level) continue;
    Variable w = v;
    if (w.value) w.value = project_from_level(*w.value, level);
    vars.push_back(std::move(w));
  }
  return Chart(chart.frame_ptr(), std::move(vars), level, chart.generation());
}

std::vector<TransformStep> lift_transform(const Chart& chart, const TransformStep& step, int level) {
  if (std::holds_alternative<Translate>(step) || std::holds_alternative<Rename>(step)) {
    throw PreconditionError("lift", kind_name(step) + " steps are not lifted");
  }
  const auto* mo = std::get_if<Monomial>(&step);
  if (!mo || mo->kind != 3) return {step};
  if (mo->block <= level) throw PreconditionError("lift", "step block must lie above the chart level");

  std::size_t u = chart.index_of(mo->var);
  const auto& vu = chart.variable(u).value;
  if (!vu) return {step};
  auto idx = checked_block(chart, mo->block);
  GroupValue rest = *vu - block_monomial_value(chart, idx, mo->exponents);
  const GroupValue zero = GroupValue::zero(chart.frame());
  if (compare_at_level(rest, zero, chart.frame(), level) != std::strong_ordering::less) return {step};

  GroupValue low = project_from_level(rest, level);
  if (low.top_block() > level) {
    throw PreconditionError("lift", "deficit lies in an intermediate block");
  }
  std::size_t k = 0;
  while (k < mo->exponents.size() && mo->exponents[k] == 0) ++k;
  if (k == mo->exponents.size()) throw InternalError("negative value with an empty monomial");
  auto base = chart.block_indices(level);
  const GroupValue& unit = *chart.variable(base.at(0)).value;
  GroupValue gain = unit.scaled(mo->exponents[k]);
  std::int64_t n = 0;
  GroupValue cur = rest;
  while (compare_at_level(cur, zero, chart.frame(), level) == std::strong_ordering::less) {
    cur = cur + gain;
    ++n;
  }
  std::vector<std::int64_t> twist(base.size(), 0);
  twist[0] = n;
  return {Monomial{2, chart.variable(idx[k]).name, level, twist}, step};
}

}  // namespace vforge

#include "vforge/runner.hpp"

#include <algorithm>

#include "vforge/errors.hpp"
#include "vforge/log.hpp"
#include "vforge/perron.hpp"
#include "vforge/poly_ops.hpp"
#include "vforge/rational.hpp"
#include "vforge/reduction.hpp"

namespace vforge::cli {

namespace {

class LogBuilder {
 public:
  explicit LogBuilder(const Derivation& d) : d_(d), charts_(replay_charts(d)) {}

  const Chart& chart_at(std::size_t k) const { return charts_.at(k); }
  void claim(std::size_t at, std::string text) { claims_.emplace_back(at, std::move(text)); }

  std::string render(TaskKind kind) const {
    std::string out = std::string(kLogHeader) + "\ntask: " + to_string(kind) + "\n";
    auto claims = claims_;
    std::stable_sort(claims.begin(), claims.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t c = 0;
    for (std::size_t k = 0; k <= d_.size(); ++k) {
      for (; c < claims.size() && claims[c].first == k; ++c) out += claims[c].second + "\n";
      if (k < d_.size()) out += format_step(d_.steps()[k], k + 1, charts_[k]) + "\n";
    }
    return out + "end\n";
  }

 private:
  const Derivation& d_;
  std::vector<Chart> charts_;
  std::vector<std::pair<std::size_t, std::string>> claims_;
};

std::string header_log(TaskKind kind) { return std::string(kLogHeader) + "\ntask: " + to_string(kind) + "\n"; }

Limits limits_of(const Task& task, std::stop_token stop) { return {task.max_steps, std::move(stop)}; }

const NamedPoly& require_poly(const Task& task, std::size_t index, std::size_t count, const char* what) {
  if (task.polys.size() != count) {
    throw ParseError(1, 1, to_string(task.kind) + " needs " + std::to_string(count) + " poly line(s): " + what);
  }
  return task.polys[index];
}

Exponents single_monomial(const NamedPoly& p) {
  if (p.poly.size() != 1) {
    throw ParseError(static_cast<std::size_t>(p.line), 1, "poly " + p.name + " must be a single monomial");
  }
  return p.poly.terms().begin()->first;
}

std::string monomial_text(const Exponents& e, const Chart& chart) {
  Poly m = Poly::monomial(CoefficientField::rationals(), e);
  return to_string(m, chart.names());
}

RunResult run_monomialize(const Task& task, const Limits& limits) {
  const auto& f = require_poly(task, 0, 1, "the element");
  auto m = monomialize_element(f.poly, task.initial_chart(), limits);
  LogBuilder log(m.derivation);
  const Chart& out = m.derivation.current();
  log.claim(m.derivation.size(), "claim monomial " + f.name + " " + exponents_to_string(m.monomial) +
                                     " unit: " + to_string(m.unit, out.names()));
  std::string report = "task: monomialize\nsteps: " + std::to_string(m.derivation.size()) + "\n" + f.name + " = " +
                       monomial_text(m.monomial, out) + " * (" + canonical_string(m.unit, out) + ")\n";
  return {kSuccess, log.render(task.kind), report};
}

RunResult run_principalize(const Task& task, const Limits& limits) {
  if (task.polys.empty()) throw ParseError(1, 1, "principalize needs at least one poly line");
  std::vector<Exponents> gens;
  for (const auto& p : task.polys) gens.push_back(single_monomial(p));
  auto p = principalize(task.initial_chart(), gens, limits);
  LogBuilder log(p.derivation);
  const std::size_t end = p.derivation.size();
  const Chart& out = p.derivation.current();
  log.claim(end, "claim principal " + exponents_to_string(p.principal) + " index " + std::to_string(p.index));
  std::string report = "task: principalize\nsteps: " + std::to_string(end) + "\nprincipal: " +
                       monomial_text(p.principal, out) + " (from " + task.polys[p.index].name + ")\n";
  for (std::size_t k = 0; k < gens.size(); ++k) {
    Exponents img = monomial_image(p.derivation, gens[k]);
    log.claim(end, "claim divides " + exponents_to_string(p.principal) + " " + exponents_to_string(img));
    report += task.polys[k].name + " -> " + monomial_text(img, out) + "\n";
  }
  return {kSuccess, log.render(task.kind), report};
}

RunResult run_dominate(const Task& task, const Limits& limits) {
  Exponents a = single_monomial(require_poly(task, 0, 2, "M1 and M2"));
  Exponents b = single_monomial(task.polys[1]);
  Derivation d = dominate(task.initial_chart(), a, b, limits);
  LogBuilder log(d);
  Exponents ia = monomial_image(d, a), ib = monomial_image(d, b);
  log.claim(d.size(), "claim divides " + exponents_to_string(ia) + " " + exponents_to_string(ib));
  std::string report = "task: dominate\nsteps: " + std::to_string(d.size()) + "\n" + task.polys[0].name + " -> " +
                       monomial_text(ia, d.current()) + "\n" + task.polys[1].name + " -> " +
                       monomial_text(ib, d.current()) + "\n";
  return {kSuccess, log.render(task.kind), report};
}

RunResult run_fraction(const Task& task, const Limits& limits) {
  const auto& g = require_poly(task, 0, 2, "numerator and denominator");
  const auto& h = task.polys[1];
  auto m = monomialize_fraction(g.poly, h.poly, task.initial_chart(), limits);
  LogBuilder log(m.derivation);
  const Chart& out = m.derivation.current();
  log.claim(m.derivation.size(), "claim fraction " + exponents_to_string(m.monomial) + " num: " +
                                     to_string(m.unit.num, out.names()) + " den: " + to_string(m.unit.den, out.names()));
  std::string report = "task: fraction\nsteps: " + std::to_string(m.derivation.size()) + "\n" + g.name + "/" +
                       h.name + " = " + monomial_text(m.monomial, out) + " * (" + canonical_string(m.unit.num, out) +
                       ") / (" + canonical_string(m.unit.den, out) + ")\n";
  return {kSuccess, log.render(task.kind), report};
}

std::string stage_claim(std::size_t k, const std::string& kind, const std::string& z, std::int64_t mu,
                        const Exponents& divisor, const std::optional<GroupValue>& ascent) {
  std::string out = "claim stage " + std::to_string(k) + " " + kind + " " + z + " mu " + std::to_string(mu) +
                    " divide " + exponents_to_string(divisor);
  if (ascent) out += " ascent " + to_string(*ascent);
  return out;
}

std::string failure_text(FailureKind kind, const std::string& detail) {
  return std::string("reason: ") + to_string(kind) + "\ndetail: " + detail + "\n";
}

// Claims for one relation whose expansion starts at `offset` in the shared log.
void relation_claims(LogBuilder& log, const std::string& zname, const RootExpansion& exp, std::size_t offset,
                     std::size_t end, const Poly& series, const GroupValue& bound) {
  for (std::size_t s = 0; s < exp.stages.size(); ++s) {
    const auto& o = exp.stages[s].outcome;
    log.claim(offset + exp.stages[s].end_step,
              stage_claim(s + 1, to_string(o.kind), o.z, o.mu, o.divisor, o.ascent));
  }
  if (exp.status == RootStatus::Failed) {
    log.claim(end, std::string("claim failure ") + to_string(*exp.failure) + " stage " +
                       std::to_string(exp.stages.size() + 1));
    return;
  }
  const Chart& chart = log.chart_at(end);
  log.claim(end, "claim root " + zname + " " + to_string(exp.status) + " bound " + to_string(bound) +
                     " series: " + (series.is_zero() ? std::string("0") : canonical_string(series, chart)));
}

std::string relation_report(const std::string& zname, const RootExpansion& exp, const Poly& series,
                            const GroupValue& bound, const Chart& chart) {
  std::string out = zname + ": " + to_string(exp.status) + ", " + std::to_string(exp.stages.size()) + " stage(s)\n";
  if (exp.status == RootStatus::Failed) return out + failure_text(*exp.failure, exp.detail);
  return out + render_series(zname, series, chart, bound) + "\n";
}

const NamedPoly& require_relation(const Task& task) {
  if (task.relations.size() != 1) throw ParseError(1, 1, to_string(task.kind) + " needs exactly one relation line");
  return task.relations[0];
}

RunResult run_reduce(const Task& task, const Limits& limits) {
  const auto& rel = require_relation(task);
  auto r = reduction_step(rel.poly, task.initial_chart(), task.level, rel.name, task.branch_policy().at(0), limits);
  LogBuilder log(r.derivation);
  const std::size_t end = r.derivation.size();
  log.claim(0, "claim relation " + rel.name);
  const auto& o = r.outcome;
  std::string report = "task: reduce\noutcome: " + to_string(o.kind) + "\n";
  if (o.kind == OutcomeKind::Failed) {
    log.claim(end, std::string("claim failure ") + to_string(*o.failure) + " stage 1");
    return {kMathFailure, log.render(task.kind), report + failure_text(*o.failure, o.detail)};
  }
  if (o.kind != OutcomeKind::NewVariable) log.claim(end, stage_claim(1, to_string(o.kind), o.z, o.mu, o.divisor, o.ascent));
  log.claim(end, "claim outcome " + to_string(o.kind) + " mu " + std::to_string(o.mu));
  report += "mu: " + std::to_string(o.mu) + "\n";
  if (o.kind != OutcomeKind::NewVariable) {
    report += "term: " + rational_string(o.lambda) + " * " + monomial_text(o.monomial, r.derivation.current()) + "\n";
  }
  report += "relation: " + canonical_string(o.f, r.derivation.current()) + "\n";
  return {kSuccess, log.render(task.kind), report};
}

RunResult run_expand(const Task& task, const Limits& limits) {
  const auto& rel = require_relation(task);
  auto exp = expand_root(rel.poly, task.initial_chart(), task.level, rel.name, task.branch_policy(), task.order, limits);
  LogBuilder log(exp.derivation);
  log.claim(0, "claim relation " + rel.name);
  relation_claims(log, rel.name, exp, 0, exp.derivation.size(), exp.series, exp.bound);
  std::string report = "task: expand\nsteps: " + std::to_string(exp.derivation.size()) + "\n" +
                       relation_report(rel.name, exp, exp.series, exp.bound, exp.derivation.current());
  int code = exp.status == RootStatus::Failed ? kMathFailure : kSuccess;
  return {code, log.render(task.kind), report};
}

RunResult run_uniformize(const Task& task, const Limits& limits) {
  std::vector<std::pair<std::string, Poly>> rels;
  for (const auto& r : task.relations) rels.emplace_back(r.name, r.poly);
  std::vector<BranchPolicy> policies(rels.size(), task.branch_policy());
  auto u = uniformize_presentation(rels, task.initial_chart(), task.level, task.order, policies, limits);
  LogBuilder log(u.derivation);
  std::string report = "task: uniformize\nsteps: " + std::to_string(u.derivation.size()) + "\nrelations: " +
                       std::to_string(rels.size()) + "\n";
  for (const auto& r : u.relations) {
    log.claim(r.begin_step, "claim relation " + r.z);
    if (r.prepared) {
      log.claim(r.prepared_step, stage_claim(0, "prepared", r.prepared_z, r.prepared_mu, r.prepare_divisor, std::nullopt));
    }
    relation_claims(log, r.z, r.expansion, r.prepared_step, r.end_step, r.series, r.bound);
    report += (r.prepared ? "prepared " : "unprepared ") +
              relation_report(r.z, r.expansion, r.series, r.bound, log.chart_at(r.end_step));
  }
  return {u.failed ? kMathFailure : kSuccess, log.render(task.kind), report};
}

}  // namespace

RunResult run_task(const Task& task, std::stop_token stop) {
  const Limits limits = limits_of(task, std::move(stop));
  try {
    switch (task.kind) {
      case TaskKind::Monomialize: return run_monomialize(task, limits);
      case TaskKind::Principalize: return run_principalize(task, limits);
      case TaskKind::Dominate: return run_dominate(task, limits);
      case TaskKind::Fraction: return run_fraction(task, limits);
      case TaskKind::Reduce: return run_reduce(task, limits);
      case TaskKind::Expand: return run_expand(task, limits);
      case TaskKind::Uniformize: return run_uniformize(task, limits);
      case TaskKind::Verify: throw ParseError(1, 1, "verify tasks are run through the verifier");
    }
  } catch (const ParseError& e) {
    return {kParseFailure, "", std::string("parse error: ") + e.what() + "\n"};
  } catch (const MathError& e) {
    std::string log = header_log(task.kind) + "claim failure " + to_string(e.kind()) + " stage 0\nend\n";
    return {kMathFailure, log, "task: " + to_string(task.kind) + "\n" + failure_text(e.kind(), e.detail())};
  } catch (const StepCapExceeded& e) {
    return {kInternalFailure, "", std::string("internal error: ") + e.what() + "\n" + e.trace() + "\n"};
  } catch (const Error& e) {
    return {kInternalFailure, "", std::string("internal error: ") + e.what() + "\n"};
  }
  return {kInternalFailure, "", "internal error: unknown task kind\n"};
}

RunResult run_text(std::string_view task_text, std::stop_token stop) {
  Task task;
  try {
    task = parse_task(task_text);
  } catch (const ParseError& e) {
    return {kParseFailure, "", std::string("parse error: ") + e.what() + "\n"};
  } catch (const MathError& e) {
    return {kParseFailure, "", std::string("parse error: ") + e.what() + "\n"};
  }
  return run_task(task, std::move(stop));
}

}  // namespace vforge::cli

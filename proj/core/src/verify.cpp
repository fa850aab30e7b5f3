#include <algorithm>
#include <cctype>
#include <charconv>

#include "vforge/errors.hpp"
#include "vforge/log.hpp"
#include "vforge/poly_ops.hpp"
#include "vforge/reduction.hpp"
#include "vforge/runner.hpp"

namespace vforge::cli {

namespace {

struct Failure {
  std::string reason;
};

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    pos = end + 1;
  }
  return out;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < s.size()) {
    while (k < s.size() && s[k] == ' ') ++k;
    std::size_t start = k;
    while (k < s.size() && s[k] != ' ') ++k;
    if (k > start) out.push_back(s.substr(start, k - start));
  }
  return out;
}

std::int64_t number(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Failure{"malformed number '" + std::string(s) + "'"};
  return v;
}

Exponents exps(std::string_view s) {
  try {
    return parse_exponents(s);
  } catch (const std::exception&) {
    throw Failure{"malformed exponent vector '" + std::string(s) + "'"};
  }
}

GroupValue value(std::string_view s) {
  try {
    return parse_group_value(s);
  } catch (const std::exception&) {
    throw Failure{"malformed value '" + std::string(s) + "'"};
  }
}

bool nonneg(const Exponents& e) {
  return std::all_of(e.begin(), e.end(), [](std::int64_t v) { return v >= 0; });
}

// Tail text after `marker`, which must occur.
std::string_view after(std::string_view line, std::string_view marker) {
  std::size_t at = line.find(marker);
  if (at == std::string_view::npos) throw Failure{"claim lacks '" + std::string(marker) + "'"};
  return line.substr(at + marker.size());
}

class Verifier {
 public:
  Verifier(const Task& task, TaskKind kind) : task_(task), kind_(kind), d_(task.initial_chart()) {}

  void step(std::string_view line, std::size_t ln) {
    const std::size_t n = d_.size() + 1;
    LoggedStep s;
    try {
      s = parse_step(line, d_.current(), task_.field, ln);
    } catch (const Error& e) {
      throw Failure{"replay mismatch at step " + std::to_string(n) + ": " + e.what()};
    }
    if (s.number != n) throw Failure{"replay mismatch at step " + std::to_string(n) + ": step number out of order"};
    try {
      d_.apply(s.step, s.annotation);
    } catch (const Error& e) {
      throw Failure{"replay mismatch at step " + std::to_string(n) + ": " + e.what()};
    }
    const auto& outputs = d_.steps().back().outputs;
    bool same = outputs.size() == s.outputs.size();
    for (std::size_t k = 0; same && k < outputs.size(); ++k) {
      same = outputs[k].name == s.outputs[k].first && outputs[k].value == s.outputs[k].second;
    }
    if (!same) throw Failure{"replay mismatch at step " + std::to_string(n)};
  }

  void claim(std::string_view line) {
    auto w = words(line);
    if (w.size() < 2) throw Failure{"malformed claim"};
    std::string_view what = w[1];
    if (what == "monomial") return monomial(line, w);
    if (what == "principal") return principal(w);
    if (what == "divides") return divides(w);
    if (what == "fraction") return fraction(line, w);
    if (what == "relation") return relation(w);
    if (what == "stage") return stage(w);
    if (what == "outcome") return outcome(w);
    if (what == "root") return root(line, w);
    if (what == "failure") {
      failure_claimed_ = true;
      return;
    }
    throw Failure{"unknown claim '" + std::string(what) + "'"};
  }

  void finish() {
    if (failure_claimed_) return;
    bool ok = false;
    switch (kind_) {
      case TaskKind::Monomialize: ok = monomial_checked_; break;
      case TaskKind::Fraction: ok = fraction_checked_; break;
      case TaskKind::Principalize: ok = principal_checked_ && divides_checked_ == task_.polys.size(); break;
      case TaskKind::Dominate: ok = divides_checked_ == 1; break;
      case TaskKind::Reduce: ok = outcome_checked_; break;
      case TaskKind::Expand:
      case TaskKind::Uniformize: ok = roots_checked_ == task_.relations.size(); break;
      case TaskKind::Verify: ok = false; break;
    }
    if (!ok) throw Failure{"log is missing required claims"};
  }

  bool failure_claimed() const { return failure_claimed_; }

 private:
  const Poly& input(std::size_t k) const {
    if (k >= task_.polys.size()) throw Failure{"claim refers to a missing poly"};
    return task_.polys[k].poly;
  }

  Exponents input_monomial(std::size_t k) const {
    const Poly& p = input(k);
    if (p.size() != 1) throw Failure{"poly " + task_.polys[k].name + " is not a monomial"};
    return p.terms().begin()->first;
  }

  Poly current_poly(std::string_view text) const {
    try {
      return parse_poly(text, d_.current().names(), task_.field);
    } catch (const Error& e) {
      throw Failure{std::string("malformed polynomial in claim: ") + e.what()};
    }
  }

  void monomial(std::string_view line, const std::vector<std::string_view>& w) {
    if (w.size() < 5) throw Failure{"malformed monomial claim"};
    Exponents e = exps(w[3]);
    Poly unit = current_poly(after(line, " unit: "));
    if (unit.constant_term() == 0) throw Failure{"unit check failed"};
    Poly image = substitute(input(0), d_);
    if (!nonneg(e) || image != unit.times_monomial(e)) throw Failure{"identity check failed"};
    monomial_checked_ = true;
  }

  void principal(const std::vector<std::string_view>& w) {
    if (w.size() != 5 || w[3] != "index") throw Failure{"malformed principal claim"};
    Exponents p = exps(w[2]);
    auto index = static_cast<std::size_t>(number(w[4]));
    const Chart& start = d_.initial();
    Exponents gen = input_monomial(index);
    if (monomial_image(d_, gen) != p) throw Failure{"principal generator mismatch"};
    GroupValue v = start.monomial_value(gen);
    for (std::size_t k = 0; k < task_.polys.size(); ++k) {
      if (start.compare(start.monomial_value(input_monomial(k)), v) == std::strong_ordering::less) {
        throw Failure{"principal generator is not of least value"};
      }
    }
    if (d_.current().monomial_value(p) != v) throw Failure{"value invariance failed for the principal generator"};
    principal_ = p;
    principal_checked_ = true;
  }

  void divides(const std::vector<std::string_view>& w) {
    if (w.size() != 4) throw Failure{"malformed divides claim"};
    Exponents a = exps(w[2]), b = exps(w[3]);
    std::size_t k = divides_checked_;
    Exponents expected_a, expected_b;
    if (kind_ == TaskKind::Dominate) {
      if (k != 0) throw Failure{"unexpected divides claim"};
      expected_a = monomial_image(d_, input_monomial(0));
      expected_b = monomial_image(d_, input_monomial(1));
    } else if (kind_ == TaskKind::Principalize) {
      if (!principal_checked_) throw Failure{"divides claim before the principal claim"};
      expected_a = principal_;
      expected_b = monomial_image(d_, input_monomial(k));
    } else {
      throw Failure{"divides claim in a " + to_string(kind_) + " log"};
    }
    if (a != expected_a || b != expected_b) throw Failure{"image mismatch in divides claim " + std::to_string(k + 1)};
    if (!nonneg(a) || !vforge::divides(a, b)) throw Failure{"divisibility check failed"};
    ++divides_checked_;
  }

  void fraction(std::string_view line, const std::vector<std::string_view>& w) {
    if (w.size() < 4) throw Failure{"malformed fraction claim"};
    Exponents e = exps(w[2]);
    std::string_view tail = after(line, " num: ");
    std::size_t den = tail.find(" den: ");
    if (den == std::string_view::npos) throw Failure{"fraction claim lacks ' den: '"};
    Poly num = current_poly(tail.substr(0, den));
    Poly dpoly = current_poly(tail.substr(den + 6));
    if (num.constant_term() == 0 || dpoly.constant_term() == 0) throw Failure{"unit check failed"};
    LocalFraction lhs{substitute(input(0), d_), substitute(input(1), d_)};
    if (!nonneg(e) || !lhs.equals(LocalFraction{num.times_monomial(e), dpoly})) throw Failure{"identity check failed"};
    fraction_checked_ = true;
  }

  void relation(const std::vector<std::string_view>& w) {
    if (w.size() != 3) throw Failure{"malformed relation claim"};
    auto it = std::find_if(task_.relations.begin(), task_.relations.end(),
                           [&](const NamedPoly& r) { return r.name == w[2]; });
    if (it == task_.relations.end()) throw Failure{"unknown relation " + std::string(w[2])};
    rel_ = &*it;
    zpos_ = d_.initial().index_of(rel_->name);
    rel_start_ = d_.size();
    start_poly_ = substitute(rel_->poly, d_);
    tracked_ = start_poly_;
    synced_ = d_.size();
    last_mu_.reset();
    last_kind_.clear();
    last_ascent_.reset();
  }

  void sync() {
    if (!rel_) throw Failure{"claim before any relation claim"};
    tracked_ = substitute(*tracked_, d_, synced_, d_.size());
    synced_ = d_.size();
  }

  void stage(const std::vector<std::string_view>& w) {
    // claim stage <k> <kind> <z> mu <mu> divide <g> [ascent <v>]
    if ((w.size() != 9 && w.size() != 11) || w[5] != "mu" || w[7] != "divide" || (w.size() == 11 && w[9] != "ascent")) {
      throw Failure{"malformed stage claim"};
    }
    sync();
    const std::string k(w[2]);
    std::string_view kind = w[3];
    const Chart& c = d_.current();
    if (c.variable(zpos_).name != w[4]) throw Failure{"stage variable mismatch at stage " + k};
    auto mu = number(w[6]);
    Exponents g = exps(w[8]);
    try {
      tracked_ = divide_by_monomial(*tracked_, g);
    } catch (const Error&) {
      throw Failure{"divisibility check failed at stage " + k};
    }
    if (order_at_origin(*tracked_, zpos_) != mu) throw Failure{"mu check failed at stage " + k};
    if (kind == "Reduced" && last_mu_ && mu >= *last_mu_) throw Failure{"mu did not drop at stage " + k};
    if (kind == "Translated" && last_mu_ && mu != *last_mu_) throw Failure{"mu changed at stage " + k};
    if (kind != "Reduced" && kind != "Translated" && kind != "prepared") throw Failure{"unknown stage kind"};
    if (w.size() == 11) {
      GroupValue a = value(w[10]);
      if (kind == "Translated") {
        const auto* tr = std::get_if<Translate>(&d_.steps().back().step);
        if (!tr || c.monomial_value(tr->shift) != a) throw Failure{"value ascent failed at stage " + k};
        if (last_kind_ == "Translated" && compare(a, *last_ascent_, c.frame()) != std::strong_ordering::greater) {
          throw Failure{"value ascent failed at stage " + k};
        }
      }
      last_ascent_ = a;
    }
    last_mu_ = mu;
    last_kind_ = std::string(kind);
  }

  void outcome(const std::vector<std::string_view>& w) {
    if (w.size() != 5 || w[3] != "mu") throw Failure{"malformed outcome claim"};
    sync();
    auto mu = number(w[4]);
    if (order_at_origin(*tracked_, zpos_) != mu) throw Failure{"mu check failed in outcome"};
    if (w[2] == "NewVariable") {
      bool at_infinity = tracked_->evaluate_var(zpos_, 0).is_zero();
      if (mu != 1 && !at_infinity) throw Failure{"outcome check failed"};
    } else if (w[2] != last_kind_) {
      throw Failure{"outcome does not match the stage claim"};
    }
    outcome_checked_ = true;
  }

  void root(std::string_view line, const std::vector<std::string_view>& w) {
    // claim root <z> <status> bound <v> series: <poly>
    if (w.size() < 7 || w[4] != "bound" || w[6] != "series:") throw Failure{"malformed root claim"};
    sync();
    if (rel_->name != w[2]) throw Failure{"root claim for the wrong relation"};
    const Chart& c = d_.current();
    Poly claimed = current_poly(after(line, " series: "));
    Poly series = substitute(Poly::variable(task_.field, c.arity(), zpos_), d_, rel_start_, d_.size())
                      .evaluate_var(zpos_, 0);
    if (series != claimed) throw Failure{"series check failed"};
    Poly residual = substitute(*start_poly_, d_, rel_start_, d_.size()).evaluate_var(zpos_, 0);
    GroupValue bound = value(w[5]);
    if (w[3] == "exact") {
      if (!residual.is_zero()) throw Failure{"root check failed"};
    } else if (w[3] == "truncated") {
      GroupValue largest;
      bool have = false;
      for (const auto& [e, coeff] : series.terms()) {
        GroupValue v = c.monomial_value(e);
        if (!have || c.compare(v, largest) == std::strong_ordering::greater) largest = v;
        have = true;
      }
      if (!have || largest != bound) throw Failure{"bound check failed"};
      GroupValue rv = value_of(residual, c, task_.level);
      if (compare(rv, truncate_at_level(bound, task_.level), c.frame()) != std::strong_ordering::greater) {
        throw Failure{"root check failed"};
      }
    } else {
      throw Failure{"unknown root status"};
    }
    ++roots_checked_;
  }

  const Task& task_;
  TaskKind kind_;
  Derivation d_;
  bool failure_claimed_ = false;
  bool monomial_checked_ = false;
  bool fraction_checked_ = false;
  bool principal_checked_ = false;
  bool outcome_checked_ = false;
  std::size_t divides_checked_ = 0;
  std::size_t roots_checked_ = 0;
  Exponents principal_;
  const NamedPoly* rel_ = nullptr;
  std::size_t zpos_ = 0;
  std::size_t rel_start_ = 0;
  std::size_t synced_ = 0;
  std::optional<Poly> start_poly_;
  std::optional<Poly> tracked_;
  std::optional<std::int64_t> last_mu_;
  std::string last_kind_;
  std::optional<GroupValue> last_ascent_;
};

}  // namespace

VerifyResult verify_log(std::string_view log, const Task& task) {
  auto lines = split_lines(log);
  if (lines.size() < 2 || lines[0] != kLogHeader) return {kVerifyFailed, "log header missing"};
  if (lines[1].rfind("task: ", 0) != 0) return {kVerifyFailed, "log task line missing"};
  auto kind = parse_task_kind(lines[1].substr(6));
  if (!kind || *kind == TaskKind::Verify) return {kVerifyFailed, "unknown task in log"};
  if (task.kind != TaskKind::Verify && task.kind != *kind) return {kVerifyFailed, "task mismatch"};
  Task effective = task;
  effective.kind = *kind;

  Verifier v(effective, *kind);
  bool ended = false;
  try {
    for (std::size_t k = 2; k < lines.size(); ++k) {
      std::string_view line = lines[k];
      if (ended) {
        if (!line.empty()) throw Failure{"text after end"};
        continue;
      }
      if (line.rfind("step ", 0) == 0) {
        v.step(line, k + 1);
      } else if (line.rfind("claim ", 0) == 0) {
        v.claim(line);
      } else if (line == "end") {
        ended = true;
      } else if (!line.empty()) {
        throw Failure{"unrecognized line " + std::to_string(k + 1)};
      }
    }
    if (!ended) throw Failure{"log incomplete"};
    v.finish();
  } catch (const Failure& f) {
    return {kVerifyFailed, f.reason};
  } catch (const Error& e) {
    return {kVerifyFailed, std::string("check raised: ") + e.what()};
  }
  if (v.failure_claimed()) {
    // Failures carry no certificate; the engine must reproduce the log exactly.
    RunResult rerun = run_task(effective);
    if (rerun.exit_code != kMathFailure || rerun.log != log) return {kVerifyFailed, "failure claim not reproduced"};
  }
  return {kSuccess, "verified"};
}

VerifyResult verify_text(std::string_view log, std::string_view task_text) {
  try {
    return verify_log(log, parse_task(task_text));
  } catch (const ParseError& e) {
    return {kParseFailure, std::string("parse error: ") + e.what()};
  } catch (const Error& e) {
    return {kParseFailure, std::string("parse error: ") + e.what()};
  }
}

}  // namespace vforge::cli

#pragma once

// Charts of named parameters, transform steps between them and append-only
// derivations.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vforge/poly.hpp"
#include "vforge/value_group.hpp"

namespace vforge {

/// A chart parameter. Block 0 marks a free variable (z, y, ...), whose value
/// may be unknown (nullopt), infinite, or a finite value >= 0.
struct Variable {
  std::string name;
  std::optional<GroupValue> value;
  int block = 0;

  bool operator==(const Variable&) const = default;
};

/// Text before the first '@'.
std::string stem_of(const std::string& name);

class Chart {
 public:
  /// Validates the chart invariants (very good blocks, positivity, unique names).
  Chart(FramePtr frame, std::vector<Variable> vars, int level, int generation = 0);

  /// One variable per generator named by `names[b][k]`, valued at the generator,
  /// followed by free variables of unknown value.
  static Chart standard(FramePtr frame, const std::vector<std::vector<std::string>>& names,
                        const std::vector<std::string>& free_names = {}, int level = 1);

  const ValuationFrame& frame() const { return *frame_; }
  const FramePtr& frame_ptr() const { return frame_; }
  int level() const { return level_; }
  int generation() const { return generation_; }
  const std::vector<Variable>& variables() const { return vars_; }
  const Variable& variable(std::size_t index) const { return vars_.at(index); }
  std::size_t arity() const { return vars_.size(); }
  std::vector<std::string> names() const;

  std::optional<std::size_t> find(const std::string& name) const;
  /// Throws PreconditionError for unknown names.
  std::size_t index_of(const std::string& name) const;
  /// Positions of the block-labelled variables of `block`, in chart order.
  std::vector<std::size_t> block_indices(int block) const;

  /// Sum of e_k * value(x_k); infinity if any variable with e_k > 0 is
  /// infinite or unknown.
  GroupValue monomial_value(const Exponents& e) const;

  /// Ordering of the specialization at the chart level.
  std::strong_ordering compare(const GroupValue& a, const GroupValue& b) const;

  /// Same frame and level with a new variable list and the next generation.
  Chart with_variables(std::vector<Variable> vars) const;

  bool same_values(const Chart& other) const { return vars_ == other.vars_; }

 private:
  void validate() const;

  FramePtr frame_;
  std::vector<Variable> vars_;
  int level_;
  int generation_;
};

/// target = target' * divisor.
struct Primitive {
  std::string target;
  std::string divisor;
  bool operator==(const Primitive&) const = default;
};

/// x_{j,k} = prod_l x'_{j,l}^{a_{k,l}}, natural entries, determinant +-1.
struct Mono1 {
  int block = 0;
  std::vector<std::vector<std::int64_t>> matrix;
  bool operator==(const Mono1&) const = default;
};

/// u = x_{j,1}^{a_1} ... x_{j,r_j}^{a_{r_j}} * u' for kinds 2, 3 and 4.
struct Monomial {
  int kind = 4;
  std::string var;
  int block = 0;
  std::vector<std::int64_t> exponents;
  bool operator==(const Monomial&) const = default;
};

/// var = var' + lambda * x^shift, shift over the new chart (zero at var).
struct Translate {
  std::string var;
  mpq_class lambda;
  Exponents shift;
  std::optional<GroupValue> new_value;
  bool operator==(const Translate&) const = default;
};

/// var = num / den over the new chart, den a local unit.
struct Rename {
  std::string var;
  Poly num;
  Poly den;
  std::optional<GroupValue> new_value;
  bool operator==(const Rename&) const = default;
};

using TransformStep = std::variant<Primitive, Mono1, Monomial, Translate, Rename>;

std::string kind_name(const TransformStep& step);

struct StepRecord {
  TransformStep step;
  std::string annotation;
  /// Replaced variable positions in the source chart.
  std::vector<std::size_t> positions;
  /// Position of the divisor of a Primitive step.
  std::size_t divisor = 0;
  /// Positions of the block variables a Mono1 or monomial step refers to.
  std::vector<std::size_t> support;
  /// New variables (name, value, block) in the order of `positions`.
  std::vector<Variable> outputs;
};

/// Applies one step, checking its preconditions. `record` receives the
/// resolved positions and outputs when given.
Chart apply_step(const Chart& chart, const TransformStep& step, StepRecord* record = nullptr);

class Derivation {
 public:
  explicit Derivation(Chart initial) : initial_(initial), current_(std::move(initial)) {}

  const Chart& initial() const { return initial_; }
  const Chart& current() const { return current_; }
  const std::vector<StepRecord>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  bool has_translate() const;

  void apply(const TransformStep& step, std::string annotation = {});
  /// Appends `tail`, whose initial chart must equal the current chart.
  void append(const Derivation& tail);

 private:
  Chart initial_;
  Chart current_;
  std::vector<StepRecord> steps_;
};

/// Exponent effect of one step. Translate and Rename steps act as the
/// identity on monomials not involving their variable and throw otherwise.
Exponents monomial_image_step(const Exponents& e, const StepRecord& record);

/// Image of a monomial over the initial chart in the final chart's variables.
/// Throws PreconditionError if the derivation contains Translate or Rename.
Exponents monomial_image(const Derivation& d, const Exponents& e);
Exponents monomial_image(const Derivation& d, std::size_t from_step, const Exponents& e);

/// Image of e through steps [from_step, end) using monomial_image_step.
Exponents transport(const Derivation& d, std::size_t from_step, const Exponents& e);

/// Drops the variables of blocks below `level` and projects all values.
Chart localize(const Chart& chart, int level);

/// Level-`level` steps whose composite induces `step` (a step for
/// localize(chart, level + 1) or higher) after localization.
std::vector<TransformStep> lift_transform(const Chart& chart, const TransformStep& step, int level);

}  // namespace vforge

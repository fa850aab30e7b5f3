#pragma once

// Newton-polygon reduction of a relation in one distinguished variable z.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vforge/chart.hpp"
#include "vforge/errors.hpp"
#include "vforge/perron.hpp"
#include "vforge/poly.hpp"
#include "vforge/value_group.hpp"

namespace vforge {

struct NewtonEdge {
  /// Coordinates of the slope in the level block; empty for the edge at
  /// infinity (z divides f).
  RationalVector slope;
  bool infinite = false;
  /// Indices j on the edge, ascending.
  std::vector<std::int64_t> minimal;
  /// Residue polynomial coefficients, index = power of T.
  std::vector<mpq_class> residue;
};

struct NewtonData {
  std::int64_t mu = 0;
  /// (j, truncated value of a_j) for every nonzero coefficient.
  std::vector<std::pair<std::int64_t, GroupValue>> points;
  /// Finite edges by ascending slope, then the edge at infinity if a_0 = 0.
  std::vector<NewtonEdge> edges;
};

/// ord f(0, ..., 0, z); -1 when f(0, ..., 0, z) is identically zero.
std::int64_t order_at_origin(const Poly& f, std::size_t z);

/// Newton data of f in the variable `z`. Coefficients may involve block
/// `level` variables only. Throws MathError(NotInMaximalIdeal) when mu = 0.
NewtonData newton_data(const Poly& f, const Chart& chart, int level, const std::string& z);

struct ResidueRoot {
  mpq_class value;
  int multiplicity = 0;
};

/// Nonzero roots in the coefficient field: rationals by denominator, then
/// numerator, positive first; residues 1..p-1 in F_p.
std::vector<ResidueRoot> residue_roots(const std::vector<mpq_class>& residue, const CoefficientField& field);

struct BranchChoice {
  std::size_t edge = 0;
  std::size_t root = 0;
  bool operator==(const BranchChoice&) const = default;
};

/// Per-stage choices; stages past the list use `fallback`. Out-of-range
/// indices are clamped to the last edge or root.
struct BranchPolicy {
  std::vector<BranchChoice> stages;
  BranchChoice fallback;

  BranchChoice at(std::size_t stage) const { return stage < stages.size() ? stages[stage] : fallback; }
};

enum class OutcomeKind { Reduced, Translated, NewVariable, InfiniteBranch, Failed };

std::string to_string(OutcomeKind kind);

struct ReductionOutcome {
  OutcomeKind kind = OutcomeKind::Failed;
  /// Relation after the step, over the derivation's final chart.
  Poly f{CoefficientField::rationals(), 0};
  std::string z;
  std::int64_t mu = 0;
  /// Monomial f was divided by (zero for Translated).
  Exponents divisor;
  /// Term lambda * x^monomial contributed to the root.
  mpq_class lambda;
  Exponents monomial;
  /// Value of x^monomial at the chart level.
  GroupValue ascent;
  std::optional<FailureKind> failure;
  std::string detail;
};

struct ReductionStep {
  Derivation derivation;
  ReductionOutcome outcome;
};

/// One reduction step. Typed mathematical failures are reported as Failed.
ReductionStep reduction_step(const Poly& f, const Chart& chart, int level, const std::string& z,
                             BranchChoice choice = {}, const Limits& limits = {});

struct StageRecord {
  std::size_t end_step = 0;  // steps of the expansion derivation up to this stage
  ReductionOutcome outcome;
};

enum class RootStatus { Exact, Truncated, Failed };

std::string to_string(RootStatus status);

struct RootExpansion {
  Derivation derivation;
  RootStatus status = RootStatus::Failed;
  std::vector<StageRecord> stages;
  /// Current relation and variable after the last stage.
  Poly f{CoefficientField::rationals(), 0};
  std::string z;
  /// Root of the input relation over the final chart (last z set to 0).
  Poly series{CoefficientField::rationals(), 0};
  /// Value of the last series term; infinity for exact roots.
  GroupValue bound;
  std::optional<FailureKind> failure;
  std::string detail;
};

/// Iterates reduction steps until the root is exact, `order` series terms
/// were produced or a step fails.
RootExpansion expand_root(const Poly& f, const Chart& chart, int level, const std::string& z,
                          const BranchPolicy& policy = {}, std::size_t order = 10, const Limits& limits = {});

/// `z = t1 + t2 + ... + O(bound)` with terms in canonical order.
std::string render_series(const std::string& z, const Poly& series, const Chart& chart, const GroupValue& bound);

struct Preparation {
  Derivation derivation;
  Poly f;
  bool prepared = false;
  /// Exponent vector f was divided by.
  Exponents divisor;
  std::string z;
};

/// Perron steps in block `level` and z = (x_1 ... x_r) z0 so that every
/// coefficient a_t becomes divisible by (x_1 ... x_r)^(n - t). A single-variable
/// block that lacks the divisibility is returned unprepared.
Preparation prepare_monic(const Poly& g, const Chart& chart, int level, const std::string& z,
                          const Limits& limits = {});

struct RelationReport {
  std::string z;
  bool prepared = false;
  /// Monomial the prepared relation was divided by, its new variable and order.
  Exponents prepare_divisor;
  std::string prepared_z;
  std::int64_t prepared_mu = 0;
  /// Step ranges of the shared derivation.
  std::size_t begin_step = 0;
  std::size_t prepared_step = 0;
  std::size_t end_step = 0;
  RootExpansion expansion;
  /// Root of the original relation over the chart at end_step.
  Poly series;
  GroupValue bound;
};

struct Uniformization {
  Derivation derivation;
  std::vector<RelationReport> relations;
  bool failed = false;
};

/// prepare_monic then expand_root for each relation in turn.
Uniformization uniformize_presentation(const std::vector<std::pair<std::string, Poly>>& relations,
                                       const Chart& chart, int level, std::size_t order,
                                       const std::vector<BranchPolicy>& policies = {},
                                       const Limits& limits = {});

}  // namespace vforge

#include <gtest/gtest.h>

#include "support.hpp"
#include "vforge/errors.hpp"
#include "vforge/poly_ops.hpp"
#include "vforge/reduction.hpp"

using namespace vforge;
using testing_support::chart_of;
using testing_support::frame_of;
using testing_support::poly;

namespace {

std::vector<mpq_class> q(std::initializer_list<int> values) {
  std::vector<mpq_class> out;
  for (int v : values) out.emplace_back(v);
  return out;
}

// Coefficients of (1 + x)^(1/2) from c_n = c_(n-1) * (1/2 - n + 1) / n.
std::vector<mpq_class> sqrt_one_plus_x(int terms) {
  std::vector<mpq_class> c{1};
  for (int n = 1; n < terms; ++n) c.push_back(c.back() * (mpq_class(1, 2) - (n - 1)) / n);
  return c;
}

Chart line_chart() { return chart_of(frame_of({1}), {"z"}); }

}  // namespace

TEST(Newton, HalfSlopeEdge) {
  auto chart = line_chart();
  auto nd = newton_data(poly("z^2 - x1", chart), chart, 1, "z");
  EXPECT_EQ(nd.mu, 2);
  ASSERT_EQ(nd.edges.size(), 1u);
  EXPECT_EQ(nd.edges[0].slope, (RationalVector{mpq_class(1, 2)}));
  EXPECT_EQ(nd.edges[0].minimal, (std::vector<std::int64_t>{0, 2}));
  EXPECT_EQ(nd.edges[0].residue, q({-1, 0, 1}));
}

TEST(Newton, DoubleRootEdge) {
  auto chart = line_chart();
  auto nd = newton_data(poly("z^2 - 2*x1*z + x1^2 - x1^4", chart), chart, 1, "z");
  ASSERT_EQ(nd.edges.size(), 1u);
  EXPECT_EQ(nd.edges[0].slope, (RationalVector{1}));
  EXPECT_EQ(nd.edges[0].minimal, (std::vector<std::int64_t>{0, 1, 2}));
  EXPECT_EQ(nd.edges[0].residue, q({1, -2, 1}));
}

TEST(Newton, TwoEdgesAscending) {
  auto chart = line_chart();
  // Roots x1 and x1^2.
  auto nd = newton_data(poly("(z - x1)*(z - x1^2)", chart), chart, 1, "z");
  ASSERT_EQ(nd.edges.size(), 2u);
  EXPECT_EQ(nd.edges[0].slope, (RationalVector{1}));
  EXPECT_EQ(nd.edges[1].slope, (RationalVector{2}));
}

TEST(Newton, LinearHasOnlyInfiniteEdge) {
  auto chart = line_chart();
  auto nd = newton_data(poly("z", chart), chart, 1, "z");
  EXPECT_EQ(nd.mu, 1);
  ASSERT_EQ(nd.edges.size(), 1u);
  EXPECT_TRUE(nd.edges[0].infinite);
}

TEST(Newton, UnitAtOriginFails) {
  auto chart = line_chart();
  try {
    newton_data(poly("z^2 - 2", chart), chart, 1, "z");
    FAIL();
  } catch (const MathError& e) {
    EXPECT_EQ(e.kind(), FailureKind::NotInMaximalIdeal);
  }
}

TEST(Residue, RationalRootOrder) {
  auto roots = residue_roots(q({-1, 0, 4}), CoefficientField::rationals());
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_EQ(roots[0].value, mpq_class(1, 2));
  EXPECT_EQ(roots[1].value, mpq_class(-1, 2));
  auto double_root = residue_roots(q({1, -2, 1}), CoefficientField::rationals());
  ASSERT_EQ(double_root.size(), 1u);
  EXPECT_EQ(double_root[0].multiplicity, 2);
  EXPECT_TRUE(residue_roots(q({1, 1, 1}), CoefficientField::rationals()).empty());
  // Zero is never a residue root.
  auto shifted = residue_roots(q({0, -1, 1}), CoefficientField::rationals());
  ASSERT_EQ(shifted.size(), 1u);
  EXPECT_EQ(shifted[0].value, 1);
}

TEST(Residue, PrimeFieldEnumeration) {
  auto f5 = CoefficientField::prime(5);
  // T^5 - T vanishes on all of F_5.
  auto roots = residue_roots(q({0, 4, 0, 0, 0, 1}), f5);
  ASSERT_EQ(roots.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(roots[k].value, k + 1);
  // T^5 - 2 is inseparable with the single root 2.
  auto frob = residue_roots(q({3, 0, 0, 0, 0, 1}), f5);
  ASSERT_EQ(frob.size(), 1u);
  EXPECT_EQ(frob[0].value, 2);
  EXPECT_EQ(frob[0].multiplicity, 5);
}

TEST(ReductionStep, DoubleRootTranslates) {
  auto chart = line_chart();
  auto step = reduction_step(poly("z^2 - 2*x1*z + x1^2 - x1^4", chart), chart, 1, "z");
  ASSERT_EQ(step.outcome.kind, OutcomeKind::Translated);
  EXPECT_EQ(step.outcome.lambda, 1);
  EXPECT_EQ(step.outcome.mu, 2);
  EXPECT_EQ(canonical_string(step.outcome.f, step.derivation.current()), "-x1^4 + z@1^2");
}

TEST(ReductionStep, SeparatedRootReduces) {
  auto chart = line_chart();
  auto step = reduction_step(poly("z^2 - x1^4", chart), chart, 1, "z");
  ASSERT_EQ(step.outcome.kind, OutcomeKind::Reduced);
  EXPECT_EQ(step.outcome.mu, 1);
  EXPECT_EQ(step.outcome.divisor, (Exponents{4, 0}));
  EXPECT_EQ(canonical_string(step.outcome.f, step.derivation.current()), "2*z@2 + z@2^2");
}

TEST(ReductionStep, TypedFailures) {
  auto chart = line_chart();
  auto ramified = reduction_step(poly("z^2 - x1", chart), chart, 1, "z");
  EXPECT_EQ(ramified.outcome.kind, OutcomeKind::Failed);
  EXPECT_EQ(ramified.outcome.failure, FailureKind::ValueNotInGroup);
  auto unit = reduction_step(poly("z^2 - 2", chart), chart, 1, "z");
  EXPECT_EQ(unit.outcome.failure, FailureKind::NotInMaximalIdeal);
  auto irrational = reduction_step(poly("z^2 + x1*z + x1^2", chart), chart, 1, "z");
  EXPECT_EQ(irrational.outcome.failure, FailureKind::ResidueNotInField);
}

TEST(ReductionStep, ArtinSchreierIsNewVariable) {
  auto chart = line_chart();
  auto f5 = CoefficientField::prime(5);
  auto step = reduction_step(poly("z^5 - z - x1", chart, f5), chart, 1, "z");
  EXPECT_EQ(step.outcome.kind, OutcomeKind::NewVariable);
  EXPECT_TRUE(step.derivation.empty());
}

TEST(ExpandRoot, BinomialSeries) {
  auto chart = line_chart();
  Poly f = poly("z^2 - x1^2*(1 + x1)", chart);
  auto r = expand_root(f, chart, 1, "z", {}, 6);
  ASSERT_EQ(r.status, RootStatus::Truncated);
  auto expected = sqrt_one_plus_x(6);
  const Chart& out = r.derivation.current();
  ASSERT_EQ(r.series.size(), 6u);
  for (int n = 0; n < 6; ++n) EXPECT_EQ(r.series.coefficient({n + 1, 0}), expected[n]) << n;
  EXPECT_EQ(r.bound, GroupValue::generator(out.frame(), 1, 0).scaled(6));
  GroupValue residual = value_of(substitute(f, r.derivation).evaluate_var(1, 0), out, 1);
  EXPECT_EQ(compare(residual, r.bound, out.frame()), std::strong_ordering::greater);
}

TEST(ExpandRoot, LinearTerminatesExactly) {
  auto chart = line_chart();
  auto r = expand_root(poly("z - x1 - x1^2", chart), chart, 1, "z", {}, 10);
  EXPECT_EQ(r.status, RootStatus::Exact);
  EXPECT_LE(r.stages.size(), 2u);
  EXPECT_EQ(render_series("z", r.series, r.derivation.current(), r.bound), "z = x1 + x1^2");
}

TEST(ExpandRoot, DoubleRootThenSplit) {
  auto chart = line_chart();
  auto r = expand_root(poly("z^2 - 2*x1*z + x1^2 - x1^4", chart), chart, 1, "z", {}, 10);
  EXPECT_EQ(r.status, RootStatus::Exact);
  EXPECT_EQ(render_series("z", r.series, r.derivation.current(), r.bound), "z = x1 + x1^2");
  BranchPolicy other{{{0, 0}, {0, 1}}, {}};
  auto s = expand_root(poly("z^2 - 2*x1*z + x1^2 - x1^4", chart), chart, 1, "z", other, 10);
  EXPECT_EQ(render_series("z", s.series, s.derivation.current(), s.bound), "z = x1 - x1^2");
}

TEST(ExpandRoot, TwoBlockSlopeNeedsPerron) {
  auto chart = chart_of(frame_of({2}), {"z"});
  Poly f = poly("z^2 - x2^2", chart);
  auto r = expand_root(f, chart, 1, "z", {}, 5);
  EXPECT_EQ(r.status, RootStatus::Exact);
  EXPECT_TRUE(substitute(f, r.derivation).evaluate_var(2, 0).is_zero());
}

TEST(ExpandRoot, FailurePropagates) {
  auto chart = line_chart();
  auto r = expand_root(poly("z^2 - x1", chart), chart, 1, "z", {}, 4);
  EXPECT_EQ(r.status, RootStatus::Failed);
  EXPECT_EQ(r.failure, FailureKind::ValueNotInGroup);
}

TEST(PrepareMonic, SingleVariable) {
  auto chart = line_chart();
  auto p = prepare_monic(poly("z^2 - x1^3", chart), chart, 1, "z");
  ASSERT_TRUE(p.prepared);
  EXPECT_EQ(canonical_string(p.f, p.derivation.current()), "-x1 + z@1^2");
  auto u = prepare_monic(poly("z^2 - x1", chart), chart, 1, "z");
  EXPECT_FALSE(u.prepared);
  EXPECT_TRUE(u.derivation.empty());
}

TEST(PrepareMonic, TwoVariablesUsePerronSteps) {
  auto chart = chart_of(frame_of({2}), {"z"});
  Poly g = poly("z^2 - x1*x2", chart);
  auto p = prepare_monic(g, chart, 1, "z");
  ASSERT_TRUE(p.prepared);
  EXPECT_GT(p.derivation.size(), 1u);
  EXPECT_EQ(substitute(g, p.derivation), p.f.times_monomial(p.divisor));
  EXPECT_EQ(p.f.coefficient({0, 0, 2}), 1);
}

TEST(Uniformize, EmptyAndPairs) {
  auto chart = chart_of(frame_of({1}), {"z1", "z2"});
  auto empty = uniformize_presentation({}, chart, 1, 5);
  EXPECT_TRUE(empty.derivation.empty());
  std::vector<std::pair<std::string, Poly>> rel{{"z1", poly("z1 - x1", chart)},
                                                {"z2", poly("z2^2 - 2*x1*z2 + x1^2 - x1^4", chart)}};
  auto u = uniformize_presentation(rel, chart, 1, 10);
  ASSERT_EQ(u.relations.size(), 2u);
  EXPECT_FALSE(u.failed);
  for (const auto& r : u.relations) EXPECT_EQ(r.expansion.status, RootStatus::Exact);
}

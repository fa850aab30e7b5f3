#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "vforge/errors.hpp"
#include "vforge/poly_ops.hpp"

using namespace vforge;
using testing_support::chart_of;
using testing_support::frame_of;
using testing_support::poly;

namespace {

GroupValue gv(std::vector<BlockVector> blocks) { return GroupValue::from_blocks(std::move(blocks)); }

}  // namespace

TEST(ApplyStep, PrimitiveValue) {
  auto chart = chart_of(frame_of({2}));
  Chart next = apply_step(chart, Primitive{"x2", "x1"});
  EXPECT_EQ(next.variable(1).name, "x2@1");
  EXPECT_EQ(*next.variable(1).value, gv({{-1, 1}}));
  EXPECT_THROW(apply_step(chart, Primitive{"x1", "x2"}), PreconditionError);
}

TEST(ApplyStep, Mono1IdentityRenamesOnly) {
  auto chart = chart_of(frame_of({2}));
  Chart next = apply_step(chart, Mono1{1, {{1, 0}, {0, 1}}});
  EXPECT_EQ(next.variable(0).name, "x1@1");
  EXPECT_EQ(next.variable(0).value, chart.variable(0).value);
  EXPECT_EQ(next.variable(1).value, chart.variable(1).value);
}

TEST(ApplyStep, Mono1Unimodular) {
  auto chart = chart_of(frame_of({2}));
  // x2 = x1' x2': values x1' = x1, x2' = x2 - x1.
  Chart next = apply_step(chart, Mono1{1, {{1, 0}, {1, 1}}});
  EXPECT_EQ(*next.variable(1).value, gv({{-1, 1}}));
  EXPECT_THROW(apply_step(chart, Mono1{1, {{2, 0}, {0, 1}}}), PreconditionError);
  // x1 = x1' x2' would need value(x2') = x2 - x1 and value(x1') = x1 - x2 + x1 ... not positive.
  EXPECT_THROW(apply_step(chart, Mono1{1, {{1, 1}, {0, 1}}}), PreconditionError);
}

TEST(ApplyStep, Mono4Arithmetic) {
  auto frame = frame_of({1, 1});
  auto chart = chart_of(frame);
  Chart next = apply_step(chart, Monomial{4, "x21", 1, {2}});
  EXPECT_EQ(*next.variable(1).value, gv({{-2}, {1}}));
  std::vector<Variable> vars = chart.variables();
  vars.push_back({"u", gv({{3}, {0}}), 0});
  Chart with_u(frame, vars, 1);
  Chart after = apply_step(with_u, Monomial{4, "u", 1, {2}});
  EXPECT_EQ(*after.variable(2).value, gv({{1}, {0}}));
  EXPECT_THROW(apply_step(with_u, Monomial{4, "u", 1, {3}}), PreconditionError);
}

TEST(ApplyStep, Mono2AndMono3Preconditions) {
  auto chart = chart_of(frame_of({1, 1}), {"z"});
  EXPECT_THROW(apply_step(chart, Monomial{2, "x1", 2, {1}}), PreconditionError);
  EXPECT_NO_THROW(apply_step(chart, Monomial{2, "x21", 1, {5}}));
  Chart scaled = apply_step(chart, Monomial{3, "z", 1, {2}});
  EXPECT_TRUE(scaled.variable(2).value->is_zero());
}

TEST(MonomialImage, PerronExample) {
  auto chart = chart_of(frame_of({2}));
  Derivation d(chart);
  d.apply(Primitive{"x2", "x1"});
  EXPECT_EQ(monomial_image(d, {2, 1}), (Exponents{3, 1}));
  EXPECT_EQ(monomial_image(Derivation(chart), {2, 1}), (Exponents{2, 1}));
}

TEST(MonomialImage, CompositeMatchesSubstitution) {
  auto chart = chart_of(frame_of({2}));
  Derivation d(chart);
  d.apply(Primitive{"x2", "x1"});
  // Values now sqrt2 and sqrt3 - sqrt2; x1 is the larger one.
  d.apply(Primitive{"x1", "x2@1"});
  Exponents img = monomial_image(d, {0, 1});
  Poly direct = substitute(poly("x2", chart), d);
  ASSERT_EQ(direct.size(), 1u);
  EXPECT_EQ(direct.terms().begin()->first, img);
  EXPECT_EQ(img, (Exponents{1, 2}));
}

TEST(MonomialImage, RejectsTranslate) {
  auto chart = chart_of(frame_of({1}), {"z"});
  Derivation d(chart);
  d.apply(Translate{"z", 1, {1, 0}, std::nullopt});
  EXPECT_THROW(monomial_image(d, {1, 0}), PreconditionError);
}

TEST(Derivation, RandomStepsKeepInvariants) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto chart = chart_of(frame_of({3, 2}));
    Derivation d(chart);
    for (int step = 0; step < 12; ++step) {
      const Chart& c = d.current();
      std::uniform_int_distribution<std::size_t> pick(0, c.arity() - 1);
      std::size_t a = pick(rng), b = pick(rng);
      if (a == b) continue;
      if (c.compare(*c.variable(a).value, *c.variable(b).value) == std::strong_ordering::less) std::swap(a, b);
      d.apply(Primitive{c.variable(a).name, c.variable(b).name});
    }
    // Composite lattice map is unimodular: images of the unit vectors.
    std::vector<std::vector<mpq_class>> m;
    for (std::size_t k = 0; k < chart.arity(); ++k) {
      Exponents e(chart.arity(), 0);
      e[k] = 1;
      Exponents img = monomial_image(d, e);
      EXPECT_EQ(chart.monomial_value(e), d.current().monomial_value(img));
      std::vector<mpq_class> row;
      for (auto v : img) row.emplace_back(static_cast<long>(v));
      m.push_back(row);
    }
    // Determinant by elimination.
    mpq_class det = 1;
    for (std::size_t c = 0; c < m.size(); ++c) {
      std::size_t p = c;
      while (p < m.size() && m[p][c] == 0) ++p;
      ASSERT_LT(p, m.size());
      if (p != c) {
        std::swap(m[p], m[c]);
        det = -det;
      }
      det *= m[c][c];
      for (std::size_t r = c + 1; r < m.size(); ++r) {
        mpq_class f = m[r][c] / m[c][c];
        for (std::size_t k = c; k < m.size(); ++k) m[r][k] -= f * m[c][k];
      }
    }
    EXPECT_TRUE(det == 1 || det == -1);
  }
}

TEST(LiftTransform, PassThroughKinds) {
  auto chart = chart_of(frame_of({1, 2}));
  TransformStep m1 = Mono1{2, {{1, 0}, {1, 1}}};
  EXPECT_EQ(lift_transform(chart, m1, 1).size(), 1u);
  TransformStep m4 = Monomial{4, "x22", 2, {1, 0}};
  EXPECT_EQ(lift_transform(chart, m4, 1).size(), 1u);
  TransformStep tr = Translate{"x1", 1, {0, 0, 0}, std::nullopt};
  EXPECT_THROW(lift_transform(chart, tr, 1), PreconditionError);
}

TEST(LiftTransform, Mono3TwistMatchesLocalizedReplay) {
  auto frame = frame_of({1, 1});
  // Level-2 view: w and x21 share a value.
  std::vector<Variable> local_vars{{"x21", gv({{0}, {1}}), 2}, {"w", gv({{0}, {1}}), 0}};
  Chart local(frame, local_vars, 2);
  TransformStep step = Monomial{3, "w", 2, {1}};
  Chart expected = apply_step(local, step);

  // At level 1 the same step leaves a deficit of 2 x1 in w.
  std::vector<Variable> level1{{"x1", gv({{1}, {0}}), 1}, {"x21", gv({{2}, {1}}), 2}, {"w", gv({{0}, {1}}), 0}};
  Chart base(frame, level1, 1);
  EXPECT_THROW(apply_step(base, step), PreconditionError);
  auto lifted = lift_transform(base, step, 1);
  ASSERT_EQ(lifted.size(), 2u);
  const auto& twist = std::get<Monomial>(lifted[0]);
  EXPECT_EQ(twist.kind, 2);
  EXPECT_EQ(twist.exponents, (std::vector<std::int64_t>{2}));
  Chart replay = base;
  for (const auto& s : lifted) replay = apply_step(replay, s);
  Chart localized = localize(replay, 2);
  ASSERT_EQ(localized.arity(), expected.arity());
  for (std::size_t k = 0; k < expected.arity(); ++k) {
    EXPECT_EQ(stem_of(localized.variable(k).name), stem_of(expected.variable(k).name));
    EXPECT_EQ(localized.variable(k).value, expected.variable(k).value);
  }
}

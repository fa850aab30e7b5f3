#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "vforge/errors.hpp"
#include "vforge/poly_ops.hpp"

using namespace vforge;
using testing_support::chart_of;
using testing_support::frame_of;
using testing_support::poly;

TEST(PolyParse, GrammarAndErrors) {
  std::vector<std::string> names{"x1", "z"};
  auto f = parse_poly("z^2 - 2*x1*z + x1^2 - x1^4", names, CoefficientField::rationals());
  EXPECT_EQ(f.size(), 4u);
  EXPECT_EQ(f.coefficient({1, 1}), -2);
  auto g = parse_poly("1/2*x1 + (x1 + z)^2", names, CoefficientField::rationals());
  EXPECT_EQ(g.coefficient({1, 0}), mpq_class(1, 2));
  EXPECT_EQ(g.coefficient({1, 1}), 2);
  try {
    parse_poly("x1 + * z", names, CoefficientField::rationals(), 4, 10);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.column(), 16u);
  }
  EXPECT_THROW(parse_poly("x1 + w", names, CoefficientField::rationals()), ParseError);
  EXPECT_THROW(parse_poly("", names, CoefficientField::rationals()), ParseError);
}

TEST(PolyParse, PrimeFieldResidues) {
  std::vector<std::string> names{"x1", "x2"};
  auto f = parse_poly("2 + x1*x2 - x2^3", names, CoefficientField::prime(5));
  EXPECT_EQ(f.coefficient({0, 3}), 4);
  EXPECT_TRUE(is_local_unit(f));
  auto g = parse_poly("1/2*x1", names, CoefficientField::prime(5));
  EXPECT_EQ(g.coefficient({1, 0}), 3);
  EXPECT_TRUE(parse_poly("5*x1", names, CoefficientField::prime(5)).is_zero());
}

TEST(PolyOps, LocalUnit) {
  std::vector<std::string> names{"x1"};
  EXPECT_TRUE(is_local_unit(parse_poly("1 + x1", names, CoefficientField::rationals())));
  EXPECT_FALSE(is_local_unit(parse_poly("x1", names, CoefficientField::rationals())));
}

TEST(PolyOps, DivideByMonomial) {
  std::vector<std::string> names{"x1", "x2"};
  auto f = parse_poly("x1^2 + x1*x2", names, CoefficientField::rationals());
  EXPECT_EQ(divide_by_monomial(f, {1, 0}), parse_poly("x1 + x2", names, CoefficientField::rationals()));
  EXPECT_EQ(divide_by_monomial(f, {0, 0}), f);
  try {
    divide_by_monomial(parse_poly("x1", names, CoefficientField::rationals()), {2, 0});
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("(1,0)"), std::string::npos);
  }
}

TEST(PolyOps, MultiplyThenDivideIsIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> ex(0, 4), co(-5, 5);
  for (int t = 0; t < 100; ++t) {
    Poly f(CoefficientField::rationals(), 3);
    for (int k = 0; k < 5; ++k) f.add_term({ex(rng), ex(rng), ex(rng)}, co(rng));
    Exponents m{ex(rng), ex(rng), ex(rng)};
    EXPECT_EQ(divide_by_monomial(f.times_monomial(m), m), f);
  }
}

TEST(ValueOf, Examples) {
  auto chart = chart_of(frame_of({2}));
  EXPECT_TRUE(value_of(Poly(CoefficientField::rationals(), 2), chart, 1).is_infinite());
  auto v = value_of(poly("x1 + x2", chart), chart, 1);
  EXPECT_EQ(v, *chart.variable(0).value);
  auto f = poly("3*x1^2*x2 + x1^5", chart);
  EXPECT_EQ(initial_form(f, chart, 1), poly("3*x1^2*x2", chart));
  EXPECT_EQ(initial_form(poly("x1 + x1*x2", chart), chart, 1), poly("x1", chart));
}

TEST(ValueOf, HigherBlockIgnoredAtLowerLevel) {
  auto chart = chart_of(frame_of({1, 1}));
  auto f = poly("x21 + x1", chart);
  auto v = value_of(f, chart, 1);
  ASSERT_TRUE(v.is_finite());
  EXPECT_EQ(v.block(1), (BlockVector{1}));
  EXPECT_TRUE(value_of(poly("x21", chart), chart, 1).is_infinite());
}

TEST(Substitute, PrimitiveStep) {
  auto chart = chart_of(frame_of({2}));
  Derivation d(chart);
  d.apply(Primitive{"x2", "x1"});
  auto img = substitute(poly("x2", chart), d);
  EXPECT_EQ(canonical_string(img, d.current()), "x1*x2@1");
  EXPECT_EQ(substitute(poly("x2", chart), Derivation(chart)), poly("x2", chart));
}

TEST(Substitute, ScaleThenTranslate) {
  auto chart = chart_of(frame_of({1}), {"z"});
  auto f = poly("z^2 - x1^2", chart);
  Derivation d(chart);
  d.apply(Monomial{3, "z", 1, {1}});
  d.apply(Translate{"z@1", 1, {0, 0}, std::nullopt});
  auto img = substitute(f, d);
  // Hand expansion: x1^2 ((z1 + 1)^2 - 1) = x1^2 z1^2 + 2 x1^2 z1.
  auto expected = parse_poly("x1^2*z@2^2 + 2*x1^2*z@2", d.current().names(), CoefficientField::rationals());
  EXPECT_EQ(img, expected);
}

TEST(CanonicalString, AscendingValueAndRoundTrip) {
  auto chart = chart_of(frame_of({2}), {"z"});
  auto f = poly("x1^5 + 3*x1^2*x2 - 1/2*z + 7", chart);
  std::string text = canonical_string(f, chart);
  EXPECT_EQ(text, "7 + 3*x1^2*x2 + x1^5 - 1/2*z");
  EXPECT_EQ(canonical_string(parse_poly(text, chart.names(), f.field()), chart), text);
}

TEST(LocalFractionOps, Arithmetic) {
  std::vector<std::string> names{"x1"};
  auto q = CoefficientField::rationals();
  LocalFraction a{parse_poly("x1", names, q), parse_poly("1 + x1", names, q)};
  LocalFraction b = LocalFraction::of(parse_poly("2", names, q));
  EXPECT_TRUE((a * b).equals({parse_poly("2*x1", names, q), parse_poly("1 + x1", names, q)}));
  EXPECT_TRUE(((a + b) - b).equals(a));
  EXPECT_THROW(b / a, PreconditionError);
}

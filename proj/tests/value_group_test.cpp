#include <gtest/gtest.h>

#include <random>

#include "oracles/mpfr_sign.hpp"
#include "support.hpp"
#include "vforge/errors.hpp"
#include "vforge/value_group.hpp"

using namespace vforge;

namespace {

Sign sign2(const mpq_class& a, const mpq_class& b, std::uint32_t p, std::uint32_t q) {
  std::vector<mpq_class> c{a, b};
  std::vector<std::uint32_t> r{p, q};
  return sign_of_combination(c, r);
}

GroupValue gv(std::vector<BlockVector> blocks) { return GroupValue::from_blocks(std::move(blocks)); }

}  // namespace

TEST(SignOfCombination, ZeroOnlyForZeroCoefficients) {
  EXPECT_EQ(sign2(0, 0, 2, 3), Sign::zero);
}

TEST(SignOfCombination, MatchesFrozenOracleValues) {
  // Oracle: sqrt2 - sqrt3 = -0.3178..., 5 sqrt2 - 4 sqrt3 = +0.1427...
  EXPECT_LT(oracle::mpfr_value_of({1, -1}, {2, 3}), -0.31);
  EXPECT_EQ(sign2(1, -1, 2, 3), Sign::negative);
  EXPECT_GT(oracle::mpfr_value_of({5, -4}, {2, 3}), 0.14);
  EXPECT_EQ(sign2(5, -4, 2, 3), Sign::positive);
}

TEST(SignOfCombination, NearCancellationNeedsRefinement) {
  // 2 * 985^2 = 1393^2 + 1, so 985 sqrt2 - 1393 is about 3.6e-4.
  std::vector<mpq_class> c{985, -1393};
  std::vector<std::uint32_t> r{2, 1};
  EXPECT_EQ(sign_of_combination(c, r), Sign::positive);
}

TEST(SignOfCombination, RejectsRepeatedOrCompositeRadicands) {
  std::vector<mpq_class> c{1, 1};
  std::vector<std::uint32_t> rep{2, 2};
  std::vector<std::uint32_t> comp{2, 6};
  EXPECT_THROW(sign_of_combination(c, rep), std::invalid_argument);
  EXPECT_THROW(sign_of_combination(c, comp), std::invalid_argument);
}

TEST(SignOfCombination, AgreesWithMpfrOnRandomCombinations) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 9);
  const std::vector<std::uint32_t> primes{2, 3, 5, 7};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<mpq_class> c;
    for (int k = 0; k < 4; ++k) {
      mpq_class q(num(rng), den(rng));
      q.canonicalize();
      c.push_back(q);
    }
    int expected = oracle::mpfr_sign_of(c, primes);
    EXPECT_EQ(static_cast<int>(sign_of_combination(c, primes)), expected) << "trial " << trial;
  }
}

TEST(ValuationFrame, RejectsDependentWeights) {
  std::vector<std::vector<Weight>> w{{{SqrtTerm{1, 2}}, {SqrtTerm{2, 2}}}};
  EXPECT_THROW(ValuationFrame({2}, w), PreconditionError);
}

TEST(ValuationFrame, RejectsNonPositiveWeight) {
  std::vector<std::vector<Weight>> w{{{SqrtTerm{1, 2}, SqrtTerm{-1, 3}}}};
  EXPECT_THROW(ValuationFrame({1}, w), PreconditionError);
}

TEST(ValuationFrame, AcceptsCombinations) {
  std::vector<std::vector<Weight>> w{{{SqrtTerm{1, 2}}, {SqrtTerm{1, 3}, SqrtTerm{mpq_class(1, 2), 2}}}};
  ValuationFrame f({2}, w);
  EXPECT_EQ(f.total_generators(), 2);
}

TEST(Compare, EqualValues) {
  auto f = testing_support::frame_of({2, 1});
  GroupValue a = gv({{1, 2}, {3}});
  EXPECT_EQ(compare(a, a, *f), std::strong_ordering::equal);
  EXPECT_EQ(compare(GroupValue::infinity(), GroupValue::infinity(), *f), std::strong_ordering::equal);
}

TEST(Compare, LowerBlockBySignOracle) {
  auto f = testing_support::frame_of({2, 1});
  EXPECT_EQ(compare(gv({{1, 0}, {0}}), gv({{5, 5}, {0}}), *f), std::strong_ordering::less);
}

TEST(Compare, HigherBlockDominates) {
  auto f = testing_support::frame_of({2, 1});
  EXPECT_EQ(compare(gv({{-100, -100}, {1}}), gv({{0, 0}, {0}}), *f), std::strong_ordering::greater);
  EXPECT_EQ(compare(gv({{0, 0}, {0}}), GroupValue::infinity(), *f), std::strong_ordering::less);
}

TEST(TruncateAtLevel, Cases) {
  GroupValue a = gv({{3, 1}, {0}});
  GroupValue t = truncate_at_level(a, 1);
  ASSERT_TRUE(t.is_finite());
  EXPECT_EQ(t.block(1), (BlockVector{3, 1}));
  EXPECT_TRUE(truncate_at_level(gv({{3, 1}, {2}}), 1).is_infinite());
  EXPECT_TRUE(truncate_at_level(GroupValue::infinity(), 2).is_infinite());
  EXPECT_THROW(truncate_at_level(a, 3), std::out_of_range);
}

TEST(NonnegRepresentation, Cases) {
  std::vector<BlockVector> basis{{1, 0}, {0, 1}};
  std::vector<mpq_class> v{1, 2};
  auto r = nonneg_representation(v, basis);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(*r, (std::vector<std::int64_t>{1, 2}));
  std::vector<mpq_class> neg{1, -1};
  EXPECT_FALSE(nonneg_representation(neg, basis).has_value());
  std::vector<mpq_class> half{mpq_class(1, 2), 0};
  try {
    nonneg_representation(half, basis);
    FAIL() << "expected ValueNotInGroup";
  } catch (const MathError& e) {
    EXPECT_EQ(e.kind(), FailureKind::ValueNotInGroup);
  }
}

TEST(NonnegRepresentation, SkewBasis) {
  std::vector<BlockVector> basis{{1, 1}, {0, 1}};
  std::vector<mpq_class> v{2, 5};
  auto r = nonneg_representation(v, basis);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(*r, (std::vector<std::int64_t>{2, 3}));
}

TEST(GroupValueText, RoundTrip) {
  GroupValue a = gv({{3, -1}, {2}});
  EXPECT_EQ(to_string(a), "[3,-1;2]");
  EXPECT_EQ(parse_group_value("[3,-1;2]"), a);
  EXPECT_EQ(to_string(GroupValue::infinity()), "inf");
  EXPECT_TRUE(parse_group_value("inf").is_infinite());
}

TEST(GroupOrder, RandomTriplesAreConsistent) {
  auto f = testing_support::frame_of({2, 2});
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> c(-6, 6);
  auto random_value = [&] { return gv({{c(rng), c(rng)}, {c(rng), c(rng)}}); };
  for (int trial = 0; trial < 1000; ++trial) {
    GroupValue a = random_value(), b = random_value(), d = random_value();
    auto ab = compare(a, b, *f), ba = compare(b, a, *f);
    EXPECT_EQ(ab == std::strong_ordering::less, ba == std::strong_ordering::greater);
    EXPECT_EQ(ab == std::strong_ordering::equal, a == b);
    if (ab == std::strong_ordering::less && compare(b, d, *f) == std::strong_ordering::less) {
      EXPECT_EQ(compare(a, d, *f), std::strong_ordering::less);
    }
    GroupValue zero = GroupValue::zero(*f);
    if (compare(zero, a, *f) == std::strong_ordering::less && ab == std::strong_ordering::less &&
        truncate_at_level(b, 1).is_finite()) {
      EXPECT_TRUE(truncate_at_level(a, 1).is_finite());
    }
  }
}

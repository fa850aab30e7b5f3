#pragma once

// Exact arithmetic in the ordered group Z^{r_1 + ... + r_t} with the
// lexicographic-by-block order, where each block is ordered through an
// embedding into the reals by square roots of primes.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vforge {

enum class Sign { negative = -1, zero = 0, positive = 1 };

/// Exact sign of sum_j coeffs[j] * sqrt(radicands[j]).
///
/// Radicands must be pairwise distinct and each either 1 or a prime, so the
/// square roots are linearly independent over Q and the sum vanishes only when
/// every coefficient does. Otherwise the sign is found by interval refinement
/// at doubling dyadic precision.
Sign sign_of_combination(std::span<const mpq_class> coeffs,
                         std::span<const std::uint32_t> radicands);

bool is_prime(std::uint32_t n);
/// The k-th prime, 0-based (nth_prime(0) == 2).
std::uint32_t nth_prime(std::size_t k);

struct SqrtTerm {
  mpq_class coeff;
  std::uint32_t radicand;

  bool operator==(const SqrtTerm&) const = default;
};

/// A positive real number written as a rational combination of square roots.
using Weight = std::vector<SqrtTerm>;

std::string to_string(const Weight& w);

using BlockVector = std::vector<std::int64_t>;

/// Block structure plus the real weights of each generator.
///
/// Blocks are numbered 1..t; generator k of block b has weight weight(b, k).
class ValuationFrame {
 public:
  /// Generator j of block i gets sqrt of a globally distinct prime, taken in
  /// generator order.
  static ValuationFrame with_default_weights(std::vector<int> block_sizes);

  /// Validates positivity and Q-linear independence within each block.
  ValuationFrame(std::vector<int> block_sizes, std::vector<std::vector<Weight>> weights);

  int num_blocks() const { return static_cast<int>(block_sizes_.size()); }
  int block_size(int block) const { return block_sizes_.at(block - 1); }
  const std::vector<int>& block_sizes() const { return block_sizes_; }
  int total_generators() const;
  const Weight& weight(int block, int index) const { return weights_.at(block - 1).at(index); }

  /// Sign of the real number <coords, weights of block>.
  Sign sign_in_block(int block, std::span<const mpq_class> coords) const;
  Sign sign_in_block(int block, std::span<const std::int64_t> coords) const;

  bool operator==(const ValuationFrame&) const = default;

 private:
  std::vector<int> block_sizes_;
  std::vector<std::vector<Weight>> weights_;
};

using FramePtr = std::shared_ptr<const ValuationFrame>;

/// Element of Gamma union {infinity}, stored in the generator basis.
class GroupValue {
 public:
  GroupValue() = default;  // infinity

  static GroupValue infinity() { return GroupValue(); }
  static GroupValue zero(const ValuationFrame& frame);
  static GroupValue generator(const ValuationFrame& frame, int block, int index);
  static GroupValue from_blocks(std::vector<BlockVector> blocks);

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  /// Finite and every coordinate zero.
  bool is_zero() const;

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const BlockVector& block(int b) const { return blocks_.at(b - 1); }
  const std::vector<BlockVector>& blocks() const { return blocks_; }
  /// Largest block index with a nonzero coordinate, 0 when none.
  int top_block() const;

  GroupValue operator+(const GroupValue& other) const;
  /// Infinity minus finite is infinity; anything minus infinity is an error.
  GroupValue operator-(const GroupValue& other) const;
  GroupValue operator-() const;
  GroupValue scaled(std::int64_t factor) const;

  bool operator==(const GroupValue&) const = default;

 private:
  bool infinite_ = true;
  std::vector<BlockVector> blocks_;
};

/// Checks that `v` has the frame's block shape (or is infinity).
void check_conforms(const GroupValue& v, const ValuationFrame& frame);

/// Higher block index dominates; infinity is the top element.
std::strong_ordering compare(const GroupValue& a, const GroupValue& b, const ValuationFrame& frame);

/// Order of the specialization at `level`: blocks below the level are ignored.
std::strong_ordering compare_at_level(const GroupValue& a, const GroupValue& b,
                                      const ValuationFrame& frame, int level);

/// Rank-one quotient view: infinity if any block above `level` is nonzero,
/// otherwise a value holding only the block-`level` coordinates.
GroupValue truncate_at_level(const GroupValue& v, int level);

/// Zeroes the blocks below `level`.
GroupValue project_from_level(const GroupValue& v, int level);

using RationalVector = std::vector<mpq_class>;

/// Coordinates of `v` in the Z-basis `basis` (one integer vector per basis
/// element, all of the same length as v). Returns nullopt when some coordinate
/// is negative; throws MathError(ValueNotInGroup) when v is outside the Z-span.
std::optional<std::vector<std::int64_t>> nonneg_representation(
    std::span<const mpq_class> v, std::span<const BlockVector> basis);

/// Integer coordinates of v in `basis`, any sign; throws when not in the Z-span.
std::vector<std::int64_t> integer_representation(std::span<const mpq_class> v,
                                                 std::span<const BlockVector> basis);

/// `[b1;b2;...]` with comma-separated integers per block, or `inf`.
std::string to_string(const GroupValue& v);
GroupValue parse_group_value(std::string_view text);

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

}  // namespace vforge

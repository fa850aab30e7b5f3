#include "vforge/value_group.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "vforge/errors.hpp"
#include "vforge/rational.hpp"

namespace vforge {

const char* to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::ValueNotInGroup: return "ValueNotInGroup";
    case FailureKind::ResidueNotInField: return "ResidueNotInField";
    case FailureKind::NotInMaximalIdeal: return "NotInMaximalIdeal";
    case FailureKind::PreconditionViolated: return "PreconditionViolated";
  }
  return "Unknown";
}

std::int64_t to_int64(const mpz_class& v) {
  if (!mpz_fits_slong_p(v.get_mpz_t()) || sizeof(long) < sizeof(std::int64_t)) {
    throw InternalError("integer " + v.get_str() + " does not fit in 64 bits");
  }
  return static_cast<std::int64_t>(v.get_si());
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw InternalError("integer overflow in exponent arithmetic");
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw InternalError("integer overflow in exponent arithmetic");
  return out;
}

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::uint32_t nth_prime(std::size_t k) {
  std::uint32_t candidate = 1;
  std::size_t found = 0;
  while (true) {
    ++candidate;
    if (is_prime(candidate)) {
      if (found == k) return candidate;
      ++found;
    }
  }
}

Sign sign_of_combination(std::span<const mpq_class> coeffs,
                         std::span<const std::uint32_t> radicands) {
  if (coeffs.size() != radicands.size()) {
    throw std::invalid_argument("sign_of_combination: length mismatch");
  }
  std::set<std::uint32_t> seen;
  for (auto r : radicands) {
    if (r != 1 && !is_prime(r)) throw std::invalid_argument("radicand " + std::to_string(r) + " is not prime");
    if (!seen.insert(r).second) throw std::invalid_argument("repeated radicand " + std::to_string(r));
  }
  bool all_zero = std::all_of(coeffs.begin(), coeffs.end(), [](const mpq_class& c) { return sgn(c) == 0; });
  if (all_zero) return Sign::zero;

  // sqrt(p) lies in [s, s+1] / 2^bits with s = floor(sqrt(p * 4^bits)).
  for (unsigned long bits = 32;; bits *= 2) {
    mpq_class lo = 0;
    mpq_class hi = 0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      const mpq_class& c = coeffs[j];
      if (sgn(c) == 0) continue;
      mpz_class scaled = radicands[j];
      mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 2 * bits);
      mpz_class s;
      mpz_sqrt(s.get_mpz_t(), scaled.get_mpz_t());
      mpz_class s1 = s + 1;
      if (sgn(c) > 0) {
        lo += c * s;
        hi += c * s1;
      } else {
        lo += c * s1;
        hi += c * s;
      }
    }
    if (sgn(lo) > 0) return Sign::positive;
    if (sgn(hi) < 0) return Sign::negative;
  }
}

std::string to_string(const Weight& w) {
  std::ostringstream out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k > 0) out << " + ";
    out << w[k].coeff.get_str() << "*sqrt(" << w[k].radicand << ")";
  }
  return out.str();
}

namespace {

std::size_t rank_over_q(std::vector<std::vector<mpq_class>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && sgn(rows[pivot][c]) == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || sgn(rows[r][c]) == 0) continue;
      mpq_class factor = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= factor * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

ValuationFrame ValuationFrame::with_default_weights(std::vector<int> block_sizes) {
  std::vector<std::vector<Weight>> weights;
  std::size_t next = 0;
  for (int size : block_sizes) {
    std::vector<Weight> block;
    for (int k = 0; k < size; ++k) block.push_back({SqrtTerm{1, nth_prime(next++)}});
    weights.push_back(std::move(block));
  }
  return ValuationFrame(std::move(block_sizes), std::move(weights));
}

ValuationFrame::ValuationFrame(std::vector<int> block_sizes, std::vector<std::vector<Weight>> weights)
    : block_sizes_(std::move(block_sizes)), weights_(std::move(weights)) {
  if (block_sizes_.empty()) throw PreconditionError("frame", "at least one block is required");
  if (weights_.size() != block_sizes_.size()) throw PreconditionError("frame", "weights do not match block count");
  for (std::size_t b = 0; b < block_sizes_.size(); ++b) {
    if (block_sizes_[b] <= 0) throw PreconditionError("frame", "block sizes must be positive");
    if (static_cast<int>(weights_[b].size()) != block_sizes_[b]) {
      throw PreconditionError("frame", "block " + std::to_string(b + 1) + " has the wrong number of weights");
    }
    std::vector<std::uint32_t> radicands;
    for (const Weight& w : weights_[b]) {
      if (w.empty()) throw PreconditionError("frame", "empty weight");
      std::vector<mpq_class> c;
      std::vector<std::uint32_t> r;
      for (const SqrtTerm& term : w) {
        c.push_back(term.coeff);
        r.push_back(term.radicand);
        if (std::find(radicands.begin(), radicands.end(), term.radicand) == radicands.end()) {
          radicands.push_back(term.radicand);
        }
      }
      if (sign_of_combination(c, r) != Sign::positive) {
        throw PreconditionError("frame", "weight " + to_string(w) + " is not positive");
      }
    }
    std::vector<std::vector<mpq_class>> rows;
    for (const Weight& w : weights_[b]) {
      std::vector<mpq_class> row(radicands.size(), 0);
      for (const SqrtTerm& term : w) {
        auto pos = std::find(radicands.begin(), radicands.end(), term.radicand) - radicands.begin();
        row[pos] += term.coeff;
      }
      rows.push_back(std::move(row));
    }
    if (rank_over_q(rows) != weights_[b].size()) {
      throw PreconditionError("frame", "weights of block " + std::to_string(b + 1) +
                                           " are not linearly independent over Q");
    }
  }
}

int ValuationFrame::total_generators() const {
  int total = 0;
  for (int s : block_sizes_) total += s;
  return total;
}

Sign ValuationFrame::sign_in_block(int block, std::span<const mpq_class> coords) const {
  const auto& ws = weights_.at(block - 1);
  if (coords.size() != ws.size()) throw std::invalid_argument("sign_in_block: coordinate length mismatch");
  std::map<std::uint32_t, mpq_class> combined;
  for (std::size_t k = 0; k < ws.size(); ++k) {
    if (sgn(coords[k]) == 0) continue;
    for (const SqrtTerm& term : ws[k]) combined[term.radicand] += coords[k] * term.coeff;
  }
  std::vector<mpq_class> c;
  std::vector<std::uint32_t> r;
  for (auto& [radicand, coeff] : combined) {
    r.push_back(radicand);
    c.push_back(coeff);
  }
  return sign_of_combination(c, r);
}

Sign ValuationFrame::sign_in_block(int block, std::span<const std::int64_t> coords) const {
  std::vector<mpq_class> q;
  q.reserve(coords.size());
  for (auto c : coords) q.emplace_back(to_mpz(c));
  return sign_in_block(block, q);
}

GroupValue GroupValue::zero(const ValuationFrame& frame) {
  GroupValue v;
  v.infinite_ = false;
  for (int s : frame.block_sizes()) v.blocks_.emplace_back(s, 0);
  return v;
}

GroupValue GroupValue::generator(const ValuationFrame& frame, int block, int index) {
  GroupValue v = zero(frame);
  v.blocks_.at(block - 1).at(index) = 1;
  return v;
}

GroupValue GroupValue::from_blocks(std::vector<BlockVector> blocks) {
  GroupValue v;
  v.infinite_ = false;
  v.blocks_ = std::move(blocks);
  return v;
}

bool GroupValue::is_zero() const {
  if (infinite_) return false;
  for (const auto& b : blocks_) {
    for (auto c : b) {
      if (c != 0) return false;
    }
  }
  return true;
}

int GroupValue::top_block() const {
  for (int b = num_blocks(); b >= 1; --b) {
    for (auto c : blocks_[b - 1]) {
      if (c != 0) return b;
    }
  }
  return 0;
}

namespace {

void require_same_shape(const GroupValue& a, const GroupValue& b) {
  if (a.num_blocks() != b.num_blocks()) throw std::invalid_argument("group values from different frames");
  for (int k = 1; k <= a.num_blocks(); ++k) {
    if (a.block(k).size() != b.block(k).size()) throw std::invalid_argument("group values from different frames");
  }
}

}  // namespace

GroupValue GroupValue::operator+(const GroupValue& other) const {
  if (infinite_ || other.infinite_) return infinity();
  require_same_shape(*this, other);
  GroupValue out = *this;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for (std::size_t k = 0; k < blocks_[b].size(); ++k) {
      out.blocks_[b][k] = checked_add(blocks_[b][k], other.blocks_[b][k]);
    }
  }
  return out;
}

GroupValue GroupValue::operator-() const {
  if (infinite_) throw std::invalid_argument("negating infinity");
  return scaled(-1);
}

GroupValue GroupValue::operator-(const GroupValue& other) const {
  if (other.infinite_) throw std::invalid_argument("subtracting infinity");
  if (infinite_) return infinity();
  return *this + (-other);
}

GroupValue GroupValue::scaled(std::int64_t factor) const {
  if (infinite_) {
    if (factor <= 0) throw std::invalid_argument("non-positive multiple of infinity");
    return infinity();
  }
  GroupValue out = *this;
  for (auto& b : out.blocks_) {
    for (auto& c : b) c = checked_mul(c, factor);
  }
  return out;
}

void check_conforms(const GroupValue& v, const ValuationFrame& frame) {
  if (v.is_infinite()) return;
  if (v.num_blocks() != frame.num_blocks()) throw PreconditionError("frame", "value block count mismatch");
  for (int b = 1; b <= frame.num_blocks(); ++b) {
    if (static_cast<int>(v.block(b).size()) != frame.block_size(b)) {
      throw PreconditionError("frame", "value block " + std::to_string(b) + " has the wrong length");
    }
  }
}

std::strong_ordering compare(const GroupValue& a, const GroupValue& b, const ValuationFrame& frame) {
  if (a.is_infinite() || b.is_infinite()) {
    if (a.is_infinite() && b.is_infinite()) return std::strong_ordering::equal;
    return a.is_infinite() ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  check_conforms(a, frame);
  check_conforms(b, frame);
  for (int blk = frame.num_blocks(); blk >= 1; --blk) {
    const auto& x = a.block(blk);
    const auto& y = b.block(blk);
    if (x == y) continue;
    std::vector<mpq_class> diff(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) diff[k] = mpq_class(to_mpz(x[k])) - mpq_class(to_mpz(y[k]));
    Sign s = frame.sign_in_block(blk, diff);
    if (s == Sign::positive) return std::strong_ordering::greater;
    if (s == Sign::negative) return std::strong_ordering::less;
    throw InternalError("distinct block vectors with equal real value: weights are not independent");
  }
  return std::strong_ordering::equal;
}

GroupValue project_from_level(const GroupValue& v, int level) {
  if (v.is_infinite()) return v;
  auto blocks = v.blocks();
  for (int b = 1; b < level && b <= static_cast<int>(blocks.size()); ++b) {
    std::fill(blocks[b - 1].begin(), blocks[b - 1].end(), 0);
  }
  return GroupValue::from_blocks(std::move(blocks));
}

std::strong_ordering compare_at_level(const GroupValue& a, const GroupValue& b,
                                      const ValuationFrame& frame, int level) {
  return compare(project_from_level(a, level), project_from_level(b, level), frame);
}

GroupValue truncate_at_level(const GroupValue& v, int level) {
  if (v.is_infinite()) return v;
  if (level < 1 || level > v.num_blocks()) throw std::out_of_range("level out of range");
  if (v.top_block() > level) return GroupValue::infinity();
  return project_from_level(v, level);
}

namespace {

// Solves sum_k c_k basis[k] = v over Q. Throws if the basis is singular.
std::vector<mpq_class> solve_in_basis(std::span<const mpq_class> v, std::span<const BlockVector> basis) {
  const std::size_t n = v.size();
  if (basis.size() != n) throw std::invalid_argument("basis size does not match vector length");
  std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(n + 1));
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t k = 0; k < n; ++k) {
      if (basis[k].size() != n) throw std::invalid_argument("basis vector length mismatch");
      m[row][k] = mpq_class(to_mpz(basis[k][row]));
    }
    m[row][n] = v[row];
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && sgn(m[pivot][c]) == 0) ++pivot;
    if (pivot == n) throw InternalError("chart values do not form a basis");
    std::swap(m[pivot], m[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || sgn(m[r][c]) == 0) continue;
      mpq_class f = m[r][c] / m[c][c];
      for (std::size_t k = c; k <= n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  std::vector<mpq_class> out(n);
  for (std::size_t r = 0; r < n; ++r) out[r] = m[r][n] / m[r][r];
  return out;
}

}  // namespace

std::vector<std::int64_t> integer_representation(std::span<const mpq_class> v,
                                                 std::span<const BlockVector> basis) {
  auto coords = solve_in_basis(v, basis);
  std::vector<std::int64_t> out;
  for (auto& c : coords) {
    if (c.get_den() != 1) {
      throw MathError(FailureKind::ValueNotInGroup, "value is not in the Z-span of the chart values");
    }
    out.push_back(to_int64(c.get_num()));
  }
  return out;
}

std::optional<std::vector<std::int64_t>> nonneg_representation(std::span<const mpq_class> v,
                                                               std::span<const BlockVector> basis) {
  auto coords = integer_representation(v, basis);
  for (auto c : coords) {
    if (c < 0) return std::nullopt;
  }
  return coords;
}

std::string to_string(const GroupValue& v) {
  if (v.is_infinite()) return "inf";
  std::string out = "[";
  for (int b = 1; b <= v.num_blocks(); ++b) {
    if (b > 1) out += ';';
    const auto& blk = v.block(b);
    for (std::size_t k = 0; k < blk.size(); ++k) {
      if (k > 0) out += ',';
      out += std::to_string(blk[k]);
    }
  }
  out += ']';
  return out;
}

GroupValue parse_group_value(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s == "inf") return GroupValue::infinity();
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw ParseError(1, 1, "malformed group value '" + std::string(text) + "'");
  s = s.substr(1, s.size() - 2);
  std::vector<BlockVector> blocks;
  std::stringstream blocks_in(s);
  std::string block_text;
  while (std::getline(blocks_in, block_text, ';')) {
    BlockVector blk;
    std::stringstream coords_in(block_text);
    std::string coord;
    while (std::getline(coords_in, coord, ',')) {
      try {
        std::size_t used = 0;
        long long c = std::stoll(coord, &used);
        if (used != coord.size()) throw std::invalid_argument(coord);
        blk.push_back(c);
      } catch (const std::exception&) {
        throw ParseError(1, 1, "malformed coordinate '" + coord + "'");
      }
    }
    blocks.push_back(std::move(blk));
  }
  return GroupValue::from_blocks(std::move(blocks));
}

}  // namespace vforge

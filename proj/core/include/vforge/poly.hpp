#pragma once

// Sparse multivariate polynomials over Q or F_p.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vforge {

class CoefficientField {
 public:
  static CoefficientField rationals() { return CoefficientField(0); }
  /// Throws PreconditionError unless p is prime.
  static CoefficientField prime(std::uint32_t p);

  bool is_rational() const { return p_ == 0; }
  std::uint32_t characteristic() const { return p_; }

  /// Brings c into canonical form: lowest terms over Q, least residue over F_p.
  mpq_class normalize(const mpq_class& c) const;

  std::string to_string() const;
  bool operator==(const CoefficientField&) const = default;

 private:
  explicit CoefficientField(std::uint32_t p) : p_(p) {}
  std::uint32_t p_;
};

using Exponents = std::vector<std::int64_t>;

class Poly {
 public:
  using Terms = std::map<Exponents, mpq_class>;

  Poly(CoefficientField field, std::size_t arity) : field_(field), arity_(arity) {}

  static Poly constant(CoefficientField field, std::size_t arity, const mpq_class& c);
  static Poly variable(CoefficientField field, std::size_t arity, std::size_t index);
  static Poly monomial(CoefficientField field, const Exponents& e, const mpq_class& c = 1);

  const CoefficientField& field() const { return field_; }
  std::size_t arity() const { return arity_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Adds c * x^e, dropping the term if the sum vanishes.
  void add_term(const Exponents& e, const mpq_class& c);
  mpq_class coefficient(const Exponents& e) const;
  mpq_class constant_term() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly scaled(const mpq_class& c) const;
  Poly pow(unsigned n) const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);

  /// x^e * f.
  Poly times_monomial(const Exponents& e) const;

  /// Replaces variable `index` by `replacement` (same arity).
  Poly compose_var(std::size_t index, const Poly& replacement) const;

  /// Sets variable `index` to the constant c.
  Poly evaluate_var(std::size_t index, const mpq_class& c) const;

  /// Coefficients of var^0, var^1, ... as polynomials not involving var.
  std::vector<Poly> coefficients_in(std::size_t index) const;
  std::int64_t degree_in(std::size_t index) const;

  /// Maps exponents through `f` (new arity given); coefficients of colliding
  /// images are added.
  template <typename F>
  Poly map_exponents(std::size_t new_arity, F&& f) const {
    Poly out(field_, new_arity);
    for (const auto& [e, c] : terms_) out.add_term(f(e), c);
    return out;
  }

  bool operator==(const Poly&) const = default;

 private:
  void check_compatible(const Poly& o) const;

  CoefficientField field_;
  std::size_t arity_;
  Terms terms_;
};

/// Fraction num/den whose denominator is a local unit (nonzero constant term).
struct LocalFraction {
  Poly num;
  Poly den;

  static LocalFraction of(Poly p);

  LocalFraction operator+(const LocalFraction& o) const;
  LocalFraction operator-(const LocalFraction& o) const;
  LocalFraction operator*(const LocalFraction& o) const;
  /// Requires o.num to be a local unit.
  LocalFraction operator/(const LocalFraction& o) const;

  /// num * o.den == o.num * den.
  bool equals(const LocalFraction& o) const;
  bool is_zero() const { return num.is_zero(); }
};

/// True iff the constant term is nonzero.
bool is_local_unit(const Poly& f);

/// Exact quotient by x^e. Throws PreconditionError naming the first term
/// (exponent vector) that x^e does not divide.
Poly divide_by_monomial(const Poly& f, const Exponents& e);

bool divides(const Exponents& a, const Exponents& b);

std::string exponents_to_string(const Exponents& e);
Exponents parse_exponents(std::string_view text);

/// Renders the terms in the given order, e.g. `3*x1^2*x2 - 1/2*z`.
std::string render_terms(const Poly& f, const std::vector<std::string>& names,
                         const std::vector<Exponents>& order);

/// Terms by descending total degree then descending lexicographic exponent.
std::string to_string(const Poly& f, const std::vector<std::string>& names);

/// Grammar: sums and differences of products of powers of names, integer or
/// a/b constants and parenthesised subexpressions. Errors carry the column
/// inside `text`, offset by `column_offset`, and the given line.
Poly parse_poly(std::string_view text, const std::vector<std::string>& names,
                const CoefficientField& field, std::size_t line = 1, std::size_t column_offset = 0);

}  // namespace vforge

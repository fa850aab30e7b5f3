#include "vforge/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "vforge/errors.hpp"
#include "vforge/rational.hpp"
#include "vforge/value_group.hpp"

namespace vforge {

CoefficientField CoefficientField::prime(std::uint32_t p) {
  if (!is_prime(p)) throw PreconditionError("field", std::to_string(p) + " is not prime");
  return CoefficientField(p);
}

mpq_class CoefficientField::normalize(const mpq_class& c) const {
  if (p_ == 0) {
    mpq_class out = c;
    out.canonicalize();
    return out;
  }
  mpz_class p = p_;
  mpz_class den = c.get_den();
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t()) == 0) {
    throw MathError(FailureKind::PreconditionViolated,
                    "denominator " + den.get_str() + " vanishes in F_" + std::to_string(p_));
  }
  mpz_class r = c.get_num() * inv;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), p.get_mpz_t());
  return mpq_class(r);
}

std::string CoefficientField::to_string() const {
  return p_ == 0 ? "Q" : "F " + std::to_string(p_);
}

Poly Poly::constant(CoefficientField field, std::size_t arity, const mpq_class& c) {
  Poly out(field, arity);
  out.add_term(Exponents(arity, 0), c);
  return out;
}

Poly Poly::variable(CoefficientField field, std::size_t arity, std::size_t index) {
  Exponents e(arity, 0);
  e.at(index) = 1;
  return monomial(field, e);
}

Poly Poly::monomial(CoefficientField field, const Exponents& e, const mpq_class& c) {
  Poly out(field, e.size());
  out.add_term(e, c);
  return out;
}

void Poly::add_term(const Exponents& e, const mpq_class& c) {
  if (e.size() != arity_) throw std::invalid_argument("exponent arity mismatch");
  mpq_class v = field_.normalize(c);
  if (sgn(v) == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, v);
  if (!inserted) {
    it->second = field_.normalize(it->second + v);
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

mpq_class Poly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

mpq_class Poly::constant_term() const { return coefficient(Exponents(arity_, 0)); }

void Poly::check_compatible(const Poly& o) const {
  if (arity_ != o.arity_ || !(field_ == o.field_)) {
    throw std::invalid_argument("polynomials over different rings");
  }
}

Poly& Poly::operator+=(const Poly& o) {
  check_compatible(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  check_compatible(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly Poly::operator+(const Poly& o) const {
  Poly out = *this;
  out += o;
  return out;
}

Poly Poly::operator-(const Poly& o) const {
  Poly out = *this;
  out -= o;
  return out;
}

Poly Poly::operator-() const { return scaled(-1); }

Poly Poly::operator*(const Poly& o) const {
  check_compatible(o);
  Poly out(field_, arity_);
  Exponents e(arity_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      for (std::size_t k = 0; k < arity_; ++k) e[k] = checked_add(ea[k], eb[k]);
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Poly Poly::scaled(const mpq_class& c) const {
  Poly out(field_, arity_);
  for (const auto& [e, v] : terms_) out.add_term(e, v * c);
  return out;
}

Poly Poly::pow(unsigned n) const {
  Poly result = constant(field_, arity_, 1);
  Poly base = *this;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

Poly Poly::times_monomial(const Exponents& m) const {
  if (m.size() != arity_) throw std::invalid_argument("exponent arity mismatch");
  return map_exponents(arity_, [&](const Exponents& e) {
    Exponents out(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) out[k] = checked_add(e[k], m[k]);
    return out;
  });
}

std::vector<Poly> Poly::coefficients_in(std::size_t index) const {
  std::vector<Poly> out;
  for (const auto& [e, c] : terms_) {
    auto d = static_cast<std::size_t>(e.at(index));
    while (out.size() <= d) out.emplace_back(field_, arity_);
    Exponents rest = e;
    rest[index] = 0;
    out[d].add_term(rest, c);
  }
  return out;
}

std::int64_t Poly::degree_in(std::size_t index) const {
  std::int64_t d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e.at(index));
  return d;
}

Poly Poly::compose_var(std::size_t index, const Poly& replacement) const {
  check_compatible(replacement);
  auto coeffs = coefficients_in(index);
  // Horner evaluation in the replacement.
  Poly out(field_, arity_);
  for (std::size_t d = coeffs.size(); d-- > 0;) {
    out = out * replacement;
    out += coeffs[d];
  }
  return out;
}

Poly Poly::evaluate_var(std::size_t index, const mpq_class& c) const {
  return compose_var(index, constant(field_, arity_, c));
}

LocalFraction LocalFraction::of(Poly p) {
  Poly one = Poly::constant(p.field(), p.arity(), 1);
  return {std::move(p), std::move(one)};
}

namespace {

void require_unit(const Poly& p, const char* what) {
  if (!is_local_unit(p)) throw PreconditionError("local-unit", std::string(what) + " is not a local unit");
}

}  // namespace

LocalFraction LocalFraction::operator+(const LocalFraction& o) const {
  if (den == o.den) return {num + o.num, den};
  return {num * o.den + o.num * den, den * o.den};
}

LocalFraction LocalFraction::operator-(const LocalFraction& o) const {
  if (den == o.den) return {num - o.num, den};
  return {num * o.den - o.num * den, den * o.den};
}

LocalFraction LocalFraction::operator*(const LocalFraction& o) const {
  return {num * o.num, den * o.den};
}

LocalFraction LocalFraction::operator/(const LocalFraction& o) const {
  require_unit(o.num, "divisor");
  return {num * o.den, den * o.num};
}

bool LocalFraction::equals(const LocalFraction& o) const { return num * o.den == o.num * den; }

bool is_local_unit(const Poly& f) { return sgn(f.constant_term()) != 0; }

bool divides(const Exponents& a, const Exponents& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
  }
  return true;
}

Poly divide_by_monomial(const Poly& f, const Exponents& m) {
  if (m.size() != f.arity()) throw std::invalid_argument("exponent arity mismatch");
  Poly out(f.field(), f.arity());
  for (const auto& [e, c] : f.terms()) {
    if (!divides(m, e)) {
      throw PreconditionError("divide", "x^" + exponents_to_string(m) + " does not divide term " +
                                            exponents_to_string(e));
    }
    Exponents q(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) q[k] = e[k] - m[k];
    out.add_term(q, c);
  }
  return out;
}

std::string exponents_to_string(const Exponents& e) {
  std::string out = "(";
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (k > 0) out += ',';
    out += std::to_string(e[k]);
  }
  return out + ")";
}

Exponents parse_exponents(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
    throw ParseError(1, 1, "malformed exponent vector '" + std::string(text) + "'");
  }
  Exponents out;
  s = s.substr(1, s.size() - 2);
  if (s.empty()) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParseError(1, 1, "malformed exponent '" + item + "'");
    }
  }
  return out;
}

std::string render_terms(const Poly& f, const std::vector<std::string>& names,
                         const std::vector<Exponents>& order) {
  if (f.is_zero()) return "0";
  if (names.size() != f.arity()) throw std::invalid_argument("name list does not match arity");
  std::string out;
  bool first = true;
  for (const Exponents& e : order) {
    mpq_class c = f.coefficient(e);
    if (sgn(c) == 0) continue;
    bool negative = f.field().is_rational() && sgn(c) < 0;
    mpq_class mag = negative ? mpq_class(-c) : c;
    if (first) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      if (!mono.empty()) mono += '*';
      mono += names[k];
      if (e[k] != 1) mono += '^' + std::to_string(e[k]);
    }
    if (mono.empty()) {
      out += mag.get_str();
    } else if (mag == 1) {
      out += mono;
    } else {
      out += mag.get_str() + '*' + mono;
    }
  }
  return out;
}

std::string to_string(const Poly& f, const std::vector<std::string>& names) {
  std::vector<Exponents> order;
  for (const auto& [e, c] : f.terms()) order.push_back(e);
  auto total = [](const Exponents& e) {
    std::int64_t s = 0;
    for (auto v : e) s += v;
    return s;
  };
  std::sort(order.begin(), order.end(), [&](const Exponents& a, const Exponents& b) {
    auto ta = total(a), tb = total(b);
    if (ta != tb) return ta > tb;
    return a > b;
  });
  return render_terms(f, names, order);
}

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, const std::vector<std::string>& names, const CoefficientField& field,
             std::size_t line, std::size_t column_offset)
      : text_(text), names_(names), field_(field), line_(line), offset_(column_offset) {}

  Poly parse() {
    skip_ws();
    if (pos_ == text_.size()) fail("empty polynomial");
    Poly out = expr();
    skip_ws();
    if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_, offset_ + pos_ + 1, message);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly out(field_, names_.size());
    bool negate = false;
    if (accept('-')) {
      negate = true;
    } else {
      accept('+');
    }
    Poly t = term();
    out = negate ? -t : t;
    while (true) {
      if (accept('+')) {
        out += term();
      } else if (accept('-')) {
        out -= term();
      } else {
        break;
      }
    }
    return out;
  }

  Poly term() {
    Poly out = power();
    while (accept('*')) out = out * power();
    return out;
  }

  Poly power() {
    Poly base = atom();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      std::string digits(text_.substr(start, pos_ - start));
      if (digits.size() > 6) fail("exponent too large");
      base = base.pow(static_cast<unsigned>(std::stoul(digits)));
    }
    return base;
  }

  mpz_class integer() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return mpz_class(std::string(text_.substr(start, pos_ - start)));
  }

  Poly atom() {
    skip_ws();
    if (pos_ == text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Poly inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (c == '-') {
      ++pos_;
      return -atom();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mpq_class value(integer());
      std::size_t save = pos_;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        skip_ws();
        if (pos_ == text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          fail("expected denominator");
        }
        mpz_class den = integer();
        if (den == 0) fail("zero denominator");
        value /= mpq_class(den);
      } else {
        pos_ = save;
      }
      return Poly::constant(field_, names_.size(), value);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '@') {
          ++pos_;
        } else {
          break;
        }
      }
      std::string name(text_.substr(start, pos_ - start));
      auto it = std::find(names_.begin(), names_.end(), name);
      if (it == names_.end()) {
        pos_ = start;
        fail("unknown variable '" + name + "'");
      }
      return Poly::variable(field_, names_.size(), static_cast<std::size_t>(it - names_.begin()));
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& names_;
  CoefficientField field_;
  std::size_t line_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, const std::vector<std::string>& names, const CoefficientField& field,
                std::size_t line, std::size_t column_offset) {
  return PolyParser(text, names, field, line, column_offset).parse();
}

}  // namespace vforge

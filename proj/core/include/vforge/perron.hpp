#pragma once

// Perron domination and the monomialization engines built on it.

#include <cstddef>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "vforge/chart.hpp"
#include "vforge/poly.hpp"

namespace vforge {

struct Limits {
  std::size_t max_steps = 1'000'000;
  std::stop_token stop;
};

/// Primitive steps x_k = x_k' * x_pivot for every k != pivot, the pivot being
/// the minimum-value variable of `block`.
Derivation perron_step(const Chart& chart, int block);

/// One primitive step dividing the largest-value variable of `block` by the
/// second largest.
void brun_step(Derivation& d, int block, const std::string& annotation);

/// Applies primitive steps to `d` until the image of `deficit` (a signed
/// exponent vector over d.current()) is componentwise >= 0, and returns that
/// image. The deficit must have value >= 0 and no negative free coordinates.
Exponents clear_deficit(Derivation& d, const Exponents& deficit, const Limits& limits, const std::string& op);

/// Derivation after which the image of m1 divides the image of m2.
Derivation dominate(const Chart& chart, const Exponents& m1, const Exponents& m2, const Limits& limits = {});

struct Principalization {
  Derivation derivation;
  Exponents principal;
  std::size_t index;  // generator of least value
};

Principalization principalize(const Chart& chart, const std::vector<Exponents>& generators,
                              const Limits& limits = {});

struct Monomialization {
  Derivation derivation;
  Exponents monomial;
  Poly unit;
};

/// substitute(f, derivation) == x^monomial * unit with unit(0) != 0.
Monomialization monomialize_element(const Poly& f, const Chart& chart, const Limits& limits = {});

struct FractionMonomialization {
  Derivation derivation;
  Exponents monomial;
  LocalFraction unit;
};

/// g/h == x^monomial * unit after the derivation; needs value(g) >= value(h).
FractionMonomialization monomialize_fraction(const Poly& g, const Poly& h, const Chart& chart,
                                             const Limits& limits = {});

/// Variables whose level-`level` value is infinite (or unknown).
std::vector<std::size_t> prime_variables(const Chart& chart, int level);

/// With some support term free of prime variables: f = x^monomial * unit, unit(0) != 0.
/// Otherwise the threshold is required and value(x^monomial) exceeds it at `level`;
/// the cofactor is returned in `unit` and need not be a unit.
Monomialization monomialize_mod_prime(const Poly& f, const Chart& chart, int level,
                                      const std::optional<GroupValue>& threshold, const Limits& limits = {});

/// b/c with c a nonzero polynomial in the x-variables.
struct LinearCoefficient {
  Poly num;
  Poly den;
};

struct Diagonalization {
  Derivation derivation;
  /// z_j == x^exponents[j] * parameters[j] in the final chart.
  std::vector<Exponents> exponents;
  std::vector<std::string> parameters;
};

/// relations[j][k] is the coefficient of ys[k] in z_j.
Diagonalization diagonalize_parameters(const Chart& chart, int level, const std::vector<std::string>& ys,
                                       const std::vector<std::vector<LinearCoefficient>>& relations,
                                       const Limits& limits = {});

}  // namespace vforge

#pragma once

// Polynomials measured and transported against charts and derivations.

#include <string>

#include "vforge/chart.hpp"
#include "vforge/poly.hpp"

namespace vforge {

/// min over the support of truncate_at_level(value of the monomial, level);
/// infinity for the zero polynomial.
GroupValue value_of(const Poly& f, const Chart& chart, int level);

/// min over the support of the monomial values in the chart's own order.
GroupValue full_value_of(const Poly& f, const Chart& chart);

/// Sum of the terms attaining value_of(f, chart, level). Throws on f = 0.
Poly initial_form(const Poly& f, const Chart& chart, int level);

/// Support term of least full value (ties broken by the lexicographically
/// smallest exponent). Throws on f = 0.
Exponents minimal_monomial(const Poly& f, const Chart& chart);

/// Image of f through one recorded step; Rename steps need a constant
/// denominator here.
Poly substitute_step(const Poly& f, const StepRecord& record);
LocalFraction substitute_step(const LocalFraction& f, const StepRecord& record);

/// Image of f (over the initial chart) in the final chart's variables.
Poly substitute(const Poly& f, const Derivation& d);
Poly substitute(const Poly& f, const Derivation& d, std::size_t from_step, std::size_t to_step);
LocalFraction substitute_fraction(const LocalFraction& f, const Derivation& d, std::size_t from_step = 0);

/// Terms by ascending value at the chart level, unknown-valued variables
/// counting as infinite, ties by lexicographic exponent.
std::string canonical_string(const Poly& f, const Chart& chart);

}  // namespace vforge

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace vforge {

static_assert(sizeof(long) == sizeof(std::int64_t), "64-bit long required");

inline mpz_class to_mpz(std::int64_t v) { return mpz_class(static_cast<long>(v)); }

/// Throws InternalError when the value does not fit.
std::int64_t to_int64(const mpz_class& v);

/// `a` or `a/b` in lowest terms.
inline std::string rational_string(const mpq_class& q) { return q.get_str(); }

}  // namespace vforge

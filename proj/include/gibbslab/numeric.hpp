// Scalar backends: 64-bit floats by default, exact GMP rationals when the
// caller supplies Boltzmann weights (not energies) as rationals.
#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace gibbslab {

using Rational = mpq_class;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& r) { return r.get_d(); }

inline double abs_value(double x) { return std::fabs(x); }
inline Rational abs_value(const Rational& r) { return abs(r); }

inline std::string scalar_to_string(const Rational& r) { return r.get_str(); }
std::string scalar_to_string(double x); // 17 significant digits, locale-free

// Parses "p", "-p" or "p/q"; canonicalizes; throws std::invalid_argument.
Rational rational_from_string(const std::string& s);

template <class R> inline constexpr bool is_rational_v = false;
template <> inline constexpr bool is_rational_v<Rational> = true;

// FNV-1a 64-bit, used for config hashes embedded in reports.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

} // namespace gibbslab

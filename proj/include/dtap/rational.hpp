#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <optional>
#include <string>

namespace dtap {

// Exact rational used everywhere. Integrality extraction and cost-bound
// assertions are exact claims, so no floating point anywhere in the core.
using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

// Parses "7", "-3/4" or a decimal like "1.25" (-> 5/4). Returns nullopt on
// malformed input.
std::optional<Rat> parse_rational(const std::string& text);

// Canonical serialization: "p" for integers, "p/q" otherwise.
std::string rat_to_string(const Rat& value);

// Decimal rendering with the given number of fractional digits (round toward
// zero). Only used behind --approx-decimals.
std::string rat_to_decimal(const Rat& value, int digits);

inline bool is_integer(const Rat& value) { return denominator(value) == 1; }

}  // namespace dtap

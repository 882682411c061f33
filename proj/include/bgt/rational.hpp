#ifndef BGT_RATIONAL_HPP
#define BGT_RATIONAL_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace bgt {

// Arbitrary precision integers and rationals. mpq_class keeps values in
// lowest terms with a positive denominator after every arithmetic operation.
using BigInt = mpz_class;
using Rational = mpq_class;

/// Builds num/den in canonical form. Throws std::invalid_argument on den == 0.
Rational make_rational(const BigInt& num, const BigInt& den);
Rational make_rational(std::int64_t num, std::int64_t den = 1);

/// Parses "7/15", "-3", "0.125", "1.5e-3" exactly.
Rational parse_rational(std::string_view text);

/// "num/den", or just "num" when the value is an integer.
std::string to_string(const Rational& value);
std::string to_string(const BigInt& value);

BigInt floor(const Rational& value);
BigInt ceil(const Rational& value);

/// Largest k with 2^k <= value. Requires value > 0.
long floor_log2(const Rational& value);

/// 2^k as a rational, k may be negative.
Rational pow2(long k);

/// Smallest-error rational upper bound on sqrt(value): the result y satisfies
/// sqrt(value) <= y <= sqrt(value) * (1 + 2^-30), and y == sqrt(value)
/// whenever value is the square of a rational.
Rational sqrt_upper(const Rational& value);

double to_double(const Rational& value);

/// Exact conversion of a finite double.
Rational from_double(double value);

/// Value as uint64; throws std::overflow_error when it does not fit or is not
/// a non-negative integer.
std::uint64_t to_u64(const BigInt& value);
std::int64_t to_i64(const BigInt& value);

}  // namespace bgt

#endif  // BGT_RATIONAL_HPP

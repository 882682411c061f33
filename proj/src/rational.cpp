#include "bgt/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bgt {

Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational make_rational(std::int64_t num, std::int64_t den) {
  return make_rational(BigInt(static_cast<long>(num)), BigInt(static_cast<long>(den)));
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) {
    throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
  }
  BigInt v(std::string(s), 10);
  return negative ? BigInt(-v) : v;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = s.substr(e + 1);
    BigInt ev = parse_integer(exp_text, whole);
    if (!ev.fits_slong_p() || std::abs(ev.get_si()) > 100000) {
      throw std::invalid_argument("exponent out of range in '" + std::string(whole) + "'");
    }
    exponent = ev.get_si();
    s = s.substr(0, e);
  }
  std::string digits;
  std::size_t dot = s.find('.');
  if (dot == std::string_view::npos) {
    digits = std::string(s);
  } else {
    digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
    exponent -= static_cast<long>(s.size() - dot - 1);
    if (dot == 0 && s.size() == 1) digits.clear();
  }
  if (!all_digits(digits)) {
    throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
  }
  Rational r{digits.empty() ? BigInt(0) : BigInt(digits, 10)};
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(exponent)));
  if (exponent >= 0) {
    r *= scale;
  } else {
    r /= scale;
  }
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw std::invalid_argument("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(s.substr(0, slash), text);
    BigInt den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return make_rational(num, den);
  }
  return parse_decimal(s, text);
}

std::string to_string(const Rational& value) { return value.get_str(); }

std::string to_string(const BigInt& value) { return value.get_str(); }

BigInt floor(const Rational& value) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

BigInt ceil(const Rational& value) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

long floor_log2(const Rational& value) {
  if (sgn(value) <= 0) throw std::domain_error("floor_log2 of a non-positive value");
  const BigInt& num = value.get_num();
  const BigInt& den = value.get_den();
  long k = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  // 2^(k-1) < value < 2^(k+1); settle which side of 2^k we are on.
  if (value < pow2(k)) --k;
  return k;
}

Rational pow2(long k) {
  BigInt p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(std::labs(k)));
  if (k >= 0) return Rational(p);
  return make_rational(BigInt(1), p);
}

Rational sqrt_upper(const Rational& value) {
  if (sgn(value) < 0) throw std::domain_error("sqrt of a negative value");
  if (sgn(value) == 0) return Rational(0);
  // sqrt(a/b) = sqrt(a*b) / b
  BigInt ab = value.get_num() * value.get_den();
  BigInt root;
  if (mpz_perfect_square_p(ab.get_mpz_t())) {
    mpz_sqrt(root.get_mpz_t(), ab.get_mpz_t());
    return make_rational(root, value.get_den());
  }
  constexpr unsigned kBits = 32;
  BigInt scaled = ab;
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 2 * kBits);
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  root += 1;  // ab * 4^k is not a perfect square, so floor + 1 is an upper bound
  BigInt den = value.get_den();
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), kBits);
  return make_rational(root, den);
}

double to_double(const Rational& value) { return value.get_d(); }

Rational from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite double");
  Rational r(value);
  r.canonicalize();
  return r;
}

std::uint64_t to_u64(const BigInt& value) {
  if (sgn(value) < 0 || mpz_sizeinbase(value.get_mpz_t(), 2) > 64) {
    throw std::overflow_error("integer " + value.get_str() + " does not fit in 64 bits");
  }
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, value.get_mpz_t());
  return out;
}

std::int64_t to_i64(const BigInt& value) {
  if (mpz_sizeinbase(value.get_mpz_t(), 2) > 62) {
    throw std::overflow_error("integer " + value.get_str() + " does not fit in 63 bits");
  }
  std::uint64_t mag = 0;
  BigInt a = abs(value);
  mpz_export(&mag, nullptr, -1, sizeof(mag), 0, 0, a.get_mpz_t());
  auto v = static_cast<std::int64_t>(mag);
  return sgn(value) < 0 ? -v : v;
}

}  // namespace bgt

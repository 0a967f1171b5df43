#pragma once

#include <cerrno>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "apv/errors.hpp"

namespace apv {

// Exact rational number over 64-bit integers, always kept in lowest terms with
// a positive denominator. Intermediate products are formed in 128 bits; a
// result that does not fit back into 64 bits raises ResourceError instead of
// wrapping.
class Rational {
 public:
  using int_type = std::int64_t;

  constexpr Rational() = default;
  constexpr Rational(int_type value) : num_(value) {}  // NOLINT: implicit by design of arithmetic types
  Rational(int_type num, int_type den) { assign(num, den); }

  constexpr int_type num() const { return num_; }
  constexpr int_type den() const { return den_; }

  constexpr bool is_zero() const { return num_ == 0; }
  constexpr bool is_integer() const { return den_ == 1; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  // Largest integer not greater than the value.
  int_type floor() const {
    int_type q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Accepts "p", "p/q" and "-p/q".
  static Rational parse(std::string_view text) {
    auto to_int = [&](std::string_view s) -> int_type {
      if (s.empty()) throw ParseError("empty number in rational '" + std::string(text) + "'");
      std::string buf(s);
      char* end = nullptr;
      errno = 0;
      long long v = std::strtoll(buf.c_str(), &end, 10);
      if (end != buf.c_str() + buf.size() || errno != 0)
        throw ParseError("invalid rational '" + std::string(text) + "'");
      return static_cast<int_type>(v);
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(to_int(text));
    int_type den = to_int(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(to_int(text.substr(0, slash)), den);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return from_wide(static_cast<__int128>(a.num_) + b.num_, a.den_);
    __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return from_wide(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    if (a.num_ == 0 || b.num_ == 0) return Rational();
    return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DomainError("rational division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr __int128 lo = INT64_MIN + 1;  // keep negation safe
    constexpr __int128 hi = INT64_MAX;
    if (n < lo || n > hi || d > hi) throw ResourceError("exact rational arithmetic overflowed 64 bits");
    Rational r;
    r.num_ = static_cast<int_type>(n);
    r.den_ = n == 0 ? 1 : static_cast<int_type>(d);
    return r;
  }

  void assign(int_type num, int_type den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    *this = from_wide(num, den);
  }

  int_type num_ = 0;
  int_type den_ = 1;
};

}  // namespace apv

// Copyright 2026 The measlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace measlearn {

/// Exact rational on 128-bit integers, always stored reduced with a positive
/// denominator. Wide enough for every exact identity checked in this project
/// (binomial sums up to roughly n = 40); construction throws on overflow.
class Rational {
 public:
  using Int = __int128;

  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(Int num, Int den) : num_(num), den_(den) { normalize(); }

  Int num() const { return num_; }
  Int den() const { return den_; }

  Rational operator+(const Rational& o) const {
    return Rational(checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
  }
  Rational operator-(const Rational& o) const { return *this + Rational(-o.num_, o.den_); }
  Rational operator*(const Rational& o) const {
    return Rational(checked_mul(num_, o.num_), checked_mul(den_, o.den_));
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    return Rational(checked_mul(num_, o.den_), checked_mul(den_, o.num_));
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string to_string() const {
    std::string s = int_to_string(num_);
    if (den_ != 1) s += "/" + int_to_string(den_);
    return s;
  }

  static std::string int_to_string(Int v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    std::string digits;
    // -2^127 never occurs here; magnitudes stay far below the type limit.
    Int a = neg ? -v : v;
    while (a > 0) {
      digits.push_back(static_cast<char>('0' + static_cast<int>(a % 10)));
      a /= 10;
    }
    if (neg) digits.push_back('-');
    return std::string(digits.rbegin(), digits.rend());
  }

 private:
  static Int gcd(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const Int t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) {
      throw std::overflow_error("rational arithmetic overflow");
    }
    return r;
  }

  static Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) {
      throw std::overflow_error("rational arithmetic overflow");
    }
    return r;
  }

  void normalize() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const Int g = gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  Int num_;
  Int den_;
};

/// Exact binomial coefficient; valid through n = 60 without overflow.
inline Rational::Int binomial_exact(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  Rational::Int c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;  // always divides exactly
  }
  return c;
}

/// Binomial coefficient as a double (valid for all n via lgamma).
inline double binomial_double(long n, long k) {
  if (k < 0 || k > n) return 0.0;
  if (n <= 60) return static_cast<double>(binomial_exact(static_cast<int>(n),
                                                         static_cast<int>(k)));
  return std::exp(std::lgamma(static_cast<double>(n + 1)) -
                  std::lgamma(static_cast<double>(k + 1)) -
                  std::lgamma(static_cast<double>(n - k + 1)));
}

}  // namespace measlearn

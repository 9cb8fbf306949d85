//------------------------------------------------------------------------------
//
//   Copyright 2026 The budgetmech Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace budgetmech {

using Rational = mpq_class;

/// Parses "p/q", an integer, or a decimal with optional exponent ("1.25", "3e-2").
/// Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when the denominator is 1).
std::string to_string(Rational const &value);

long double to_long_double(Rational const &value);

/// Exact number of the form a + b * sqrt(d) with rational a, b and a
/// non-square natural radicand d. Rationals have b == 0 and d == 0.
///
/// Arithmetic between two irrational values requires a common radicand;
/// mixing fields throws std::domain_error. Comparisons are exact.
class Surd
{
public:
  Surd() = default;
  Surd(Rational a);  // NOLINT(google-explicit-constructor)
  Surd(long value);  // NOLINT(google-explicit-constructor)
  Surd(int value);   // NOLINT(google-explicit-constructor)
  Surd(Rational a, Rational b, std::uint64_t radicand);

  /// sqrt(radicand) scaled by `scale`, folded to a rational when the radicand is a square.
  static Surd sqrt_of(std::uint64_t radicand, Rational const &scale = Rational(1));

  Rational const &rational_part() const
  {
    return a_;
  }
  Rational const &irrational_part() const
  {
    return b_;
  }
  std::uint64_t radicand() const
  {
    return radicand_;
  }
  bool is_rational() const
  {
    return b_ == 0;
  }
  /// Requires is_rational().
  Rational const &as_rational() const;

  int sign() const;

  Surd operator-() const;
  Surd &operator+=(Surd const &other);
  Surd &operator-=(Surd const &other);
  Surd &operator*=(Surd const &other);
  Surd &operator/=(Surd const &other);

  friend Surd operator+(Surd lhs, Surd const &rhs)
  {
    return lhs += rhs;
  }
  friend Surd operator-(Surd lhs, Surd const &rhs)
  {
    return lhs -= rhs;
  }
  friend Surd operator*(Surd lhs, Surd const &rhs)
  {
    return lhs *= rhs;
  }
  friend Surd operator/(Surd lhs, Surd const &rhs)
  {
    return lhs /= rhs;
  }

  friend bool operator==(Surd const &lhs, Surd const &rhs);
  friend std::strong_ordering operator<=>(Surd const &lhs, Surd const &rhs);

  long double to_long_double() const;
  double to_double() const
  {
    return static_cast<double>(to_long_double());
  }

  /// Largest rational r with r <= *this on a dyadic grid of spacing 2^-bits
  /// (times the size of the irrational coefficient). Exact for rationals.
  Rational floor_approximation(unsigned bits = 96) const;

  /// "p/q" for rationals, otherwise "a+b*sqrt(d)".
  std::string str() const;

private:
  void adopt_radicand(Surd const &other);
  void normalize();

  Rational      a_;
  Rational      b_;
  std::uint64_t radicand_{0};
};

Surd abs(Surd const &value);
Surd min(Surd const &lhs, Surd const &rhs);
Surd max(Surd const &lhs, Surd const &rhs);

/// A rational or +infinity; used for efficiencies and value ratios.
struct ExtendedRational
{
  Rational value;
  bool     infinite{false};

  static ExtendedRational infinity()
  {
    return {Rational(0), true};
  }

  friend bool operator==(ExtendedRational const &lhs, ExtendedRational const &rhs);
  friend std::strong_ordering operator<=>(ExtendedRational const &lhs,
                                          ExtendedRational const &rhs);
  std::string str() const;
};

/// Exact comparison of an extended rational against a surd.
std::strong_ordering compare(ExtendedRational const &lhs, Surd const &rhs);

}  // namespace budgetmech

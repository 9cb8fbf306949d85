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

#include "budgetmech/numeric.hpp"

#include "big_float.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace budgetmech {
namespace {

int sign_of(Rational const &q)
{
  return mpq_sgn(q.get_mpq_t());
}

bool all_digits(std::string_view s)
{
  if (s.empty())
  {
    return false;
  }
  for (char ch : s)
  {
    if (std::isdigit(static_cast<unsigned char>(ch)) == 0)
    {
      return false;
    }
  }
  return true;
}

Rational pow10(long exponent)
{
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent >= 0)
  {
    return Rational(p);
  }
  return Rational(mpz_class(1), p);
}

}  // namespace

Rational parse_rational(std::string_view text)
{
  auto const fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
  };

  std::string_view body = text;
  bool             negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+'))
  {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.empty())
  {
    return fail();
  }

  Rational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos)
  {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
    {
      return fail();
    }
    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0)
    {
      return fail();
    }
    result = Rational(n, d);
    result.canonicalize();
  }
  else
  {
    std::string_view mantissa = body;
    long             exponent = 0;
    if (auto e = body.find_first_of("eE"); e != std::string_view::npos)
    {
      mantissa          = body.substr(0, e);
      std::string_view ex = body.substr(e + 1);
      bool             ex_negative = false;
      if (!ex.empty() && (ex.front() == '-' || ex.front() == '+'))
      {
        ex_negative = ex.front() == '-';
        ex.remove_prefix(1);
      }
      if (!all_digits(ex) || ex.size() > 6)
      {
        return fail();
      }
      exponent = std::stol(std::string(ex));
      if (ex_negative)
      {
        exponent = -exponent;
      }
    }
    std::string digits;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos)
    {
      auto whole = mantissa.substr(0, dot);
      auto frac  = mantissa.substr(dot + 1);
      if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
          (whole.empty() && frac.empty()))
      {
        return fail();
      }
      digits = std::string(whole) + std::string(frac);
      exponent -= static_cast<long>(frac.size());
    }
    else
    {
      if (!all_digits(mantissa))
      {
        return fail();
      }
      digits = std::string(mantissa);
    }
    result = Rational(mpz_class(digits, 10)) * pow10(exponent);
    result.canonicalize();
  }
  return negative ? Rational(-result) : result;
}

std::string to_string(Rational const &value)
{
  return value.get_str();
}

long double to_long_double(Rational const &value)
{
  return detail::BigFloat(value).to_long_double();
}

Surd::Surd(Rational a)
  : a_(std::move(a))
{}

Surd::Surd(long value)
  : a_(value)
{}

Surd::Surd(int value)
  : a_(value)
{}

Surd::Surd(Rational a, Rational b, std::uint64_t radicand)
  : a_(std::move(a))
  , b_(std::move(b))
  , radicand_(radicand)
{
  normalize();
}

Surd Surd::sqrt_of(std::uint64_t radicand, Rational const &scale)
{
  return Surd(Rational(0), scale, radicand);
}

void Surd::normalize()
{
  if (b_ == 0 || radicand_ == 0)
  {
    b_        = 0;
    radicand_ = 0;
    return;
  }
  // Fold out the largest square factor so equal values compare equal field-wise.
  std::uint64_t square_part = 1;
  std::uint64_t rest        = radicand_;
  for (std::uint64_t f = 2; f * f <= rest; ++f)
  {
    while (rest % (f * f) == 0)
    {
      rest /= f * f;
      square_part *= f;
    }
  }
  if (square_part != 1)
  {
    b_ *= Rational(static_cast<unsigned long>(square_part));
  }
  radicand_ = rest;
  if (radicand_ == 1)
  {
    a_ += b_;
    b_        = 0;
    radicand_ = 0;
  }
}

Rational const &Surd::as_rational() const
{
  if (!is_rational())
  {
    throw std::domain_error("surd " + str() + " is not rational");
  }
  return a_;
}

void Surd::adopt_radicand(Surd const &other)
{
  if (other.radicand_ == 0)
  {
    return;
  }
  if (radicand_ == 0)
  {
    radicand_ = other.radicand_;
  }
  else if (radicand_ != other.radicand_)
  {
    throw std::domain_error("cannot combine sqrt(" + std::to_string(radicand_) + ") and sqrt(" +
                            std::to_string(other.radicand_) + ")");
  }
}

int Surd::sign() const
{
  int const sa = sign_of(a_);
  int const sb = sign_of(b_);
  if (sb == 0)
  {
    return sa;
  }
  if (sa == 0 || sa == sb)
  {
    return sb;
  }
  // Opposite signs: compare a^2 with b^2 d.
  Rational const lhs = a_ * a_;
  Rational const rhs = b_ * b_ * Rational(static_cast<unsigned long>(radicand_));
  int const      c   = cmp(lhs, rhs);
  if (c > 0)
  {
    return sa;
  }
  if (c < 0)
  {
    return sb;
  }
  return 0;
}

Surd Surd::operator-() const
{
  Surd out(*this);
  out.a_ = -out.a_;
  out.b_ = -out.b_;
  return out;
}

Surd &Surd::operator+=(Surd const &other)
{
  adopt_radicand(other);
  a_ += other.a_;
  b_ += other.b_;
  if (b_ == 0)
  {
    radicand_ = 0;
  }
  return *this;
}

Surd &Surd::operator-=(Surd const &other)
{
  adopt_radicand(other);
  a_ -= other.a_;
  b_ -= other.b_;
  if (b_ == 0)
  {
    radicand_ = 0;
  }
  return *this;
}

Surd &Surd::operator*=(Surd const &other)
{
  if (other.is_rational())
  {
    a_ *= other.a_;
    b_ *= other.a_;
  }
  else if (is_rational())
  {
    Rational const scale = a_;
    a_                   = scale * other.a_;
    b_                   = scale * other.b_;
    radicand_            = other.radicand_;
  }
  else
  {
    adopt_radicand(other);
    Rational const d = Rational(static_cast<unsigned long>(radicand_));
    Rational const a = a_ * other.a_ + b_ * other.b_ * d;
    Rational const b = a_ * other.b_ + b_ * other.a_;
    a_               = a;
    b_               = b;
  }
  if (b_ == 0)
  {
    radicand_ = 0;
  }
  return *this;
}

Surd &Surd::operator/=(Surd const &other)
{
  if (other.sign() == 0)
  {
    throw std::domain_error("division by zero");
  }
  if (other.is_rational())
  {
    a_ /= other.a_;
    b_ /= other.a_;
    return *this;
  }
  adopt_radicand(other);
  Rational const d    = Rational(static_cast<unsigned long>(radicand_));
  Rational const norm = other.a_ * other.a_ - other.b_ * other.b_ * d;
  Surd           conj(other.a_ / norm, -other.b_ / norm, radicand_);
  return *this *= conj;
}

bool operator==(Surd const &lhs, Surd const &rhs)
{
  if (lhs.a_ != rhs.a_ || lhs.b_ != rhs.b_)
  {
    return false;
  }
  return lhs.b_ == 0 || lhs.radicand_ == rhs.radicand_;
}

std::strong_ordering operator<=>(Surd const &lhs, Surd const &rhs)
{
  int const s = (lhs - rhs).sign();
  if (s < 0)
  {
    return std::strong_ordering::less;
  }
  if (s > 0)
  {
    return std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

long double Surd::to_long_double() const
{
  return detail::BigFloat(*this).to_long_double();
}

Rational Surd::floor_approximation(unsigned bits) const
{
  if (is_rational())
  {
    return a_;
  }
  // Scale so the error |b| * 2^-k stays below 2^-bits.
  long const num_bits = static_cast<long>(mpz_sizeinbase(b_.get_num_mpz_t(), 2));
  long const den_bits = static_cast<long>(mpz_sizeinbase(b_.get_den_mpz_t(), 2));
  long const b_bits   = std::max(0L, num_bits - den_bits + 2);
  unsigned const k    = bits + static_cast<unsigned>(b_bits);
  mpz_class      scaled(static_cast<unsigned long>(radicand_));
  scaled <<= 2 * k;
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  mpz_class denom(1);
  denom <<= k;
  // root / 2^k <= sqrt(d) < (root + 1) / 2^k
  Rational const lower(root, denom);
  Rational const upper(mpz_class(root + 1), denom);
  Rational       result = a_ + b_ * (b_ > 0 ? lower : upper);
  result.canonicalize();
  return result;
}

std::string Surd::str() const
{
  if (is_rational())
  {
    return a_.get_str();
  }
  std::string out = a_.get_str();
  out += b_ > 0 ? "+" : "";
  out += b_.get_str() + "*sqrt(" + std::to_string(radicand_) + ")";
  return out;
}

Surd abs(Surd const &value)
{
  return value.sign() < 0 ? -value : value;
}

Surd min(Surd const &lhs, Surd const &rhs)
{
  return rhs < lhs ? rhs : lhs;
}

Surd max(Surd const &lhs, Surd const &rhs)
{
  return lhs < rhs ? rhs : lhs;
}

bool operator==(ExtendedRational const &lhs, ExtendedRational const &rhs)
{
  if (lhs.infinite || rhs.infinite)
  {
    return lhs.infinite == rhs.infinite;
  }
  return lhs.value == rhs.value;
}

std::strong_ordering operator<=>(ExtendedRational const &lhs, ExtendedRational const &rhs)
{
  if (lhs.infinite || rhs.infinite)
  {
    return static_cast<int>(lhs.infinite) <=> static_cast<int>(rhs.infinite);
  }
  int const c = cmp(lhs.value, rhs.value);
  return c <=> 0;
}

std::string ExtendedRational::str() const
{
  return infinite ? std::string("inf") : value.get_str();
}

std::strong_ordering compare(ExtendedRational const &lhs, Surd const &rhs)
{
  if (lhs.infinite)
  {
    return std::strong_ordering::greater;
  }
  return Surd(lhs.value) <=> rhs;
}

}  // namespace budgetmech

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

#include "budgetmech/numeric.hpp"

#include <mpfr.h>

namespace budgetmech {
namespace detail {

// Working precision for every transcendental evaluation in the library.
constexpr mpfr_prec_t kBigFloatBits = 200;

// Thin RAII holder for an mpfr_t.
class BigFloat
{
public:
  BigFloat()
  {
    mpfr_init2(value_, kBigFloatBits);
    mpfr_set_zero(value_, 1);
  }
  explicit BigFloat(Rational const &q)
    : BigFloat()
  {
    mpfr_set_q(value_, q.get_mpq_t(), MPFR_RNDN);
  }
  explicit BigFloat(Surd const &s)
    : BigFloat(s.rational_part())
  {
    if (!s.is_rational())
    {
      BigFloat root;
      mpfr_set_ui(root.value_, static_cast<unsigned long>(s.radicand()), MPFR_RNDN);
      mpfr_sqrt(root.value_, root.value_, MPFR_RNDN);
      BigFloat coeff(s.irrational_part());
      mpfr_mul(root.value_, root.value_, coeff.value_, MPFR_RNDN);
      mpfr_add(value_, value_, root.value_, MPFR_RNDN);
    }
  }
  BigFloat(BigFloat const &other)
    : BigFloat()
  {
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  BigFloat &operator=(BigFloat const &other)
  {
    mpfr_set(value_, other.value_, MPFR_RNDN);
    return *this;
  }
  ~BigFloat()
  {
    mpfr_clear(value_);
  }

  mpfr_ptr get()
  {
    return value_;
  }
  mpfr_srcptr get() const
  {
    return value_;
  }

  long double to_long_double() const
  {
    return mpfr_get_ld(value_, MPFR_RNDN);
  }

private:
  mpfr_t value_;
};

}  // namespace detail
}  // namespace budgetmech

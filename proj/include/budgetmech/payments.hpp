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

#include "budgetmech/mechanisms.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace budgetmech {

/// Raised when a curve cannot be resolved within the refinement floor or the
/// segment cap.
class CurveError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class FormKind
{
  constant,
  affine,
  hyperbolic
};

std::string to_string(FormKind form);

/// x(u) = a + b*u + d/u on [u_lo, u_hi).
struct Segment
{
  Rational u_lo;
  Rational u_hi;
  FormKind form{FormKind::constant};
  Surd     a;
  Surd     b;
  Surd     d;
  // Set on refinement slivers, where the constant stands in for an
  // unresolved transition; the true curve may differ by up to 1 there.
  bool approximate{false};

  Surd value_at(Rational const &u) const;
  bool same_form(Segment const &other) const;
};

struct AllocationCurve
{
  AgentId              agent{0};
  std::vector<Segment> segments;
  Rational             u_max;
  long double          error_bound{0};  // bound on |integral of true - represented curve|
  std::size_t          evaluations{0};  // mechanism re-runs used to build the curve
  std::size_t          slivers{0};

  /// Value at u; 0 at and beyond u_max.
  Surd value_at(Rational const &u) const;
  /// The segment containing u, if any.
  Segment const *segment_at(Rational const &u) const;
};

struct CurveOptions
{
  std::size_t segment_cap{default_segment_cap()};
  Rational    floor_fraction{Rational(1, 1000000000000)};  // refinement floor, relative to B

  /// 10^4, or BUDGETMECH_SEGMENT_CAP when set.
  static std::size_t default_segment_cap();
};

/// u -> x_i(u, c_{-i}) as fitted segments, obtained by re-running the
/// allocation rule as a black box.
AllocationCurve allocation_curve(Mechanism const &mechanism, AgentId agent,
                                 CurveOptions const &options = {});
AllocationCurve allocation_curve(Instance const &instance, MechanismParams const &params,
                                 AgentId agent);

/// sup {u : x(u) > 0}.
Rational threshold_bid(AllocationCurve const &curve);

/// Integral of the curve from b to u_max.
Payment integrate_tail(AllocationCurve const &curve, Rational const &b);

/// c_i x_i + integrate_tail(curve_i, c_i) for winners, 0 for losers. Curves
/// built along the way are returned through `curves` when given.
std::vector<Payment> payment_vector(Mechanism const &mechanism, Allocation const &allocation,
                                    std::vector<AllocationCurve> *curves = nullptr);
std::vector<Payment> payment_vector(Instance const &instance, MechanismParams const &params);

/// Payment of an agent declaring `declared`, given its curve and allocation.
Payment payment_from_curve(AllocationCurve const &curve, Rational const &declared,
                           Surd const &allocation);

}  // namespace budgetmech

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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace budgetmech {

/// Raised for malformed or invalid procurement instances.
class InstanceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

using AgentId = std::size_t;
using TypeId  = std::size_t;

struct Agent
{
  AgentId                id{0};
  Rational               value;  // v_i
  Rational               cost;   // true cost; doubles as the declared cost
  std::optional<TypeId>  type;
};

/// l(x) = min(x, cap).
struct LinearCap
{
  Rational cap;
};

/// Concave non-decreasing piecewise-linear function through the given
/// breakpoints, starting at (0, 0); the last segment's slope continues to
/// infinity.
class PiecewiseConcave
{
public:
  using Point = std::pair<Rational, Rational>;

  PiecewiseConcave() = default;
  /// Throws InstanceError when the breakpoints do not describe a concave,
  /// non-decreasing function with l(0) = 0.
  explicit PiecewiseConcave(std::vector<Point> points);

  static PiecewiseConcave identity();
  static PiecewiseConcave from_cap(Rational const &cap);

  std::vector<Point> const &points() const
  {
    return points_;
  }
  /// Number of interior kinks (breakpoints strictly after the origin).
  std::size_t kink_count() const
  {
    return points_.size() - 2;
  }

  /// Slope of segment `index`; segment k spans [x_k, x_{k+1}) and the last one is unbounded.
  Rational const &slope(std::size_t index) const
  {
    return slopes_[index];
  }
  std::size_t segment_count() const
  {
    return slopes_.size();
  }
  /// Index of the segment containing x (x >= 0).
  template <typename Number>
  std::size_t segment_of(Number const &x) const;

  Rational operator()(Rational const &x) const;
  Surd     operator()(Surd const &x) const;

  /// Smallest z >= 0 with l(z) >= y; y must not exceed sup l.
  Surd inverse(Surd const &y) const;

private:
  std::vector<Point>    points_;
  std::vector<Rational> slopes_;
};

using TypeValuation = std::variant<LinearCap, PiecewiseConcave>;

/// Every valuation as a concave piecewise-linear function; a cap M becomes
/// {(0,0), (M,M)} followed by slope 0.
PiecewiseConcave as_piecewise(TypeValuation const &valuation);

struct Instance
{
  Rational                          budget;
  std::vector<Agent>                agents;
  std::map<TypeId, TypeValuation>   types;
  std::optional<Rational>           theta;

  bool typed() const
  {
    return !agents.empty() && agents.front().type.has_value();
  }
  /// Number of distinct types referenced by the agents.
  std::size_t type_count() const;

  std::vector<Rational> values() const;
  std::vector<Rational> costs() const;
  /// Type per agent; empty for untyped instances.
  std::vector<TypeId> type_ids() const;
};

enum class Severity
{
  error,
  warning
};

struct Violation
{
  Severity    severity{Severity::error};
  std::string message;
};

/// Structural report; an empty list, or one containing only warnings, is valid.
std::vector<Violation> validate(Instance const &instance);

bool has_errors(std::vector<Violation> const &violations);

/// Definition of theta-competitiveness over agents with cost <= B. Returns the
/// (most efficient, least efficient) pair when max/min efficiency exceeds theta.
std::optional<std::pair<AgentId, AgentId>> theta_violation(Instance const &instance,
                                                           Rational const &theta);

/// Parses the JSON instance format and validates it; throws InstanceError.
Instance parse_instance(std::string_view text);

/// Canonical JSON text; parse_instance(serialize(x)) reproduces x.
std::string serialize(Instance const &instance);

Instance load_instance(std::string const &path);

struct PlainProfile
{
};
struct ThetaProfile
{
  Rational theta;
};
struct CappedProfile
{
  std::size_t types{1};
};
struct ConcaveProfile
{
  std::size_t types{1};
};
using GeneratorProfile = std::variant<PlainProfile, ThetaProfile, CappedProfile, ConcaveProfile>;

/// Parses "plain", "theta:<q>", "capped:<t>", "concave:<t>".
GeneratorProfile parse_profile(std::string_view text);
std::string      profile_name(GeneratorProfile const &profile);

/// Deterministic random instance for a fixed (seed, n, profile).
///
/// Values are k/d with k in [1, 20] and d in {1, 2, 4}; about one agent in
/// twenty gets value 0. The budget is an integer in [5, 20]; costs are
/// multiples of 1/4 in (0, B], with roughly one agent in ten priced above B
/// so that the eligibility filter is exercised. The theta profile instead
/// draws efficiencies on the grid 1 + (theta - 1) * j / 8 (hitting 1 and theta
/// when n >= 2), derives costs from them and places B between the largest
/// cost and the total cost. Capped and concave profiles add uniformly drawn
/// types with caps / piecewise-linear curves scaled to each type's total value.
Instance gen_random(std::uint64_t seed, std::size_t n, GeneratorProfile const &profile);

template <typename Number>
std::size_t PiecewiseConcave::segment_of(Number const &x) const
{
  std::size_t lo = 0;
  std::size_t hi = points_.size() - 1;  // candidate segments [0, hi]
  while (lo < hi)
  {
    std::size_t const mid = (lo + hi + 1) / 2;
    if (Surd(points_[mid].first) <= Surd(x))
    {
      lo = mid;
    }
    else
    {
      hi = mid - 1;
    }
  }
  return std::min(lo, slopes_.size() - 1);
}

}  // namespace budgetmech

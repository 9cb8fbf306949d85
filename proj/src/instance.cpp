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

#include "budgetmech/instance.hpp"

#include <algorithm>
#include <set>

namespace budgetmech {

PiecewiseConcave::PiecewiseConcave(std::vector<Point> points)
  : points_(std::move(points))
{
  if (points_.size() < 2)
  {
    throw InstanceError("piecewise valuation needs at least two breakpoints");
  }
  if (points_.front().first != 0 || points_.front().second != 0)
  {
    throw InstanceError("piecewise valuation must start at (0, 0)");
  }
  slopes_.reserve(points_.size() - 1);
  for (std::size_t k = 0; k + 1 < points_.size(); ++k)
  {
    auto const &[x0, y0] = points_[k];
    auto const &[x1, y1] = points_[k + 1];
    if (x1 <= x0)
    {
      throw InstanceError("piecewise valuation inputs must be strictly increasing");
    }
    if (y1 < y0)
    {
      throw InstanceError("piecewise valuation must be non-decreasing");
    }
    Rational slope = (y1 - y0) / (x1 - x0);
    if (!slopes_.empty() && slope > slopes_.back())
    {
      throw InstanceError("piecewise valuation must be concave (slopes non-increasing)");
    }
    slopes_.push_back(std::move(slope));
  }
}

PiecewiseConcave PiecewiseConcave::identity()
{
  return PiecewiseConcave({{Rational(0), Rational(0)}, {Rational(1), Rational(1)}});
}

PiecewiseConcave PiecewiseConcave::from_cap(Rational const &cap)
{
  if (cap == 0)
  {
    return PiecewiseConcave({{Rational(0), Rational(0)}, {Rational(1), Rational(0)}});
  }
  return PiecewiseConcave({{Rational(0), Rational(0)}, {cap, cap}, {cap + 1, cap}});
}

Rational PiecewiseConcave::operator()(Rational const &x) const
{
  std::size_t const k = segment_of(x);
  return points_[k].second + slopes_[k] * (x - points_[k].first);
}

Surd PiecewiseConcave::operator()(Surd const &x) const
{
  std::size_t const k = segment_of(x);
  return Surd(points_[k].second) + Surd(slopes_[k]) * (x - Surd(points_[k].first));
}

Surd PiecewiseConcave::inverse(Surd const &y) const
{
  if (y.sign() <= 0)
  {
    return Surd(0);
  }
  for (std::size_t k = 0; k < slopes_.size(); ++k)
  {
    bool const last = k + 1 == slopes_.size();
    if (slopes_[k] == 0)
    {
      continue;
    }
    if (last || y <= Surd(points_[k + 1].second))
    {
      return Surd(points_[k].first) + (y - Surd(points_[k].second)) / Surd(slopes_[k]);
    }
  }
  throw std::domain_error("value " + y.str() + " exceeds the valuation's supremum");
}

PiecewiseConcave as_piecewise(TypeValuation const &valuation)
{
  if (auto const *cap = std::get_if<LinearCap>(&valuation))
  {
    return PiecewiseConcave::from_cap(cap->cap);
  }
  return std::get<PiecewiseConcave>(valuation);
}

std::size_t Instance::type_count() const
{
  std::set<TypeId> seen;
  for (auto const &agent : agents)
  {
    if (agent.type)
    {
      seen.insert(*agent.type);
    }
  }
  return seen.size();
}

std::vector<Rational> Instance::values() const
{
  std::vector<Rational> out;
  out.reserve(agents.size());
  for (auto const &agent : agents)
  {
    out.push_back(agent.value);
  }
  return out;
}

std::vector<Rational> Instance::costs() const
{
  std::vector<Rational> out;
  out.reserve(agents.size());
  for (auto const &agent : agents)
  {
    out.push_back(agent.cost);
  }
  return out;
}

std::vector<TypeId> Instance::type_ids() const
{
  std::vector<TypeId> out;
  if (!typed())
  {
    return out;
  }
  out.reserve(agents.size());
  for (auto const &agent : agents)
  {
    out.push_back(agent.type.value_or(0));
  }
  return out;
}

bool has_errors(std::vector<Violation> const &violations)
{
  return std::any_of(violations.begin(), violations.end(),
                     [](Violation const &v) { return v.severity == Severity::error; });
}

std::optional<std::pair<AgentId, AgentId>> theta_violation(Instance const &instance,
                                                           Rational const &theta)
{
  // Efficiency v/c, with zero-cost agents at +infinity.
  std::optional<AgentId> best;
  std::optional<AgentId> worst;
  auto const             more_efficient = [&](Agent const &a, Agent const &b) {
    if (a.cost == 0 || b.cost == 0)
    {
      return a.cost == 0 && b.cost != 0;
    }
    return a.value * b.cost > b.value * a.cost;
  };
  for (auto const &agent : instance.agents)
  {
    if (agent.cost > instance.budget)
    {
      continue;
    }
    if (!best || more_efficient(agent, instance.agents[*best]))
    {
      best = agent.id;
    }
    if (!worst || more_efficient(instance.agents[*worst], agent))
    {
      worst = agent.id;
    }
  }
  if (!best)
  {
    return std::nullopt;
  }
  Agent const &hi = instance.agents[*best];
  Agent const &lo = instance.agents[*worst];
  if (hi.cost == 0)
  {
    // An infinite maximum is only acceptable when the minimum is infinite too.
    if (lo.cost == 0)
    {
      return std::nullopt;
    }
    return std::make_pair(*best, *worst);
  }
  // hi.value / hi.cost <= theta * lo.value / lo.cost
  if (hi.value * lo.cost <= theta * lo.value * hi.cost)
  {
    return std::nullopt;
  }
  return std::make_pair(*best, *worst);
}

std::vector<Violation> validate(Instance const &instance)
{
  std::vector<Violation> out;
  auto const error = [&](std::string msg) { out.push_back({Severity::error, std::move(msg)}); };

  if (instance.budget <= 0)
  {
    error("budget must be positive");
  }
  bool const any_typed = std::any_of(instance.agents.begin(), instance.agents.end(),
                                     [](Agent const &a) { return a.type.has_value(); });
  for (std::size_t k = 0; k < instance.agents.size(); ++k)
  {
    Agent const &agent = instance.agents[k];
    std::string  tag   = "agent " + std::to_string(agent.id);
    if (agent.id != k)
    {
      error(tag + ": ids must be unique and contiguous from 0 (found at position " +
            std::to_string(k) + ")");
    }
    if (agent.value < 0)
    {
      error(tag + ": value must be non-negative");
    }
    if (agent.cost < 0)
    {
      error(tag + ": cost must be non-negative");
    }
    if (any_typed && !agent.type)
    {
      error(tag + ": missing type (all agents must be typed when any is)");
    }
    if (agent.type && instance.types.find(*agent.type) == instance.types.end())
    {
      error(tag + ": type " + std::to_string(*agent.type) + " has no valuation");
    }
    if (instance.budget > 0 && agent.cost > instance.budget)
    {
      out.push_back({Severity::warning, tag + ": cost exceeds the budget; agent excluded from N"});
    }
  }
  for (auto const &[id, valuation] : instance.types)
  {
    if (auto const *cap = std::get_if<LinearCap>(&valuation); cap != nullptr && cap->cap < 0)
    {
      error("type " + std::to_string(id) + ": cap must be non-negative");
    }
  }
  if (instance.theta)
  {
    if (*instance.theta < 1)
    {
      error("theta must be at least 1");
    }
    else if (auto pair = theta_violation(instance, *instance.theta))
    {
      error("instance is not theta-competitive: agents " + std::to_string(pair->first) + " and " +
            std::to_string(pair->second) + " have efficiency ratio above " +
            to_string(*instance.theta));
    }
  }
  return out;
}

}  // namespace budgetmech

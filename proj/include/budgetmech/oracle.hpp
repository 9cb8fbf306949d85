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

#include "budgetmech/instance.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace budgetmech {

/// Non-owning columnar view of agents. Index = agent id. `types` is empty for
/// untyped markets.
struct AgentView
{
  std::span<Rational const> values;
  std::span<Rational const> costs;
  std::span<TypeId const>   types;

  std::size_t size() const
  {
    return values.size();
  }
};

/// Owning columns for an instance, optionally with one cost overridden.
struct AgentColumns
{
  std::vector<Rational> values;
  std::vector<Rational> costs;
  std::vector<TypeId>   types;

  explicit AgentColumns(Instance const &instance);
  AgentView view() const
  {
    return {values, costs, types};
  }
};

/// Eligible set N = {i : c_i <= B}, ascending ids.
std::vector<AgentId> eligible_agents(AgentView agents, Rational const &budget);

/// Non-increasing v/c with zero-cost agents first (+inf) and zero-value agents
/// last (efficiency 0 even when c = 0); ties by ascending id.
std::vector<AgentId> efficiency_order(AgentView agents, std::span<AgentId const> members);
std::vector<AgentId> efficiency_order(std::vector<Agent> const &agents);

/// True when a strictly precedes b in efficiency order.
bool more_efficient(AgentView agents, AgentId a, AgentId b);

struct OptSolution
{
  Rational               value;
  std::vector<Rational>  x;          // indexed by agent id
  std::vector<AgentId>   order;      // members by efficiency
  std::optional<AgentId> marginal;   // the fractionally selected agent, if any
};

/// Fractional knapsack over `members`.
OptSolution opt_linear(AgentView agents, std::span<AgentId const> members, Rational const &budget);
OptSolution opt_linear(std::vector<Agent> const &agents, Rational const &budget);

/// Greedy value along a precomputed efficiency order, skipping one agent.
Rational opt_linear_value(AgentView agents, std::span<AgentId const> order, Rational const &budget,
                          std::optional<AgentId> skip = std::nullopt);

/// opt over all agents except `excluded`.
Rational opt_linear_excl(std::vector<Agent> const &agents, Rational const &budget, AgentId excluded);

using CapMap   = std::map<TypeId, Rational>;
using CurveMap = std::map<TypeId, PiecewiseConcave>;

/// Greedy with truncation: x_i = min(1, remaining budget / c_i, remaining cap / v_i).
OptSolution opt_capped(AgentView agents, std::span<AgentId const> members, Rational const &budget,
                       CapMap const &caps);

/// Value of the capped greedy along a precomputed efficiency order, skipping one agent.
Rational opt_capped_value(AgentView agents, std::span<AgentId const> order, Rational const &budget,
                          CapMap const &caps, std::optional<AgentId> skip = std::nullopt);

/// Dual multipliers for the capped program and the outcome of checking
/// complementary slackness against a primal solution.
struct CappedCertificate
{
  Rational                 lambda;
  std::map<TypeId, Rational> mu;
  Rational                 dual_value;
  bool                     valid{false};
  std::string              failure;
};

CappedCertificate certify_capped(AgentView agents, std::span<AgentId const> members,
                                 Rational const &budget, CapMap const &caps,
                                 OptSolution const &solution);

struct ConcaveOptSolution
{
  Rational                                 value;
  std::vector<Rational>                    x_star;  // indexed by agent id
  std::vector<Rational>                    v_star;
  std::vector<Rational>                    v_hat;
  std::map<TypeId, std::vector<AgentId>>   per_type_order;
};

/// Marginal-density greedy over the pieces each agent occupies on its type's
/// curve. Density ties go to the lower type id, then earlier position.
ConcaveOptSolution opt_concave(AgentView agents, std::span<AgentId const> members,
                               Rational const &budget, CurveMap const &curves);

/// Caps and curves from an instance; missing valuations raise InstanceError.
CapMap   caps_of(Instance const &instance);
CurveMap curves_of(Instance const &instance);

}  // namespace budgetmech

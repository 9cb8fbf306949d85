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
#include "budgetmech/oracle.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace budgetmech {

/// Raised when (alpha, beta) violate a mechanism's feasibility constraint.
class ParameterError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class MechanismKind
{
  da,
  da_theta,
  da_cap,
  da_con
};

std::string   to_string(MechanismKind kind);
MechanismKind parse_mechanism(std::string_view name);

struct MechanismParams
{
  MechanismKind kind{MechanismKind::da};
  Surd          alpha;
  Surd          beta;
};

/// Canonical parameters. `aux` is theta for da_theta and the type count t for
/// da_con; it is ignored for da and da_cap.
///
///   da, da_cap : alpha = (3 - sqrt5)/2, beta = (sqrt5 - 1)/2
///   da_theta   : alpha = min(1/2, 1/theta), beta = 1
///   da_con     : beta = sqrt((t+5)/(t+1))/2 - 1/2, alpha = beta/(1+beta)
MechanismParams params_default(MechanismKind kind, std::optional<Rational> aux = std::nullopt);

/// alpha in (0, 1], beta > 0; for da_theta additionally alpha <= min(1/theta, 1/(1+beta)).
void check_params(MechanismParams const &params, std::optional<Rational> const &theta = std::nullopt);

/// max((1+beta)/beta, 1/alpha): the guarantee of the balanced analysis, which
/// reduces to the published constant for each kind's canonical parameters.
Surd approximation_guarantee(MechanismParams const &params);

struct StarBranch
{
  AgentId winner{0};
  bool    operator==(StarBranch const &) const = default;
};

struct GreedyBranch
{
  std::optional<std::size_t> k;        // position in diagnostics.order
  std::optional<AgentId>     k_agent;
  std::vector<AgentId>       deselected;
  bool                       operator==(GreedyBranch const &) const = default;
};

using Branch = std::variant<StarBranch, GreedyBranch>;

/// A threat value or +infinity (when opt without the agent is zero).
struct Threat
{
  bool infinite{true};
  Surd value;

  std::string str() const;
  bool        operator==(Threat const &) const = default;
};

struct Diagnostics
{
  std::vector<AgentId>                          eligible;     // N
  std::vector<AgentId>                          order;        // mechanism order over N
  Rational                                      opt;          // opt(N, c)
  Surd                                          target;       // alpha * opt
  std::vector<std::optional<Rational>>          opt_without;  // by id, set on N
  std::vector<std::optional<ExtendedRational>>  rho;          // by id, set on N
  std::vector<std::optional<Threat>>            tau;          // set for greedy positions <= k
  std::vector<Rational>                         x_star;       // da_cap, da_con
  std::vector<Rational>                         v_star;       // da_con
  std::vector<Rational>                         v_hat;        // da_con
};

struct Allocation
{
  std::vector<Surd> x;
  Branch            branch;
  Diagnostics       diagnostics;
};

/// Floating payment with a guaranteed absolute error bound.
struct Payment
{
  long double value{0};
  long double error_bound{0};
  bool        operator==(Payment const &) const = default;
};

struct Outcome
{
  std::vector<Surd>    x;
  std::vector<Payment> p;
  Branch               branch;
  Diagnostics          diagnostics;
};

/// Allocation rule bound to one instance. Construction validates the instance
/// for the kind and the parameters; cost vectors may then be varied freely.
class Mechanism
{
public:
  Mechanism(Instance instance, MechanismParams params);

  Instance const &instance() const
  {
    return instance_;
  }
  MechanismParams const &params() const
  {
    return params_;
  }
  AgentColumns const &columns() const
  {
    return columns_;
  }

  Allocation allocate() const;
  Allocation allocate(std::span<Rational const> costs) const;

  /// x_i with agent i's declared cost replaced by u.
  Surd allocation_of(AgentId i, Rational const &u) const;

  /// Objective of an allocation under this kind's valuation: linear value,
  /// sum of capped type values, or sum of concave type values.
  Surd objective(std::span<Surd const> x) const;

  /// Rational points in [0, B] where agent i's allocation curve is expected to
  /// change form; depends on the other agents only.
  std::vector<Rational> curve_seeds(AgentId i) const;

private:
  // opt over eligible agents minus `skip`, in the kind's program.
  struct OptData
  {
    Rational              value;
    std::vector<AgentId>  order;
    std::vector<Rational> x_star;
    std::vector<Rational> v_star;
    std::vector<Rational> v_hat;
  };
  OptData  solve(AgentView view, std::span<AgentId const> members) const;
  Rational solve_value(AgentView view, std::span<AgentId const> members,
                       std::vector<AgentId> const &order, AgentId skip) const;
  Rational rho_numerator(AgentId i) const;

  Instance        instance_;
  MechanismParams params_;
  AgentColumns    columns_;
  CapMap          caps_;
  CurveMap        curves_;
  Surd            alpha_one_plus_beta_;
};

/// Allocation plus threshold payments for every winner.
Outcome run(Mechanism const &mechanism);

Outcome run_da(Instance const &instance, MechanismParams const &params);
Outcome run_da_theta(Instance const &instance, MechanismParams const &params);
Outcome run_da_cap(Instance const &instance, MechanismParams const &params);
Outcome run_da_con(Instance const &instance, MechanismParams const &params);

/// Exact equality of allocations, branches and payments.
bool same_outcome(Outcome const &lhs, Outcome const &rhs);

}  // namespace budgetmech

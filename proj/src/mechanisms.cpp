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

#include "budgetmech/mechanisms.hpp"

#include "budgetmech/payments.hpp"

#include <algorithm>
#include <set>

namespace budgetmech {
namespace {

bool is_linear(MechanismKind kind)
{
  return kind == MechanismKind::da || kind == MechanismKind::da_theta;
}

std::string first_error(std::vector<Violation> const &violations)
{
  for (auto const &v : violations)
  {
    if (v.severity == Severity::error)
    {
      return v.message;
    }
  }
  return {};
}

}  // namespace

std::string to_string(MechanismKind kind)
{
  switch (kind)
  {
    case MechanismKind::da:
      return "da";
    case MechanismKind::da_theta:
      return "da-theta";
    case MechanismKind::da_cap:
      return "da-cap";
    case MechanismKind::da_con:
      return "da-con";
  }
  return "?";
}

MechanismKind parse_mechanism(std::string_view name)
{
  if (name == "da")
  {
    return MechanismKind::da;
  }
  if (name == "da-theta")
  {
    return MechanismKind::da_theta;
  }
  if (name == "da-cap")
  {
    return MechanismKind::da_cap;
  }
  if (name == "da-con")
  {
    return MechanismKind::da_con;
  }
  throw std::invalid_argument("unknown mechanism '" + std::string(name) + "'");
}

MechanismParams params_default(MechanismKind kind, std::optional<Rational> aux)
{
  MechanismParams p;
  p.kind = kind;
  switch (kind)
  {
    case MechanismKind::da:
    case MechanismKind::da_cap:
      p.alpha = Surd(Rational(3, 2), Rational(-1, 2), 5);
      p.beta  = Surd(Rational(-1, 2), Rational(1, 2), 5);
      break;
    case MechanismKind::da_theta:
    {
      if (!aux || *aux < 1)
      {
        throw ParameterError("da-theta needs theta >= 1");
      }
      Rational alpha = 1 / *aux;
      p.alpha        = Surd(std::min(Rational(1, 2), alpha));
      p.beta         = Surd(1);
      break;
    }
    case MechanismKind::da_con:
    {
      if (!aux || *aux < 1 || aux->get_den() != 1)
      {
        throw ParameterError("da-con needs an integer type count t >= 1");
      }
      unsigned long const t = aux->get_num().get_ui();
      p.beta                = Surd(Rational(-1, 2), Rational(1, 2 * (t + 1)), (t + 1) * (t + 5));
      p.alpha               = p.beta / (Surd(1) + p.beta);
      break;
    }
  }
  return p;
}

void check_params(MechanismParams const &params, std::optional<Rational> const &theta)
{
  if (params.alpha.sign() <= 0 || params.alpha > Surd(1))
  {
    throw ParameterError("alpha must lie in (0, 1], got " + params.alpha.str());
  }
  if (params.beta.sign() <= 0)
  {
    throw ParameterError("beta must be positive, got " + params.beta.str());
  }
  if (params.kind == MechanismKind::da_theta)
  {
    if (!theta)
    {
      throw ParameterError("da-theta needs theta");
    }
    if (params.alpha * Surd(*theta) > Surd(1))
    {
      throw ParameterError("alpha " + params.alpha.str() + " exceeds 1/theta = " +
                           to_string(Rational(1 / *theta)));
    }
    if (params.alpha * (Surd(1) + params.beta) > Surd(1))
    {
      throw ParameterError("alpha " + params.alpha.str() + " exceeds 1/(1+beta)");
    }
  }
}

Surd approximation_guarantee(MechanismParams const &params)
{
  Surd const balanced = (Surd(1) + params.beta) / params.beta;
  Surd const greedy   = Surd(1) / params.alpha;
  return max(balanced, greedy);
}

std::string Threat::str() const
{
  return infinite ? std::string("inf") : value.str();
}

Mechanism::Mechanism(Instance instance, MechanismParams params)
  : instance_(std::move(instance))
  , params_(std::move(params))
  , columns_(instance_)
{
  auto const violations = validate(instance_);
  if (has_errors(violations))
  {
    throw InstanceError(first_error(violations));
  }
  switch (params_.kind)
  {
    case MechanismKind::da:
    case MechanismKind::da_theta:
      break;
    case MechanismKind::da_cap:
      if (!instance_.agents.empty() && !instance_.typed())
      {
        throw InstanceError("da-cap needs typed agents with caps");
      }
      caps_ = caps_of(instance_);
      break;
    case MechanismKind::da_con:
      if (!instance_.agents.empty() && !instance_.typed())
      {
        throw InstanceError("da-con needs typed agents with valuations");
      }
      curves_ = curves_of(instance_);
      break;
  }
  if (params_.kind == MechanismKind::da_theta && !instance_.theta)
  {
    throw InstanceError("da-theta needs an instance with theta");
  }
  check_params(params_, instance_.theta);
  alpha_one_plus_beta_ = params_.alpha * (Surd(1) + params_.beta);
}

Mechanism::OptData Mechanism::solve(AgentView view, std::span<AgentId const> members) const
{
  OptData out;
  Rational const &budget = instance_.budget;
  switch (params_.kind)
  {
    case MechanismKind::da:
    case MechanismKind::da_theta:
    {
      auto sol  = opt_linear(view, members, budget);
      out.value = std::move(sol.value);
      out.order = std::move(sol.order);
      out.x_star = std::move(sol.x);
      break;
    }
    case MechanismKind::da_cap:
    {
      auto sol   = opt_capped(view, members, budget, caps_);
      out.value  = std::move(sol.value);
      out.order  = std::move(sol.order);
      out.x_star = std::move(sol.x);
      break;
    }
    case MechanismKind::da_con:
    {
      auto sol   = opt_concave(view, members, budget, curves_);
      out.value  = std::move(sol.value);
      out.x_star = std::move(sol.x_star);
      out.v_star = std::move(sol.v_star);
      out.v_hat  = std::move(sol.v_hat);
      break;
    }
  }
  return out;
}

Rational Mechanism::solve_value(AgentView view, std::span<AgentId const> members,
                                std::vector<AgentId> const &order, AgentId skip) const
{
  Rational const &budget = instance_.budget;
  switch (params_.kind)
  {
    case MechanismKind::da:
    case MechanismKind::da_theta:
      return opt_linear_value(view, order, budget, skip);
    case MechanismKind::da_cap:
      return opt_capped_value(view, order, budget, caps_, skip);
    case MechanismKind::da_con:
    {
      std::vector<AgentId> rest;
      rest.reserve(members.size());
      for (AgentId j : members)
      {
        if (j != skip)
        {
          rest.push_back(j);
        }
      }
      return opt_concave(view, rest, budget, curves_).value;
    }
  }
  return Rational(0);
}

Rational Mechanism::rho_numerator(AgentId i) const
{
  Rational const &v = columns_.values[i];
  switch (params_.kind)
  {
    case MechanismKind::da:
    case MechanismKind::da_theta:
      return v;
    case MechanismKind::da_cap:
      return std::min(v, caps_.at(columns_.types[i]));
    case MechanismKind::da_con:
      return curves_.at(columns_.types[i])(v);
  }
  return v;
}

Allocation Mechanism::allocate() const
{
  return allocate(columns_.costs);
}

Allocation Mechanism::allocate(std::span<Rational const> costs) const
{
  std::size_t const n = columns_.values.size();
  if (costs.size() != n)
  {
    throw std::invalid_argument("cost vector has the wrong length");
  }
  AgentView const view{columns_.values, costs, columns_.types};
  Rational const &budget = instance_.budget;
  MechanismKind const kind = params_.kind;

  Allocation out;
  out.x.assign(n, Surd(0));
  Diagnostics &d = out.diagnostics;
  d.opt_without.assign(n, std::nullopt);
  d.rho.assign(n, std::nullopt);
  d.tau.assign(n, std::nullopt);
  d.eligible = eligible_agents(view, budget);
  if (d.eligible.empty())
  {
    out.branch = GreedyBranch{};
    return out;
  }

  OptData opt = solve(view, d.eligible);
  d.opt       = opt.value;

  // Ratios; the optimum without an unselected agent is unchanged.
  std::optional<AgentId> star;
  for (AgentId i : d.eligible)
  {
    Rational without = opt.x_star[i] == 0 ? opt.value : solve_value(view, d.eligible, opt.order, i);
    Rational const num = rho_numerator(i);
    ExtendedRational rho;
    if (without == 0)
    {
      rho = num > 0 ? ExtendedRational::infinity() : ExtendedRational{Rational(0), false};
    }
    else
    {
      rho = ExtendedRational{num / without, false};
    }
    if (!star || rho > *d.rho[*star])
    {
      star = i;
    }
    d.rho[i]         = rho;
    d.opt_without[i] = std::move(without);
  }

  if (kind != MechanismKind::da && kind != MechanismKind::da_theta)
  {
    d.x_star = opt.x_star;
  }
  if (kind == MechanismKind::da_con)
  {
    d.v_star = opt.v_star;
    d.v_hat  = opt.v_hat;
  }

  if (compare(*d.rho[*star], params_.beta) >= 0)
  {
    out.x[*star] = Surd(1);
    out.branch   = StarBranch{*star};
    return out;
  }

  // Greedy order: efficiency, or v*/c for concave valuations.
  if (kind == MechanismKind::da_con)
  {
    struct Key
    {
      int      cls;
      Rational ratio;
      AgentId  id;
    };
    std::vector<Key> keys;
    keys.reserve(d.eligible.size());
    for (AgentId i : d.eligible)
    {
      Rational const &vs = opt.v_star[i];
      int const       cls = vs == 0 ? 0 : costs[i] == 0 ? 2 : 1;
      keys.push_back({cls, cls == 1 ? Rational(vs / costs[i]) : Rational(0), i});
    }
    std::sort(keys.begin(), keys.end(), [](Key const &a, Key const &b) {
      if (a.cls != b.cls)
      {
        return a.cls > b.cls;
      }
      if (a.cls == 1)
      {
        int const c = cmp(a.ratio, b.ratio);
        if (c != 0)
        {
          return c > 0;
        }
      }
      return a.id < b.id;
    });
    for (auto const &k : keys)
    {
      d.order.push_back(k.id);
    }
  }
  else
  {
    d.order = std::move(opt.order);
  }

  d.target = params_.alpha * Surd(d.opt);
  GreedyBranch greedy;
  if (d.target.sign() > 0)
  {
    Rational                   reached;
    std::map<TypeId, Rational> type_prefix;
    for (std::size_t q = 0; q < d.order.size(); ++q)
    {
      AgentId const   a    = d.order[q];
      Rational const &v    = columns_.values[a];
      Rational const  full = is_linear(kind) ? Rational(1) : opt.x_star[a];
      Rational        gain;
      if (kind == MechanismKind::da_con)
      {
        auto const     &l = curves_.at(columns_.types[a]);
        Rational const &y = type_prefix[columns_.types[a]];
        gain              = l(Rational(y + v * full)) - l(y);
      }
      else
      {
        gain = v * full;
      }
      if (Surd(reached + gain) >= d.target)
      {
        Surd const delta = d.target - Surd(reached);
        if (kind == MechanismKind::da_con)
        {
          auto const     &l = curves_.at(columns_.types[a]);
          Rational const &y = type_prefix[columns_.types[a]];
          out.x[a]          = (l.inverse(Surd(l(y)) + delta) - Surd(y)) / Surd(v);
        }
        else
        {
          out.x[a] = delta / Surd(v);
        }
        greedy.k       = q;
        greedy.k_agent = a;
        break;
      }
      out.x[a] = Surd(full);
      reached += gain;
      type_prefix[columns_.types.empty() ? 0 : columns_.types[a]] += v * full;
    }

    if (kind != MechanismKind::da_theta && greedy.k)
    {
      for (std::size_t q = 0; q <= *greedy.k; ++q)
      {
        AgentId const   a       = d.order[q];
        Rational const &without = *d.opt_without[a];
        Rational const  num     = kind == MechanismKind::da_con ? opt.v_hat[a] : columns_.values[a];
        Threat          tau;
        if (without > 0)
        {
          tau.infinite = false;
          tau.value    = Surd(num * budget) / (alpha_one_plus_beta_ * Surd(without));
        }
        d.tau[a] = tau;
        // c_a > tau_a, cross-multiplied to stay exact.
        if (!tau.infinite && out.x[a].sign() > 0 &&
            Surd(costs[a]) * alpha_one_plus_beta_ * Surd(without) > Surd(num * budget))
        {
          out.x[a] = Surd(0);
          greedy.deselected.push_back(a);
        }
      }
    }
  }
  out.branch = std::move(greedy);
  return out;
}

Surd Mechanism::allocation_of(AgentId i, Rational const &u) const
{
  std::vector<Rational> costs = columns_.costs;
  costs[i]                    = u;
  return allocate(costs).x[i];
}

Surd Mechanism::objective(std::span<Surd const> x) const
{
  if (is_linear(params_.kind))
  {
    Surd total;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
      total += Surd(columns_.values[i]) * x[i];
    }
    return total;
  }
  std::map<TypeId, Surd> per_type;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    per_type[columns_.types[i]] += Surd(columns_.values[i]) * x[i];
  }
  Surd total;
  for (auto const &[t, v] : per_type)
  {
    if (params_.kind == MechanismKind::da_cap)
    {
      total += min(v, Surd(caps_.at(t)));
    }
    else
    {
      total += curves_.at(t)(v);
    }
  }
  return total;
}

std::vector<Rational> Mechanism::curve_seeds(AgentId i) const
{
  Rational const &budget = instance_.budget;
  AgentView const view   = columns_.view();
  std::vector<Rational> seeds{Rational(0), budget};
  auto const            push = [&](Rational const &u) {
    if (u > 0 && u < budget)
    {
      seeds.push_back(u);
    }
  };

  std::vector<AgentId> others;
  for (AgentId j = 0; j < view.size(); ++j)
  {
    if (j != i && view.costs[j] <= budget)
    {
      others.push_back(j);
    }
  }
  Rational const &v_i = view.values[i];

  // Efficiency ties with every other eligible agent.
  if (v_i > 0)
  {
    for (AgentId j : others)
    {
      if (view.values[j] > 0)
      {
        push(view.costs[j] * v_i / view.values[j]);
      }
    }
  }

  // Budget crossings of the knapsack prefix without i.
  auto const order = efficiency_order(view, others);
  Rational   prefix;
  for (AgentId j : order)
  {
    if (view.values[j] == 0)
    {
      break;
    }
    prefix += view.costs[j];
    push(budget - prefix);
  }

  // Threat crossings; for concave valuations one per position of i in its type.
  if (params_.kind != MechanismKind::da_theta && v_i > 0 && !others.empty())
  {
    Rational const without = solve(view, others).value;
    if (without > 0)
    {
      std::set<Rational> numerators;
      if (params_.kind == MechanismKind::da_con)
      {
        auto const &l    = curves_.at(view.types[i]);
        Rational    hat  = 0;
        numerators.insert(l(v_i));
        for (AgentId j : order)
        {
          if (view.types[j] == view.types[i])
          {
            hat += view.values[j];
            numerators.insert(l(Rational(hat + v_i)) - l(hat));
          }
        }
      }
      else
      {
        numerators.insert(v_i);
      }
      for (Rational const &num : numerators)
      {
        Surd const tau = Surd(num * budget) / (alpha_one_plus_beta_ * Surd(without));
        if (tau.is_rational())
        {
          push(tau.as_rational());
          continue;
        }
        constexpr unsigned kBits = 100;
        Rational const     below = tau.floor_approximation(kBits);
        mpz_class          step(1);
        step <<= kBits - 2;
        push(below);
        push(below + Rational(mpz_class(1), step));
      }
    }
  }

  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  return seeds;
}

Outcome run(Mechanism const &mechanism)
{
  Allocation allocation = mechanism.allocate();
  Outcome    out;
  out.p           = payment_vector(mechanism, allocation);
  out.x           = std::move(allocation.x);
  out.branch      = std::move(allocation.branch);
  out.diagnostics = std::move(allocation.diagnostics);
  return out;
}

namespace {

Outcome run_kind(MechanismKind kind, Instance const &instance, MechanismParams params)
{
  if (params.kind != kind)
  {
    throw ParameterError("parameters are for " + to_string(params.kind) + ", not " + to_string(kind));
  }
  return run(Mechanism(instance, std::move(params)));
}

}  // namespace

Outcome run_da(Instance const &instance, MechanismParams const &params)
{
  return run_kind(MechanismKind::da, instance, params);
}

Outcome run_da_theta(Instance const &instance, MechanismParams const &params)
{
  return run_kind(MechanismKind::da_theta, instance, params);
}

Outcome run_da_cap(Instance const &instance, MechanismParams const &params)
{
  return run_kind(MechanismKind::da_cap, instance, params);
}

Outcome run_da_con(Instance const &instance, MechanismParams const &params)
{
  return run_kind(MechanismKind::da_con, instance, params);
}

bool same_outcome(Outcome const &lhs, Outcome const &rhs)
{
  return lhs.x == rhs.x && lhs.p == rhs.p && lhs.branch == rhs.branch;
}

}  // namespace budgetmech

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

#include "budgetmech/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace budgetmech {
namespace {

// 2 = +inf (free and valuable), 1 = finite positive, 0 = worthless.
int efficiency_class(Rational const &value, Rational const &cost)
{
  if (value == 0)
  {
    return 0;
  }
  return cost == 0 ? 2 : 1;
}

struct Columns
{
  std::vector<Rational> values;
  std::vector<Rational> costs;
};

Columns columns_of(std::vector<Agent> const &agents)
{
  Columns out;
  out.values.reserve(agents.size());
  out.costs.reserve(agents.size());
  for (auto const &a : agents)
  {
    out.values.push_back(a.value);
    out.costs.push_back(a.cost);
  }
  return out;
}

std::vector<AgentId> all_ids(std::size_t n)
{
  std::vector<AgentId> ids(n);
  std::iota(ids.begin(), ids.end(), AgentId{0});
  return ids;
}

TypeId type_of(AgentView agents, AgentId i)
{
  if (agents.types.empty())
  {
    throw InstanceError("typed oracle called on an untyped market");
  }
  return agents.types[i];
}

}  // namespace

AgentColumns::AgentColumns(Instance const &instance)
  : values(instance.values())
  , costs(instance.costs())
  , types(instance.type_ids())
{}

std::vector<AgentId> eligible_agents(AgentView agents, Rational const &budget)
{
  std::vector<AgentId> out;
  out.reserve(agents.size());
  for (AgentId i = 0; i < agents.size(); ++i)
  {
    if (agents.costs[i] <= budget)
    {
      out.push_back(i);
    }
  }
  return out;
}

bool more_efficient(AgentView agents, AgentId a, AgentId b)
{
  int const ca = efficiency_class(agents.values[a], agents.costs[a]);
  int const cb = efficiency_class(agents.values[b], agents.costs[b]);
  if (ca != cb)
  {
    return ca > cb;
  }
  if (ca == 1)
  {
    int const c = cmp(agents.values[a] * agents.costs[b], agents.values[b] * agents.costs[a]);
    if (c != 0)
    {
      return c > 0;
    }
  }
  return a < b;
}

std::vector<AgentId> efficiency_order(AgentView agents, std::span<AgentId const> members)
{
  struct Key
  {
    int      cls;
    Rational efficiency;
    AgentId  id;
  };
  std::vector<Key> keys;
  keys.reserve(members.size());
  for (AgentId i : members)
  {
    int const cls = efficiency_class(agents.values[i], agents.costs[i]);
    keys.push_back({cls, cls == 1 ? Rational(agents.values[i] / agents.costs[i]) : Rational(0), i});
  }
  std::sort(keys.begin(), keys.end(), [](Key const &a, Key const &b) {
    if (a.cls != b.cls)
    {
      return a.cls > b.cls;
    }
    if (a.cls == 1)
    {
      int const c = cmp(a.efficiency, b.efficiency);
      if (c != 0)
      {
        return c > 0;
      }
    }
    return a.id < b.id;
  });
  std::vector<AgentId> order;
  order.reserve(keys.size());
  for (auto const &k : keys)
  {
    order.push_back(k.id);
  }
  return order;
}

std::vector<AgentId> efficiency_order(std::vector<Agent> const &agents)
{
  Columns const cols = columns_of(agents);
  auto const    ids  = all_ids(agents.size());
  return efficiency_order(AgentView{cols.values, cols.costs, {}}, ids);
}

OptSolution opt_linear(AgentView agents, std::span<AgentId const> members, Rational const &budget)
{
  OptSolution sol;
  sol.x.assign(agents.size(), Rational(0));
  sol.order = efficiency_order(agents, members);
  Rational remaining = budget;
  for (AgentId i : sol.order)
  {
    Rational const &v = agents.values[i];
    Rational const &c = agents.costs[i];
    if (v == 0)
    {
      break;  // only worthless agents remain
    }
    if (c <= remaining)
    {
      sol.x[i] = 1;
      sol.value += v;
      remaining -= c;
      continue;
    }
    if (remaining > 0)
    {
      sol.x[i] = remaining / c;
      sol.value += v * sol.x[i];
      sol.marginal = i;
    }
    break;
  }
  return sol;
}

OptSolution opt_linear(std::vector<Agent> const &agents, Rational const &budget)
{
  Columns const cols = columns_of(agents);
  auto const    ids  = all_ids(agents.size());
  return opt_linear(AgentView{cols.values, cols.costs, {}}, ids, budget);
}

Rational opt_linear_value(AgentView agents, std::span<AgentId const> order, Rational const &budget,
                          std::optional<AgentId> skip)
{
  Rational value;
  Rational remaining = budget;
  for (AgentId i : order)
  {
    if (skip && i == *skip)
    {
      continue;
    }
    Rational const &v = agents.values[i];
    Rational const &c = agents.costs[i];
    if (v == 0)
    {
      break;
    }
    if (c <= remaining)
    {
      value += v;
      remaining -= c;
      continue;
    }
    if (remaining > 0)
    {
      value += v * remaining / c;
    }
    break;
  }
  return value;
}

Rational opt_linear_excl(std::vector<Agent> const &agents, Rational const &budget, AgentId excluded)
{
  Columns const        cols = columns_of(agents);
  AgentView const      view{cols.values, cols.costs, {}};
  auto const           ids   = all_ids(agents.size());
  auto const           order = efficiency_order(view, ids);
  return opt_linear_value(view, order, budget, excluded);
}

OptSolution opt_capped(AgentView agents, std::span<AgentId const> members, Rational const &budget,
                       CapMap const &caps)
{
  OptSolution sol;
  sol.x.assign(agents.size(), Rational(0));
  sol.order = efficiency_order(agents, members);
  std::map<TypeId, Rational> room;
  for (AgentId i : members)
  {
    TypeId const t  = type_of(agents, i);
    auto const   it = caps.find(t);
    if (it == caps.end())
    {
      throw InstanceError("type " + std::to_string(t) + " has no cap");
    }
    room.emplace(t, it->second);
  }
  Rational remaining = budget;
  for (AgentId i : sol.order)
  {
    Rational const &v = agents.values[i];
    Rational const &c = agents.costs[i];
    if (v == 0)
    {
      break;
    }
    Rational &cap_room = room[agents.types[i]];
    Rational  x(1);
    if (c > 0 && remaining < c)
    {
      x = remaining / c;
    }
    if (cap_room < v * x)
    {
      x = cap_room / v;
    }
    if (x <= 0)
    {
      if (remaining == 0)
      {
        break;
      }
      continue;
    }
    sol.x[i] = x;
    sol.value += v * x;
    cap_room -= v * x;
    remaining -= c * x;
    if (x < 1 && remaining == 0)
    {
      sol.marginal = i;
    }
  }
  return sol;
}

Rational opt_capped_value(AgentView agents, std::span<AgentId const> order, Rational const &budget,
                          CapMap const &caps, std::optional<AgentId> skip)
{
  std::map<TypeId, Rational> used;
  Rational                   value;
  Rational                   remaining = budget;
  for (AgentId i : order)
  {
    if (skip && i == *skip)
    {
      continue;
    }
    Rational const &v = agents.values[i];
    Rational const &c = agents.costs[i];
    if (v == 0 || (remaining == 0 && c > 0))
    {
      break;
    }
    TypeId const t        = type_of(agents, i);
    Rational     cap_room = caps.at(t) - used[t];
    Rational     x(1);
    if (c > 0 && remaining < c)
    {
      x = remaining / c;
    }
    if (cap_room < v * x)
    {
      x = cap_room / v;
    }
    if (x <= 0)
    {
      continue;
    }
    used[t] += v * x;
    value += v * x;
    remaining -= c * x;
  }
  return value;
}

CappedCertificate certify_capped(AgentView agents, std::span<AgentId const> members,
                                 Rational const &budget, CapMap const &caps,
                                 OptSolution const &solution)
{
  CappedCertificate cert;
  auto const        fail = [&](std::string why) {
    cert.valid   = false;
    cert.failure = std::move(why);
    return cert;
  };

  Rational                   spent;
  std::map<TypeId, Rational> used;
  for (AgentId i : members)
  {
    Rational const &x = solution.x[i];
    if (x < 0 || x > 1)
    {
      return fail("x out of [0,1] for agent " + std::to_string(i));
    }
    spent += agents.costs[i] * x;
    used[type_of(agents, i)] += agents.values[i] * x;
  }
  if (spent > budget)
  {
    return fail("budget exceeded: " + to_string(spent) + " > " + to_string(budget));
  }
  for (auto const &[t, v] : used)
  {
    if (v > caps.at(t))
    {
      return fail("cap of type " + std::to_string(t) + " exceeded");
    }
  }

  // lambda: efficiency of the last positively allocated agent when the budget binds.
  std::optional<AgentId> last_positive;
  for (AgentId i : solution.order)
  {
    if (solution.x[i] > 0)
    {
      last_positive = i;
    }
  }
  if (spent == budget && last_positive && agents.costs[*last_positive] > 0)
  {
    cert.lambda = agents.values[*last_positive] / agents.costs[*last_positive];
  }

  // mu_j for binding caps, from the type's last selected agent.
  for (auto const &[t, v] : used)
  {
    if (v != caps.at(t))
    {
      cert.mu[t] = 0;
      continue;
    }
    std::optional<AgentId> last_of_type;
    for (AgentId i : solution.order)
    {
      if (agents.types[i] == t && solution.x[i] > 0)
      {
        last_of_type = i;
      }
    }
    Rational mu(1);
    if (last_of_type && agents.costs[*last_of_type] > 0)
    {
      Rational const e = agents.values[*last_of_type] / agents.costs[*last_of_type];
      mu               = std::max(Rational(0), Rational(1 - cert.lambda / e));
    }
    cert.mu[t] = mu;
  }

  // Complementary slackness, exactly.
  Rational surplus;
  for (AgentId i : members)
  {
    Rational const &x       = solution.x[i];
    Rational const  reduced = agents.values[i] * (1 - cert.mu[agents.types[i]]) -
                             cert.lambda * agents.costs[i];
    if (x == 1 && reduced < 0)
    {
      return fail("agent " + std::to_string(i) + " fully selected with negative reduced profit");
    }
    if (x == 0 && reduced > 0)
    {
      return fail("agent " + std::to_string(i) + " unselected with positive reduced profit");
    }
    if (x > 0 && x < 1 && reduced != 0)
    {
      return fail("agent " + std::to_string(i) + " fractional with nonzero reduced profit");
    }
    if (reduced > 0)
    {
      surplus += reduced;
    }
  }
  if (cert.lambda > 0 && spent != budget)
  {
    return fail("lambda > 0 but budget slack");
  }
  for (auto const &[t, mu] : cert.mu)
  {
    if (mu < 0 || (mu > 0 && used[t] != caps.at(t)))
    {
      return fail("mu of type " + std::to_string(t) + " violates slackness");
    }
  }
  cert.dual_value = cert.lambda * budget + surplus;
  for (auto const &[t, mu] : cert.mu)
  {
    cert.dual_value += mu * caps.at(t);
  }
  Rational primal;
  for (auto const &[t, v] : used)
  {
    primal += v;
  }
  if (cert.dual_value != primal)
  {
    return fail("duality gap: dual " + to_string(cert.dual_value) + " vs primal " + to_string(primal));
  }
  cert.valid = true;
  return cert;
}

ConcaveOptSolution opt_concave(AgentView agents, std::span<AgentId const> members,
                               Rational const &budget, CurveMap const &curves)
{
  ConcaveOptSolution sol;
  std::size_t const  n = agents.size();
  sol.x_star.assign(n, Rational(0));
  sol.v_star.assign(n, Rational(0));
  sol.v_hat.assign(n, Rational(0));

  auto const order = efficiency_order(agents, members);
  for (AgentId i : order)
  {
    TypeId const t = type_of(agents, i);
    if (curves.find(t) == curves.end())
    {
      throw InstanceError("type " + std::to_string(t) + " has no valuation");
    }
    sol.per_type_order[t].push_back(i);
  }

  struct Piece
  {
    int         cls;  // 2 = infinite density, 1 = finite positive, 0 = worthless
    Rational    density;
    TypeId      type;
    std::size_t seq;
    AgentId     agent;
    Rational    length;  // along the curve's input axis
    Rational    cost;
  };
  std::vector<Piece> pieces;
  for (auto const &[t, agents_of_type] : sol.per_type_order)
  {
    PiecewiseConcave const &l   = curves.at(t);
    auto const             &pts = l.points();
    Rational                prefix;
    std::size_t             seq = 0;
    for (AgentId i : agents_of_type)
    {
      Rational const &v = agents.values[i];
      Rational const &c = agents.costs[i];
      if (v == 0)
      {
        continue;
      }
      Rational const end = prefix + v;
      Rational       at  = prefix;
      for (std::size_t s = l.segment_of(prefix); at < end; ++s)
      {
        bool const     last  = s + 1 >= l.segment_count();
        Rational const right = last ? end : std::min(end, pts[s + 1].first);
        Rational const len   = right - at;
        Rational const slope = l.slope(std::min(s, l.segment_count() - 1));
        Piece          piece{0, Rational(0), t, seq++, i, len, c * len / v};
        if (slope > 0)
        {
          piece.cls = c == 0 ? 2 : 1;
          if (piece.cls == 1)
          {
            piece.density = slope * v / c;
          }
        }
        pieces.push_back(std::move(piece));
        at = right;
      }
      prefix = end;
    }
  }
  std::stable_sort(pieces.begin(), pieces.end(), [](Piece const &a, Piece const &b) {
    if (a.cls != b.cls)
    {
      return a.cls > b.cls;
    }
    if (a.cls == 1)
    {
      int const c = cmp(a.density, b.density);
      if (c != 0)
      {
        return c > 0;
      }
    }
    if (a.type != b.type)
    {
      return a.type < b.type;
    }
    return a.seq < b.seq;
  });

  std::vector<Rational> taken(n);
  Rational              remaining = budget;
  for (auto const &piece : pieces)
  {
    if (piece.cls == 0)
    {
      break;
    }
    if (piece.cost <= remaining)
    {
      taken[piece.agent] += piece.length;
      remaining -= piece.cost;
      continue;
    }
    if (remaining > 0)
    {
      taken[piece.agent] += piece.length * remaining / piece.cost;
      remaining = 0;
    }
    break;
  }

  for (auto const &[t, agents_of_type] : sol.per_type_order)
  {
    PiecewiseConcave const &l = curves.at(t);
    Rational                full_prefix;
    Rational                star_prefix;
    for (AgentId i : agents_of_type)
    {
      Rational const &v = agents.values[i];
      if (v > 0)
      {
        sol.x_star[i] = taken[i] / v;
      }
      Rational const star_end = star_prefix + taken[i];
      sol.v_star[i]           = l(star_end) - l(star_prefix);
      sol.v_hat[i]            = l(full_prefix + v) - l(full_prefix);
      star_prefix             = star_end;
      full_prefix += v;
    }
    sol.value += l(star_prefix);
  }
  return sol;
}

CapMap caps_of(Instance const &instance)
{
  CapMap caps;
  for (auto const &[t, valuation] : instance.types)
  {
    auto const *cap = std::get_if<LinearCap>(&valuation);
    if (cap == nullptr)
    {
      throw InstanceError("type " + std::to_string(t) + " is not a linear cap");
    }
    caps.emplace(t, cap->cap);
  }
  return caps;
}

CurveMap curves_of(Instance const &instance)
{
  CurveMap curves;
  for (auto const &[t, valuation] : instance.types)
  {
    curves.emplace(t, as_piecewise(valuation));
  }
  return curves;
}

}  // namespace budgetmech

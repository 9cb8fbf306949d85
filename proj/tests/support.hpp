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

// Independent oracles shared by the unit and acceptance tests. Nothing here
// calls into the code paths it is used to check.

#include "budgetmech/audit.hpp"

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace budgetmech::testing {

inline Rational q(long num, long den = 1)
{
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Instance market(Rational budget, std::vector<std::pair<Rational, Rational>> const &agents)
{
  Instance inst;
  inst.budget = std::move(budget);
  for (std::size_t i = 0; i < agents.size(); ++i)
  {
    inst.agents.push_back({i, agents[i].first, agents[i].second, std::nullopt});
  }
  return inst;
}

/// Fractional knapsack by enumerating LP vertices: a set bought in full plus
/// at most one fractional agent.
inline Rational knapsack_brute_force(std::vector<Agent> const &agents, Rational const &budget)
{
  std::size_t const n = agents.size();
  Rational          best = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask)
  {
    Rational cost;
    Rational value;
    for (std::size_t i = 0; i < n; ++i)
    {
      if ((mask >> i) & 1U)
      {
        cost += agents[i].cost;
        value += agents[i].value;
      }
    }
    if (cost > budget)
    {
      continue;
    }
    best = std::max(best, value);
    Rational const left = budget - cost;
    for (std::size_t j = 0; j < n; ++j)
    {
      if ((mask >> j) & 1U)
      {
        continue;
      }
      Rational const share = agents[j].cost == 0 ? Rational(1) : std::min(Rational(1), Rational(left / agents[j].cost));
      best = std::max(best, Rational(value + agents[j].value * share));
    }
  }
  return best;
}

/// Adaptive Simpson on [lo, hi].
inline long double simpson(std::function<long double(long double)> const &f, long double lo, long double hi,
                           long double tol)
{
  std::function<long double(long double, long double, long double, long double, long double, long double, int)> step;
  step = [&](long double a, long double b, long double fa, long double fm, long double fb, long double whole,
             int depth) -> long double {
    long double const m = (a + b) / 2;
    long double const lm = (a + m) / 2;
    long double const rm = (m + b) / 2;
    long double const flm = f(lm);
    long double const frm = f(rm);
    long double const left = (m - a) / 6 * (fa + 4 * flm + fm);
    long double const right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15 * tol)
    {
      return left + right + (left + right - whole) / 15;
    }
    return step(a, m, fa, flm, fm, left, depth - 1) + step(m, b, fm, frm, fb, right, depth - 1);
  };
  long double const fa = f(lo);
  long double const fb = f(hi);
  long double const fm = f((lo + hi) / 2);
  return step(lo, hi, fa, fm, fb, (hi - lo) / 6 * (fa + 4 * fm + fb), 40);
}

/// Integral of a curve from b to u_max by adaptive quadrature of each piece.
inline long double quadrature_tail(AllocationCurve const &curve, Rational const &b, long double tol)
{
  long double total = 0;
  for (auto const &seg : curve.segments)
  {
    Rational const lo = std::max(seg.u_lo, b);
    if (seg.u_hi <= lo)
    {
      continue;
    }
    long double const a = seg.a.to_long_double();
    long double const bb = seg.b.to_long_double();
    long double const d = seg.d.to_long_double();
    auto const        f = [&](long double u) { return a + bb * u + (d == 0 ? 0 : d / u); };
    total += simpson(f, to_long_double(lo), to_long_double(seg.u_hi), tol);
  }
  return total;
}

}  // namespace budgetmech::testing

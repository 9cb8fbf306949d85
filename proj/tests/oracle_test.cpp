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
#include "support.hpp"

#include <doctest.h>

using namespace budgetmech;
using budgetmech::testing::market;
using budgetmech::testing::q;

namespace {

Instance capped_example()
{
  Instance inst = market(q(10), {{q(4), q(2)}, {q(4), q(2)}, {q(4), q(2)}, {q(4), q(4)}, {q(4), q(4)}});
  for (std::size_t i = 0; i < 5; ++i)
  {
    inst.agents[i].type = i < 3 ? 0 : 1;
  }
  inst.types[0] = LinearCap{q(6)};
  inst.types[1] = LinearCap{q(8)};
  return inst;
}

std::vector<AgentId> all(std::size_t n)
{
  std::vector<AgentId> ids(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    ids[i] = i;
  }
  return ids;
}

}  // namespace

TEST_CASE("fractional knapsack on small hand instances")
{
  Instance const three = market(q(10), {{q(6), q(2)}, {q(4), q(4)}, {q(5), q(10)}});
  OptSolution const sol = opt_linear(three.agents, three.budget);
  CHECK(sol.value == q(12));
  CHECK(sol.x == std::vector<Rational>{q(1), q(1), q(2, 5)});
  CHECK(sol.marginal == AgentId{2});

  Instance const half = market(q(1), {{q(1), q(2)}});
  CHECK(opt_linear(half.agents, half.budget).value == q(1, 2));

  Instance const five = market(q(10), std::vector<std::pair<Rational, Rational>>(5, {q(4), q(2)}));
  OptSolution const all_in = opt_linear(five.agents, five.budget);
  CHECK(all_in.value == q(20));
  CHECK(all_in.x == std::vector<Rational>(5, q(1)));

  CHECK(opt_linear_excl(three.agents, three.budget, 0) == q(7));
}

TEST_CASE("efficiency order puts zero cost first and zero value last")
{
  Instance const inst = market(q(10), {{q(0), q(0)}, {q(1), q(1)}, {q(3), q(0)}, {q(4), q(2)}, {q(2), q(1)}});
  CHECK(efficiency_order(inst.agents) == std::vector<AgentId>{2, 3, 4, 1, 0});
}

TEST_CASE("knapsack matches vertex enumeration")
{
  for (std::uint64_t seed = 100; seed < 160; ++seed)
  {
    Instance const inst = gen_random(seed, 1 + seed % 7, PlainProfile{});
    CHECK(opt_linear(inst.agents, inst.budget).value == testing::knapsack_brute_force(inst.agents, inst.budget));
  }
}

TEST_CASE("capped greedy on the two-type example")
{
  Instance const    inst = capped_example();
  AgentColumns const cols(inst);
  auto const        ids = all(5);
  OptSolution const sol = opt_capped(cols.view(), ids, inst.budget, caps_of(inst));
  CHECK(sol.value == q(13));
  CHECK(sol.x == std::vector<Rational>{q(1), q(1, 2), q(0), q(1), q(3, 4)});

  auto const cert = certify_capped(cols.view(), ids, inst.budget, caps_of(inst), sol);
  CHECK(cert.valid);
  CHECK(cert.dual_value == sol.value);

  // Weak duality recomputed from the multipliers.
  Rational dual = cert.lambda * inst.budget;
  for (auto const &[type, mu] : cert.mu)
  {
    CHECK(mu >= 0);
    dual += mu * std::get<LinearCap>(inst.types.at(type)).cap;
  }
  for (AgentId i : ids)
  {
    Rational const reduced = inst.agents[i].value - cert.lambda * inst.agents[i].cost -
                             cert.mu.at(*inst.agents[i].type) * inst.agents[i].value;
    dual += std::max(Rational(0), reduced);
  }
  CHECK(dual == q(13));
}

TEST_CASE("a wrong primal fails the certificate")
{
  Instance const    inst = capped_example();
  AgentColumns const cols(inst);
  auto const        ids = all(5);
  OptSolution       sol = opt_capped(cols.view(), ids, inst.budget, caps_of(inst));
  sol.x[4] = q(1, 2);
  sol.value -= q(1);
  CHECK_FALSE(certify_capped(cols.view(), ids, inst.budget, caps_of(inst), sol).valid);
}

TEST_CASE("loose caps reduce to the linear knapsack")
{
  for (std::uint64_t seed = 0; seed < 40; ++seed)
  {
    Instance inst = gen_random(seed, 8, CappedProfile{3});
    for (auto &[type, valuation] : inst.types)
    {
      Rational total;
      for (auto const &a : inst.agents)
      {
        total += a.value;
      }
      valuation = LinearCap{total};
    }
    AgentColumns const cols(inst);
    auto const         ids = all(inst.agents.size());
    CHECK(opt_capped(cols.view(), ids, inst.budget, caps_of(inst)).value ==
          opt_linear(cols.view(), ids, inst.budget).value);
  }
}

TEST_CASE("concave greedy with marginal values")
{
  Instance inst = market(q(6), std::vector<std::pair<Rational, Rational>>(3, {q(5), q(2)}));
  for (auto &a : inst.agents)
  {
    a.type = 0;
  }
  inst.types[0] = PiecewiseConcave({{q(0), q(0)}, {q(5), q(5)}, {q(6), q(11, 2)}});
  AgentColumns const cols(inst);
  auto const         sol = opt_concave(cols.view(), all(3), inst.budget, curves_of(inst));
  CHECK(sol.value == q(10));
  CHECK(sol.x_star == std::vector<Rational>(3, q(1)));
  CHECK(sol.v_star == std::vector<Rational>{q(5), q(5, 2), q(5, 2)});
  CHECK(sol.v_hat == std::vector<Rational>{q(5), q(5, 2), q(5, 2)});
}

TEST_CASE("identity concave valuation equals the knapsack")
{
  for (std::uint64_t seed = 0; seed < 40; ++seed)
  {
    Instance inst = gen_random(seed, 7, PlainProfile{});
    for (auto &a : inst.agents)
    {
      a.type = 0;
    }
    inst.types[0] = PiecewiseConcave::identity();
    AgentColumns const cols(inst);
    auto const         N = eligible_agents(cols.view(), inst.budget);
    CHECK(opt_concave(cols.view(), N, inst.budget, curves_of(inst)).value == opt_linear(cols.view(), N, inst.budget).value);
  }
}

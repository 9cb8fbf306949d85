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

#include <cmath>

using namespace budgetmech;
using budgetmech::testing::market;
using budgetmech::testing::q;

namespace {

Surd const kAlpha(q(3, 2), q(-1, 2), 5);
Surd const kBeta(q(-1, 2), q(1, 2), 5);

Instance five_agents()
{
  return market(q(10), std::vector<std::pair<Rational, Rational>>(5, {q(4), q(2)}));
}

}  // namespace

TEST_CASE("canonical parameters")
{
  auto const da = params_default(MechanismKind::da);
  CHECK(da.alpha == kAlpha);
  CHECK(da.beta == kBeta);
  // (sqrt5 + 1) / (sqrt5 - 1) = (3 + sqrt5) / 2
  CHECK(approximation_guarantee(da) == Surd(q(3, 2), q(1, 2), 5));

  auto const theta = params_default(MechanismKind::da_theta, q(3, 2));
  CHECK(theta.alpha == Surd(q(1, 2)));
  CHECK(theta.beta == Surd(1));
  CHECK(approximation_guarantee(theta) == Surd(2));
  CHECK(params_default(MechanismKind::da_theta, q(4)).alpha == Surd(q(1, 4)));

  // (1 + beta) / beta for t = 2, 3, 4.
  double const expected[] = {4.80, 5.83, 6.86};
  for (long t = 2; t <= 4; ++t)
  {
    auto const con = params_default(MechanismKind::da_con, q(t));
    CHECK(con.alpha == con.beta / (Surd(1) + con.beta));
    CHECK(std::fabs(approximation_guarantee(con).to_double() - expected[t - 2]) < 1e-2);
  }
  CHECK_THROWS_AS(params_default(MechanismKind::da_con, q(3, 2)), ParameterError);
}

TEST_CASE("parameter feasibility")
{
  CHECK_NOTHROW(check_params(params_default(MechanismKind::da)));
  CHECK_THROWS_AS(check_params({MechanismKind::da, Surd(0), Surd(1)}), ParameterError);
  CHECK_THROWS_AS(check_params({MechanismKind::da, Surd(q(1, 2)), Surd(0)}), ParameterError);
  CHECK_THROWS_AS(check_params({MechanismKind::da, Surd(q(3, 2)), Surd(1)}), ParameterError);
  // alpha theta <= 1 and alpha (1 + beta) <= 1.
  CHECK_THROWS_AS(check_params({MechanismKind::da_theta, Surd(q(3, 5)), Surd(1)}, q(3, 2)), ParameterError);
  CHECK_THROWS_AS(check_params({MechanismKind::da_theta, Surd(q(1, 2)), Surd(1)}, q(3)), ParameterError);
  CHECK_NOTHROW(check_params({MechanismKind::da_theta, Surd(q(1, 3)), Surd(1)}, q(3)));
  CHECK(parse_mechanism("da-con") == MechanismKind::da_con);
  CHECK(to_string(MechanismKind::da_theta) == "da-theta");
}

TEST_CASE("single agent takes the star branch")
{
  Mechanism const  mech(market(q(10), {{q(5), q(4)}}), params_default(MechanismKind::da));
  Allocation const alloc = mech.allocate();
  REQUIRE(std::holds_alternative<StarBranch>(alloc.branch));
  CHECK(std::get<StarBranch>(alloc.branch).winner == 0);
  CHECK(alloc.x[0] == Surd(1));
  CHECK(alloc.diagnostics.rho[0]->infinite);
}

TEST_CASE("five identical agents fill an alpha share of opt")
{
  Mechanism const  mech(five_agents(), params_default(MechanismKind::da));
  Allocation const alloc = mech.allocate();
  REQUIRE(std::holds_alternative<GreedyBranch>(alloc.branch));
  auto const &greedy = std::get<GreedyBranch>(alloc.branch);
  CHECK(greedy.k == std::size_t{1});
  CHECK(greedy.deselected.empty());

  CHECK(alloc.diagnostics.opt == q(20));
  CHECK(alloc.diagnostics.rho[0]->value == q(1, 4));
  CHECK(alloc.x[0] == Surd(1));
  CHECK(alloc.x[1] == (Surd(20) * kAlpha - Surd(4)) / Surd(4));
  for (AgentId i = 2; i < 5; ++i)
  {
    CHECK(alloc.x[i].sign() == 0);
  }
  CHECK(mech.objective(alloc.x) == Surd(20) * kAlpha);

  // tau = 40 / (alpha (1 + beta) 16) = 40 / ((1 - alpha) 16)
  Threat const &tau = *alloc.diagnostics.tau[0];
  CHECK_FALSE(tau.infinite);
  CHECK(tau.value == Surd(40) / ((Surd(1) - kAlpha) * Surd(16)));
  CHECK(std::fabs(tau.value.to_double() - 4.045) < 1e-3);
}

TEST_CASE("star branch with the largest rho")
{
  Mechanism const  mech(market(q(10), {{q(6), q(2)}, {q(4), q(4)}, {q(5), q(10)}}), params_default(MechanismKind::da));
  Allocation const alloc = mech.allocate();
  // rho_0 = 6/7 is the largest and exceeds beta.
  REQUIRE(std::holds_alternative<StarBranch>(alloc.branch));
  CHECK(std::get<StarBranch>(alloc.branch).winner == 0);
  CHECK(mech.objective(alloc.x) == Surd(6));
}

TEST_CASE("da-theta on five identical agents")
{
  Instance inst = five_agents();
  inst.theta = q(1);
  Outcome const out = run_da_theta(inst, params_default(MechanismKind::da_theta, q(1)));
  CHECK(out.x == std::vector<Surd>{Surd(1), Surd(1), Surd(q(1, 2)), Surd(0), Surd(0)});
  long double total = 0;
  for (auto const &p : out.p)
  {
    total += p.value;
  }
  CHECK(total <= 10 + 1e-6L);
}

TEST_CASE("da-theta needs theta")
{
  CHECK_THROWS_AS(Mechanism(five_agents(), params_default(MechanismKind::da_theta, q(1))), InstanceError);
}

TEST_CASE("da-cap on the two-type example")
{
  Instance inst = market(q(10), {{q(4), q(2)}, {q(4), q(2)}, {q(4), q(2)}, {q(4), q(4)}, {q(4), q(4)}});
  for (std::size_t i = 0; i < 5; ++i)
  {
    inst.agents[i].type = i < 3 ? 0 : 1;
  }
  inst.types[0] = LinearCap{q(6)};
  inst.types[1] = LinearCap{q(8)};
  Mechanism const  mech(inst, params_default(MechanismKind::da_cap));
  Allocation const alloc = mech.allocate();
  REQUIRE(std::holds_alternative<GreedyBranch>(alloc.branch));
  CHECK(alloc.diagnostics.opt == q(13));
  CHECK(alloc.x[0] == Surd(1));
  CHECK(alloc.x[1] == (Surd(13) * kAlpha - Surd(4)) / Surd(4));
  CHECK(std::fabs(alloc.x[1].to_double() - 0.2415) < 1e-3);
  CHECK(alloc.x[2].sign() == 0);
  CHECK_THROWS_AS(Mechanism(five_agents(), params_default(MechanismKind::da_cap)), InstanceError);
}

TEST_CASE("da-con star branch on one concave type")
{
  Instance inst = market(q(6), std::vector<std::pair<Rational, Rational>>(3, {q(5), q(2)}));
  for (auto &a : inst.agents)
  {
    a.type = 0;
  }
  inst.types[0] = PiecewiseConcave({{q(0), q(0)}, {q(5), q(5)}, {q(6), q(11, 2)}});
  Mechanism const  mech(inst, params_default(MechanismKind::da_con, q(1)));
  Allocation const alloc = mech.allocate();
  CHECK(alloc.diagnostics.opt == q(10));
  CHECK(*alloc.diagnostics.opt_without[0] == q(15, 2));
  CHECK(alloc.diagnostics.rho[0]->value == q(2, 3));
  REQUIRE(std::holds_alternative<StarBranch>(alloc.branch));
  CHECK(std::get<StarBranch>(alloc.branch).winner == 0);
}

TEST_CASE("zero-value agents never win")
{
  Mechanism const  mech(market(q(10), {{q(0), q(1)}, {q(4), q(2)}, {q(4), q(3)}}), params_default(MechanismKind::da));
  Allocation const alloc = mech.allocate();
  CHECK(alloc.diagnostics.rho[0]->value == 0);
  CHECK(alloc.x[0].sign() == 0);
}

TEST_CASE("agents above the budget are excluded")
{
  Mechanism const  mech(market(q(10), {{q(100), q(11)}, {q(4), q(2)}}), params_default(MechanismKind::da));
  Allocation const alloc = mech.allocate();
  CHECK(alloc.diagnostics.eligible == std::vector<AgentId>{1});
  CHECK(alloc.x[0].sign() == 0);
  CHECK(alloc.x[1] == Surd(1));
}

TEST_CASE("allocation is monotone in the declared cost")
{
  for (std::uint64_t seed = 0; seed < 15; ++seed)
  {
    Mechanism const mech(gen_random(seed, 7, PlainProfile{}), params_default(MechanismKind::da));
    Rational const &B = mech.instance().budget;
    for (AgentId i = 0; i < 7; ++i)
    {
      Surd previous = 1;
      for (long k = 0; k <= 40; ++k)
      {
        Surd const x = mech.allocation_of(i, B * q(k, 40));
        CHECK(x <= previous);
        previous = x;
      }
    }
  }
}

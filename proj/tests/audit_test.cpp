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

CheckResult const *find(std::vector<CheckResult> const &checks, std::string const &name)
{
  for (auto const &c : checks)
  {
    if (c.name == name)
    {
      return &c;
    }
  }
  return nullptr;
}

Instance five_agents()
{
  return market(q(10), std::vector<std::pair<Rational, Rational>>(5, {q(4), q(2)}));
}

MechanismParams fixture_params(Fixture const &f)
{
  std::optional<Rational> aux;
  if (f.kind == MechanismKind::da_theta)
  {
    aux = f.instance.theta;
  }
  if (f.kind == MechanismKind::da_con)
  {
    aux = Rational(static_cast<long>(f.instance.type_count()));
  }
  return params_default(f.kind, aux);
}

}  // namespace

TEST_CASE("fixture optima")
{
  auto const all = fixtures();
  std::map<std::string, Rational> expected{{"LB-3-I1", q(1)},         {"LB-3-I2", q(199, 100)},
                                           {"LB-4-I1(2)", q(3, 2)},    {"LB-4-I2(2)", q(2)},
                                           {"LB-4-I1(3)", q(4, 3)},    {"LB-4-I2(3)", q(2)},
                                           {"capped-two-types", q(13)}, {"concave-one-type", q(10)}};
  std::size_t seen = 0;
  for (auto const &f : all)
  {
    Mechanism const mech(f.instance, fixture_params(f));
    CHECK_MESSAGE(mech.allocate().diagnostics.opt == f.expected_opt, f.name);
    if (auto it = expected.find(f.name); it != expected.end())
    {
      CHECK(f.expected_opt == it->second);
      ++seen;
    }
  }
  CHECK(seen == expected.size());
}

TEST_CASE("every fixture audits clean")
{
  for (auto const &f : fixtures())
  {
    AuditReport const report = run_audit(f.instance, fixture_params(f));
    CHECK_MESSAGE(report.passed(), f.name << "\n" << report.csv());
    CHECK(find(report.checks, "truthfulness") != nullptr);
    CHECK(find(report.checks, "individual_rationality") != nullptr);
    CHECK(find(report.checks, "budget") != nullptr);
    CHECK(find(report.checks, "approximation") != nullptr);
    CHECK(find(report.checks, "segment_count") != nullptr);
  }
}

TEST_CASE("lower-bound fixtures as run by the mechanisms")
{
  auto const all = fixtures();
  auto const lb31 = std::find_if(all.begin(), all.end(), [](Fixture const &f) { return f.name == "LB-3-I1"; });
  REQUIRE(lb31 != all.end());
  Outcome const out = run(Mechanism(lb31->instance, params_default(MechanismKind::da)));
  // Symmetric market: the tie rule hands agent 0 the whole good.
  CHECK(out.x[0] == Surd(1));
  CHECK(out.x[1].sign() == 0);
  CHECK(lb31->known_bound == q(5, 4));
}

TEST_CASE("single agent truthfulness grid")
{
  Mechanism const    mech(market(q(10), {{q(5), q(4)}}), params_default(MechanismKind::da));
  AuditContext const ctx(mech);
  auto const         t = check_truthfulness(ctx, 0);
  CHECK(t.result.status == Status::pass);
  CHECK(t.max_violation <= 1e-12L);
  CHECK(t.grid_size >= 32);
  CHECK(std::fabs(ctx.payments[0].value - 10) < 1e-12L);
}

TEST_CASE("five identical agents pass budget and approximation")
{
  Mechanism const    mech(five_agents(), params_default(MechanismKind::da));
  AuditContext const ctx(mech);
  CHECK(check_budget(ctx).status == Status::pass);
  CHECK(check_individual_rationality(ctx).status == Status::pass);
  auto const approx = check_approximation(ctx);
  CHECK(approx.result.status == Status::pass);
  // ratio = 20 / (20 alpha) = 1 / alpha
  CHECK(std::fabs(approx.ratio - 2.6180339887498948482L) < 1e-12L);
  CHECK(approx.ratio <= 2.618034L);

  Instance theta = five_agents();
  theta.theta = q(1);
  Mechanism const    mech_theta(theta, params_default(MechanismKind::da_theta, q(1)));
  AuditContext const ctx_theta(mech_theta);
  CHECK(std::fabs(check_approximation(ctx_theta).ratio - 2) < 1e-15L);
}

TEST_CASE("star instance ratio")
{
  Mechanism const    mech(market(q(10), {{q(6), q(2)}, {q(4), q(4)}, {q(5), q(10)}}), params_default(MechanismKind::da));
  AuditContext const ctx(mech);
  auto const         approx = check_approximation(ctx);
  CHECK(approx.ratio == doctest::Approx(2.0));
  CHECK(approx.result.status == Status::pass);
  // Star pays B x.
  CHECK(std::fabs(ctx.payments[0].value - 10) < 1e-9L);
}

TEST_CASE("a corrupted curve fails monotonicity with a witness")
{
  Mechanism const    mech(five_agents(), params_default(MechanismKind::da));
  AuditContext const ctx(mech);
  CHECK(check_monotonicity(ctx.curves).status == Status::pass);

  auto curves = ctx.curves;
  Segment rising{q(1), q(2), FormKind::affine, Surd(0), Surd(q(1, 2)), Surd(0), false};
  curves[0].segments = {Segment{q(0), q(1), FormKind::constant, Surd(q(1, 2)), Surd(0), Surd(0), false}, rising};
  CheckResult const r = check_monotonicity(curves);
  CHECK(r.status == Status::fail);
  CHECK(r.slack < 0);
  CHECK(r.witness.find("agent=0") != std::string::npos);
}

TEST_CASE("prefix inequalities on hand instances")
{
  Mechanism const five(five_agents(), params_default(MechanismKind::da));
  auto const      checks = check_prefix_inequalities(five);
  auto const     *l3 = find(checks, "prefix_ratio");
  REQUIRE(l3 != nullptr);
  CHECK(l3->status == Status::pass);
  // 10 - (2/4)(1 - alpha) 20 = 10 alpha
  CHECK(std::fabs(l3->slack - 10 * 0.38196601125010515L) < 1e-12L);
  CHECK(find(checks, "concave_prefix")->status == Status::skipped);

  // alpha = 1 makes the left side vanish.
  Mechanism const full(five_agents(), {MechanismKind::da, Surd(1), Surd(q(1, 2))});
  CHECK(std::fabs(find(check_prefix_inequalities(full), "prefix_ratio")->slack - 10) < 1e-15L);

  // Prefix to value 6 costs 2 <= alpha B = 5.
  Mechanism const star(market(q(10), {{q(6), q(2)}, {q(4), q(4)}, {q(5), q(10)}}),
                       {MechanismKind::da, Surd(q(1, 2)), Surd(1)});
  auto const *l6 = find(check_prefix_inequalities(star), "prefix_cost");
  REQUIRE(l6 != nullptr);
  CHECK(l6->status == Status::pass);
  CHECK(l6->slack == doctest::Approx(3.0));
}

TEST_CASE("concave inequality applies when rho stays below beta")
{
  std::size_t applied = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed)
  {
    Instance const  inst = gen_random(seed, 10, ConcaveProfile{2});
    Mechanism const mech(inst, params_default(MechanismKind::da_con, Rational(static_cast<long>(inst.type_count()))));
    auto const     *l8 = find(check_prefix_inequalities(mech), "concave_prefix");
    REQUIRE(l8 != nullptr);
    CHECK(l8->status != Status::fail);
    applied += l8->status == Status::pass ? 1 : 0;
  }
  CHECK(applied > 0);
}

TEST_CASE("report formats")
{
  AuditReport const report = run_audit(five_agents(), params_default(MechanismKind::da));
  CHECK(report.passed());
  CHECK(report.digest.size() == 16);
  CHECK(report.digest == instance_digest(five_agents()));
  std::string const csv = report.csv();
  CHECK(csv.rfind("check_name,status,worst_witness,slack\n", 0) == 0);
  CHECK(csv.find("\nbudget,pass,") != std::string::npos);
  std::string const json = report.json();
  CHECK(json.find("\"passed\": true") != std::string::npos);
  CHECK(report.grid_size > 0);
  CHECK(report.total_payment <= 10 * (1 + 1e-6L));
}

TEST_CASE("broken parameters are reported, not thrown")
{
  // A huge beta keeps the greedy branch and tiny threats deselect everyone.
  AuditReport const report = run_audit(five_agents(), {MechanismKind::da, Surd(1), Surd(100)});
  CHECK_FALSE(report.passed());
  CHECK(find(report.checks, "approximation")->status == Status::fail);
}

TEST_CASE("lower bound curves")
{
  CHECK(divisible_lower_bound(q(2)) == q(19, 16));
  CHECK(indivisible_lower_bound(q(2)) == q(5, 2));
  CHECK(std::fabs(to_long_double(divisible_lower_bound(q(1000))) - 1.25L) < 1e-4L);
  CHECK(divisible_lower_bound(q(1)) == q(1));
}

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
#include <random>

namespace budgetmech {
namespace {

// std::uniform_int_distribution is implementation-defined; this keeps the
// generated corpus identical across standard libraries.
class Draw
{
public:
  explicit Draw(std::uint64_t seed)
    : engine_(seed)
  {}

  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n)
  {
    std::uint64_t const limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
    std::uint64_t       r     = 0;
    do
    {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  bool one_in(std::uint64_t n)
  {
    return below(n) == 0;
  }

private:
  std::mt19937_64 engine_;
};

Rational ratio(std::uint64_t num, std::uint64_t den)
{
  Rational q(static_cast<unsigned long>(num), static_cast<unsigned long>(den));
  q.canonicalize();
  return q;
}

Rational draw_value(Draw &draw, bool allow_zero)
{
  if (allow_zero && draw.one_in(20))
  {
    return Rational(0);
  }
  static constexpr std::uint64_t kDenominators[] = {1, 2, 4};
  return ratio(1 + draw.below(20), kDenominators[draw.below(3)]);
}

// Concave markets draw values from a narrow band and costs from the bottom
// quarter of the budget. Otherwise one agent dominates its type's curve and
// the star branch is almost always taken.
void draw_plain_agents(Draw &draw, std::size_t n, Instance &instance, bool crowded = false)
{
  instance.budget        = Rational(static_cast<unsigned long>(5 + draw.below(16)));
  auto const quarters    = static_cast<std::uint64_t>(instance.budget.get_num().get_ui()) * 4;
  for (std::size_t k = 0; k < n; ++k)
  {
    Agent agent;
    agent.id    = k;
    agent.value = crowded ? (draw.one_in(20) ? Rational(0) : ratio(4 + draw.below(5), 2)) : draw_value(draw, true);
    if (draw.one_in(10))
    {
      agent.cost = instance.budget + ratio(1 + draw.below(quarters), 4);
    }
    else
    {
      agent.cost = ratio(1 + draw.below(quarters), crowded ? 16 : 4);
    }
    instance.agents.push_back(std::move(agent));
  }
}

std::vector<Rational> type_totals(Instance const &instance, std::size_t types)
{
  std::vector<Rational> total(types);
  for (auto const &agent : instance.agents)
  {
    total[*agent.type] += agent.value;
  }
  return total;
}

Instance gen_theta(Draw &draw, std::size_t n, Rational const &theta)
{
  Instance instance;
  instance.theta = theta;
  Rational max_cost;
  Rational sum_cost;
  for (std::size_t k = 0; k < n; ++k)
  {
    // Agents 0 and 1 pin the efficiency range to exactly [1, theta].
    std::uint64_t const j = k == 0 ? 0 : k == 1 ? 8 : draw.below(9);
    Rational const      efficiency = 1 + (theta - 1) * ratio(j, 8);
    Agent               agent;
    agent.id    = k;
    agent.value = draw_value(draw, false);
    agent.cost  = agent.value / efficiency;
    max_cost    = std::max(max_cost, agent.cost);
    sum_cost += agent.cost;
    instance.agents.push_back(std::move(agent));
  }
  instance.budget = max_cost + (sum_cost - max_cost) * ratio(1 + draw.below(7), 8);
  return instance;
}

PiecewiseConcave draw_curve(Draw &draw, Rational const &scale)
{
  std::size_t const             kinks = draw.below(3);  // 2 to 4 breakpoints
  std::vector<PiecewiseConcave::Point> points{{Rational(0), Rational(0)}};
  Rational                      slope(1);
  for (std::size_t k = 0; k <= kinks; ++k)
  {
    Rational const length = scale * ratio(2 + draw.below(5), 8);
    auto const    &last   = points.back();
    points.emplace_back(last.first + length, last.second + slope * length);
    // Occasionally flatten the final segment, which then extends as a cap.
    bool const flat_tail = k + 1 == kinks && draw.one_in(4);
    slope                = flat_tail ? Rational(0) : Rational(slope * ratio(2 + draw.below(2), 4));
  }
  return PiecewiseConcave(std::move(points));
}

}  // namespace

GeneratorProfile parse_profile(std::string_view text)
{
  auto const colon = text.find(':');
  std::string_view const head = text.substr(0, colon);
  std::string_view const arg  = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto const             count = [&]() -> std::size_t {
    Rational const q = parse_rational(arg);
    if (q.get_den() != 1 || q < 1)
    {
      throw std::invalid_argument("type count must be a positive integer");
    }
    return q.get_num().get_ui();
  };
  if (head == "plain" && arg.empty())
  {
    return PlainProfile{};
  }
  if (head == "theta" && !arg.empty())
  {
    Rational theta = parse_rational(arg);
    if (theta < 1)
    {
      throw std::invalid_argument("theta must be at least 1");
    }
    return ThetaProfile{std::move(theta)};
  }
  if (head == "capped" && !arg.empty())
  {
    return CappedProfile{count()};
  }
  if (head == "concave" && !arg.empty())
  {
    return ConcaveProfile{count()};
  }
  throw std::invalid_argument("unknown profile '" + std::string(text) +
                              "' (expected plain, theta:<q>, capped:<t> or concave:<t>)");
}

std::string profile_name(GeneratorProfile const &profile)
{
  struct Visitor
  {
    std::string operator()(PlainProfile const &) const
    {
      return "plain";
    }
    std::string operator()(ThetaProfile const &p) const
    {
      return "theta:" + to_string(p.theta);
    }
    std::string operator()(CappedProfile const &p) const
    {
      return "capped:" + std::to_string(p.types);
    }
    std::string operator()(ConcaveProfile const &p) const
    {
      return "concave:" + std::to_string(p.types);
    }
  };
  return std::visit(Visitor{}, profile);
}

Instance gen_random(std::uint64_t seed, std::size_t n, GeneratorProfile const &profile)
{
  Draw draw(seed);
  if (auto const *theta = std::get_if<ThetaProfile>(&profile))
  {
    return gen_theta(draw, n, theta->theta);
  }

  Instance instance;
  draw_plain_agents(draw, n, instance, std::holds_alternative<ConcaveProfile>(profile));

  std::size_t types = 0;
  if (auto const *capped = std::get_if<CappedProfile>(&profile))
  {
    types = capped->types;
  }
  else if (auto const *concave = std::get_if<ConcaveProfile>(&profile))
  {
    types = concave->types;
  }
  if (types == 0)
  {
    return instance;
  }

  for (auto &agent : instance.agents)
  {
    agent.type = draw.below(types);
  }
  auto const totals = type_totals(instance, types);
  for (std::size_t j = 0; j < types; ++j)
  {
    Rational const scale = totals[j] > 0 ? totals[j] : Rational(1);
    if (std::holds_alternative<CappedProfile>(profile))
    {
      // Eighths of the type's total value; 8/8 and above never binds.
      instance.types.emplace(j, LinearCap{scale * ratio(1 + draw.below(10), 8)});
    }
    else
    {
      instance.types.emplace(j, draw_curve(draw, scale));
    }
  }
  return instance;
}

}  // namespace budgetmech

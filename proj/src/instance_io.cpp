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

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace budgetmech {
namespace {

using Json = nlohmann::ordered_json;

Rational rational_field(Json const &node, std::string const &what)
{
  try
  {
    if (node.is_string())
    {
      return parse_rational(node.get<std::string>());
    }
    if (node.is_number_integer())
    {
      return parse_rational(node.dump());
    }
    if (node.is_number_float())
    {
      // Re-read the literal digits rather than the binary double.
      return parse_rational(node.dump());
    }
  }
  catch (std::invalid_argument const &e)
  {
    throw InstanceError(what + ": " + e.what());
  }
  throw InstanceError(what + ": expected a rational number");
}

std::size_t natural_field(Json const &node, std::string const &what)
{
  if (node.is_number_unsigned())
  {
    return node.get<std::size_t>();
  }
  if (node.is_number_integer() && node.get<long long>() >= 0)
  {
    return static_cast<std::size_t>(node.get<long long>());
  }
  if (node.is_string())
  {
    auto const &s = node.get_ref<std::string const &>();
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
    {
      return std::stoull(s);
    }
  }
  throw InstanceError(what + ": expected a non-negative integer");
}

TypeValuation parse_valuation(Json const &node, std::string const &what)
{
  if (!node.is_object())
  {
    throw InstanceError(what + ": expected an object with 'cap' or 'pwl'");
  }
  if (node.contains("cap") == node.contains("pwl"))
  {
    throw InstanceError(what + ": exactly one of 'cap' or 'pwl' is required");
  }
  if (node.contains("cap"))
  {
    return LinearCap{rational_field(node["cap"], what + ".cap")};
  }
  Json const &pwl = node["pwl"];
  if (!pwl.is_array())
  {
    throw InstanceError(what + ".pwl: expected an array of [x, y] pairs");
  }
  std::vector<PiecewiseConcave::Point> points;
  for (std::size_t k = 0; k < pwl.size(); ++k)
  {
    Json const &pt = pwl[k];
    if (!pt.is_array() || pt.size() != 2)
    {
      throw InstanceError(what + ".pwl[" + std::to_string(k) + "]: expected [x, y]");
    }
    points.emplace_back(rational_field(pt[0], what + ".pwl x"), rational_field(pt[1], what + ".pwl y"));
  }
  try
  {
    return PiecewiseConcave(std::move(points));
  }
  catch (InstanceError const &e)
  {
    throw InstanceError(what + ": " + e.what());
  }
}

}  // namespace

Instance parse_instance(std::string_view text)
{
  Json doc;
  try
  {
    doc = Json::parse(text.begin(), text.end());
  }
  catch (Json::parse_error const &e)
  {
    throw InstanceError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object())
  {
    throw InstanceError("instance must be a JSON object");
  }
  if (!doc.contains("budget"))
  {
    throw InstanceError("missing 'budget'");
  }
  if (!doc.contains("agents") || !doc["agents"].is_array())
  {
    throw InstanceError("missing 'agents' array");
  }

  Instance instance;
  instance.budget = rational_field(doc["budget"], "budget");
  if (doc.contains("theta"))
  {
    instance.theta = rational_field(doc["theta"], "theta");
  }

  Json const &agents = doc["agents"];
  bool        explicit_ids = false;
  for (std::size_t k = 0; k < agents.size(); ++k)
  {
    Json const &node = agents[k];
    std::string tag  = "agents[" + std::to_string(k) + "]";
    if (!node.is_object() || !node.contains("v") || !node.contains("c"))
    {
      throw InstanceError(tag + ": expected an object with 'v' and 'c'");
    }
    Agent agent;
    agent.id    = k;
    agent.value = rational_field(node["v"], tag + ".v");
    agent.cost  = rational_field(node["c"], tag + ".c");
    if (node.contains("t"))
    {
      agent.type = natural_field(node["t"], tag + ".t");
    }
    if (node.contains("id"))
    {
      if (k > 0 && !explicit_ids)
      {
        throw InstanceError(tag + ": 'id' must be given for every agent or none");
      }
      explicit_ids = true;
      agent.id     = natural_field(node["id"], tag + ".id");
    }
    else if (explicit_ids)
    {
      throw InstanceError(tag + ": 'id' must be given for every agent or none");
    }
    instance.agents.push_back(std::move(agent));
  }
  if (explicit_ids)
  {
    std::sort(instance.agents.begin(), instance.agents.end(),
              [](Agent const &a, Agent const &b) { return a.id < b.id; });
    for (std::size_t k = 1; k < instance.agents.size(); ++k)
    {
      if (instance.agents[k].id == instance.agents[k - 1].id)
      {
        throw InstanceError("duplicate agent id " + std::to_string(instance.agents[k].id));
      }
    }
  }

  if (doc.contains("types"))
  {
    Json const &types = doc["types"];
    if (!types.is_object())
    {
      throw InstanceError("'types' must be an object keyed by type id");
    }
    for (auto const &[key, node] : types.items())
    {
      TypeId const id = natural_field(Json(key), "types key '" + key + "'");
      instance.types.emplace(id, parse_valuation(node, "types[" + key + "]"));
    }
  }

  auto const violations = validate(instance);
  if (has_errors(violations))
  {
    std::string message;
    for (auto const &v : violations)
    {
      if (v.severity == Severity::error)
      {
        message += message.empty() ? "" : "; ";
        message += v.message;
      }
    }
    throw InstanceError(message);
  }
  return instance;
}

std::string serialize(Instance const &instance)
{
  Json doc;
  doc["budget"] = to_string(instance.budget);
  if (instance.theta)
  {
    doc["theta"] = to_string(*instance.theta);
  }
  Json agents = Json::array();
  for (auto const &agent : instance.agents)
  {
    Json node;
    node["v"] = to_string(agent.value);
    node["c"] = to_string(agent.cost);
    if (agent.type)
    {
      node["t"] = *agent.type;
    }
    agents.push_back(std::move(node));
  }
  doc["agents"] = std::move(agents);
  if (!instance.types.empty())
  {
    Json types = Json::object();
    for (auto const &[id, valuation] : instance.types)
    {
      Json node;
      if (auto const *cap = std::get_if<LinearCap>(&valuation))
      {
        node["cap"] = to_string(cap->cap);
      }
      else
      {
        Json pts = Json::array();
        for (auto const &[x, y] : std::get<PiecewiseConcave>(valuation).points())
        {
          pts.push_back(Json::array({to_string(x), to_string(y)}));
        }
        node["pwl"] = std::move(pts);
      }
      types[std::to_string(id)] = std::move(node);
    }
    doc["types"] = std::move(types);
  }
  return doc.dump();
}

Instance load_instance(std::string const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw InstanceError("cannot open instance file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

}  // namespace budgetmech

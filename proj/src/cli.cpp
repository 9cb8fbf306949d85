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
#include "budgetmech/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>
#include <unistd.h>

namespace budgetmech::cli {
namespace {

using Json = nlohmann::ordered_json;

std::string decimal(long double value)
{
  std::ostringstream out;
  out << std::setprecision(18) << value;
  return out.str();
}

Json branch_json(Branch const &branch)
{
  if (auto const *star = std::get_if<StarBranch>(&branch))
  {
    return {{"kind", "star"}, {"winner", star->winner}};
  }
  auto const &greedy = std::get<GreedyBranch>(branch);
  Json        j{{"kind", "greedy"}};
  j["k"] = greedy.k ? Json(*greedy.k) : Json(nullptr);
  j["k_agent"] = greedy.k_agent ? Json(*greedy.k_agent) : Json(nullptr);
  j["deselected"] = greedy.deselected;
  return j;
}

std::string branch_text(Branch const &branch)
{
  if (auto const *star = std::get_if<StarBranch>(&branch))
  {
    return "star:" + std::to_string(star->winner);
  }
  auto const &greedy = std::get<GreedyBranch>(branch);
  return greedy.k_agent ? "greedy:" + std::to_string(*greedy.k_agent) : std::string("greedy");
}

std::string pick_format(Config const &config, char const *fallback)
{
  std::string const format = config.format.empty() ? fallback : config.format;
  if (format != "csv" && format != "summary")
  {
    throw std::invalid_argument("unknown format '" + format + "' (expected csv or summary)");
  }
  return format;
}

Instance load_one(Config const &config)
{
  if (config.inputs.size() != 1)
  {
    throw InstanceError(config.subcommand + " takes exactly one instance file");
  }
  return load_instance(config.inputs.front());
}

GeneratorProfile batch_profile(Config const &config, MechanismKind kind)
{
  if (config.profile)
  {
    return parse_profile(*config.profile);
  }
  std::string const t = std::to_string(config.types.value_or(2));
  switch (kind)
  {
    case MechanismKind::da:
      return PlainProfile{};
    case MechanismKind::da_theta:
      return ThetaProfile{parse_rational(config.theta.value_or("2"))};
    case MechanismKind::da_cap:
      return parse_profile("capped:" + t);
    case MechanismKind::da_con:
      return parse_profile("concave:" + t);
  }
  return PlainProfile{};
}

int cmd_run(Config const &config, std::ostream &out)
{
  Instance              instance = load_one(config);
  MechanismParams const params = resolve_params(config, instance);
  Mechanism const       mechanism(instance, params);
  Outcome const         outcome = run(mechanism);
  write_output(config.out, format_outcome(mechanism, outcome, pick_format(config, "summary")), out);
  return kOk;
}

int cmd_curve(Config const &config, std::ostream &out)
{
  Instance              instance = load_one(config);
  MechanismParams const params = resolve_params(config, instance);
  Mechanism const       mechanism(instance, params);
  if (config.agent >= instance.agents.size())
  {
    throw InstanceError("no agent " + std::to_string(config.agent));
  }
  write_output(config.out, format_curve(allocation_curve(mechanism, config.agent), pick_format(config, "csv")), out);
  return kOk;
}

int cmd_audit(Config const &config, std::ostream &out)
{
  std::string const format = pick_format(config, "csv");
  std::vector<std::pair<std::string, Instance>> batch;
  for (auto const &path : config.inputs)
  {
    batch.emplace_back(path, load_instance(path));
  }
  MechanismKind const kind = parse_mechanism(config.mech);
  if (config.count > 0)
  {
    GeneratorProfile const profile = batch_profile(config, kind);
    for (std::size_t k = 0; k < config.count; ++k)
    {
      batch.emplace_back("seed " + std::to_string(config.seed + k), gen_random(config.seed + k, config.n, profile));
    }
  }
  if (batch.empty())
  {
    throw InstanceError("audit needs instance files or --count");
  }

  std::vector<MechanismParams> params;
  for (auto &[name, instance] : batch)
  {
    params.push_back(resolve_params(config, instance));
    Mechanism const probe(instance, params.back());  // input errors surface before any work
  }

  std::vector<std::optional<AuditReport>> reports(batch.size());
  std::vector<std::string>                errors(batch.size());
  std::atomic<std::size_t>                next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < batch.size(); k = next++)
    {
      AuditOptions options;
      options.seed = config.seed + k;
      options.types = config.types;
      try
      {
        reports[k] = run_audit(batch[k].second, params[k], options);
      }
      catch (std::exception const &e)
      {
        errors[k] = e.what();
      }
    }
  };
  std::size_t const        workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, batch.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w)
  {
    pool.emplace_back(worker);
  }
  worker();
  for (auto &t : pool)
  {
    t.join();
  }

  bool              ok = true;
  std::ostringstream text;
  if (format == "summary" && batch.size() > 1)
  {
    text << "[\n";
  }
  for (std::size_t k = 0; k < batch.size(); ++k)
  {
    if (!errors[k].empty())
    {
      throw std::runtime_error(batch[k].first + ": " + errors[k]);
    }
    AuditReport const &report = *reports[k];
    ok = ok && report.passed();
    if (format == "csv")
    {
      if (batch.size() > 1)
      {
        text << "# " << batch[k].first << ' ' << report.digest << '\n';
      }
      text << report.csv();
    }
    else
    {
      text << report.json();
      if (batch.size() > 1 && k + 1 < batch.size())
      {
        text << ",\n";
      }
    }
  }
  if (format == "summary" && batch.size() > 1)
  {
    text << "]\n";
  }
  write_output(config.out, text.str(), out);
  return ok ? kOk : kPropertyFailure;
}

int cmd_gen(Config const &config, std::ostream &out)
{
  GeneratorProfile profile = PlainProfile{};
  if (config.profile)
  {
    profile = parse_profile(*config.profile);
  }
  else if (config.mech != "da")
  {
    profile = batch_profile(config, parse_mechanism(config.mech));
  }
  else if (config.theta)
  {
    profile = ThetaProfile{parse_rational(*config.theta)};
  }
  write_output(config.out, serialize(gen_random(config.seed, config.n, profile)) + "\n", out);
  return kOk;
}

int cmd_bounds(Config const &config, std::ostream &out)
{
  Rational from = parse_rational(config.from);
  Rational to = parse_rational(config.to);
  if (config.theta)
  {
    from = to = parse_rational(*config.theta);
  }
  write_output(config.out, bounds_csv(from, to, parse_rational(config.step)), out);
  return kOk;
}

}  // namespace

MechanismParams resolve_params(Config const &config, Instance &instance)
{
  MechanismKind const kind = parse_mechanism(config.mech);
  if (config.theta)
  {
    instance.theta = parse_rational(*config.theta);
    if (auto const pair = theta_violation(instance, *instance.theta))
    {
      throw InstanceError("instance is not " + to_string(*instance.theta) + "-competitive (agents " +
                          std::to_string(pair->first) + ", " + std::to_string(pair->second) + ")");
    }
  }
  std::optional<Rational> aux;
  if (kind == MechanismKind::da_theta)
  {
    if (!instance.theta)
    {
      throw InstanceError("da-theta needs --theta or a theta field in the instance");
    }
    aux = instance.theta;
  }
  else if (kind == MechanismKind::da_con)
  {
    aux = Rational(static_cast<long>(config.types.value_or(std::max<std::size_t>(instance.type_count(), 1))));
  }
  MechanismParams params = params_default(kind, aux);
  if (config.alpha)
  {
    params.alpha = parse_rational(*config.alpha);
  }
  if (config.beta)
  {
    params.beta = parse_rational(*config.beta);
  }
  check_params(params, kind == MechanismKind::da_theta ? instance.theta : std::nullopt);
  return params;
}

std::string format_outcome(Mechanism const &mechanism, Outcome const &outcome, std::string const &format)
{
  auto const &diag = outcome.diagnostics;
  auto        rho_of = [&](AgentId i) { return diag.rho[i] ? diag.rho[i]->str() : std::string(); };
  auto        tau_of = [&](AgentId i) { return diag.tau[i] ? diag.tau[i]->str() : std::string(); };
  if (format == "csv")
  {
    std::ostringstream out;
    out << "agent,x,x_value,p,p_error,rho,tau,branch\n";
    for (AgentId i = 0; i < outcome.x.size(); ++i)
    {
      out << i << ',' << outcome.x[i].str() << ',' << decimal(outcome.x[i].to_long_double()) << ','
          << decimal(outcome.p[i].value) << ',' << decimal(outcome.p[i].error_bound) << ',' << rho_of(i) << ','
          << tau_of(i) << ',' << branch_text(outcome.branch) << '\n';
    }
    return out.str();
  }
  Json j;
  j["mechanism"] = to_string(mechanism.params().kind);
  j["alpha"] = mechanism.params().alpha.str();
  j["beta"] = mechanism.params().beta.str();
  j["budget"] = to_string(mechanism.instance().budget);
  j["branch"] = branch_json(outcome.branch);
  j["opt"] = to_string(diag.opt);
  j["target"] = diag.target.str();
  Surd const value = mechanism.objective(outcome.x);
  j["value"] = value.str();
  long double total = 0;
  Json        agents = Json::array();
  for (AgentId i = 0; i < outcome.x.size(); ++i)
  {
    total += outcome.p[i].value;
    Json a{{"id", i},
           {"x", outcome.x[i].str()},
           {"x_value", static_cast<double>(outcome.x[i].to_long_double())},
           {"p", static_cast<double>(outcome.p[i].value)},
           {"p_error", static_cast<double>(outcome.p[i].error_bound)}};
    a["rho"] = diag.rho[i] ? Json(rho_of(i)) : Json(nullptr);
    a["tau"] = diag.tau[i] ? Json(tau_of(i)) : Json(nullptr);
    agents.push_back(std::move(a));
  }
  j["agents"] = std::move(agents);
  j["total_payment"] = static_cast<double>(total);
  return j.dump(2) + "\n";
}

std::string format_curve(AllocationCurve const &curve, std::string const &format)
{
  if (format == "csv")
  {
    std::ostringstream out;
    for (auto const &seg : curve.segments)
    {
      out << to_string(seg.u_lo) << ',' << to_string(seg.u_hi) << ',' << to_string(seg.form) << ',' << seg.a.str()
          << ',' << seg.b.str() << ',' << seg.d.str() << '\n';
    }
    return out.str();
  }
  Json j;
  j["agent"] = curve.agent;
  j["u_max"] = to_string(curve.u_max);
  j["error_bound"] = static_cast<double>(curve.error_bound);
  j["evaluations"] = curve.evaluations;
  j["slivers"] = curve.slivers;
  Json segments = Json::array();
  for (auto const &seg : curve.segments)
  {
    segments.push_back({{"u_lo", to_string(seg.u_lo)},
                        {"u_hi", to_string(seg.u_hi)},
                        {"form", to_string(seg.form)},
                        {"a", seg.a.str()},
                        {"b", seg.b.str()},
                        {"d", seg.d.str()},
                        {"approximate", seg.approximate}});
  }
  j["segments"] = std::move(segments);
  return j.dump(2) + "\n";
}

std::string bounds_csv(Rational const &from, Rational const &to, Rational const &step)
{
  if (from < 1 || to < from)
  {
    throw std::invalid_argument("theta range must satisfy 1 <= from <= to");
  }
  if (step <= 0)
  {
    throw std::invalid_argument("step must be positive");
  }
  std::ostringstream out;
  out << "theta,divisible,indivisible,divisible_value,indivisible_value\n";
  for (Rational theta = from; theta <= to; theta += step)
  {
    Rational const d = divisible_lower_bound(theta);
    Rational const i = indivisible_lower_bound(theta);
    out << to_string(theta) << ',' << to_string(d) << ',' << to_string(i) << ',' << decimal(to_long_double(d)) << ','
        << decimal(to_long_double(i)) << '\n';
  }
  return out.str();
}

void write_output(std::string const &path, std::string const &text, std::ostream &fallback)
{
  if (path.empty())
  {
    fallback << text;
    return;
  }
  std::string const tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file)
    {
      throw std::runtime_error("cannot write " + path);
    }
    file << text;
    if (!file.flush())
    {
      std::remove(tmp.c_str());
      throw std::runtime_error("cannot write " + path);
    }
  }
  std::filesystem::rename(tmp, path);
}

int execute(Config const &config, std::ostream &out, std::ostream &err)
{
  try
  {
    if (config.subcommand == "run")
    {
      return cmd_run(config, out);
    }
    if (config.subcommand == "curve")
    {
      return cmd_curve(config, out);
    }
    if (config.subcommand == "audit")
    {
      return cmd_audit(config, out);
    }
    if (config.subcommand == "gen")
    {
      return cmd_gen(config, out);
    }
    if (config.subcommand == "bounds")
    {
      return cmd_bounds(config, out);
    }
    err << "unknown subcommand '" << config.subcommand << "'\n";
    return kInputError;
  }
  catch (ParameterError const &e)
  {
    err << "parameter error: " << e.what() << '\n';
    return kParameterError;
  }
  catch (InstanceError const &e)
  {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  }
  catch (std::invalid_argument const &e)
  {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  }
  catch (CurveError const &e)
  {
    err << "curve error: " << e.what() << '\n';
    return kPropertyFailure;
  }
  catch (std::exception const &e)
  {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

int main(int argc, char const *const *argv, std::ostream &out, std::ostream &err)
{
  Config   config;
  CLI::App app{"Budget-feasible procurement mechanisms for divisible agents"};
  app.require_subcommand(1);

  auto mechanism_flags = [&](CLI::App *sub) {
    sub->add_option("--mech", config.mech, "da | da-theta | da-cap | da-con")
        ->check(CLI::IsMember({"da", "da-theta", "da-cap", "da-con"}));
    sub->add_option("--alpha", config.alpha, "alpha override (rational)");
    sub->add_option("--beta", config.beta, "beta override (rational)");
    sub->add_option("--theta", config.theta, "competitiveness bound theta");
    sub->add_option("--types", config.types, "type count t for da-con");
    sub->add_option("--out", config.out, "output file (written atomically)");
    sub->add_option("--format", config.format, "csv | summary");
  };

  auto *run = app.add_subcommand("run", "allocate and pay");
  run->add_option("instance", config.inputs, "instance JSON")->required();
  mechanism_flags(run);

  auto *curve = app.add_subcommand("curve", "dump one agent's allocation curve");
  curve->add_option("instance", config.inputs, "instance JSON")->required();
  curve->add_option("--agent", config.agent, "agent id");
  mechanism_flags(curve);

  auto *audit = app.add_subcommand("audit", "check mechanism properties");
  audit->add_option("instances", config.inputs, "instance JSON files");
  audit->add_option("--seed", config.seed, "first seed of a generated batch");
  audit->add_option("--count", config.count, "generated instances");
  audit->add_option("--n", config.n, "agents per generated instance");
  audit->add_option("--profile", config.profile, "plain | theta:<q> | capped:<t> | concave:<t>");
  mechanism_flags(audit);

  auto *gen = app.add_subcommand("gen", "generate a random instance");
  gen->add_option("--seed", config.seed, "seed");
  gen->add_option("--n", config.n, "number of agents");
  gen->add_option("--profile", config.profile, "plain | theta:<q> | capped:<t> | concave:<t>");
  gen->add_option("--mech", config.mech, "pick a matching profile");
  gen->add_option("--theta", config.theta, "theta for the theta profile");
  gen->add_option("--types", config.types, "type count for typed profiles");
  gen->add_option("--out", config.out, "output file");

  auto *bounds = app.add_subcommand("bounds", "lower-bound curves over theta");
  bounds->add_option("--from", config.from, "first theta");
  bounds->add_option("--to", config.to, "last theta");
  bounds->add_option("--step", config.step, "theta step");
  bounds->add_option("--theta", config.theta, "a single theta");
  bounds->add_option("--out", config.out, "output file");
  bounds->add_option("--format", config.format, "csv");

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const &e)
  {
    int const code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  config.subcommand = app.get_subcommands().front()->get_name();
  return execute(config, out, err);
}

}  // namespace budgetmech::cli

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
#include "budgetmech/audit.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace budgetmech {
namespace {

std::string num(long double value)
{
  std::ostringstream out;
  out << std::setprecision(12) << value;
  return out.str();
}

// gmpxx leaves two-argument construction uncanonicalized.
Rational fraction(mpz_class num, mpz_class den)
{
  Rational r(std::move(num), std::move(den));
  r.canonicalize();
  return r;
}

std::string num(Rational const &value)
{
  return to_string(value);
}

class Witness
{
public:
  template <typename T>
  Witness &add(char const *key, T const &value)
  {
    if (!text_.empty())
    {
      text_ += ';';
    }
    text_ += key;
    text_ += '=';
    if constexpr (std::is_same_v<T, Surd>)
    {
      text_ += num(value.to_long_double());
    }
    else if constexpr (std::is_same_v<T, std::string>)
    {
      text_ += value;
    }
    else
    {
      text_ += num(value);
    }
    return *this;
  }
  std::string str() const
  {
    return text_;
  }

private:
  std::string text_;
};

/// Worst-case tracker: keeps the witness with the smallest slack.
struct Worst
{
  long double slack{std::numeric_limits<long double>::infinity()};
  std::string witness;

  void offer(long double s, std::string const &w)
  {
    if (s < slack)
    {
      slack = s;
      witness = w;
    }
  }
  CheckResult result(std::string name, bool failed) const
  {
    CheckResult r{std::move(name), failed ? Status::fail : Status::pass, witness,
                  std::isinf(slack) ? 0.0L : slack};
    return r;
  }
};

CheckResult skipped(std::string name, std::string why)
{
  return {std::move(name), Status::skipped, std::move(why), 0};
}

// Tail integrals of one curve in long double, for the many deviations the
// truthfulness grid evaluates.
class TailTable
{
public:
  explicit TailTable(AllocationCurve const &curve)
  {
    for (auto const &seg : curve.segments)
    {
      lo_.push_back(to_long_double(seg.u_lo));
      hi_.push_back(to_long_double(seg.u_hi));
      a_.push_back(seg.a.to_long_double());
      b_.push_back(seg.b.to_long_double());
      d_.push_back(seg.d.to_long_double());
    }
    suffix_.assign(lo_.size() + 1, 0);
    for (std::size_t k = lo_.size(); k-- > 0;)
    {
      suffix_[k] = suffix_[k + 1] + piece(k, lo_[k]);
    }
  }

  long double operator()(long double u) const
  {
    auto const it = std::upper_bound(hi_.begin(), hi_.end(), u);
    if (it == hi_.end())
    {
      return 0;
    }
    auto const k = static_cast<std::size_t>(it - hi_.begin());
    return piece(k, std::max(u, lo_[k])) + suffix_[k + 1];
  }

private:
  long double piece(std::size_t k, long double from) const
  {
    long double const to = hi_[k];
    long double total = a_[k] * (to - from) + b_[k] * (to * to - from * from) / 2;
    if (d_[k] != 0 && from > 0)
    {
      total += d_[k] * std::log(to / from);
    }
    return total;
  }

  std::vector<long double> lo_, hi_, a_, b_, d_, suffix_;
};

Surd objective_of(Mechanism const &mechanism, Allocation const &allocation)
{
  return mechanism.objective(allocation.x);
}

bool canonical(Mechanism const &mechanism)
{
  auto const &params = mechanism.params();
  std::optional<Rational> aux;
  if (params.kind == MechanismKind::da_theta)
  {
    aux = mechanism.instance().theta;
  }
  else if (params.kind == MechanismKind::da_con)
  {
    aux = Rational(static_cast<long>(mechanism.instance().type_count()));
  }
  auto const reference = params_default(params.kind, aux);
  return reference.alpha == params.alpha && reference.beta == params.beta;
}

// The ratio and cost bounds on the alpha-prefix of a fractional optimum in
// efficiency order.
void prefix_inequalities(Mechanism const &mechanism, std::vector<CheckResult> &out)
{
  auto const &inst = mechanism.instance();
  auto const  view = mechanism.columns().view();
  auto const  N = eligible_agents(view, inst.budget);
  OptSolution const sol = mechanism.params().kind == MechanismKind::da_cap
                              ? opt_capped(view, N, inst.budget, caps_of(inst))
                              : opt_linear(view, N, inst.budget);
  if (sol.value == 0)
  {
    out.push_back(skipped("prefix_ratio", "opt=0"));
    out.push_back(skipped("prefix_cost", "opt=0"));
    return;
  }
  Surd const &alpha = mechanism.params().alpha;
  Surd const  target = alpha * sol.value;
  Rational    value;
  Rational    cost;
  for (AgentId i : sol.order)
  {
    Rational const gain = view.values[i] * sol.x[i];
    if (Surd(value + gain) < target)
    {
      value += gain;
      cost += view.costs[i] * sol.x[i];
      continue;
    }
    // i is the agent k at which the alpha-prefix is reached.
    Rational const &c = view.costs[i];
    Rational const &v = view.values[i];
    Surd const lhs3 = Surd(c) * (Surd(1) - alpha) * sol.value;
    Surd const rhs3 = Surd(inst.budget * v);
    Worst w3;
    w3.offer(((rhs3 - lhs3) / v).to_long_double(),
             Witness().add("k", static_cast<long double>(i)).add("lhs", lhs3 / v).add("B", inst.budget).str());
    out.push_back(w3.result("prefix_ratio", lhs3 > rhs3));

    Surd const x_k = (target - value) / v;
    Surd const lhs6 = Surd(cost) + Surd(c) * x_k;
    Surd const rhs6 = alpha * inst.budget;
    Worst w6;
    w6.offer((rhs6 - lhs6).to_long_double(),
             Witness().add("k", static_cast<long double>(i)).add("cost", lhs6).add("alphaB", rhs6).str());
    out.push_back(w6.result("prefix_cost", lhs6 > rhs6));
    return;
  }
  out.push_back(skipped("prefix_ratio", "no prefix reaches alpha*opt"));
  out.push_back(skipped("prefix_cost", "no prefix reaches alpha*opt"));
}

// The concave analogue, ordered by v*/c.
void concave_inequality(Mechanism const &mechanism, Allocation const &allocation,
                        std::optional<std::size_t> types, std::vector<CheckResult> &out)
{
  auto const &inst = mechanism.instance();
  auto const &params = mechanism.params();
  auto const &diag = allocation.diagnostics;
  for (AgentId i : diag.eligible)
  {
    if (diag.rho[i] && compare(*diag.rho[i], params.beta) > 0)
    {
      out.push_back(skipped("concave_prefix", "rho_i* > beta"));
      return;
    }
  }
  auto const view = mechanism.columns().view();
  auto const N = eligible_agents(view, inst.budget);
  auto const sol = opt_concave(view, N, inst.budget, curves_of(inst));
  if (sol.value == 0)
  {
    out.push_back(skipped("concave_prefix", "opt=0"));
    return;
  }
  auto const rank = [&](AgentId a) { return sol.v_star[a] == 0 ? 0 : view.costs[a] == 0 ? 2 : 1; };
  std::vector<AgentId> order = N;
  std::sort(order.begin(), order.end(), [&](AgentId a, AgentId b) {
    int const ra = rank(a);
    int const rb = rank(b);
    if (ra != rb)
    {
      return ra > rb;
    }
    if (ra == 1)
    {
      Rational const lhs = sol.v_star[a] * view.costs[b];
      Rational const rhs = sol.v_star[b] * view.costs[a];
      if (lhs != rhs)
      {
        return lhs > rhs;
      }
    }
    return a < b;
  });

  Rational const t(static_cast<long>(types.value_or(inst.type_count())));
  Surd const     target = params.alpha * sol.value;
  Rational       sum;
  for (AgentId k : order)
  {
    sum += sol.v_star[k];
    if (Surd(sum) < target)
    {
      continue;
    }
    Surd const lhs = Surd(view.costs[k]) * (Surd(1) - params.alpha - params.beta * t) * sol.value;
    Surd const rhs = Surd(inst.budget * sol.v_star[k]);
    Worst w;
    w.offer(((rhs - lhs) / sol.v_star[k]).to_long_double(),
            Witness().add("k", static_cast<long double>(k)).add("t", t).add("lhs", lhs / sol.v_star[k]).str());
    out.push_back(w.result("concave_prefix", lhs > rhs));
    return;
  }
  out.push_back(skipped("concave_prefix", "no prefix reaches alpha*opt"));
}

// Threat-based bounds on Greedy winners: threshold <= tau and p <= x tau.
CheckResult check_threat_bounds(AuditContext const &ctx)
{
  auto const &alloc = ctx.allocation;
  if (!std::holds_alternative<GreedyBranch>(alloc.branch))
  {
    return skipped("threat_bounds", "star branch");
  }
  long double const tol = 1e-9L * to_long_double(ctx.mechanism.instance().budget);
  Worst             worst;
  for (AgentId i = 0; i < alloc.x.size(); ++i)
  {
    auto const &tau = alloc.diagnostics.tau[i];
    if (alloc.x[i].sign() <= 0 || !tau || tau->infinite)
    {
      continue;
    }
    long double const t = tau->value.to_long_double();
    long double const th = to_long_double(threshold_bid(ctx.curves[i]));
    long double const x = alloc.x[i].to_long_double();
    worst.offer(t - th, Witness().add("agent", static_cast<long double>(i)).add("threshold", th).add("tau", t).str());
    worst.offer(x * t - ctx.payments[i].value,
                Witness().add("agent", static_cast<long double>(i)).add("p", ctx.payments[i].value).add("x_tau", x * t).str());
  }
  return worst.result("threat_bounds", worst.slack < -tol);
}

CheckResult check_theta_threshold(AuditContext const &ctx)
{
  auto const &inst = ctx.mechanism.instance();
  auto const &alloc = ctx.allocation;
  if (!std::holds_alternative<GreedyBranch>(alloc.branch))
  {
    return skipped("theta_threshold", "star branch");
  }
  Rational const    theta = inst.theta.value_or(Rational(1));
  long double const tol = 1e-9L * to_long_double(inst.budget);
  Worst             worst;
  for (AgentId i = 0; i < alloc.x.size(); ++i)
  {
    if (alloc.x[i].sign() <= 0)
    {
      continue;
    }
    Rational const    bound = std::min(inst.budget, Rational(theta * inst.agents[i].cost));
    Rational const    th = threshold_bid(ctx.curves[i]);
    worst.offer(to_long_double(Rational(bound - th)),
                Witness().add("agent", static_cast<long double>(i)).add("threshold", th).add("bound", bound).str());
  }
  return worst.result("theta_threshold", worst.slack < -tol);
}

CheckResult check_threat_noop(AuditContext const &ctx)
{
  if (ctx.mechanism.params().kind == MechanismKind::da_theta)
  {
    return skipped("threat_noop", "no threats in da-theta");
  }
  if (!canonical(ctx.mechanism))
  {
    return skipped("threat_noop", "non-canonical parameters");
  }
  auto const *greedy = std::get_if<GreedyBranch>(&ctx.allocation.branch);
  if (greedy == nullptr)
  {
    return skipped("threat_noop", "star branch");
  }
  if (greedy->deselected.empty())
  {
    return {"threat_noop", Status::pass, "", 0};
  }
  return {"threat_noop", Status::fail,
          Witness().add("agent", static_cast<long double>(greedy->deselected.front())).str(), -1};
}

CheckResult check_segment_counts(AuditContext const &ctx)
{
  auto const &inst = ctx.mechanism.instance();
  std::size_t kinks = 0;
  for (auto const &[id, valuation] : inst.types)
  {
    kinks += as_piecewise(valuation).kink_count();
  }
  std::size_t const limit = inst.agents.size() * (kinks + 2);
  Worst             worst;
  for (auto const &curve : ctx.curves)
  {
    worst.offer(static_cast<long double>(limit) - static_cast<long double>(curve.segments.size()),
                Witness().add("agent", static_cast<long double>(curve.agent))
                    .add("segments", static_cast<long double>(curve.segments.size()))
                    .add("limit", static_cast<long double>(limit))
                    .str());
  }
  CheckResult r = worst.result("segment_count", false);
  if (r.slack < 0)
  {
    r.status = Status::warn;
  }
  return r;
}

CheckResult check_payment_precision(AuditContext const &ctx)
{
  long double const tol = 1e-9L * to_long_double(ctx.mechanism.instance().budget);
  Worst             worst;
  for (AgentId i = 0; i < ctx.payments.size(); ++i)
  {
    worst.offer(tol - ctx.payments[i].error_bound,
                Witness().add("agent", static_cast<long double>(i)).add("error_bound", ctx.payments[i].error_bound).str());
  }
  return worst.result("payment_precision", worst.slack < 0);
}

CheckResult check_capped_certificate(Mechanism const &mechanism)
{
  auto const &inst = mechanism.instance();
  auto const  view = mechanism.columns().view();
  auto const  N = eligible_agents(view, inst.budget);
  auto const  caps = caps_of(inst);
  auto const  sol = opt_capped(view, N, inst.budget, caps);
  auto const  cert = certify_capped(view, N, inst.budget, caps, sol);
  if (cert.valid)
  {
    return {"capped_certificate", Status::pass, "lambda=" + to_string(cert.lambda), 0};
  }
  return {"capped_certificate", Status::fail, cert.failure, -1};
}

std::string csv_field(std::string text)
{
  std::replace(text.begin(), text.end(), ',', ';');
  return text;
}

}  // namespace

std::string to_string(Status status)
{
  switch (status)
  {
  case Status::pass:
    return "pass";
  case Status::fail:
    return "fail";
  case Status::warn:
    return "warn";
  case Status::skipped:
    return "skipped";
  }
  return "unknown";
}

AuditContext::AuditContext(Mechanism const &mech) : mechanism(mech), allocation(mech.allocate())
{
  payments = payment_vector(mech, allocation, &curves);
}

TruthfulnessResult check_truthfulness(AuditContext const &ctx, AgentId agent, AuditOptions const &options)
{
  auto const           &mech = ctx.mechanism;
  Rational const       &B = mech.instance().budget;
  Rational const       &c = mech.columns().costs[agent];
  AllocationCurve const &curve = ctx.curves.at(agent);
  long double const     cost = to_long_double(c);
  long double const     truthful = ctx.payments[agent].value - cost * ctx.allocation.x[agent].to_long_double();

  Rational const        eps = B / 1000000;
  std::vector<Rational> grid;
  for (auto const &seg : curve.segments)
  {
    for (Rational const *u : {&seg.u_lo, &seg.u_hi})
    {
      grid.push_back(*u);
      grid.push_back(*u + eps);
      if (*u >= eps)
      {
        grid.push_back(*u - eps);
      }
    }
    grid.push_back((seg.u_lo + seg.u_hi) / 2);
  }
  std::size_t const m = std::max<std::size_t>(options.uniform_points, 2);
  for (std::size_t k = 0; k < m; ++k)
  {
    grid.push_back(B * fraction(static_cast<unsigned long>(k), static_cast<unsigned long>(m - 1)));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  TailTable const tail(curve);
  Worst           worst;
  long double     gain_max = 0;
  for (Rational const &b : grid)
  {
    long double const x = mech.allocation_of(agent, b).to_long_double();
    long double const bid = to_long_double(b);
    long double const p = x > 0 ? bid * x + tail(bid) : 0;
    long double const gain = (p - cost * x) - truthful;
    gain_max = std::max(gain_max, gain);
    worst.offer(-gain, Witness().add("agent", static_cast<long double>(agent)).add("b", b).add("gain", gain).str());
  }
  long double const tol = 1e-6L * to_long_double(B);
  TruthfulnessResult out;
  out.result = worst.result("truthfulness", gain_max > tol);
  out.result.slack = tol - gain_max;
  out.max_violation = gain_max;
  out.grid_size = grid.size();
  return out;
}

CheckResult check_individual_rationality(AuditContext const &ctx)
{
  long double const tol = 1e-9L * to_long_double(ctx.mechanism.instance().budget);
  Worst             worst;
  for (AgentId i = 0; i < ctx.allocation.x.size(); ++i)
  {
    if (ctx.allocation.x[i].sign() <= 0)
    {
      continue;
    }
    long double const utility =
        ctx.payments[i].value - to_long_double(ctx.mechanism.columns().costs[i]) * ctx.allocation.x[i].to_long_double();
    worst.offer(utility + tol, Witness().add("agent", static_cast<long double>(i)).add("utility", utility).str());
  }
  return worst.result("individual_rationality", worst.slack < 0);
}

CheckResult check_budget(AuditContext const &ctx)
{
  long double total = 0;
  for (auto const &p : ctx.payments)
  {
    total += p.value;
  }
  long double const limit = to_long_double(ctx.mechanism.instance().budget) * (1 + 1e-6L);
  Worst             worst;
  worst.offer(limit - total, Witness().add("sum_p", total).add("B", ctx.mechanism.instance().budget).str());
  return worst.result("budget", worst.slack < 0);
}

CheckResult check_monotonicity(std::vector<AllocationCurve> const &curves)
{
  Worst worst;
  bool  failed = false;
  auto  report = [&](Surd const &margin, AgentId agent, Rational const &u, char const *what) {
    failed = failed || margin.sign() < 0;
    worst.offer(margin.to_long_double(), Witness()
                                             .add("agent", static_cast<long double>(agent))
                                             .add("u", u)
                                             .add("rule", std::string(what))
                                             .str());
  };
  for (auto const &curve : curves)
  {
    Surd previous = 1;
    for (std::size_t s = 0; s < curve.segments.size(); ++s)
    {
      Segment const &seg = curve.segments[s];
      // x'(u) = b - d/u^2 is monotone in u, so both ends decide its sign.
      for (Rational const *u : {&seg.u_lo, &seg.u_hi})
      {
        report(seg.d - seg.b * Rational(*u * *u), curve.agent, *u, "slope");
      }
      if (seg.u_lo > 0 || seg.d.sign() == 0)
      {
        Surd const start = seg.value_at(seg.u_lo);
        report(previous - start, curve.agent, seg.u_lo, "boundary");
        report(Surd(1) - start, curve.agent, seg.u_lo, "range");
      }
      Surd const end = seg.value_at(seg.u_hi);
      report(end, curve.agent, seg.u_hi, "range");
      if (s > 0 && curve.segments[s - 1].u_hi != seg.u_lo)
      {
        report(Surd(-1), curve.agent, seg.u_lo, "gap");
      }
      previous = end;
    }
  }
  return worst.result("monotonicity", failed);
}

ApproximationResult check_approximation(AuditContext const &ctx)
{
  auto const &mech = ctx.mechanism;
  Surd const  value = objective_of(mech, ctx.allocation);
  Rational const &opt = ctx.allocation.diagnostics.opt;
  Surd const  gamma = approximation_guarantee(mech.params());
  Surd const  lhs = gamma * value;
  Surd const  rhs = Surd(opt) * Rational(999999999, 1000000000);

  ApproximationResult out;
  if (opt == 0)
  {
    out.ratio = 1;
  }
  else if (value.sign() == 0)
  {
    out.ratio = std::numeric_limits<long double>::infinity();
  }
  else
  {
    out.ratio = (Surd(opt) / value).to_long_double();
  }
  Worst worst;
  worst.offer((lhs - rhs).to_long_double(),
              Witness().add("opt", opt).add("value", value).add("gamma", gamma).add("ratio", out.ratio).str());
  out.result = worst.result("approximation", lhs < rhs);
  return out;
}

std::vector<CheckResult> check_prefix_inequalities(Mechanism const &mechanism, std::optional<std::size_t> types)
{
  std::vector<CheckResult> out;
  if (mechanism.params().kind == MechanismKind::da_con)
  {
    out.push_back(skipped("prefix_ratio", "concave valuations"));
    out.push_back(skipped("prefix_cost", "concave valuations"));
    concave_inequality(mechanism, mechanism.allocate(), types, out);
  }
  else
  {
    prefix_inequalities(mechanism, out);
    out.push_back(skipped("concave_prefix", "linear valuations"));
  }
  return out;
}

CheckResult check_curve_agreement(AuditContext const &ctx, AuditOptions const &options)
{
  Rational const &B = ctx.mechanism.instance().budget;
  Worst           worst;
  bool            failed = false;
  std::size_t     compared = 0;
  for (auto const &curve : ctx.curves)
  {
    std::mt19937_64 rng(options.seed ^ (0x9e3779b97f4a7c15ULL * (curve.agent + 1)));
    for (std::size_t s = 0; s < options.pointwise_samples; ++s)
    {
      Rational const u = B * fraction(static_cast<unsigned long>(rng() >> 32), 1UL << 32);
      Segment const *seg = curve.segment_at(u);
      if (seg != nullptr && seg->approximate)
      {
        continue;
      }
      Surd const fitted = curve.value_at(u);
      Surd const fresh = ctx.mechanism.allocation_of(curve.agent, u);
      ++compared;
      Surd const gap = abs(fitted - fresh);
      failed = failed || gap.sign() != 0;
      worst.offer(-gap.to_long_double(), Witness()
                                             .add("agent", static_cast<long double>(curve.agent))
                                             .add("u", u)
                                             .add("curve", fitted)
                                             .add("rerun", fresh)
                                             .str());
    }
  }
  CheckResult r = worst.result("curve_agreement", failed);
  if (!failed)
  {
    r.witness = "compared=" + std::to_string(compared);
  }
  return r;
}

bool AuditReport::passed() const
{
  return std::none_of(checks.begin(), checks.end(), [](CheckResult const &c) { return c.status == Status::fail; });
}

std::string AuditReport::csv() const
{
  std::ostringstream out;
  out << "check_name,status,worst_witness,slack\n";
  for (auto const &c : checks)
  {
    out << c.name << ',' << to_string(c.status) << ',' << csv_field(c.witness) << ','
        << std::setprecision(12) << c.slack << '\n';
  }
  return out.str();
}

std::string AuditReport::json() const
{
  using Json = nlohmann::ordered_json;
  auto finite = [](long double v) -> Json {
    if (std::isfinite(v))
    {
      return static_cast<double>(v);
    }
    return v > 0 ? "inf" : "-inf";
  };
  Json j;
  j["digest"] = digest;
  j["mechanism"] = to_string(params.kind);
  j["alpha"] = params.alpha.str();
  j["beta"] = params.beta.str();
  j["passed"] = passed();
  j["ratio"] = finite(ratio);
  j["max_truth_violation"] = finite(max_truth_violation);
  j["total_payment"] = finite(total_payment);
  j["budget"] = to_string(budget);
  j["grid_size"] = grid_size;
  j["segment_counts"] = segment_counts;
  Json list = Json::array();
  for (auto const &c : checks)
  {
    list.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"witness", c.witness}, {"slack", finite(c.slack)}});
  }
  j["checks"] = std::move(list);
  return j.dump(2) + "\n";
}

AuditReport run_audit(Instance const &instance, MechanismParams const &params, AuditOptions const &options)
{
  Mechanism const mechanism(instance, params);
  AuditReport     report;
  report.digest = instance_digest(instance);
  report.params = params;
  report.budget = instance.budget;

  std::optional<AuditContext> ctx;
  try
  {
    ctx.emplace(mechanism);
  }
  catch (CurveError const &e)
  {
    report.checks.push_back({"curves", Status::fail, csv_field(e.what()), -1});
    auto prefix = check_prefix_inequalities(mechanism, options.types);
    report.checks.insert(report.checks.end(), prefix.begin(), prefix.end());
    return report;
  }

  if (options.truthfulness)
  {
    Worst       worst;
    bool        failed = false;
    for (AgentId i = 0; i < instance.agents.size(); ++i)
    {
      auto const t = check_truthfulness(*ctx, i, options);
      failed = failed || t.result.status == Status::fail;
      worst.offer(t.result.slack, t.result.witness);
      report.max_truth_violation = std::max(report.max_truth_violation, t.max_violation);
      report.grid_size += t.grid_size;
    }
    report.checks.push_back(worst.result("truthfulness", failed));
  }
  else
  {
    report.checks.push_back(skipped("truthfulness", "disabled"));
  }
  report.checks.push_back(check_individual_rationality(*ctx));
  report.checks.push_back(check_budget(*ctx));
  report.checks.push_back(check_monotonicity(ctx->curves));
  auto const approx = check_approximation(*ctx);
  report.ratio = approx.ratio;
  report.checks.push_back(approx.result);

  report.checks.push_back(check_segment_counts(*ctx));
  report.checks.push_back(check_payment_precision(*ctx));
  report.checks.push_back(options.pointwise ? check_curve_agreement(*ctx, options)
                                            : skipped("curve_agreement", "disabled"));
  if (params.kind == MechanismKind::da_theta)
  {
    report.checks.push_back(check_theta_threshold(*ctx));
  }
  else
  {
    report.checks.push_back(check_threat_bounds(*ctx));
  }
  report.checks.push_back(check_threat_noop(*ctx));
  if (params.kind == MechanismKind::da_cap)
  {
    report.checks.push_back(check_capped_certificate(mechanism));
  }
  auto prefix = check_prefix_inequalities(mechanism, options.types);
  report.checks.insert(report.checks.end(), prefix.begin(), prefix.end());

  for (auto const &p : ctx->payments)
  {
    report.total_payment += p.value;
  }
  for (auto const &c : ctx->curves)
  {
    report.segment_counts.push_back(c.segments.size());
  }
  return report;
}

std::string instance_digest(Instance const &instance)
{
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(instance))
  {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

namespace {

Instance market(Rational budget, std::vector<std::pair<Rational, Rational>> const &agents)
{
  Instance inst;
  inst.budget = std::move(budget);
  for (std::size_t i = 0; i < agents.size(); ++i)
  {
    inst.agents.push_back({i, agents[i].first, agents[i].second, std::nullopt});
  }
  return inst;
}

Instance with_types(Instance inst, std::vector<TypeId> const &types)
{
  for (std::size_t i = 0; i < types.size(); ++i)
  {
    inst.agents[i].type = types[i];
  }
  return inst;
}

}  // namespace

std::vector<Fixture> fixtures()
{
  std::vector<Fixture> out;
  Rational const       one(1);
  Rational const       eps(1, 100);
  out.push_back({"LB-3-I1", market(one, {{one, one}, {one, one}}), MechanismKind::da, Rational(1), Rational(5, 4)});
  out.push_back({"LB-3-I2", market(one, {{one, eps}, {one, one}}), MechanismKind::da, 2 - eps, Rational(5, 4)});
  for (long th : {2L, 3L})
  {
    Rational const theta(th);
    std::string const tag = "(" + std::to_string(th) + ")";
    Rational const    high = theta / (theta + 1);
    Rational const    low = one / (theta + 1);
    Instance          i1 = market(one, {{one, high}, {one, high}});
    Instance          i2 = market(one, {{one, low}, {one, high}});
    i1.theta = theta;
    i2.theta = theta;
    out.push_back({"LB-4-I1" + tag, i1, MechanismKind::da_theta, (theta + 1) / theta, divisible_lower_bound(theta)});
    out.push_back({"LB-4-I2" + tag, i2, MechanismKind::da_theta, Rational(2), divisible_lower_bound(theta)});
  }
  for (long n = 2; n <= 10; ++n)
  {
    std::vector<std::pair<Rational, Rational>> agents(static_cast<std::size_t>(n), {Rational(4), Rational(2)});
    out.push_back({"tight-" + std::to_string(n), market(Rational(2 * n), agents), MechanismKind::da, Rational(4 * n),
                   std::nullopt});
  }
  out.push_back({"single-agent", market(Rational(10), {{Rational(5), Rational(4)}}), MechanismKind::da, Rational(5),
                 std::nullopt});
  out.push_back({"star-three", market(Rational(10), {{Rational(6), Rational(2)}, {Rational(4), Rational(4)}, {Rational(5), Rational(10)}}),
                 MechanismKind::da, Rational(12), std::nullopt});
  {
    Instance five = market(Rational(10), std::vector<std::pair<Rational, Rational>>(5, {Rational(4), Rational(2)}));
    five.theta = Rational(1);
    out.push_back({"five-agents-theta", five, MechanismKind::da_theta, Rational(20), std::nullopt});
  }
  {
    Instance capped = with_types(market(Rational(10), {{Rational(4), Rational(2)},
                                                       {Rational(4), Rational(2)},
                                                       {Rational(4), Rational(2)},
                                                       {Rational(4), Rational(4)},
                                                       {Rational(4), Rational(4)}}),
                                 {0, 0, 0, 1, 1});
    capped.types[0] = LinearCap{Rational(6)};
    capped.types[1] = LinearCap{Rational(8)};
    out.push_back({"capped-two-types", capped, MechanismKind::da_cap, Rational(13), std::nullopt});
  }
  {
    Instance concave = with_types(
        market(Rational(6), std::vector<std::pair<Rational, Rational>>(3, {Rational(5), Rational(2)})), {0, 0, 0});
    concave.types[0] = PiecewiseConcave({{Rational(0), Rational(0)}, {Rational(5), Rational(5)}, {Rational(6), Rational(11, 2)}});
    out.push_back({"concave-one-type", concave, MechanismKind::da_con, Rational(10), std::nullopt});
  }
  for (auto const &f : out)
  {
    if (has_errors(validate(f.instance)))
    {
      throw InstanceError("fixture " + f.name + " does not validate");
    }
  }
  return out;
}

Rational divisible_lower_bound(Rational const &theta)
{
  Rational const sq = theta * theta;
  return (5 * sq - 1) / (4 * sq);
}

Rational indivisible_lower_bound(Rational const &theta)
{
  return 3 - 1 / theta;
}

}  // namespace budgetmech

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

#include "budgetmech/payments.hpp"

#include "big_float.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>

namespace budgetmech {
namespace {

struct Form
{
  Surd a;
  Surd b;
  Surd d;

  Surd operator()(Rational const &u) const
  {
    return a + b * Surd(u) + d / Surd(u);
  }
};

FormKind classify(Form const &f)
{
  if (f.d.sign() != 0)
  {
    return FormKind::hyperbolic;
  }
  return f.b.sign() != 0 ? FormKind::affine : FormKind::constant;
}

// The unique a + b*u + d/u through three points, via Lagrange interpolation
// of the quadratic u * x(u) = d + a*u + b*u^2.
Form through(std::array<Rational, 3> const &u, std::array<Surd, 3> const &x)
{
  Form f;
  for (std::size_t k = 0; k < 3; ++k)
  {
    Rational const &p     = u[(k + 1) % 3];
    Rational const &q     = u[(k + 2) % 3];
    Rational const  denom = (u[k] - p) * (u[k] - q);
    Surd const      y     = x[k] * Surd(Rational(u[k] / denom));
    f.b += y;
    f.a -= y * Surd(Rational(p + q));
    f.d += y * Surd(Rational(p * q));
  }
  return f;
}

struct Sample
{
  Rational u;
  Surd     x;
};

class CurveBuilder
{
public:
  CurveBuilder(Mechanism const &mechanism, AgentId agent, CurveOptions const &options)
    : mechanism_(mechanism)
    , agent_(agent)
    , options_(options)
    , costs_(mechanism.columns().costs)
    , floor_(options.floor_fraction * mechanism.instance().budget)
    , max_error_(1e-10L * to_long_double(mechanism.instance().budget))
  {
    curve_.agent = agent;
  }

  AllocationCurve build()
  {
    auto const seeds = mechanism_.curve_seeds(agent_);
    for (std::size_t k = 0; k + 1 < seeds.size(); ++k)
    {
      sweep(seeds[k], seeds[k + 1]);
    }
    finish();
    return std::move(curve_);
  }

private:
  Surd eval(Rational const &u)
  {
    costs_[agent_] = u;
    ++curve_.evaluations;
    return mechanism_.allocate(costs_).x[agent_];
  }

  // Fit on [lo, hi]: three interior points determine the form, two points
  // near the ends confirm it.
  std::optional<Form> fit(Rational const &lo, Rational const &hi, std::vector<Sample> &samples)
  {
    Rational const         w = hi - lo;
    Rational const         edge(1, 1 << 20);
    std::array<Rational, 3> const u{lo + w / 4, lo + w / 2, lo + w * 3 / 4};
    std::array<Surd, 3>           x{eval(u[0]), eval(u[1]), eval(u[2])};
    for (std::size_t k = 0; k < 3; ++k)
    {
      samples.push_back({u[k], x[k]});
    }
    Form const form = through(u, x);
    bool       ok   = true;
    for (Rational const &v : {Rational(lo + w * edge), Rational(hi - w * edge)})
    {
      Surd const xv = eval(v);
      samples.push_back({v, xv});
      ok = ok && form(v) == xv;
    }
    if (!ok)
    {
      return std::nullopt;
    }
    return form;
  }

  void push(Rational const &lo, Rational const &hi, Form const &form, bool approximate)
  {
    Segment seg;
    seg.u_lo        = lo;
    seg.u_hi        = hi;
    seg.form        = classify(form);
    seg.a           = form.a;
    seg.b           = form.b;
    seg.d           = form.d;
    seg.approximate = approximate;
    curve_.segments.push_back(std::move(seg));
    if (curve_.segments.size() > options_.segment_cap)
    {
      throw CurveError("agent " + std::to_string(agent_) + ": more than " +
                       std::to_string(options_.segment_cap) + " segments");
    }
  }

  void sliver(Rational const &lo, Rational const &hi, Surd const &value)
  {
    push(lo, hi, Form{value, Surd(0), Surd(0)}, true);
    ++curve_.slivers;
    curve_.error_bound += to_long_double(Rational(hi - lo));
    if (curve_.error_bound > max_error_)
    {
      throw CurveError("agent " + std::to_string(agent_) +
                       ": unresolved transitions exceed the error budget near u = " +
                       std::to_string(to_long_double(lo)));
    }
  }

  void sweep(Rational const &left, Rational const &right)
  {
    Rational cur = left;
    while (cur < right)
    {
      if (right - cur < floor_)
      {
        sliver(cur, right, eval(Rational((cur + right) / 2)));
        return;
      }
      Rational            w = right - cur;
      std::vector<Sample> samples;
      std::vector<Sample> failed;
      std::optional<Form> form;
      while (true)
      {
        samples.clear();
        form = fit(cur, cur + w, samples);
        if (form)
        {
          break;
        }
        failed = samples;
        w /= 4;
        if (w < floor_)
        {
          break;
        }
      }
      if (!form)
      {
        // No form survives even on a floor-sized window.
        Rational const hi = std::min(Rational(cur + floor_), right);
        sliver(cur, hi, eval(hi));
        cur = hi;
        continue;
      }
      if (cur + w == right)
      {
        push(cur, right, *form, false);
        return;
      }

      // The wider window failed somewhere the fitted form does not hold.
      std::optional<Sample> bad;
      for (auto const &s : failed)
      {
        if ((*form)(s.u) != s.x && (!bad || s.u < bad->u))
        {
          bad = s;
        }
      }
      if (!bad)
      {
        throw CurveError("agent " + std::to_string(agent_) + ": inconsistent refinement");
      }
      Rational good = cur;
      for (auto const &s : samples)
      {
        if (s.u < bad->u && s.u > good)
        {
          good = s.u;
        }
      }
      Rational bad_u = bad->u;
      Surd     bad_x = bad->x;
      while (bad_u - good > floor_)
      {
        Rational const mid = (good + bad_u) / 2;
        Surd const     x   = eval(mid);
        if ((*form)(mid) == x)
        {
          good = mid;
        }
        else
        {
          bad_u = mid;
          bad_x = x;
        }
      }
      if (good > cur)
      {
        push(cur, good, *form, false);
      }
      sliver(good, bad_u, bad_x);
      cur = bad_u;
    }
  }

  void finish()
  {
    auto &segs = curve_.segments;
    std::vector<Segment> merged;
    for (auto &seg : segs)
    {
      if (!merged.empty() && !merged.back().approximate && !seg.approximate &&
          merged.back().same_form(seg))
      {
        merged.back().u_hi = seg.u_hi;
        continue;
      }
      merged.push_back(std::move(seg));
    }
    while (!merged.empty() && merged.back().form == FormKind::constant && merged.back().a.sign() == 0)
    {
      merged.pop_back();
    }
    segs           = std::move(merged);
    curve_.u_max   = segs.empty() ? Rational(0) : segs.back().u_hi;
  }

  Mechanism const      &mechanism_;
  AgentId               agent_;
  CurveOptions const   &options_;
  std::vector<Rational> costs_;
  Rational              floor_;
  long double           max_error_;
  AllocationCurve       curve_;
};

detail::BigFloat tail_integral(AllocationCurve const &curve, Rational const &b)
{
  detail::BigFloat total;
  for (auto const &seg : curve.segments)
  {
    Rational const lo = std::max(seg.u_lo, b);
    Rational const &hi = seg.u_hi;
    if (hi <= lo)
    {
      continue;
    }
    Surd const poly = seg.a * Surd(Rational(hi - lo)) +
                      seg.b * Surd(Rational((hi * hi - lo * lo) / 2));
    detail::BigFloat const poly_big(poly);
    mpfr_add(total.get(), total.get(), poly_big.get(), MPFR_RNDN);
    if (seg.d.sign() != 0)
    {
      if (lo <= 0)
      {
        throw CurveError("hyperbolic segment touches u = 0");
      }
      detail::BigFloat ratio{Rational(hi / lo)};
      mpfr_log(ratio.get(), ratio.get(), MPFR_RNDN);
      detail::BigFloat const coeff(seg.d);
      mpfr_mul(ratio.get(), ratio.get(), coeff.get(), MPFR_RNDN);
      mpfr_add(total.get(), total.get(), ratio.get(), MPFR_RNDN);
    }
  }
  return total;
}

Payment finish_payment(AllocationCurve const &curve, detail::BigFloat const &value)
{
  Payment p;
  p.value = value.to_long_double();
  // Rounding to a 64-bit significand, plus the sliver allowance.
  p.error_bound = curve.error_bound + std::fabs(p.value) * std::ldexp(1.0L, -63) + std::ldexp(1.0L, -120);
  return p;
}

}  // namespace

std::string to_string(FormKind form)
{
  switch (form)
  {
    case FormKind::constant:
      return "const";
    case FormKind::affine:
      return "affine";
    case FormKind::hyperbolic:
      return "hyperbolic";
  }
  return "?";
}

Surd Segment::value_at(Rational const &u) const
{
  Surd out = a;
  if (b.sign() != 0)
  {
    out += b * Surd(u);
  }
  if (d.sign() != 0)
  {
    out += d / Surd(u);
  }
  return out;
}

bool Segment::same_form(Segment const &other) const
{
  return a == other.a && b == other.b && d == other.d;
}

Segment const *AllocationCurve::segment_at(Rational const &u) const
{
  auto it = std::upper_bound(segments.begin(), segments.end(), u,
                             [](Rational const &x, Segment const &s) { return x < s.u_hi; });
  if (it == segments.end() || u < it->u_lo)
  {
    return nullptr;
  }
  return &*it;
}

Surd AllocationCurve::value_at(Rational const &u) const
{
  Segment const *seg = segment_at(u);
  return seg == nullptr ? Surd(0) : seg->value_at(u);
}

std::size_t CurveOptions::default_segment_cap()
{
  constexpr std::size_t kDefault = 10000;
  char const           *env      = std::getenv("BUDGETMECH_SEGMENT_CAP");
  if (env == nullptr || *env == '\0')
  {
    return kDefault;
  }
  char         *end   = nullptr;
  unsigned long value = std::strtoul(env, &end, 10);
  if (end == nullptr || *end != '\0' || value == 0)
  {
    return kDefault;
  }
  return value;
}

AllocationCurve allocation_curve(Mechanism const &mechanism, AgentId agent, CurveOptions const &options)
{
  if (agent >= mechanism.instance().agents.size())
  {
    throw std::out_of_range("no agent " + std::to_string(agent));
  }
  return CurveBuilder(mechanism, agent, options).build();
}

AllocationCurve allocation_curve(Instance const &instance, MechanismParams const &params, AgentId agent)
{
  Mechanism const mechanism(instance, params);
  return allocation_curve(mechanism, agent);
}

Rational threshold_bid(AllocationCurve const &curve)
{
  return curve.u_max;
}

Payment integrate_tail(AllocationCurve const &curve, Rational const &b)
{
  return finish_payment(curve, tail_integral(curve, b));
}

Payment payment_from_curve(AllocationCurve const &curve, Rational const &declared, Surd const &allocation)
{
  detail::BigFloat total = tail_integral(curve, declared);
  detail::BigFloat const direct(Surd(declared) * allocation);
  mpfr_add(total.get(), total.get(), direct.get(), MPFR_RNDN);
  return finish_payment(curve, total);
}

std::vector<Payment> payment_vector(Mechanism const &mechanism, Allocation const &allocation,
                                    std::vector<AllocationCurve> *curves)
{
  std::size_t const    n = allocation.x.size();
  std::vector<Payment> p(n);
  if (curves != nullptr)
  {
    curves->clear();
    curves->reserve(n);
  }
  auto const &costs = mechanism.columns().costs;
  for (AgentId i = 0; i < n; ++i)
  {
    bool const winner = allocation.x[i].sign() > 0;
    if (!winner && curves == nullptr)
    {
      continue;
    }
    AllocationCurve curve = allocation_curve(mechanism, i);
    if (winner)
    {
      p[i] = payment_from_curve(curve, costs[i], allocation.x[i]);
    }
    if (curves != nullptr)
    {
      curves->push_back(std::move(curve));
    }
  }
  return p;
}

std::vector<Payment> payment_vector(Instance const &instance, MechanismParams const &params)
{
  Mechanism const mechanism(instance, params);
  return payment_vector(mechanism, mechanism.allocate());
}

}  // namespace budgetmech

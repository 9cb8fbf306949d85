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

#include "budgetmech/mechanisms.hpp"
#include "budgetmech/payments.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace budgetmech {

enum class Status
{
  pass,
  fail,
  warn,     // anomaly worth reporting, not a property failure
  skipped,  // hypothesis does not apply
};

std::string to_string(Status status);

/// One verdict. `slack` is the margin to the bound at the worst witness;
/// negative exactly when the check failed.
struct CheckResult
{
  std::string name;
  Status      status{Status::pass};
  std::string witness;
  long double slack{0};
};

struct AuditOptions
{
  std::size_t                uniform_points{32};
  std::size_t                pointwise_samples{64};
  std::uint64_t              seed{0};
  std::optional<std::size_t> types;  // t in the concave inequality; defaults to the type count
  bool                       truthfulness{true};
  bool                       pointwise{true};
};

/// Everything the checks share: the truthful outcome and every agent's curve.
struct AuditContext
{
  Mechanism const             &mechanism;
  Allocation                   allocation;
  std::vector<Payment>         payments;
  std::vector<AllocationCurve> curves;

  explicit AuditContext(Mechanism const &mech);
};

struct TruthfulnessResult
{
  CheckResult result;
  long double max_violation{0};  // best utility gain found over the grid
  std::size_t grid_size{0};
};

/// Grid deviations for agent i: curve breakpoints +- 1e-6 B, segment
/// midpoints and uniform points in [0, B].
TruthfulnessResult check_truthfulness(AuditContext const &context, AgentId agent,
                                      AuditOptions const &options = {});

CheckResult check_individual_rationality(AuditContext const &context);
CheckResult check_budget(AuditContext const &context);

/// Segment-wise b u^2 <= d, values in [0, 1] and non-increasing values across
/// boundaries. Takes curves directly so corrupted ones can be fed in.
CheckResult check_monotonicity(std::vector<AllocationCurve> const &curves);

struct ApproximationResult
{
  CheckResult result;
  long double ratio{1};  // opt / v(x)
};

/// gamma v(x) >= opt (1 - 1e-9), exactly, with gamma from approximation_guarantee.
ApproximationResult check_approximation(AuditContext const &context);

/// The prefix inequalities on the truthful costs: "prefix_ratio" and
/// "prefix_cost" for the linear and capped kinds, "concave_prefix" for da_con
/// when rho_{i*} <= beta.
std::vector<CheckResult> check_prefix_inequalities(Mechanism const &mechanism,
                                                   std::optional<std::size_t> types = std::nullopt);

/// Curves against fresh re-runs at random points; approximate slivers skipped.
CheckResult check_curve_agreement(AuditContext const &context, AuditOptions const &options = {});

struct AuditReport
{
  std::string              digest;
  MechanismParams          params;
  std::vector<CheckResult> checks;
  long double              ratio{1};
  long double              max_truth_violation{0};
  long double              total_payment{0};
  Rational                 budget;
  std::size_t              grid_size{0};
  std::vector<std::size_t> segment_counts;

  bool passed() const;
  /// `check_name,status,worst_witness,slack` per check.
  std::string csv() const;
  std::string json() const;
};

/// Never throws on property failures; they are reported.
AuditReport run_audit(Instance const &instance, MechanismParams const &params,
                      AuditOptions const &options = {});

/// 64-bit FNV-1a of the canonical serialization, as hex.
std::string instance_digest(Instance const &instance);

struct Fixture
{
  std::string             name;
  Instance                instance;
  MechanismKind           kind{MechanismKind::da};
  Rational                expected_opt;
  std::optional<Rational> known_bound;  // lower bound the instance pair witnesses
};

std::vector<Fixture> fixtures();

/// (5 theta^2 - 1) / (4 theta^2).
Rational divisible_lower_bound(Rational const &theta);
/// 3 - 1/theta.
Rational indivisible_lower_bound(Rational const &theta);

}  // namespace budgetmech

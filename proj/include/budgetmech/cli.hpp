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

#include "budgetmech/audit.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace budgetmech::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kPropertyFailure = 1;
inline constexpr int kInputError = 2;
inline constexpr int kParameterError = 3;

struct Config
{
  std::string                 subcommand;
  std::vector<std::string>    inputs;
  std::string                 mech{"da"};
  std::optional<std::string>  alpha;
  std::optional<std::string>  beta;
  std::optional<std::string>  theta;
  std::optional<std::size_t>  types;
  std::uint64_t               seed{0};
  std::string                 out;     // empty: standard output
  std::string                 format;  // csv | summary; empty picks the subcommand's default
  std::size_t                 agent{0};
  // gen and batch audits
  std::optional<std::string>  profile;
  std::size_t                 n{8};
  std::size_t                 count{0};
  // bounds
  std::string                 from{"1"};
  std::string                 to{"4"};
  std::string                 step{"1/4"};
};

/// The instance as the flags modify it, and the parameters to run it with.
/// Throws InstanceError / ParameterError / std::invalid_argument.
MechanismParams resolve_params(Config const &config, Instance &instance);

std::string format_outcome(Mechanism const &mechanism, Outcome const &outcome, std::string const &format);
std::string format_curve(AllocationCurve const &curve, std::string const &format);
std::string bounds_csv(Rational const &from, Rational const &to, Rational const &step);

/// Writes via a temporary file and rename, or to `fallback` when path is empty.
void write_output(std::string const &path, std::string const &text, std::ostream &fallback);

int execute(Config const &config, std::ostream &out, std::ostream &err);

/// Parses argv and executes; never throws.
int main(int argc, char const *const *argv, std::ostream &out, std::ostream &err);

}  // namespace budgetmech::cli

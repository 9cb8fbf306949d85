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
#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace budgetmech;
using budgetmech::testing::market;
using budgetmech::testing::q;

namespace {

struct Result
{
  int         code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args)
{
  args.insert(args.begin(), "budgetmech");
  std::vector<char const *> argv;
  for (auto const &a : args)
  {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  int const          code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir
{
public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("budgetmech-cli-" + std::to_string(::getpid())))
  {
    std::filesystem::create_directories(path_);
  }
  ~TempDir()
  {
    std::filesystem::remove_all(path_);
  }
  std::string write(std::string const &name, std::string const &text) const
  {
    auto const    file = path_ / name;
    std::ofstream(file) << text;
    return file.string();
  }
  std::string file(std::string const &name) const
  {
    return (path_ / name).string();
  }

private:
  std::filesystem::path path_;
};

std::string slurp(std::string const &path)
{
  std::ifstream      in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("bounds emits exact rationals")
{
  Result const r = invoke({"bounds", "--theta", "2"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("\n2,19/16,5/2,") != std::string::npos);

  Result const range = invoke({"bounds", "--from", "1", "--to", "2", "--step", "1/2"});
  CHECK(range.code == cli::kOk);
  CHECK(range.out.find("\n1,1,2,") != std::string::npos);
  CHECK(range.out.find("\n3/2,41/36,7/3,") != std::string::npos);

  CHECK(invoke({"bounds", "--from", "1/2"}).code == cli::kInputError);
  CHECK(invoke({"bounds", "--step", "0"}).code == cli::kInputError);
}

TEST_CASE("run reports allocations and payments")
{
  TempDir const     dir;
  Instance const    five = market(q(10), std::vector<std::pair<Rational, Rational>>(5, {q(4), q(2)}));
  std::string const path = dir.write("five.json", serialize(five));

  Result const r = invoke({"run", "--mech", "da", path});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("\"kind\": \"greedy\"") != std::string::npos);
  CHECK(r.out.find("\"x_value\": 0.9098") != std::string::npos);

  Result const csv = invoke({"run", "--format", "csv", path});
  CHECK(csv.code == cli::kOk);
  CHECK(csv.out.rfind("agent,x,x_value,p,p_error,rho,tau,branch\n0,1,1,2,", 0) == 0);

  std::string const out = dir.file("outcome.json");
  CHECK(invoke({"run", path, "--out", out}).code == cli::kOk);
  CHECK(slurp(out) == r.out);
}

TEST_CASE("run exit codes")
{
  TempDir const dir;
  Instance      five = market(q(10), std::vector<std::pair<Rational, Rational>>(5, {q(4), q(2)}));
  std::string const path = dir.write("five.json", serialize(five));

  CHECK(invoke({"run", dir.file("missing.json")}).code == cli::kInputError);
  CHECK(invoke({"run", dir.write("bad.json", "{")}).code == cli::kInputError);
  CHECK(invoke({"run", "--mech", "nope", path}).code == cli::kInputError);
  CHECK(invoke({"run", "--mech", "da-theta", "--theta", "1.5", "--alpha", "0.6", path}).code == cli::kParameterError);
  CHECK(invoke({"run", "--alpha", "0", path}).code == cli::kParameterError);
  CHECK(invoke({"run", "--mech", "da-theta", path}).code == cli::kInputError);
  CHECK(invoke({"run", "--mech", "da-theta", "--theta", "1", path}).code == cli::kOk);
  CHECK(invoke({"run", "--mech", "da-cap", path}).code == cli::kInputError);
}

TEST_CASE("curve rows")
{
  TempDir const dir;
  std::string const single = dir.write("single.json", serialize(market(q(10), {{q(5), q(4)}})));
  Result const      r = invoke({"curve", single, "--agent", "0"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out == "0,10,const,1,0,0\n");

  std::string const loser = dir.write("loser.json", serialize(market(q(10), {{q(5), q(4)}, {q(0), q(1)}})));
  Result const      empty = invoke({"curve", loser, "--agent", "1"});
  CHECK(empty.code == cli::kOk);
  CHECK(empty.out.empty());

  CHECK(invoke({"curve", single, "--agent", "3"}).code == cli::kInputError);
  Result const summary = invoke({"curve", single, "--format", "summary"});
  CHECK(summary.out.find("\"u_max\": \"10\"") != std::string::npos);
}

TEST_CASE("audit over files and generated batches")
{
  TempDir const     dir;
  std::string const single = dir.write("single.json", serialize(market(q(10), {{q(5), q(4)}})));
  Result const      r = invoke({"audit", single});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("truthfulness,pass") != std::string::npos);

  Result const batch = invoke({"audit", "--count", "3", "--seed", "5", "--n", "5", "--format", "summary"});
  CHECK(batch.code == cli::kOk);
  CHECK(batch.out.front() == '[');

  std::string const five = dir.write("five.json", serialize(market(q(10), std::vector<std::pair<Rational, Rational>>(5, {q(4), q(2)}))));
  std::string const report = dir.file("report.csv");
  Result const      broken = invoke({"audit", five, "--alpha", "1", "--beta", "100", "--out", report});
  CHECK(broken.code == cli::kPropertyFailure);
  CHECK(slurp(report).find("approximation,fail") != std::string::npos);

  CHECK(invoke({"audit"}).code == cli::kInputError);
}

TEST_CASE("gen is deterministic")
{
  Result const a = invoke({"gen", "--seed", "4", "--n", "6", "--profile", "capped:2"});
  Result const b = invoke({"gen", "--seed", "4", "--n", "6", "--profile", "capped:2"});
  CHECK(a.code == cli::kOk);
  CHECK(a.out == b.out);
  CHECK(parse_instance(a.out).agents.size() == 6);
  CHECK(invoke({"gen", "--profile", "nope"}).code == cli::kInputError);
}

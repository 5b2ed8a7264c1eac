// Copyright 2026 The trajpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment driver: run, sweep, compare and selftest subcommands.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trajpriv/error.h"
#include "trajpriv/perturbation.h"
#include "trajpriv/scenario.h"

namespace {

using namespace trajpriv;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string mechanism;
  std::optional<int> reps;
  std::string trace;
};

ScenarioConfig ResolveConfig(const Flags& flags) {
  ScenarioConfig config = flags.config.empty() ? DefaultScenario() : LoadScenario(flags.config);
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.mechanism.empty()) config.mechanism = ParseMechanism(flags.mechanism);
  if (flags.reps) config.replications = *flags.reps;
  config.Validate();
  return config;
}

// Writes to --out, or stdout when it is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InputError("cannot open output '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int Run(const Flags& flags) {
  const Scenario scenario(ResolveConfig(flags));
  const ScenarioConfig& c = scenario.config();
  const PointResult point =
      RunReplications(scenario, c.mechanism, c.params, c.seed, c.replications);
  Output out(flags.out);
  CsvWriter csv(out.stream());
  csv.WriteHeader();
  csv.WritePoint(c.name, point, c.seed);
  if (!flags.trace.empty()) {
    RunOptions options;
    options.mechanism = c.mechanism;
    options.params = c.params;
    options.seed = ReplicationSeed(c.seed, 0);
    options.keep_trace = true;
    std::ofstream trace(flags.trace, std::ios::binary);
    if (!trace) throw InputError("cannot open trace '" + flags.trace + "'");
    WriteTrace(trace, RunTrajectory(scenario, options));
  }
  return 0;
}

int SweepCommand(const Flags& flags) {
  const Scenario scenario(ResolveConfig(flags));
  const ScenarioConfig& c = scenario.config();
  std::vector<double> eps = c.sweep_epsilons;
  std::vector<double> em = c.sweep_min_errors_km;
  if (eps.empty()) eps = {c.params.epsilon};
  if (em.empty()) em = {c.params.min_error_km};
  const std::vector<PointResult> points =
      Sweep(scenario, c.mechanism, eps, em, c.seed, c.replications);
  Output out(flags.out);
  CsvWriter csv(out.stream());
  csv.WriteHeader();
  for (const PointResult& p : points) csv.WritePoint(c.name, p, c.seed);
  return 0;
}

int Compare(const Flags& flags) {
  const Scenario scenario(ResolveConfig(flags));
  const ScenarioConfig& c = scenario.config();
  if (c.qos_targets_km.empty()) throw InputError("config lists no compare.qos_targets_km");
  // --mechanism picks the first side; the exponential mechanism is the
  // reference.
  const MechanismKind first =
      flags.mechanism.empty() ? MechanismKind::kPermuteAndFlip : c.mechanism;
  const std::vector<ComparisonResult> results =
      CompareEqualQos(scenario, first, MechanismKind::kExponential, c.qos_targets_km,
                      c.epsilon_lo, c.epsilon_hi, c.seed, c.replications);
  Output out(flags.out);
  CsvWriter csv(out.stream());
  csv.WriteHeader();
  for (const ComparisonResult& r : results) csv.WriteComparison(c.name, r, c.seed);
  for (const ComparisonResult& r : results) {
    if (!r.relative_difference) {
      std::cerr << "target " << r.target_qos_km << " km skipped: "
                << (r.first.error.empty() ? r.second.error : r.first.error) << '\n';
    }
  }
  return 0;
}

bool Check(bool ok, const std::string& name) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
  return ok;
}

int SelfTest() {
  bool ok = true;
  const GridMap map(3, 3, 1.0);
  const std::vector<CellId> pls = {CellId{0}, CellId{1}, CellId{4}};
  const double eps = 0.7;
  std::vector<PerturbationDistribution> pf, closed, exp;
  for (CellId x : pls) {
    pf.push_back(PermuteAndFlipExactPmf(
        PerturbationModel(MechanismKind::kPermuteAndFlip, x, pls, eps, map), map));
    closed.push_back(ClosedFormPmf(
        PerturbationModel(MechanismKind::kClosedForm, x, pls, eps, map), map));
    exp.push_back(ExponentialBaselinePmf(
        PerturbationModel(MechanismKind::kExponential, x, pls, eps, map), map));
  }
  ok &= Check(DpRatioCheck(pf, eps).ok, "permute-and-flip ratio bound");
  ok &= Check(DpRatioCheck(closed, eps).ok, "closed-form ratio bound");
  ok &= Check(DpRatioCheck(exp, eps).ok, "exponential ratio bound");

  double quad_gap = 0.0;
  double closed_gap = 0.0;
  for (std::size_t i = 0; i < pls.size(); ++i) {
    const PerturbationDistribution q = PermuteAndFlipPmf(
        PerturbationModel(MechanismKind::kPermuteAndFlip, pls[i], pls, eps, map), map);
    for (std::size_t o = 0; o < map.size(); ++o) {
      quad_gap = std::max(quad_gap, std::abs(q.pmf[o] - pf[i].pmf[o]));
      closed_gap = std::max(closed_gap, std::abs(closed[i].pmf[o] - exp[i].pmf[o]));
    }
  }
  ok &= Check(quad_gap <= 1e-12, "quadrature matches subset recursion");
  ok &= Check(closed_gap <= 1e-12, "closed form equals exponential mechanism");

  ScenarioConfig config = DefaultScenario();
  config.replications = 2;
  const Scenario scenario(config);
  std::string csv[2];
  double mass_error = 0.0;
  for (std::string& text : csv) {
    std::ostringstream out;
    CsvWriter writer(out);
    writer.WriteHeader();
    const PointResult point = RunReplications(scenario, config.mechanism, config.params,
                                              config.seed, config.replications);
    mass_error = std::max(mass_error, point.max_mass_error);
    writer.WritePoint(config.name, point, config.seed);
    text = out.str();
  }
  ok &= Check(csv[0] == csv[1], "seeded runs are byte-identical");
  ok &= Check(mass_error <= 1e-12, "belief vectors keep unit mass");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized trajectory privacy experiments"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Scenario JSON file (default scenario if omitted)");
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--out", flags.out, "CSV output path (stdout if omitted)");
    sub->add_option("--mechanism", flags.mechanism, "pf, closed or exp")
        ->check(CLI::IsMember({"pf", "closed", "exp"}));
    sub->add_option("--reps", flags.reps, "Replications per point")->check(CLI::PositiveNumber);
  };
  CLI::App* run = app.add_subcommand("run", "Replicated runs at the configured parameters");
  add_common(run);
  run->add_option("--trace", flags.trace, "JSON trace of the first replication");
  CLI::App* sweep = app.add_subcommand("sweep", "Epsilon x E_m cross product");
  add_common(sweep);
  CLI::App* compare = app.add_subcommand("compare", "Equal-QoS comparison against exp");
  add_common(compare);
  CLI::App* selftest = app.add_subcommand("selftest", "Quick internal consistency checks");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return Run(flags);
    if (sweep->parsed()) return SweepCommand(flags);
    if (compare->parsed()) return Compare(flags);
    if (selftest->parsed()) return SelfTest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

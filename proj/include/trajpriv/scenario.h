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

#ifndef TRAJPRIV_SCENARIO_H_
#define TRAJPRIV_SCENARIO_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trajpriv/grid.h"
#include "trajpriv/metrics.h"
#include "trajpriv/mobility.h"
#include "trajpriv/perturbation.h"
#include "trajpriv/pls.h"

namespace trajpriv {

struct TransitionSource {
  enum class Kind { kRandomWalk, kCountsFile, kMatrixFile };
  Kind kind = Kind::kRandomWalk;
  double stay_weight = 4.0;
  double step_weight = 1.0;
  double jitter = 0.0;
  std::uint64_t seed = 0;
  // Whitespace-separated matrix; used by the file kinds.
  std::string path;
};

struct PriorSpec {
  enum class Kind { kNeighborhood, kUniform, kExplicit };
  Kind kind = Kind::kNeighborhood;
  // Chebyshev radius around the first trajectory cell (kNeighborhood).
  int radius = 1;
  // One nonnegative weight per cell (kExplicit); normalised on use.
  std::vector<double> weights;
};

struct ScenarioConfig {
  std::string name = "default";
  int width = 10;
  int height = 10;
  double cell_size_km = 5.0;
  TransitionSource transitions;
  PriorSpec initial_prior;
  std::vector<CellId> trajectory;
  PrivacyParams params;
  MechanismKind mechanism = MechanismKind::kPermuteAndFlip;
  std::uint64_t seed = 2026;
  int replications = 100;
  // Sweep lists; empty lists fall back to params.
  std::vector<double> sweep_epsilons;
  std::vector<double> sweep_min_errors_km;
  // Equal-QoS comparison.
  std::vector<double> qos_targets_km;
  double epsilon_lo = 0.1;
  double epsilon_hi = 8.0;

  // Throws InputError on an inconsistent configuration.
  void Validate() const;
};

// 10 x 10 grid of 5 km cells, random walk with stay weight 4 and weight 1 to
// each edge neighbour, uniform prior over the 3 x 3 block around the first
// cell, a five-step diagonal trajectory and delta = 0.05.
ScenarioConfig DefaultScenario();

// JSON configuration; see README.md for the schema. Keys that are absent
// keep their DefaultScenario() values. Relative file paths resolve against
// `base_dir`.
ScenarioConfig ParseScenario(const std::string& json_text,
                             const std::string& base_dir = ".");
ScenarioConfig LoadScenario(const std::string& path);

// Everything a run needs besides the per-run parameters.
class Scenario {
 public:
  explicit Scenario(ScenarioConfig config);
  const ScenarioConfig& config() const { return config_; }
  const GridMap& map() const { return search_.map(); }
  const TransitionMatrix& transitions() const { return transitions_; }
  const BeliefVector& initial_prior() const { return initial_prior_; }
  const PlsSearch& search() const { return search_; }

 private:
  ScenarioConfig config_;
  PlsSearch search_;
  TransitionMatrix transitions_;
  BeliefVector initial_prior_;
};

// Inputs to the metrics of one step, enough to recompute p and q.
struct StepTrace {
  int time = 0;
  CellId true_cell;
  CellId protected_cell;
  CellId observed;
  // Prior restricted to the delta-location set.
  std::vector<double> metric_prior;
  std::vector<CellId> members;
  // Release pmf of each member, aligned with `members`.
  std::vector<std::vector<double>> pmfs;
  // Attacker guess for every possible observation.
  std::vector<CellId> attack;
  std::vector<double> posterior;
};

struct RunRecord {
  std::uint64_t seed = 0;
  TrajectoryMetrics metrics;
  // Largest |mass - 1| over every belief vector formed in the run.
  double max_mass_error = 0.0;
  std::vector<StepTrace> trace;
};

struct RunOptions {
  MechanismKind mechanism = MechanismKind::kPermuteAndFlip;
  PrivacyParams params;
  std::uint64_t seed = 0;
  bool keep_trace = false;
};

RunRecord RunTrajectory(const Scenario& scenario, const RunOptions& options);

// Seed of replication `rep`: DeriveSeed(master, rep). Every sweep point and
// mechanism reuses the same replication seeds.
std::uint64_t ReplicationSeed(std::uint64_t master, int rep);

struct PointResult {
  MechanismKind mechanism = MechanismKind::kPermuteAndFlip;
  PrivacyParams params;
  std::vector<RunRecord> runs;
  SampleSummary privacy;
  SampleSummary qos_loss;
  SampleSummary diameter;
  SampleSummary exper;
  double max_mass_error = 0.0;
};

PointResult RunReplications(const Scenario& scenario, MechanismKind mechanism,
                            const PrivacyParams& params, std::uint64_t master_seed,
                            int replications);

// Cross product of `epsilons` and `min_errors_km`, ordered by (epsilon, E_m).
std::vector<PointResult> Sweep(const Scenario& scenario, MechanismKind mechanism,
                               std::vector<double> epsilons,
                               std::vector<double> min_errors_km,
                               std::uint64_t master_seed, int replications);

struct SolvedSide {
  MechanismKind mechanism = MechanismKind::kPermuteAndFlip;
  std::optional<EpsilonSolution> solution;
  std::optional<PointResult> point;
  // Set when the solve failed; the side is then skipped.
  std::string error;
};

struct ComparisonResult {
  double target_qos_km = 0.0;
  SolvedSide first;
  SolvedSide second;
  // (p_first - p_second) / p_second, when both sides solved.
  std::optional<double> relative_difference;
};

// Solves epsilon separately for each mechanism so that the mean QoS loss over
// the replications hits each target, then evaluates privacy at that epsilon.
std::vector<ComparisonResult> CompareEqualQos(
    const Scenario& scenario, MechanismKind first, MechanismKind second,
    const std::vector<double>& targets_km, double epsilon_lo, double epsilon_hi,
    std::uint64_t master_seed, int replications);

// CSV output with 9 significant digits.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out);
  void WriteHeader();
  // One row per step, one "avg" row per run and a "mean" row for the point.
  void WritePoint(const std::string& scenario, const PointResult& point,
                  std::uint64_t master_seed);
  void WriteComparison(const std::string& scenario, const ComparisonResult& result,
                       std::uint64_t master_seed);

 private:
  void Row(const std::string& scenario, MechanismKind mechanism,
           const PrivacyParams& params, std::uint64_t seed, const std::string& step,
           double p, double q, double diameter, double exper,
           const std::string& flags);
  std::ostream& out_;
};

inline constexpr const char* kCsvHeader =
    "scenario,mechanism,epsilon,e_m,delta,seed,step,p_km,q_km,diameter_km,"
    "exper_km,flags";

// "%.9g".
std::string FormatNumber(double value);

// JSON array of the step traces of `record`.
void WriteTrace(std::ostream& out, const RunRecord& record);

}  // namespace trajpriv

#endif  // TRAJPRIV_SCENARIO_H_

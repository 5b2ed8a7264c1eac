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

#include "trajpriv/scenario.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "trajpriv/adversary.h"
#include "trajpriv/error.h"
#include "trajpriv/random.h"

namespace trajpriv {
namespace {

using Json = nlohmann::json;

TransitionMatrix BuildTransitions(const ScenarioConfig& config, const GridMap& map) {
  const TransitionSource& src = config.transitions;
  switch (src.kind) {
    case TransitionSource::Kind::kRandomWalk:
      return NormalizeCounts(RandomWalkCounts(map, src.stay_weight, src.step_weight,
                                              src.jitter, src.seed));
    case TransitionSource::Kind::kCountsFile: {
      TransitionCounts counts = ReadCountsFile(src.path);
      if (counts.size() != map.size()) {
        throw InputError("transition counts do not match the grid size");
      }
      return NormalizeCounts(counts);
    }
    case TransitionSource::Kind::kMatrixFile: {
      TransitionCounts raw = ReadCountsFile(src.path);
      if (raw.size() != map.size()) {
        throw InputError("transition matrix does not match the grid size");
      }
      std::vector<double> entries;
      entries.reserve(raw.size() * raw.size());
      for (std::size_t i = 0; i < raw.size(); ++i) {
        for (double v : raw.Row(i)) entries.push_back(v);
      }
      return TransitionMatrix(raw.size(), std::move(entries));
    }
  }
  throw InputError("unknown transition source");
}

BeliefVector BuildInitialPrior(const ScenarioConfig& config, const GridMap& map) {
  const PriorSpec& spec = config.initial_prior;
  switch (spec.kind) {
    case PriorSpec::Kind::kNeighborhood: {
      const CellId center = config.trajectory.front();
      std::vector<CellId> support;
      for (int row = map.Row(center) - spec.radius; row <= map.Row(center) + spec.radius; ++row) {
        for (int col = map.Col(center) - spec.radius; col <= map.Col(center) + spec.radius;
             ++col) {
          if (col >= 0 && col < map.width() && row >= 0 && row < map.height()) {
            support.push_back(map.CellAt(col, row));
          }
        }
      }
      std::sort(support.begin(), support.end());
      return BeliefVector::UniformOver(map.size(), support, BeliefRole::kPrior, 1);
    }
    case PriorSpec::Kind::kUniform:
      return BeliefVector::UniformOver(map.size(), map.Cells(), BeliefRole::kPrior, 1);
    case PriorSpec::Kind::kExplicit:
      if (spec.weights.size() != map.size()) {
        throw InputError("explicit prior needs one weight per cell");
      }
      return BeliefVector::Normalized(spec.weights, BeliefRole::kPrior, 1);
  }
  throw InputError("unknown prior kind");
}

double MassError(const BeliefVector& b) { return std::abs(b.Mass() - 1.0); }

std::string ResolvePath(const std::string& path, const std::string& base_dir) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

template <typename T>
void Read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void ScenarioConfig::Validate() const {
  if (width <= 0 || height <= 0 || !(cell_size_km > 0.0)) {
    throw InputError("grid dimensions must be positive");
  }
  if (trajectory.empty()) throw InputError("trajectory needs at least one cell");
  const std::size_t n = static_cast<std::size_t>(width) * height;
  for (CellId c : trajectory) {
    if (c.index >= n) throw InputError("trajectory cell outside the grid");
  }
  if (replications < 1) throw InputError("replications must be at least 1");
  if (initial_prior.radius < 0) throw InputError("prior radius must be nonnegative");
  params.Validate();
  for (double e : sweep_epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) throw InputError("sweep epsilon must be positive");
  }
  for (double m : sweep_min_errors_km) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw InputError("sweep E_m must be nonnegative");
  }
  if (!(epsilon_lo > 0.0) || !(epsilon_hi > epsilon_lo)) {
    throw InputError("comparison bracket must satisfy 0 < epsilon_lo < epsilon_hi");
  }
}

ScenarioConfig DefaultScenario() {
  ScenarioConfig c;
  c.trajectory = {CellId{33}, CellId{34}, CellId{44}, CellId{45}, CellId{55}};
  c.params.epsilon = 1.0;
  c.params.min_error_km = 1.0;
  c.params.delta = 0.05;
  c.sweep_epsilons = {0.1, 0.5, 1.0, 1.5, 8.0};
  c.sweep_min_errors_km = {1.0, 2.0, 3.0};
  // q(eps) falls until the growing sets take over near eps = 0.8; the
  // comparison stays on that first branch.
  c.qos_targets_km = {16.0, 17.0, 18.0, 19.0, 20.0};
  c.epsilon_lo = 0.05;
  c.epsilon_hi = 0.75;
  return c;
}

ScenarioConfig ParseScenario(const std::string& json_text, const std::string& base_dir) {
  ScenarioConfig c = DefaultScenario();
  try {
    const Json j = Json::parse(json_text);
    Read(j, "name", c.name);
    if (j.contains("grid")) {
      const Json& g = j.at("grid");
      Read(g, "width", c.width);
      Read(g, "height", c.height);
      Read(g, "cell_size_km", c.cell_size_km);
    }
    if (j.contains("transitions")) {
      const Json& t = j.at("transitions");
      const std::string type = t.value("type", std::string("random_walk"));
      if (type == "random_walk") {
        c.transitions.kind = TransitionSource::Kind::kRandomWalk;
      } else if (type == "counts_file") {
        c.transitions.kind = TransitionSource::Kind::kCountsFile;
      } else if (type == "matrix_file") {
        c.transitions.kind = TransitionSource::Kind::kMatrixFile;
      } else {
        throw InputError("unknown transitions.type '" + type + "'");
      }
      Read(t, "stay_weight", c.transitions.stay_weight);
      Read(t, "step_weight", c.transitions.step_weight);
      Read(t, "jitter", c.transitions.jitter);
      Read(t, "seed", c.transitions.seed);
      if (t.contains("path")) {
        c.transitions.path = ResolvePath(t.at("path").get<std::string>(), base_dir);
      } else if (c.transitions.kind != TransitionSource::Kind::kRandomWalk) {
        throw InputError("file transitions need a path");
      }
    }
    if (j.contains("initial_prior")) {
      const Json& p = j.at("initial_prior");
      const std::string type = p.value("type", std::string("neighborhood"));
      if (type == "neighborhood") {
        c.initial_prior.kind = PriorSpec::Kind::kNeighborhood;
      } else if (type == "uniform") {
        c.initial_prior.kind = PriorSpec::Kind::kUniform;
      } else if (type == "explicit") {
        c.initial_prior.kind = PriorSpec::Kind::kExplicit;
      } else {
        throw InputError("unknown initial_prior.type '" + type + "'");
      }
      Read(p, "radius", c.initial_prior.radius);
      Read(p, "weights", c.initial_prior.weights);
    }
    if (j.contains("trajectory")) {
      c.trajectory.clear();
      for (std::size_t id : j.at("trajectory").get<std::vector<std::size_t>>()) {
        c.trajectory.push_back(CellId{id});
      }
    }
    Read(j, "epsilon", c.params.epsilon);
    Read(j, "min_error_km", c.params.min_error_km);
    Read(j, "delta", c.params.delta);
    if (j.contains("mechanism")) c.mechanism = ParseMechanism(j.at("mechanism").get<std::string>());
    Read(j, "seed", c.seed);
    Read(j, "replications", c.replications);
    if (j.contains("sweep")) {
      Read(j.at("sweep"), "epsilons", c.sweep_epsilons);
      Read(j.at("sweep"), "min_errors_km", c.sweep_min_errors_km);
    }
    if (j.contains("compare")) {
      Read(j.at("compare"), "qos_targets_km", c.qos_targets_km);
      Read(j.at("compare"), "epsilon_lo", c.epsilon_lo);
      Read(j.at("compare"), "epsilon_hi", c.epsilon_hi);
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("bad scenario config: ") + e.what());
  }
  c.Validate();
  return c;
}

ScenarioConfig LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  return ParseScenario(buffer.str(), parent.empty() ? "." : parent.string());
}

Scenario::Scenario(ScenarioConfig config)
    : config_((config.Validate(), std::move(config))),
      search_(GridMap(config_.width, config_.height, config_.cell_size_km)),
      transitions_(BuildTransitions(config_, search_.map())),
      initial_prior_(BuildInitialPrior(config_, search_.map())) {}

RunRecord RunTrajectory(const Scenario& scenario, const RunOptions& options) {
  options.params.Validate();
  const GridMap& map = scenario.map();
  RandomStream rng(options.seed);
  RunRecord record;
  record.seed = options.seed;

  std::vector<StepMetrics> steps;
  BeliefVector prior = scenario.initial_prior();
  const std::vector<CellId>& path = scenario.config().trajectory;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const int t = static_cast<int>(k) + 1;
    if (k > 0) {
      // prior currently holds the previous posterior.
      prior = PropagatePrior(prior, scenario.transitions());
    }
    record.max_mass_error = std::max(record.max_mass_error, MassError(prior));

    const DeltaLocationSet candidates = BuildDeltaLocationSet(prior, options.params.delta);
    const BeliefVector local = RestrictToSet(prior, candidates);
    record.max_mass_error = std::max(record.max_mass_error, MassError(local));
    const CellId truth = path[k];
    const CellId x = Surrogate(truth, candidates, map);

    // The attacker knows the pipeline, so it models the release of every
    // plausible cell.
    const std::vector<ProtectionLocationSet> sets =
        scenario.search().SearchAll(candidates, local, options.params);
    MechanismFamily family(map.size());
    std::size_t own = 0;
    for (std::size_t i = 0; i < candidates.members.size(); ++i) {
      const CellId m = candidates.members[i];
      const PerturbationModel model(options.mechanism, m, sets[i].members,
                                    options.params.epsilon, map);
      family.Set(m, MechanismPmf(model, map));
      if (m == x) own = i;
    }
    const PerturbationModel released(options.mechanism, x, sets[own].members,
                                     options.params.epsilon, map);
    const CellId observed = SampleRelease(released, family.Get(x), map, rng);

    const BeliefVector posterior = Posterior(local, family, observed);
    record.max_mass_error = std::max(record.max_mass_error, MassError(posterior));
    const AttackStrategy attack = OptimalAttack(local, family, map);

    StepMetrics step;
    step.time = t;
    step.privacy_km = PrivacyMetric(local, family, attack, map);
    step.qos_loss_km = QosLoss(local, family, map);
    step.diameter_km = sets[own].diameter_km;
    step.exper_km = ExpectedInferenceError(posterior, map);
    step.surrogate_used = !(x == truth);
    step.fallback_pls = sets[own].fallback;
    step.degenerate = released.degenerate();
    steps.push_back(step);

    if (options.keep_trace) {
      StepTrace trace;
      trace.time = t;
      trace.true_cell = truth;
      trace.protected_cell = x;
      trace.observed = observed;
      trace.metric_prior.assign(local.probabilities().begin(), local.probabilities().end());
      trace.members = candidates.members;
      for (CellId m : candidates.members) trace.pmfs.push_back(family.Get(m).pmf);
      for (std::size_t o = 0; o < map.size(); ++o) {
        trace.attack.push_back(attack.Infer(CellId{o}));
      }
      trace.posterior.assign(posterior.probabilities().begin(),
                             posterior.probabilities().end());
      record.trace.push_back(std::move(trace));
    }
    prior = posterior;
  }
  record.metrics = SummarizeTrajectory(std::move(steps));
  return record;
}

std::uint64_t ReplicationSeed(std::uint64_t master, int rep) {
  return DeriveSeed(master, static_cast<std::uint64_t>(rep));
}

PointResult RunReplications(const Scenario& scenario, MechanismKind mechanism,
                            const PrivacyParams& params, std::uint64_t master_seed,
                            int replications) {
  if (replications < 1) throw InputError("replications must be at least 1");
  PointResult point;
  point.mechanism = mechanism;
  point.params = params;
  std::vector<double> p, q, d, e;
  for (int rep = 0; rep < replications; ++rep) {
    RunOptions options;
    options.mechanism = mechanism;
    options.params = params;
    options.seed = ReplicationSeed(master_seed, rep);
    RunRecord run = RunTrajectory(scenario, options);
    p.push_back(run.metrics.mean_privacy_km);
    q.push_back(run.metrics.mean_qos_loss_km);
    d.push_back(run.metrics.mean_diameter_km);
    e.push_back(run.metrics.mean_exper_km);
    point.max_mass_error = std::max(point.max_mass_error, run.max_mass_error);
    point.runs.push_back(std::move(run));
  }
  point.privacy = Summarize(p);
  point.qos_loss = Summarize(q);
  point.diameter = Summarize(d);
  point.exper = Summarize(e);
  return point;
}

std::vector<PointResult> Sweep(const Scenario& scenario, MechanismKind mechanism,
                               std::vector<double> epsilons,
                               std::vector<double> min_errors_km,
                               std::uint64_t master_seed, int replications) {
  if (epsilons.empty() || min_errors_km.empty()) {
    throw InputError("sweep lists must be nonempty");
  }
  std::sort(epsilons.begin(), epsilons.end());
  std::sort(min_errors_km.begin(), min_errors_km.end());
  std::vector<PointResult> out;
  for (double eps : epsilons) {
    for (double em : min_errors_km) {
      PrivacyParams params = scenario.config().params;
      params.epsilon = eps;
      params.min_error_km = em;
      out.push_back(RunReplications(scenario, mechanism, params, master_seed, replications));
    }
  }
  return out;
}

std::vector<ComparisonResult> CompareEqualQos(
    const Scenario& scenario, MechanismKind first, MechanismKind second,
    const std::vector<double>& targets_km, double epsilon_lo, double epsilon_hi,
    std::uint64_t master_seed, int replications) {
  // Points are memoised per mechanism and epsilon; the solver revisits the
  // probe grid for every target.
  std::map<std::pair<int, double>, PointResult> cache;
  auto evaluate = [&](MechanismKind kind, double eps) -> const PointResult& {
    const auto key = std::make_pair(static_cast<int>(kind), eps);
    auto it = cache.find(key);
    if (it == cache.end()) {
      PrivacyParams params = scenario.config().params;
      params.epsilon = eps;
      it = cache.emplace(key, RunReplications(scenario, kind, params, master_seed,
                                              replications))
               .first;
    }
    return it->second;
  };
  auto solve = [&](MechanismKind kind, double target) {
    SolvedSide side;
    side.mechanism = kind;
    try {
      const EpsilonSolution solution = SolveEpsilonForQos(
          target, [&](double eps) { return evaluate(kind, eps).qos_loss.mean; },
          epsilon_lo, epsilon_hi);
      side.solution = solution;
      side.point = evaluate(kind, solution.epsilon);
    } catch (const BracketError& e) {
      side.error = std::string("bracket: ") + e.what();
    } catch (const AmbiguityError& e) {
      side.error = std::string("ambiguous: ") + e.what();
    }
    return side;
  };

  std::vector<ComparisonResult> out;
  for (double target : targets_km) {
    ComparisonResult result;
    result.target_qos_km = target;
    result.first = solve(first, target);
    result.second = solve(second, target);
    if (result.first.point && result.second.point) {
      const double a = result.first.point->privacy.mean;
      const double b = result.second.point->privacy.mean;
      result.relative_difference = b != 0.0 ? (a - b) / b : 0.0;
    }
    out.push_back(std::move(result));
  }
  return out;
}

std::string FormatNumber(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

CsvWriter::CsvWriter(std::ostream& out) : out_(out) {}

void CsvWriter::WriteHeader() { out_ << kCsvHeader << '\n'; }

void CsvWriter::Row(const std::string& scenario, MechanismKind mechanism,
                    const PrivacyParams& params, std::uint64_t seed,
                    const std::string& step, double p, double q, double diameter,
                    double exper, const std::string& flags) {
  out_ << scenario << ',' << MechanismName(mechanism) << ','
       << FormatNumber(params.epsilon) << ',' << FormatNumber(params.min_error_km) << ','
       << FormatNumber(params.delta) << ',' << seed << ',' << step << ','
       << FormatNumber(p) << ',' << FormatNumber(q) << ',' << FormatNumber(diameter)
       << ',' << FormatNumber(exper) << ',' << flags << '\n';
}

void CsvWriter::WritePoint(const std::string& scenario, const PointResult& point,
                           std::uint64_t master_seed) {
  for (const RunRecord& run : point.runs) {
    for (const StepMetrics& s : run.metrics.steps) {
      std::string flags;
      auto add = [&flags](const char* f) {
        if (!flags.empty()) flags += ';';
        flags += f;
      };
      if (s.surrogate_used) add("surrogate");
      if (s.fallback_pls) add("fallback_pls");
      if (s.degenerate) add("degenerate");
      Row(scenario, point.mechanism, point.params, run.seed, std::to_string(s.time),
          s.privacy_km, s.qos_loss_km, s.diameter_km, s.exper_km, flags);
    }
    Row(scenario, point.mechanism, point.params, run.seed, "avg",
        run.metrics.mean_privacy_km, run.metrics.mean_qos_loss_km,
        run.metrics.mean_diameter_km, run.metrics.mean_exper_km, "");
  }
  const std::string flags = "reps=" + std::to_string(point.runs.size()) +
                            ";se_p=" + FormatNumber(point.privacy.standard_error) +
                            ";se_q=" + FormatNumber(point.qos_loss.standard_error);
  Row(scenario, point.mechanism, point.params, master_seed, "mean", point.privacy.mean,
      point.qos_loss.mean, point.diameter.mean, point.exper.mean, flags);
}

void CsvWriter::WriteComparison(const std::string& scenario,
                                const ComparisonResult& result,
                                std::uint64_t master_seed) {
  for (const SolvedSide* side : {&result.first, &result.second}) {
    std::string flags = "target_q=" + FormatNumber(result.target_qos_km);
    if (!side->point) {
      std::string error = side->error;
      std::replace(error.begin(), error.end(), ',', ' ');
      std::replace(error.begin(), error.end(), '\n', ' ');
      PrivacyParams params = {};
      params.epsilon = std::nan("");
      params.min_error_km = std::nan("");
      params.delta = std::nan("");
      Row(scenario, side->mechanism, params, master_seed, "compare", std::nan(""),
          std::nan(""), std::nan(""), std::nan(""), flags + ";skipped=" + error);
      continue;
    }
    const PointResult& point = *side->point;
    flags += ";reps=" + std::to_string(point.runs.size()) +
             ";se_p=" + FormatNumber(point.privacy.standard_error) +
             ";se_q=" + FormatNumber(point.qos_loss.standard_error);
    if (result.relative_difference) {
      flags += ";rel_diff=" + FormatNumber(*result.relative_difference);
    }
    Row(scenario, side->mechanism, point.params, master_seed, "compare",
        point.privacy.mean, point.qos_loss.mean, point.diameter.mean, point.exper.mean,
        flags);
  }
}

void WriteTrace(std::ostream& out, const RunRecord& record) {
  Json steps = Json::array();
  for (const StepTrace& t : record.trace) {
    Json s;
    s["time"] = t.time;
    s["true_cell"] = t.true_cell.index;
    s["protected_cell"] = t.protected_cell.index;
    s["observed"] = t.observed.index;
    s["metric_prior"] = t.metric_prior;
    Json members = Json::array();
    for (CellId m : t.members) members.push_back(m.index);
    s["members"] = members;
    s["pmfs"] = t.pmfs;
    Json attack = Json::array();
    for (CellId a : t.attack) attack.push_back(a.index);
    s["attack"] = attack;
    s["posterior"] = t.posterior;
    steps.push_back(std::move(s));
  }
  Json root;
  root["seed"] = record.seed;
  root["steps"] = std::move(steps);
  out << root.dump() << '\n';
}

}  // namespace trajpriv

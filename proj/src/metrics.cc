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

#include "trajpriv/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "trajpriv/error.h"

namespace trajpriv {
namespace {

void CheckShapes(const BeliefVector& prior, const MechanismFamily& family,
                 const GridMap& map) {
  if (prior.size() != map.size() || family.size() != map.size()) {
    throw InputError("metric inputs do not match the map");
  }
}

}  // namespace

double PrivacyMetric(const BeliefVector& prior, const MechanismFamily& family,
                     const AttackStrategy& strategy, const GridMap& map) {
  CheckShapes(prior, family, map);
  if (strategy.size() != map.size()) throw InputError("strategy does not match the map");
  double total = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double p = prior.probabilities()[i];
    if (p <= 0.0) continue;
    const CellId x{i};
    const auto& pmf = family.Get(x).pmf;
    double inner = 0.0;
    for (std::size_t o = 0; o < pmf.size(); ++o) {
      if (pmf[o] <= 0.0) continue;
      inner += pmf[o] * map.Distance(x, strategy.Infer(CellId{o}));
    }
    total += p * inner;
  }
  return total;
}

double QosLoss(const BeliefVector& prior, const MechanismFamily& family,
               const GridMap& map) {
  CheckShapes(prior, family, map);
  double total = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double p = prior.probabilities()[i];
    if (p <= 0.0) continue;
    const CellId x{i};
    const auto& pmf = family.Get(x).pmf;
    double inner = 0.0;
    for (std::size_t o = 0; o < pmf.size(); ++o) {
      if (pmf[o] <= 0.0) continue;
      inner += pmf[o] * map.Distance(x, CellId{o});
    }
    total += p * inner;
  }
  return total;
}

TrajectoryMetrics SummarizeTrajectory(std::vector<StepMetrics> steps) {
  if (steps.empty()) throw InputError("trajectory has no steps");
  TrajectoryMetrics out;
  for (const StepMetrics& s : steps) {
    out.mean_privacy_km += s.privacy_km;
    out.mean_qos_loss_km += s.qos_loss_km;
    out.mean_diameter_km += s.diameter_km;
    out.mean_exper_km += s.exper_km;
  }
  const double w = static_cast<double>(steps.size());
  out.mean_privacy_km /= w;
  out.mean_qos_loss_km /= w;
  out.mean_diameter_km /= w;
  out.mean_exper_km /= w;
  out.steps = std::move(steps);
  return out;
}

SampleSummary Summarize(std::span<const double> samples) {
  SampleSummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  for (double v : samples) s.mean += v;
  s.mean /= static_cast<double>(samples.size());
  if (samples.size() < 2) return s;
  double ss = 0.0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  const double variance = ss / static_cast<double>(samples.size() - 1);
  s.standard_error = std::sqrt(variance / static_cast<double>(samples.size()));
  return s;
}

EpsilonSolution SolveEpsilonForQos(double target_km,
                                   const std::function<double(double)>& qos_at,
                                   double lo, double hi,
                                   const EpsilonSolveOptions& options) {
  if (!(lo < hi) || !(lo > 0.0)) throw InputError("bracket must satisfy 0 < lo < hi");
  if (!(target_km > 0.0)) throw InputError("target QoS loss must be positive");
  const double tolerance = options.relative_tolerance * target_km;

  // Probe the endpoints and evenly spaced interior points.
  const int probes = options.monotonicity_samples + 2;
  std::vector<double> eps(probes);
  std::vector<double> q(probes);
  for (int k = 0; k < probes; ++k) {
    eps[k] = k == probes - 1 ? hi : lo + (hi - lo) * k / (probes - 1);
    q[k] = qos_at(eps[k]);
  }
  const double q_min = *std::min_element(q.begin(), q.end());
  const double q_max = *std::max_element(q.begin(), q.end());
  if (target_km < std::min(q.front(), q.back()) - tolerance ||
      target_km > std::max(q.front(), q.back()) + tolerance) {
    std::ostringstream msg;
    msg << "target " << target_km << " km is not bracketed: q(" << lo
        << ") = " << q.front() << ", q(" << hi << ") = " << q.back()
        << " (probed range " << q_min << " .. " << q_max << ")";
    throw BracketError(msg.str());
  }

  const double direction = q.back() >= q.front() ? 1.0 : -1.0;
  bool monotone = true;
  for (int k = 0; k + 1 < probes; ++k) {
    if (direction * (q[k + 1] - q[k]) < -tolerance) monotone = false;
  }
  std::vector<double> crossings;
  for (int k = 0; k + 1 < probes; ++k) {
    const double a = q[k] - target_km;
    const double b = q[k + 1] - target_km;
    if ((a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0)) {
      crossings.push_back(0.5 * (eps[k] + eps[k + 1]));
    }
  }
  if (!monotone) {
    std::ostringstream msg;
    msg << "q(eps) is not monotone on [" << lo << ", " << hi << "]; target "
        << target_km << " km crossed near eps =";
    for (double c : crossings) msg << ' ' << c;
    throw AmbiguityError(msg.str(), std::move(crossings));
  }

  EpsilonSolution best;
  double best_gap = std::numeric_limits<double>::infinity();
  auto consider = [&](double e, double value) {
    const double gap = std::abs(value - target_km);
    if (gap < best_gap) {
      best_gap = gap;
      best.epsilon = e;
      best.achieved_qos_km = value;
    }
  };
  for (int k = 0; k < probes; ++k) consider(eps[k], q[k]);
  if (best_gap <= tolerance) {
    best.converged = true;
    return best;
  }

  // Bisect inside the first probed sub-interval that contains the target.
  int k = 0;
  while (k + 2 < probes && direction * (q[k + 1] - target_km) < 0.0) ++k;
  double left = eps[k];
  double right = eps[k + 1];
  for (int it = 1; it <= options.max_iterations; ++it) {
    const double mid = 0.5 * (left + right);
    const double value = qos_at(mid);
    best.iterations = it;
    consider(mid, value);
    if (std::abs(value - target_km) <= tolerance) {
      best.epsilon = mid;
      best.achieved_qos_km = value;
      best.converged = true;
      return best;
    }
    if (direction * (value - target_km) < 0.0) {
      left = mid;
    } else {
      right = mid;
    }
  }
  return best;
}

}  // namespace trajpriv

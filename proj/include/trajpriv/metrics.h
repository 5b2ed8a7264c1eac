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

#ifndef TRAJPRIV_METRICS_H_
#define TRAJPRIV_METRICS_H_

#include <functional>
#include <span>
#include <vector>

#include "trajpriv/adversary.h"
#include "trajpriv/grid.h"
#include "trajpriv/mobility.h"
#include "trajpriv/perturbation.h"

namespace trajpriv {

struct StepMetrics {
  // 1-based time index on the trajectory.
  int time = 0;
  // Expected distance between the true cell and the attacker's inference.
  double privacy_km = 0.0;
  // Expected distance between the true and the released cell.
  double qos_loss_km = 0.0;
  // Diameter of the protection location set used for the (surrogate) true
  // cell.
  double diameter_km = 0.0;
  // ExpEr of the release actually observed at this step.
  double exper_km = 0.0;
  bool surrogate_used = false;
  bool fallback_pls = false;
  // The protected cell's set was a singleton and it was released unperturbed.
  bool degenerate = false;
};

struct TrajectoryMetrics {
  std::vector<StepMetrics> steps;
  double mean_privacy_km = 0.0;
  double mean_qos_loss_km = 0.0;
  double mean_diameter_km = 0.0;
  double mean_exper_km = 0.0;
};

// p = sum_{x, x'} Pr(x) f(x'|x) d(x, h(x')), with the deterministic attack h.
double PrivacyMetric(const BeliefVector& prior, const MechanismFamily& family,
                     const AttackStrategy& strategy, const GridMap& map);

// q = sum_{x, x'} Pr(x) f(x'|x) d(x, x').
double QosLoss(const BeliefVector& prior, const MechanismFamily& family,
               const GridMap& map);

// Arithmetic means over the steps. Throws InputError on an empty trajectory.
TrajectoryMetrics SummarizeTrajectory(std::vector<StepMetrics> steps);

struct SampleSummary {
  double mean = 0.0;
  // Standard deviation / sqrt(count); 0 for fewer than two samples.
  double standard_error = 0.0;
  std::size_t count = 0;
};

SampleSummary Summarize(std::span<const double> samples);

struct EpsilonSolveOptions {
  // Stop once |q(eps) - target| <= relative_tolerance * target.
  double relative_tolerance = 0.01;
  int max_iterations = 60;
  // Interior points probed for monotonicity before bisecting.
  int monotonicity_samples = 8;
};

struct EpsilonSolution {
  double epsilon = 0.0;
  double achieved_qos_km = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Finds eps in [lo, hi] with qos_at(eps) close to `target_km` by bisection.
//
// Throws BracketError if the endpoint values do not bracket the target and
// AmbiguityError if the probed values are not monotone within the tolerance,
// listing every probed sub-interval where the target is crossed.
EpsilonSolution SolveEpsilonForQos(double target_km,
                                   const std::function<double(double)>& qos_at,
                                   double lo, double hi,
                                   const EpsilonSolveOptions& options = {});

}  // namespace trajpriv

#endif  // TRAJPRIV_METRICS_H_

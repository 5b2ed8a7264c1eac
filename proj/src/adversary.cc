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

#include "trajpriv/adversary.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "trajpriv/error.h"

namespace trajpriv {
namespace {

// Relative slack under which two expected errors count as tied, so that
// summation-order noise cannot override the lowest-CellId rule.
constexpr double kTieTolerance = 1e-12;

}  // namespace

Guess BestGuess(std::span<const double> weights, const GridMap& map) {
  if (weights.size() != map.size()) {
    throw InputError("weight vector does not match the map");
  }
  std::vector<CellId> support;
  int min_col = map.width(), max_col = -1;
  int min_row = map.height(), max_row = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) continue;
    const CellId c{i};
    support.push_back(c);
    min_col = std::min(min_col, map.Col(c));
    max_col = std::max(max_col, map.Col(c));
    min_row = std::min(min_row, map.Row(c));
    max_row = std::max(max_row, map.Row(c));
  }
  if (support.empty()) return Guess{CellId{0}, 0.0};

  // Clamping a guess into the bounding box of the support strictly shortens
  // its distance to every support cell, so the minimiser lies in the box.
  // Row-major traversal visits the box in ascending CellId order.
  Guess best{CellId{0}, std::numeric_limits<double>::infinity()};
  for (int row = min_row; row <= max_row; ++row) {
    for (int col = min_col; col <= max_col; ++col) {
      const CellId g = map.CellAt(col, row);
      double cost = 0.0;
      for (CellId x : support) cost += weights[x.index] * map.Distance(g, x);
      if (std::isinf(best.expected_error_km) ||
          cost < best.expected_error_km -
                     kTieTolerance * std::max(1.0, best.expected_error_km)) {
        best = Guess{g, cost};
      }
    }
  }
  return best;
}

BeliefVector Posterior(const BeliefVector& prior, const MechanismFamily& family,
                       CellId observed) {
  if (family.size() != prior.size()) {
    throw InputError("mechanism family and prior dimensions differ");
  }
  if (observed.index >= prior.size()) throw InputError("observed cell outside map");
  std::vector<double> joint(prior.size(), 0.0);
  double evidence = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const double p = prior.probabilities()[i];
    if (p <= 0.0) continue;
    joint[i] = p * family.Likelihood(observed, CellId{i});
    evidence += joint[i];
  }
  if (!(evidence > 0.0)) {
    throw InconsistentObservationError(
        "observation " + std::to_string(observed.index) +
        " has zero probability under the attacker's model");
  }
  for (double& v : joint) v /= evidence;
  return BeliefVector(std::move(joint), BeliefRole::kPosterior, prior.time());
}

CellId OptimalInference(const BeliefVector& posterior, const GridMap& map) {
  return BestGuess(posterior.probabilities(), map).cell;
}

double ExpectedInferenceError(const BeliefVector& posterior, const GridMap& map) {
  return BestGuess(posterior.probabilities(), map).expected_error_km;
}

double PriorWeightedError(std::span<const CellId> pls, const BeliefVector& prior,
                          const GridMap& map) {
  if (pls.empty()) throw InputError("protection location set is empty");
  std::vector<double> w(prior.size(), 0.0);
  double mass = 0.0;
  for (CellId c : pls) {
    map.Validate(c);
    if (w[c.index] > 0.0) continue;  // duplicate member
    w[c.index] = prior[c];
    mass += prior[c];
  }
  if (!(mass > 0.0)) {
    throw InputError("protection location set carries no prior mass");
  }
  for (double& v : w) v /= mass;
  return BestGuess(w, map).expected_error_km;
}

AttackStrategy OptimalAttack(const BeliefVector& prior, const MechanismFamily& family,
                             const GridMap& map) {
  if (family.size() != map.size() || prior.size() != map.size()) {
    throw InputError("attack inputs do not match the map");
  }
  const CellId fallback = BestGuess(prior.probabilities(), map).cell;
  std::vector<CellId> guesses(map.size(), fallback);
  std::vector<double> joint(map.size());
  for (CellId o : map.Cells()) {
    double evidence = 0.0;
    for (std::size_t i = 0; i < map.size(); ++i) {
      const double p = prior.probabilities()[i];
      joint[i] = p > 0.0 ? p * family.Likelihood(o, CellId{i}) : 0.0;
      evidence += joint[i];
    }
    if (!(evidence > 0.0)) continue;
    for (double& v : joint) v /= evidence;
    guesses[o.index] = BestGuess(joint, map).cell;
  }
  return AttackStrategy(std::move(guesses));
}

}  // namespace trajpriv

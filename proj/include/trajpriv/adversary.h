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

#ifndef TRAJPRIV_ADVERSARY_H_
#define TRAJPRIV_ADVERSARY_H_

#include <span>
#include <vector>

#include "trajpriv/grid.h"
#include "trajpriv/mobility.h"
#include "trajpriv/perturbation.h"

namespace trajpriv {

// A location guess together with its expected distance to the truth.
struct Guess {
  CellId cell;
  double expected_error_km = 0.0;
};

// argmin over every map cell g of sum_x weights[x] * d(g, x), ties to the
// lowest CellId. `weights` need not be normalised.
Guess BestGuess(std::span<const double> weights, const GridMap& map);

// Bayes update p+[x] = prior[x] f(observed|x) / sum_y prior[y] f(observed|y).
// Every cell with positive prior must have a distribution in `family`.
// Throws InconsistentObservationError when the observation has zero
// probability under the model.
BeliefVector Posterior(const BeliefVector& prior, const MechanismFamily& family,
                       CellId observed);

// The optimal inference attack: the cell minimising posterior-expected
// distance over the whole map.
CellId OptimalInference(const BeliefVector& posterior, const GridMap& map);

// ExpEr: min over guesses of posterior-expected distance.
double ExpectedInferenceError(const BeliefVector& posterior, const GridMap& map);

// E(Phi): min over all map cells g of
//   sum_{x in Phi} prior[x] / (sum_{y in Phi} prior[y]) * d(g, x).
// Throws InputError if `pls` is empty or carries no prior mass.
double PriorWeightedError(std::span<const CellId> pls, const BeliefVector& prior,
                          const GridMap& map);

// Deterministic attack h: observed cell -> inferred cell.
class AttackStrategy {
 public:
  explicit AttackStrategy(std::vector<CellId> guesses) : guesses_(std::move(guesses)) {}

  CellId Infer(CellId observed) const { return guesses_[observed.index]; }
  std::size_t size() const { return guesses_.size(); }

 private:
  std::vector<CellId> guesses_;
};

// Optimal attack against `family` under `prior`. Observations that cannot
// occur are mapped to the best guess under the prior alone.
AttackStrategy OptimalAttack(const BeliefVector& prior, const MechanismFamily& family,
                             const GridMap& map);

}  // namespace trajpriv

#endif  // TRAJPRIV_ADVERSARY_H_

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

#ifndef TRAJPRIV_PLS_H_
#define TRAJPRIV_PLS_H_

#include <array>
#include <span>
#include <vector>

#include "trajpriv/grid.h"
#include "trajpriv/mobility.h"

namespace trajpriv {

struct PrivacyParams {
  // Privacy budget; must be positive.
  double epsilon = 1.0;
  // E_m: required expected inference error in km; must be nonnegative.
  double min_error_km = 0.0;
  // Delta-location set parameter, in (0, 1).
  double delta = 0.05;

  // Throws InputError on out-of-range values.
  void Validate() const;
  // e^epsilon * E_m, the bound a protection location set has to reach.
  double Threshold() const;
};

struct ProtectionLocationSet {
  // Members in the order of the Hilbert ordering that produced the set.
  std::vector<CellId> members;
  double diameter_km = 0.0;
  // E(Phi) under the prior used for the search.
  double achieved_error_km = 0.0;
  Rotation rotation = Rotation::kDeg0;
  // No window met the condition and the whole delta-location set was used.
  bool fallback = false;
};

// E(Phi) >= e^epsilon * E_m.
bool SatisfiesCondition(std::span<const CellId> pls, const BeliefVector& prior,
                        const PrivacyParams& params, const GridMap& map);

// Minimum-diameter protection location set search over Hilbert orderings.
//
// For each of the four rotations the delta-location set members are listed
// in curve order; candidate sets are the contiguous runs of that list which
// contain the protected cell. Among all candidates satisfying the condition
// the search returns the one with the smallest diameter, breaking ties by
// fewer members, then lower rotation angle, then the later start in the list
// (a run beginning at the protected cell beats one reaching back from it).
// If no run qualifies the whole delta-location set is returned, flagged as a
// fallback.
class PlsSearch {
 public:
  explicit PlsSearch(GridMap map);

  const GridMap& map() const { return map_; }
  const HilbertOrdering& ordering(Rotation rotation) const;

  // Throws InputError if `x` is not a member of `candidates`.
  ProtectionLocationSet Search(CellId x, const DeltaLocationSet& candidates,
                               const BeliefVector& prior,
                               const PrivacyParams& params) const;

  // One result per member, aligned with candidates.members.
  std::vector<ProtectionLocationSet> SearchAll(const DeltaLocationSet& candidates,
                                               const BeliefVector& prior,
                                               const PrivacyParams& params) const;

 private:
  std::vector<ProtectionLocationSet> Run(const DeltaLocationSet& candidates,
                                         const BeliefVector& prior,
                                         const PrivacyParams& params,
                                         const CellId* only) const;

  GridMap map_;
  std::array<HilbertOrdering, 4> orderings_;
};

// Convenience wrapper building the orderings for a single query.
ProtectionLocationSet SearchPls(CellId x, const DeltaLocationSet& candidates,
                                const BeliefVector& prior,
                                const PrivacyParams& params, const GridMap& map);

}  // namespace trajpriv

#endif  // TRAJPRIV_PLS_H_

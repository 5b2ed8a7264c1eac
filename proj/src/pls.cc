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

#include "trajpriv/pls.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "trajpriv/adversary.h"
#include "trajpriv/error.h"

namespace trajpriv {

void PrivacyParams::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InputError("epsilon must be positive and finite");
  }
  if (!(min_error_km >= 0.0) || !std::isfinite(min_error_km)) {
    throw InputError("E_m must be nonnegative and finite");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
}

double PrivacyParams::Threshold() const { return std::exp(epsilon) * min_error_km; }

bool SatisfiesCondition(std::span<const CellId> pls, const BeliefVector& prior,
                        const PrivacyParams& params, const GridMap& map) {
  return PriorWeightedError(pls, prior, map) >= params.Threshold();
}

PlsSearch::PlsSearch(GridMap map)
    : map_(std::move(map)),
      orderings_{HilbertOrdering(map_, Rotation::kDeg0),
                 HilbertOrdering(map_, Rotation::kDeg90),
                 HilbertOrdering(map_, Rotation::kDeg180),
                 HilbertOrdering(map_, Rotation::kDeg270)} {}

const HilbertOrdering& PlsSearch::ordering(Rotation rotation) const {
  return orderings_[static_cast<int>(rotation) / 90];
}

namespace {

struct Window {
  bool found = false;
  std::int64_t squared_diameter = 0;
  std::size_t size = 0;
  int rotation = 0;
  std::size_t start = 0;
  double error_km = 0.0;

  bool BetterThan(const Window& other) const {
    if (!other.found) return true;
    if (squared_diameter != other.squared_diameter) {
      return squared_diameter < other.squared_diameter;
    }
    if (size != other.size) return size < other.size;
    if (rotation != other.rotation) return rotation < other.rotation;
    // Windows that start at the protected cell and grow forward come first.
    return start > other.start;
  }
};

}  // namespace

std::vector<ProtectionLocationSet> PlsSearch::Run(const DeltaLocationSet& candidates,
                                                  const BeliefVector& prior,
                                                  const PrivacyParams& params,
                                                  const CellId* only) const {
  params.Validate();
  if (prior.size() != map_.size()) throw InputError("prior does not match the map");
  if (candidates.members.empty()) throw InputError("delta-location set is empty");
  if (only != nullptr && !candidates.Contains(*only)) {
    throw InputError("cell " + std::to_string(only->index) +
                     " is not in the delta-location set; apply the surrogate first");
  }
  const std::size_t n = map_.size();
  const std::size_t m = candidates.members.size();
  const double threshold = params.Threshold();

  std::vector<std::size_t> slot(n, m);
  for (std::size_t k = 0; k < m; ++k) slot[candidates.members[k].index] = k;

  std::vector<Window> best(m);
  std::array<std::vector<CellId>, 4> sequences;
  std::vector<double> cost(n);

  for (int r = 0; r < 4; ++r) {
    const HilbertOrdering& order = orderings_[r];
    std::vector<CellId>& seq = sequences[r];
    seq = candidates.members;
    std::sort(seq.begin(), seq.end(),
              [&](CellId a, CellId b) { return order.Rank(a) < order.Rank(b); });

    std::size_t pinned = m;  // position of `only` in seq
    if (only != nullptr) {
      pinned = static_cast<std::size_t>(
          std::find(seq.begin(), seq.end(), *only) - seq.begin());
    }
    const std::size_t last_start = only != nullptr ? pinned : m - 1;

    for (std::size_t a = 0; a <= last_start; ++a) {
      std::fill(cost.begin(), cost.end(), 0.0);
      double mass = 0.0;
      std::int64_t squared_diameter = 0;
      int min_col = map_.width(), max_col = -1;
      int min_row = map_.height(), max_row = -1;
      for (std::size_t b = a; b < m; ++b) {
        const CellId c = seq[b];
        const double w = prior[c];
        for (std::size_t g = 0; g < n; ++g) cost[g] += w * map_.Distance(CellId{g}, c);
        mass += w;
        for (std::size_t k = a; k < b; ++k) {
          squared_diameter = std::max(squared_diameter, map_.SquaredOffset(seq[k], c));
        }
        min_col = std::min(min_col, map_.Col(c));
        max_col = std::max(max_col, map_.Col(c));
        min_row = std::min(min_row, map_.Row(c));
        max_row = std::max(max_row, map_.Row(c));
        if (only != nullptr && b < pinned) continue;

        // The optimal guess lies in the bounding box of the window: moving a
        // guess into the box strictly shortens every distance.
        double min_cost = std::numeric_limits<double>::infinity();
        for (int row = min_row; row <= max_row; ++row) {
          for (int col = min_col; col <= max_col; ++col) {
            min_cost = std::min(min_cost, cost[map_.CellAt(col, row).index]);
          }
        }
        const double error = min_cost / mass;
        if (!(error >= threshold)) continue;

        Window candidate{true, squared_diameter, b - a + 1, r, a, error};
        const std::size_t lo = only != nullptr ? pinned : a;
        const std::size_t hi = only != nullptr ? pinned : b;
        for (std::size_t p = lo; p <= hi; ++p) {
          Window& current = best[slot[seq[p].index]];
          if (candidate.BetterThan(current)) current = candidate;
        }
      }
    }
  }

  std::vector<ProtectionLocationSet> out;
  auto emit = [&](std::size_t k) {
    const Window& w = best[k];
    ProtectionLocationSet pls;
    if (w.found) {
      const auto& seq = sequences[w.rotation];
      pls.members.assign(seq.begin() + w.start, seq.begin() + w.start + w.size);
      pls.diameter_km = map_.OffsetToKm(w.squared_diameter);
      pls.achieved_error_km = w.error_km;
      pls.rotation = kAllRotations[w.rotation];
    } else {
      pls.members = candidates.members;
      pls.diameter_km = Diameter(pls.members, map_);
      pls.achieved_error_km = PriorWeightedError(pls.members, prior, map_);
      pls.fallback = true;
    }
    out.push_back(std::move(pls));
  };
  if (only != nullptr) {
    emit(slot[only->index]);
  } else {
    for (std::size_t k = 0; k < m; ++k) emit(k);
  }
  return out;
}

ProtectionLocationSet PlsSearch::Search(CellId x, const DeltaLocationSet& candidates,
                                        const BeliefVector& prior,
                                        const PrivacyParams& params) const {
  map_.Validate(x);
  return Run(candidates, prior, params, &x).front();
}

std::vector<ProtectionLocationSet> PlsSearch::SearchAll(
    const DeltaLocationSet& candidates, const BeliefVector& prior,
    const PrivacyParams& params) const {
  return Run(candidates, prior, params, nullptr);
}

ProtectionLocationSet SearchPls(CellId x, const DeltaLocationSet& candidates,
                                const BeliefVector& prior,
                                const PrivacyParams& params, const GridMap& map) {
  return PlsSearch(map).Search(x, candidates, prior, params);
}

}  // namespace trajpriv

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

#ifndef TRAJPRIV_MOBILITY_H_
#define TRAJPRIV_MOBILITY_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "trajpriv/grid.h"

namespace trajpriv {

// Row-major n x n matrix of nonnegative transition counts.
class TransitionCounts {
 public:
  // Throws InputError if `entries` is not n*n or has a negative/non-finite
  // entry.
  TransitionCounts(std::size_t n, std::vector<double> entries);

  std::size_t size() const { return n_; }
  double At(std::size_t from, std::size_t to) const { return entries_[from * n_ + to]; }
  std::span<const double> Row(std::size_t from) const {
    return {entries_.data() + from * n_, n_};
  }

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

// Row-stochastic transition matrix: entry (i, j) is the probability of moving
// from cell i to cell j in one step.
class TransitionMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-12;

  // Throws InputError unless every row lies in [0, 1] and sums to 1 within
  // kRowSumTolerance.
  TransitionMatrix(std::size_t n, std::vector<double> entries);

  static TransitionMatrix Identity(std::size_t n);

  std::size_t size() const { return n_; }
  double At(std::size_t from, std::size_t to) const { return entries_[from * n_ + to]; }
  std::span<const double> Row(std::size_t from) const {
    return {entries_.data() + from * n_, n_};
  }

  // Rows that were all-zero in the source counts and were replaced by a
  // self-loop during normalisation.
  const std::vector<std::size_t>& self_loop_rows() const { return self_loop_rows_; }

 private:
  friend TransitionMatrix NormalizeCounts(const TransitionCounts& counts);

  std::size_t n_;
  std::vector<double> entries_;
  std::vector<std::size_t> self_loop_rows_;
};

// m_ij = n_ij / sum_j n_ij. An all-zero row i becomes the unit row e_i and is
// listed in self_loop_rows().
TransitionMatrix NormalizeCounts(const TransitionCounts& counts);

// Parses whitespace-separated rows of numbers; the row count must equal the
// column count.
TransitionCounts ReadCountsText(std::istream& in);
TransitionCounts ReadCountsFile(const std::string& path);

// Nearest-neighbour random walk on the grid: `stay_weight` on the diagonal and
// `step_weight` towards each of the (up to) four edge neighbours. With
// jitter > 0 every nonzero weight is scaled by an independent factor
// uniform in [1 - jitter, 1 + jitter] drawn from `seed`.
TransitionCounts RandomWalkCounts(const GridMap& map, double stay_weight,
                                  double step_weight, double jitter = 0.0,
                                  std::uint64_t seed = 0);

enum class BeliefRole { kPrior, kPosterior };

// A probability distribution over grid cells at a time step: the prior
// p_t^- before a release or the posterior p_t^+ after it.
class BeliefVector {
 public:
  static constexpr double kMassTolerance = 1e-12;

  // Throws InputError unless entries are finite, nonnegative and sum to 1
  // within kMassTolerance.
  BeliefVector(std::vector<double> probabilities, BeliefRole role, int time);

  // Divides `weights` by their sum. Throws InputError on zero total mass.
  static BeliefVector Normalized(std::vector<double> weights, BeliefRole role,
                                 int time);
  static BeliefVector OneHot(std::size_t n, CellId cell, BeliefRole role, int time);
  static BeliefVector UniformOver(std::size_t n, std::span<const CellId> support,
                                  BeliefRole role, int time);

  std::size_t size() const { return p_.size(); }
  double operator[](CellId c) const { return p_[c.index]; }
  std::span<const double> probabilities() const { return p_; }
  BeliefRole role() const { return role_; }
  int time() const { return time_; }
  double Mass() const;

 private:
  std::vector<double> p_;
  BeliefRole role_;
  int time_;
};

// p_{t+1}^- = p_t^+ M. Throws InputError if `posterior` is not a posterior or
// the dimensions differ.
BeliefVector PropagatePrior(const BeliefVector& posterior, const TransitionMatrix& m);

// Cells whose prior is below this are treated as impossible and never enter a
// delta-location set.
inline constexpr double kImpossiblePrior = 1e-12;

// The smallest set of cells whose prior mass is at least 1 - delta.
struct DeltaLocationSet {
  // In selection order: prior descending, ties by ascending CellId.
  std::vector<CellId> members;
  double delta = 0.0;
  double mass = 0.0;
  // membership[i] is true iff CellId{i} is a member.
  std::vector<bool> membership;

  bool Contains(CellId c) const { return c.index < membership.size() && membership[c.index]; }
  std::size_t size() const { return members.size(); }
};

// Accumulates cells in order of decreasing prior until the mass reaches
// 1 - delta. Throws InputError unless 0 < delta < 1.
DeltaLocationSet BuildDeltaLocationSet(const BeliefVector& prior, double delta);

// Returns `x` if it is in `set`, otherwise the nearest member (ties by lowest
// CellId). Throws InputError on an empty set.
CellId Surrogate(CellId x, const DeltaLocationSet& set, const GridMap& map);

// `prior` restricted to the members of `set` and renormalised.
BeliefVector RestrictToSet(const BeliefVector& prior, const DeltaLocationSet& set);

}  // namespace trajpriv

#endif  // TRAJPRIV_MOBILITY_H_

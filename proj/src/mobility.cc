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

#include "trajpriv/mobility.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "trajpriv/error.h"
#include "trajpriv/random.h"

namespace trajpriv {

TransitionCounts::TransitionCounts(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n_ == 0) throw InputError("transition counts must be non-empty");
  if (entries_.size() != n_ * n_) {
    throw InputError("transition counts must be " + std::to_string(n_) + "x" +
                     std::to_string(n_));
  }
  for (double v : entries_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InputError("transition counts must be finite and nonnegative");
    }
  }
}

TransitionMatrix::TransitionMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n_ == 0) throw InputError("transition matrix must be non-empty");
  if (entries_.size() != n_ * n_) {
    throw InputError("transition matrix must be " + std::to_string(n_) + "x" +
                     std::to_string(n_));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (double v : Row(i)) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InputError("transition probabilities must lie in [0, 1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw InputError("transition matrix row " + std::to_string(i) +
                       " does not sum to 1");
    }
  }
}

TransitionMatrix TransitionMatrix::Identity(std::size_t n) {
  std::vector<double> entries(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) entries[i * n + i] = 1.0;
  return TransitionMatrix(n, std::move(entries));
}

TransitionMatrix NormalizeCounts(const TransitionCounts& counts) {
  const std::size_t n = counts.size();
  std::vector<double> entries(n * n, 0.0);
  std::vector<std::size_t> self_loops;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = counts.Row(i);
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    if (total <= 0.0) {
      entries[i * n + i] = 1.0;
      self_loops.push_back(i);
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) entries[i * n + j] = row[j] / total;
  }
  TransitionMatrix m(n, std::move(entries));
  m.self_loop_rows_ = std::move(self_loops);
  return m;
}

TransitionCounts ReadCountsText(std::istream& in) {
  std::vector<double> entries;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::size_t row_len = 0;
    std::string token;
    while (fields >> token) {
      std::size_t consumed = 0;
      double value;
      try {
        value = std::stod(token, &consumed);
      } catch (const std::exception&) {
        consumed = 0;
      }
      if (consumed != token.size()) {
        throw InputError("matrix file: bad number '" + token + "' on row " +
                         std::to_string(rows + 1));
      }
      entries.push_back(value);
      ++row_len;
    }
    if (row_len == 0) continue;
    if (cols == 0) cols = row_len;
    if (row_len != cols) {
      throw InputError("matrix file: row " + std::to_string(rows + 1) + " has " +
                       std::to_string(row_len) + " entries, expected " +
                       std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0 || rows != cols) {
    throw InputError("matrix file must hold a non-empty square matrix");
  }
  return TransitionCounts(rows, std::move(entries));
}

TransitionCounts ReadCountsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file " + path);
  return ReadCountsText(in);
}

TransitionCounts RandomWalkCounts(const GridMap& map, double stay_weight,
                                  double step_weight, double jitter,
                                  std::uint64_t seed) {
  if (stay_weight < 0.0 || step_weight < 0.0 || stay_weight + step_weight <= 0.0) {
    throw InputError("random-walk weights must be nonnegative and not both zero");
  }
  if (jitter < 0.0 || jitter >= 1.0) throw InputError("jitter must lie in [0, 1)");
  const std::size_t n = map.size();
  std::vector<double> entries(n * n, 0.0);
  RandomStream rng(seed);
  auto weight = [&](double base) {
    return jitter > 0.0 ? base * (1.0 + jitter * (2.0 * rng.Uniform01() - 1.0)) : base;
  };
  constexpr int kSteps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (CellId c : map.Cells()) {
    entries[c.index * n + c.index] = weight(stay_weight);
    for (const auto& step : kSteps) {
      const int col = map.Col(c) + step[0];
      const int row = map.Row(c) + step[1];
      if (col < 0 || col >= map.width() || row < 0 || row >= map.height()) continue;
      entries[c.index * n + map.CellAt(col, row).index] = weight(step_weight);
    }
  }
  return TransitionCounts(n, std::move(entries));
}

BeliefVector::BeliefVector(std::vector<double> probabilities, BeliefRole role,
                           int time)
    : p_(std::move(probabilities)), role_(role), time_(time) {
  if (p_.empty()) throw InputError("belief vector must be non-empty");
  double sum = 0.0;
  for (double v : p_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InputError("belief entries must be finite and nonnegative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "belief vector mass " << sum << " differs from 1";
    throw InputError(msg.str());
  }
}

BeliefVector BeliefVector::Normalized(std::vector<double> weights,
                                      BeliefRole role, int time) {
  double sum = 0.0;
  for (double v : weights) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InputError("belief weights must be finite and nonnegative");
    }
    sum += v;
  }
  if (!(sum > 0.0)) throw InputError("belief weights have zero total mass");
  for (double& v : weights) v /= sum;
  return BeliefVector(std::move(weights), role, time);
}

BeliefVector BeliefVector::OneHot(std::size_t n, CellId cell, BeliefRole role,
                                  int time) {
  if (cell.index >= n) throw InputError("one-hot cell outside belief support");
  std::vector<double> p(n, 0.0);
  p[cell.index] = 1.0;
  return BeliefVector(std::move(p), role, time);
}

BeliefVector BeliefVector::UniformOver(std::size_t n,
                                       std::span<const CellId> support,
                                       BeliefRole role, int time) {
  std::vector<double> w(n, 0.0);
  for (CellId c : support) {
    if (c.index >= n) throw InputError("support cell outside belief domain");
    w[c.index] = 1.0;
  }
  return Normalized(std::move(w), role, time);
}

double BeliefVector::Mass() const {
  return std::accumulate(p_.begin(), p_.end(), 0.0);
}

BeliefVector PropagatePrior(const BeliefVector& posterior,
                            const TransitionMatrix& m) {
  if (posterior.role() != BeliefRole::kPosterior) {
    throw InputError("prior propagation expects a posterior belief");
  }
  if (posterior.size() != m.size()) {
    throw InputError("belief and transition matrix dimensions differ");
  }
  const std::size_t n = m.size();
  std::vector<double> next(n, 0.0);
  const auto p = posterior.probabilities();
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] == 0.0) continue;
    const auto row = m.Row(i);
    for (std::size_t j = 0; j < n; ++j) next[j] += p[i] * row[j];
  }
  return BeliefVector(std::move(next), BeliefRole::kPrior, posterior.time() + 1);
}

DeltaLocationSet BuildDeltaLocationSet(const BeliefVector& prior, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  const auto p = prior.probabilities();
  std::vector<CellId> candidates;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= kImpossiblePrior) candidates.push_back(CellId{i});
  }
  std::sort(candidates.begin(), candidates.end(), [&](CellId a, CellId b) {
    if (p[a.index] != p[b.index]) return p[a.index] > p[b.index];
    return a < b;
  });
  DeltaLocationSet set;
  set.delta = delta;
  set.membership.assign(p.size(), false);
  const double target = 1.0 - delta;
  for (CellId c : candidates) {
    if (set.mass >= target) break;
    set.members.push_back(c);
    set.membership[c.index] = true;
    set.mass += p[c.index];
  }
  return set;
}

CellId Surrogate(CellId x, const DeltaLocationSet& set, const GridMap& map) {
  if (set.members.empty()) throw InputError("surrogate requires a non-empty set");
  map.Validate(x);
  if (set.Contains(x)) return x;
  CellId best = set.members.front();
  std::int64_t best_offset = std::numeric_limits<std::int64_t>::max();
  for (CellId c : set.members) {
    const std::int64_t offset = map.SquaredOffset(x, c);
    if (offset < best_offset || (offset == best_offset && c < best)) {
      best = c;
      best_offset = offset;
    }
  }
  return best;
}

BeliefVector RestrictToSet(const BeliefVector& prior, const DeltaLocationSet& set) {
  std::vector<double> w(prior.size(), 0.0);
  for (CellId c : set.members) w[c.index] = prior[c];
  return BeliefVector::Normalized(std::move(w), prior.role(), prior.time());
}

}  // namespace trajpriv

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

// Brute-force reference implementations used by the tests. They share no code
// with the library beyond plain data.

#ifndef TRAJPRIV_TESTS_ORACLES_H_
#define TRAJPRIV_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Grid {
  int width;
  int height;
  double cell;

  std::size_t size() const { return static_cast<std::size_t>(width) * height; }
  double X(std::size_t i) const { return (static_cast<double>(i % width) + 0.5) * cell; }
  double Y(std::size_t i) const { return (static_cast<double>(i / width) + 0.5) * cell; }
  double Dist(std::size_t a, std::size_t b) const {
    return std::hypot(X(a) - X(b), Y(a) - Y(b));
  }
};

inline double Diameter(const Grid& g, const std::vector<std::size_t>& cells) {
  double d = 0.0;
  for (std::size_t a : cells) {
    for (std::size_t b : cells) d = std::max(d, g.Dist(a, b));
  }
  return d;
}

// min over all cells of sum_x w[x] d(guess, x), with the lowest index on ties.
inline std::pair<std::size_t, double> BestGuess(const Grid& g, const std::vector<double>& w) {
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t guess = 0; guess < g.size(); ++guess) {
    double cost = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) cost += w[x] * g.Dist(guess, x);
    if (guess == 0 || cost < best_cost - 1e-12 * std::max(1.0, best_cost)) {
      best = guess;
      best_cost = cost;
    }
  }
  return {best, best_cost};
}

// E(Phi) with the prior conditioned on Phi.
inline double PriorWeightedError(const Grid& g, const std::vector<std::size_t>& phi,
                                 const std::vector<double>& prior) {
  std::vector<double> w(g.size(), 0.0);
  double mass = 0.0;
  for (std::size_t x : phi) mass += prior[x];
  for (std::size_t x : phi) w[x] = prior[x] / mass;
  return BestGuess(g, w).second;
}

// Output law of permute-and-flip by walking every permutation.
inline std::vector<double> PermuteAndFlipByEnumeration(const std::vector<double>& accept) {
  const std::size_t n = accept.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<double> out(n, 0.0);
  double count = 0.0;
  do {
    double reach = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      out[perm[k]] += reach * accept[perm[k]];
      reach *= 1.0 - accept[perm[k]];
    }
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (double& v : out) v /= count;
  return out;
}

inline std::vector<double> Acceptance(const Grid& g, std::size_t x, double epsilon,
                                      double sensitivity) {
  std::vector<double> a(g.size());
  for (std::size_t o = 0; o < g.size(); ++o) {
    a[o] = std::exp(-epsilon * g.Dist(x, o) / (2.0 * sensitivity));
  }
  return a;
}

inline std::vector<double> Exponential(const Grid& g, std::size_t x, double epsilon,
                                       double sensitivity) {
  std::vector<double> a = Acceptance(g, x, epsilon, sensitivity);
  const double total = std::accumulate(a.begin(), a.end(), 0.0);
  for (double& v : a) v /= total;
  return a;
}

// Hilbert curve of side 2^order as a list of (x, y) points, drawn by a turtle
// following the L-system A -> +BF-AFA-FB+, B -> -AF+BFB+FA-.
inline std::vector<std::pair<int, int>> HilbertCurve(int order) {
  std::string program = "A";
  for (int k = 0; k < order; ++k) {
    std::string next;
    for (char c : program) {
      if (c == 'A') {
        next += "+BF-AFA-FB+";
      } else if (c == 'B') {
        next += "-AF+BFB+FA-";
      } else {
        next += c;
      }
    }
    program = std::move(next);
  }
  const int dx[4] = {1, 0, -1, 0};
  const int dy[4] = {0, 1, 0, -1};
  int heading = 0;
  int x = 0;
  int y = 0;
  std::vector<std::pair<int, int>> points = {{0, 0}};
  for (char c : program) {
    if (c == '+') heading = (heading + 1) % 4;
    if (c == '-') heading = (heading + 3) % 4;
    if (c == 'F') {
      x += dx[heading];
      y += dy[heading];
      points.emplace_back(x, y);
    }
  }
  return points;
}

// Cells of the grid in visiting order of the curve after turning the grid
// clockwise by `degrees` about its centre (rows grow upwards).
inline std::vector<std::size_t> HilbertOrder(const Grid& g, int degrees) {
  int order = 0;
  while ((1 << order) < std::max(g.width, g.height)) ++order;
  const bool swapped = degrees == 90 || degrees == 270;
  const int w2 = swapped ? g.height : g.width;
  const int h2 = swapped ? g.width : g.height;
  const double theta = -degrees * std::acos(-1.0) / 180.0;
  // Curve coordinate -> cell index, for cells that land inside the map.
  std::vector<std::vector<long>> lookup(1 << order, std::vector<long>(1 << order, -1));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double cx = static_cast<double>(i % g.width) + 0.5 - g.width / 2.0;
    const double cy = static_cast<double>(i / g.width) + 0.5 - g.height / 2.0;
    const double rx = cx * std::cos(theta) - cy * std::sin(theta);
    const double ry = cx * std::sin(theta) + cy * std::cos(theta);
    const int col = static_cast<int>(std::lround(rx + w2 / 2.0 - 0.5));
    const int row = static_cast<int>(std::lround(ry + h2 / 2.0 - 0.5));
    lookup[col][row] = static_cast<long>(i);
  }
  std::vector<std::size_t> out;
  for (const auto& [x, y] : HilbertCurve(order)) {
    if (lookup[x][y] >= 0) out.push_back(static_cast<std::size_t>(lookup[x][y]));
  }
  return out;
}

struct WindowResult {
  bool found = false;
  double diameter = 0.0;
};

// Smallest diameter over every contiguous run of the candidate list, in each
// of the given rotated curve orders, that contains x and satisfies
// E(run) >= threshold.
inline WindowResult MinWindowDiameter(const Grid& g, const std::vector<std::size_t>& candidates,
                                      const std::vector<double>& prior, std::size_t x,
                                      double threshold,
                                      const std::vector<int>& rotations = {0, 90, 180, 270}) {
  WindowResult best;
  for (int degrees : rotations) {
    std::vector<std::size_t> seq;
    for (std::size_t c : HilbertOrder(g, degrees)) {
      if (std::find(candidates.begin(), candidates.end(), c) != candidates.end()) {
        seq.push_back(c);
      }
    }
    const std::size_t px = static_cast<std::size_t>(
        std::find(seq.begin(), seq.end(), x) - seq.begin());
    for (std::size_t a = 0; a <= px; ++a) {
      for (std::size_t b = px; b < seq.size(); ++b) {
        const std::vector<std::size_t> run(seq.begin() + a, seq.begin() + b + 1);
        if (!(PriorWeightedError(g, run, prior) >= threshold)) continue;
        const double d = Diameter(g, run);
        if (!best.found || d < best.diameter) best = {true, d};
      }
    }
  }
  return best;
}

}  // namespace oracle

#endif  // TRAJPRIV_TESTS_ORACLES_H_

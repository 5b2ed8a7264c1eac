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

#include "trajpriv/grid.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "trajpriv/error.h"

namespace trajpriv {

GridMap::GridMap(int width, int height, double cell_size_km)
    : width_(width), height_(height), cell_size_(cell_size_km) {
  if (width < 1 || height < 1) {
    throw InputError("grid dimensions must be at least 1x1");
  }
  if (!(cell_size_km > 0.0) || !std::isfinite(cell_size_km)) {
    throw InputError("cell size must be positive and finite");
  }
  distance_by_offset_.resize(static_cast<std::size_t>(width_) * height_);
  for (int dc = 0; dc < width_; ++dc) {
    for (int dr = 0; dr < height_; ++dr) {
      const double cells = std::sqrt(static_cast<double>(dc * dc + dr * dr));
      distance_by_offset_[static_cast<std::size_t>(dc) * height_ + dr] =
          cells * cell_size_;
    }
  }
}

void GridMap::Validate(CellId c) const {
  if (!Contains(c)) {
    throw InputError("cell " + std::to_string(c.index) + " outside " +
                     std::to_string(width_) + "x" + std::to_string(height_) +
                     " map");
  }
}

CellId GridMap::CellAt(int col, int row) const {
  if (col < 0 || col >= width_ || row < 0 || row >= height_) {
    throw InputError("coordinate (" + std::to_string(col) + ", " +
                     std::to_string(row) + ") outside map");
  }
  return CellId{static_cast<std::size_t>(row) * width_ + col};
}

Point GridMap::CellCenter(CellId c) const {
  Validate(c);
  return Point{(Col(c) + 0.5) * cell_size_, (Row(c) + 0.5) * cell_size_};
}

double GridMap::UncheckedDistance(CellId a, CellId b) const {
  const int dc = std::abs(Col(a) - Col(b));
  const int dr = std::abs(Row(a) - Row(b));
  return distance_by_offset_[static_cast<std::size_t>(dc) * height_ + dr];
}

double GridMap::Distance(CellId a, CellId b) const {
  Validate(a);
  Validate(b);
  return UncheckedDistance(a, b);
}

std::int64_t GridMap::SquaredOffset(CellId a, CellId b) const {
  const std::int64_t dc = Col(a) - Col(b);
  const std::int64_t dr = Row(a) - Row(b);
  return dc * dc + dr * dr;
}

double GridMap::OffsetToKm(std::int64_t squared_offset) const {
  return std::sqrt(static_cast<double>(squared_offset)) * cell_size_;
}

double GridMap::MaxDistance() const {
  return distance_by_offset_.back();
}

std::vector<CellId> GridMap::Cells() const {
  std::vector<CellId> cells(size());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = CellId{i};
  return cells;
}

std::int64_t SquaredDiameter(std::span<const CellId> cells, const GridMap& map) {
  std::int64_t best = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    map.Validate(cells[i]);
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      best = std::max(best, map.SquaredOffset(cells[i], cells[j]));
    }
  }
  return best;
}

double Diameter(std::span<const CellId> cells, const GridMap& map) {
  if (cells.empty()) throw InputError("diameter of an empty cell set");
  return map.OffsetToKm(SquaredDiameter(cells, map));
}

std::uint64_t HilbertIndex(std::uint32_t side, std::uint32_t x,
                           std::uint32_t y) {
  std::uint64_t d = 0;
  for (std::uint32_t s = side / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) > 0 ? 1 : 0;
    const std::uint32_t ry = (y & s) > 0 ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    // Rotate the quadrant so the sub-curve has canonical orientation.
    if (ry == 0) {
      if (rx == 1) {
        x = side - 1 - x;
        y = side - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

namespace {

std::uint32_t CurveSide(const GridMap& map) {
  const int longest = std::max(map.width(), map.height());
  std::uint32_t side = 1;
  while (side < static_cast<std::uint32_t>(longest)) side *= 2;
  return side;
}

// Clockwise rotation about the map centre, with rows increasing upwards.
std::pair<std::uint32_t, std::uint32_t> Rotate(const GridMap& map,
                                               Rotation rotation, int col,
                                               int row) {
  const int w = map.width();
  const int h = map.height();
  switch (rotation) {
    case Rotation::kDeg0:
      return {col, row};
    case Rotation::kDeg90:
      return {row, w - 1 - col};
    case Rotation::kDeg180:
      return {w - 1 - col, h - 1 - row};
    case Rotation::kDeg270:
      return {h - 1 - row, col};
  }
  throw InputError("unknown rotation");
}

}  // namespace

HilbertOrdering::HilbertOrdering(const GridMap& map, Rotation rotation)
    : rotation_(rotation), rank_(map.size()), order_(map.Cells()) {
  const std::uint32_t side = CurveSide(map);
  std::vector<std::uint64_t> curve_index(map.size());
  for (CellId c : order_) {
    const auto [x, y] = Rotate(map, rotation, map.Col(c), map.Row(c));
    curve_index[c.index] = HilbertIndex(side, x, y);
  }
  // Curve indices are distinct, so the sort is a strict total order.
  std::sort(order_.begin(), order_.end(), [&](CellId a, CellId b) {
    return curve_index[a.index] < curve_index[b.index];
  });
  for (std::size_t pos = 0; pos < order_.size(); ++pos) {
    rank_[order_[pos].index] = pos;
  }
}

}  // namespace trajpriv

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

#ifndef TRAJPRIV_GRID_H_
#define TRAJPRIV_GRID_H_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace trajpriv {

// Index of a grid cell in row-major order: index = row * width + col.
struct CellId {
  std::size_t index = 0;

  friend auto operator<=>(const CellId&, const CellId&) = default;
};

// Planar coordinate in kilometres.
struct Point {
  double x_km = 0.0;
  double y_km = 0.0;
};

// A rectangular world of width x height square cells.
//
// Cells are addressed by CellId; their 2D coordinate is
// (index mod width, index div width). Distances are Euclidean distances
// between cell centres and are served from a table keyed by the absolute
// column/row offset, so equal offsets always yield bit-identical values.
class GridMap {
 public:
  // Throws InputError unless width, height >= 1 and cell_size_km > 0.
  GridMap(int width, int height, double cell_size_km);

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  std::size_t size() const { return static_cast<std::size_t>(width_) * height_; }

  bool Contains(CellId c) const { return c.index < size(); }
  // Throws InputError if `c` is outside the map.
  void Validate(CellId c) const;

  int Col(CellId c) const { return static_cast<int>(c.index % width_); }
  int Row(CellId c) const { return static_cast<int>(c.index / width_); }
  CellId CellAt(int col, int row) const;

  Point CellCenter(CellId c) const;
  double Distance(CellId a, CellId b) const;
  // Squared centre distance in cell units; exact integer.
  std::int64_t SquaredOffset(CellId a, CellId b) const;
  // Converts a squared offset in cell units to kilometres.
  double OffsetToKm(std::int64_t squared_offset) const;
  // Largest centre-to-centre distance on the map.
  double MaxDistance() const;

  std::vector<CellId> Cells() const;

 private:
  double UncheckedDistance(CellId a, CellId b) const;

  int width_;
  int height_;
  double cell_size_;
  // distance_by_offset_[|dcol| * height_ + |drow|]
  std::vector<double> distance_by_offset_;
};

// Largest pairwise centre distance of a cell set; 0 for a singleton.
double Diameter(std::span<const CellId> cells, const GridMap& map);
// Same, as an exact squared offset in cell units.
std::int64_t SquaredDiameter(std::span<const CellId> cells, const GridMap& map);

enum class Rotation : int { kDeg0 = 0, kDeg90 = 90, kDeg180 = 180, kDeg270 = 270 };

inline constexpr std::array<Rotation, 4> kAllRotations = {
    Rotation::kDeg0, Rotation::kDeg90, Rotation::kDeg180, Rotation::kDeg270};

// A traversal of all map cells along a (possibly rotated) Hilbert curve.
//
// The curve has order k = ceil(log2(max(width, height))). Cell coordinates
// are rotated clockwise about the map centre, ranked by their curve index,
// and the ranks are compacted to [0, n). For maps whose sides are not a
// power of two, curve positions outside the map are skipped, so consecutive
// ranks are not always grid neighbours.
class HilbertOrdering {
 public:
  HilbertOrdering(const GridMap& map, Rotation rotation);

  Rotation rotation() const { return rotation_; }
  std::size_t size() const { return order_.size(); }
  std::size_t Rank(CellId c) const { return rank_[c.index]; }
  CellId At(std::size_t position) const { return order_[position]; }
  std::span<const CellId> Order() const { return order_; }

 private:
  Rotation rotation_;
  std::vector<std::size_t> rank_;
  std::vector<CellId> order_;
};

// Index of (x, y) along the canonical Hilbert curve filling a side x side
// square; `side` must be a power of two.
std::uint64_t HilbertIndex(std::uint32_t side, std::uint32_t x, std::uint32_t y);

}  // namespace trajpriv

#endif  // TRAJPRIV_GRID_H_

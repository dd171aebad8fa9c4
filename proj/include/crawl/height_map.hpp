#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "crawl/geometry.hpp"

namespace crawl {

/// Regular-grid terrain elevation samples. Node (col, row) sits at
/// origin + (col, row) * resolution; queries interpolate bilinearly between
/// nodes and throw std::out_of_range outside the grid.
class HeightMap {
 public:
  HeightMap(double resolution, const Vec2& origin, int cols, int rows,
            std::vector<double> values);

  static HeightMap parse(std::istream& in);
  static HeightMap load(const std::string& path);
  void save(std::ostream& out) const;

  double height_at(const Vec2& xy) const;
  bool contains(const Vec2& xy) const;

  double resolution() const { return resolution_; }
  const Vec2& origin() const { return origin_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  double node(int col, int row) const { return values_[row * cols_ + col]; }
  double& node(int col, int row) { return values_[row * cols_ + col]; }
  Vec2 max_corner() const;

  // Built-in generators (extent given by origin/cols/rows at `resolution`).
  static HeightMap flat(double resolution, const Vec2& origin, int cols, int rows,
                        double height = 0.0);
  /// Level run-in before `start_x`, then constant grade at `angle` rad.
  static HeightMap ramp(double resolution, const Vec2& origin, int cols, int rows,
                        double angle, double start_x);
  /// Staircase climbing +x from `start_x`; with turn != 0 the second half of
  /// the steps climbs +y (turn > 0) or -y (turn < 0) after a square landing.
  static HeightMap stairs(double resolution, const Vec2& origin, int cols, int rows,
                          double rise, double tread, int count, double start_x,
                          int turn = 0);
  /// Seeded field of smooth bumps, heights capped at max_height, starting at
  /// `start_x` (level approach before it).
  static HeightMap rocks(double resolution, const Vec2& origin, int cols, int rows,
                         double max_height, double start_x, uint64_t seed);

 private:
  double resolution_;
  Vec2 origin_;
  int cols_;
  int rows_;
  std::vector<double> values_;
};

}  // namespace crawl

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "uavmc/scenario.hpp"

namespace uavmc {

/// Coarse-to-fine exhaustive 2D search over a box.
struct GridSpec {
  std::size_t coarse = 64;        // nodes per axis of the coarse grid
  std::size_t refine_factor = 16; // each refinement level is this much finer
  std::size_t refine_levels = 2;
  std::size_t max_peaks = 16;     // cap on coarse local maxima carried into refinement
  double peak_band = 0.02;        // refine peaks within this relative band of the best
};

struct GridPoint {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

struct GridSearchResult {
  std::vector<GridPoint> peaks; // refined local maxima, best first
  double step_x = 0.0;          // final resolution
  double step_y = 0.0;
  std::size_t evaluations = 0;
};

/// Maximizes f over the box. Evaluation is data-parallel; the reduction is
/// sequential with ties broken by lexicographic (x, y), so the result does
/// not depend on the thread count.
GridSearchResult grid_maximize(const BoundingBox& box, const GridSpec& spec,
                               const std::function<double(double, double)>& f);

/// True when a is strictly better than b: larger value, then smaller (x, y).
bool better_point(const GridPoint& a, const GridPoint& b);

} // namespace uavmc

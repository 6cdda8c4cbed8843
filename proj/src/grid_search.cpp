#include "uavmc/grid_search.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "uavmc/parallel.hpp"

namespace uavmc {

namespace {

std::vector<double> axis_nodes(double lo, double hi, std::size_t n) {
  if (hi <= lo || n < 2) return {lo};
  std::vector<double> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  nodes.back() = hi;
  return nodes;
}

// Nodes c + i*h for |i| <= r that stay inside [lo, hi].
std::vector<double> local_nodes(double c, double h, std::size_t r, double lo, double hi) {
  if (h <= 0.0) return {c};
  std::vector<double> nodes;
  const auto ir = static_cast<long>(r);
  for (long i = -ir; i <= ir; ++i) {
    const double v = c + static_cast<double>(i) * h;
    if (v >= lo && v <= hi) nodes.push_back(v);
  }
  if (nodes.empty()) nodes.push_back(std::clamp(c, lo, hi));
  return nodes;
}

GridPoint best_of(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::function<double(double, double)>& f, std::size_t& evals) {
  std::vector<double> values(xs.size() * ys.size());
  parallel_for(values.size(), [&](std::size_t idx) {
    values[idx] = f(xs[idx / ys.size()], ys[idx % ys.size()]);
  });
  evals += values.size();
  GridPoint best{xs[0], ys[0], values[0]};
  for (std::size_t idx = 1; idx < values.size(); ++idx) {
    GridPoint p{xs[idx / ys.size()], ys[idx % ys.size()], values[idx]};
    if (better_point(p, best)) best = p;
  }
  return best;
}

} // namespace

bool better_point(const GridPoint& a, const GridPoint& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

GridSearchResult grid_maximize(const BoundingBox& box, const GridSpec& spec,
                               const std::function<double(double, double)>& f) {
  if (spec.coarse == 0 || spec.refine_factor == 0) {
    throw std::invalid_argument("grid resolution must be > 0");
  }
  GridSearchResult result;
  const auto xs = axis_nodes(box.x_min, box.x_max, spec.coarse);
  const auto ys = axis_nodes(box.y_min, box.y_max, spec.coarse);
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  const double hx = nx > 1 ? (box.x_max - box.x_min) / static_cast<double>(nx - 1) : 0.0;
  const double hy = ny > 1 ? (box.y_max - box.y_min) / static_cast<double>(ny - 1) : 0.0;

  std::vector<double> values(nx * ny);
  parallel_for(values.size(), [&](std::size_t idx) {
    values[idx] = f(xs[idx / ny], ys[idx % ny]);
  });
  result.evaluations = values.size();

  // Coarse local maxima over the 8-neighbourhood.
  std::vector<GridPoint> peaks;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double v = values[i * ny + j];
      bool is_peak = true;
      for (int di = -1; di <= 1 && is_peak; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const long ii = static_cast<long>(i) + di;
          const long jj = static_cast<long>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<long>(nx) || jj >= static_cast<long>(ny)) {
            continue;
          }
          if (values[static_cast<std::size_t>(ii) * ny + static_cast<std::size_t>(jj)] > v) {
            is_peak = false;
            break;
          }
        }
      }
      if (is_peak) peaks.push_back({xs[i], ys[j], v});
    }
  }
  std::sort(peaks.begin(), peaks.end(), better_point);
  {
    const double top = peaks.front().value;
    const double band = spec.peak_band * std::abs(top);
    std::size_t keep = 1;
    while (keep < peaks.size() && keep < spec.max_peaks && peaks[keep].value >= top - band) ++keep;
    peaks.resize(keep);
  }

  const double rf = static_cast<double>(spec.refine_factor);
  // Peaks still in contention after a level; the coarse-to-fine error shrinks
  // with the square of the step, so the band does too.
  std::vector<bool> active(peaks.size(), true);
  double sx = hx;
  double sy = hy;
  double band = spec.peak_band;
  for (std::size_t level = 0; level < spec.refine_levels; ++level) {
    for (std::size_t p = 0; p < peaks.size(); ++p) {
      if (!active[p]) continue;
      auto& peak = peaks[p];
      const auto lx = local_nodes(peak.x, sx / rf, spec.refine_factor, box.x_min, box.x_max);
      const auto ly = local_nodes(peak.y, sy / rf, spec.refine_factor, box.y_min, box.y_max);
      const GridPoint best = best_of(lx, ly, f, result.evaluations);
      if (better_point(best, peak)) peak = best;
    }
    sx /= rf;
    sy /= rf;
    band /= rf * rf;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < peaks.size(); ++p) {
      if (active[p]) top = std::max(top, peaks[p].value);
    }
    for (std::size_t p = 0; p < peaks.size(); ++p) {
      if (active[p] && peaks[p].value < top - band * std::abs(top)) active[p] = false;
    }
  }
  std::sort(peaks.begin(), peaks.end(), better_point);
  result.peaks = std::move(peaks);
  result.step_x = sx;
  result.step_y = sy;
  return result;
}

} // namespace uavmc

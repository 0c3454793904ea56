#pragma once

// Evaluation grids for margin functions of the form a -> Delta(a) and the
// two-pass local refinement used by the dominance verifiers.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "riskdom/background_risk.hpp"
#include "riskdom/detail/numeric.hpp"

namespace riskdom::detail {

struct GridOptions {
  int base_points = 8193;
  double tail_mass = 1e-12;
  int extension_points = 256;
  int refinement_passes = 2;
  int refinement_density = 8;
  double refine_below = 1e-6;
};

/// Base grid: quantiles of W uniform in p over [tail_mass, 1 - tail_mass],
/// extended linearly by `spread` on both sides, plus every kink of W shifted
/// by each offset. Points below `floor` are dropped and the floor added.
inline std::vector<double> margin_grid(const BackgroundRisk& w, std::span<const double> offsets,
                                       double spread, std::optional<double> floor = {},
                                       const GridOptions& opt = {}) {
  std::vector<double> a;
  const int n = opt.base_points;
  a.reserve(static_cast<std::size_t>(n + 2 * opt.extension_points) + 16);
  for (int i = 0; i < n; ++i) {
    const double p = opt.tail_mass + (1.0 - 2.0 * opt.tail_mass) * i / (n - 1);
    const double q = opt.tail_mass + (1.0 - 2.0 * opt.tail_mass) * (n - 1 - i) / (n - 1);
    a.push_back(p <= 0.5 ? w.quantile(p) : w.upper_quantile(q));
  }
  const double lo = a.front(), hi = a.back();
  for (int i = 1; i <= opt.extension_points; ++i) {
    const double t = spread * i / opt.extension_points;
    a.push_back(lo - t);
    a.push_back(hi + t);
  }
  for (double k : w.kinks()) {
    a.push_back(k);
    for (double x : offsets) a.push_back(k + x);
  }
  if (floor) {
    std::erase_if(a, [f = *floor](double v) { return v < f; });
    a.push_back(*floor);
  }
  std::erase_if(a, [](double v) { return !std::isfinite(v); });
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

struct GridScan {
  double min_margin = inf;
  double argmin = nan;
  std::size_t points = 0;
  int passes = 0;
  double lowest_point = nan;
};

/// Evaluates `margin` on the grid, then refines (density - 1 interior points
/// per interval) around points whose |margin| is below the threshold or where
/// the margin changes sign. The minimum is reduced in grid order, so the
/// result does not depend on evaluation order.
template <class F>
GridScan scan_margin(std::vector<double> grid, F&& margin, const GridOptions& opt = {}) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = margin(grid[i]);
  GridScan out;
  out.points = grid.size();
  if (!grid.empty()) out.lowest_point = grid.front();
  for (int pass = 0; pass < opt.refinement_passes && grid.size() > 1; ++pass) {
    std::vector<double> ng, nv;
    ng.reserve(grid.size() * 2);
    nv.reserve(grid.size() * 2);
    bool refined = false;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      ng.push_back(grid[i]);
      nv.push_back(values[i]);
      const bool flag = std::abs(values[i]) < opt.refine_below ||
                        std::abs(values[i + 1]) < opt.refine_below ||
                        (values[i] < 0.0) != (values[i + 1] < 0.0);
      if (!flag) continue;
      const double h = (grid[i + 1] - grid[i]) / opt.refinement_density;
      for (int k = 1; k < opt.refinement_density; ++k) {
        const double x = grid[i] + k * h;
        if (x <= grid[i] || x >= grid[i + 1]) continue;
        ng.push_back(x);
        nv.push_back(margin(x));
        refined = true;
      }
    }
    ng.push_back(grid.back());
    nv.push_back(values.back());
    out.points += ng.size() - grid.size();
    grid = std::move(ng);
    values = std::move(nv);
    out.passes = pass + 1;
    if (!refined) break;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] < out.min_margin) {
      out.min_margin = values[i];
      out.argmin = grid[i];
    }
  }
  return out;
}

}  // namespace riskdom::detail

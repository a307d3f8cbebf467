#pragma once

// Deterministic nested grid search over at most two coordinates with local
// refinement. Scores are maximized; `evaluate(xs, ys, out)` fills
// out[i * ys.size() + j] and marks infeasible points with -inf.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace noma::detail {

struct Axis {
  bool active = false;
  double lo = 0.0;
  double hi = 0.0;
};

struct GridChoice {
  double x = 0.0;
  double y = 0.0;
  double score = -std::numeric_limits<double>::infinity();
  bool feasible() const { return std::isfinite(score); }
};

inline std::vector<double> linspace(double lo, double hi, int n) {
  if (n <= 1 || hi <= lo) return {lo};
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = lo + ((hi - lo) * i) / (n - 1);
  v.back() = hi;
  return v;
}

inline constexpr int kRefinePoints = 21;
inline constexpr double kRefineHalfWidth = 2.0;  // in units of the current step
inline constexpr int kMaxWalk = 64;  // window recentrings per refinement round

// `tie_floor(best)` returns the lowest score still treated as tied with
// `best`; among ties the first point in (x, y) lexicographic order wins.
template <class Evaluate, class TieFloor>
GridChoice grid_search(Axis ax, Axis ay, int resolution, int rounds, Evaluate&& evaluate,
                       TieFloor&& tie_floor) {
  std::vector<double> scores;
  auto run = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
    scores.assign(xs.size() * ys.size(), -std::numeric_limits<double>::infinity());
    evaluate(std::span<const double>(xs), std::span<const double>(ys), std::span<double>(scores));
    const double best = *std::max_element(scores.begin(), scores.end());
    GridChoice choice;
    if (!std::isfinite(best)) return choice;
    const double floor = tie_floor(best);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = 0; j < ys.size(); ++j) {
        const double s = scores[i * ys.size() + j];
        if (s >= floor) return GridChoice{xs[i], ys[j], s};
      }
    }
    return choice;
  };

  auto points = [&](const Axis& a, int n) {
    return a.active ? linspace(a.lo, a.hi, n) : std::vector<double>{a.lo};
  };
  auto xs = points(ax, resolution);
  auto ys = points(ay, resolution);
  GridChoice best = run(xs, ys);
  if (!best.feasible()) return best;

  double step_x = ax.active ? (ax.hi - ax.lo) / std::max(resolution - 1, 1) : 0.0;
  double step_y = ay.active ? (ay.hi - ay.lo) / std::max(resolution - 1, 1) : 0.0;
  auto window = [](const Axis& a, double centre, double step) {
    if (!a.active) return std::vector<double>{centre};
    const double lo = std::max(a.lo, centre - kRefineHalfWidth * step);
    const double hi = std::min(a.hi, centre + kRefineHalfWidth * step);
    return linspace(lo, hi, kRefinePoints);
  };
  auto on_edge = [](const Axis& a, const std::vector<double>& w, double v) {
    return a.active && w.size() > 1 && ((v == w.front() && v > a.lo) || (v == w.back() && v < a.hi));
  };
  for (int r = 0; r < rounds && (ax.active || ay.active); ++r) {
    std::vector<double> rx, ry;
    for (int walk = 0; walk < kMaxWalk; ++walk) {
      rx = window(ax, best.x, step_x);
      ry = window(ay, best.y, step_y);
      const GridChoice refined = run(rx, ry);
      if (!refined.feasible() || !(refined.score > best.score)) break;
      best = refined;
      if (!on_edge(ax, rx, best.x) && !on_edge(ay, ry, best.y)) break;
    }
    step_x = rx.size() > 1 ? (rx.back() - rx.front()) / (rx.size() - 1) : step_x;
    step_y = ry.size() > 1 ? (ry.back() - ry.front()) / (ry.size() - 1) : step_y;
  }
  return best;
}

}  // namespace noma::detail

#include "grid_sweep.hpp"

#include <limits>
#include <optional>
#include <set>
#include <stdexcept>

namespace sideinfo::detail {

namespace {

constexpr double kTie = 1e-9;
constexpr double kBandSlack = 1e-9;

// One grid of auxiliary kernels with rates, orbit map and memoized inner
// solves.
struct GridState {
  SimplexGrid grid;
  std::vector<double> rates;
  std::vector<std::size_t> canon;
  double epsilon = 0.0;
  std::vector<std::optional<SolveReport>> solved;
};

GridState make_state(const SweepSpec& sweep, double step) {
  GridState g;
  g.grid = sweep.make_grid(step);
  const std::size_t n = g.grid.points.size();
  g.rates.resize(n);
  parallel_for(n, [&](std::size_t i) { g.rates[i] = sweep.rate(g.grid.points[i]); });
  g.canon = canonical_grid_index(g.grid);
  if (sweep.epsilon > 0.0) {
    g.epsilon = sweep.epsilon;
  } else {
    std::vector<double> r = g.rates;
    r.push_back(sweep.r_max);
    g.epsilon = auto_band(std::move(r));
  }
  g.solved.resize(n);
  return g;
}

std::vector<std::size_t> feasible(const GridState& g, double r_prime) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < g.rates.size(); ++i) {
    if (g.rates[i] >= r_prime - g.epsilon - kBandSlack && g.rates[i] <= r_prime + kBandSlack) {
      idx.push_back(i);
    }
  }
  return idx;
}

void solve_needed(GridState& g, const std::vector<std::size_t>& idx, const SweepSpec& sweep) {
  std::set<std::size_t> todo;
  for (std::size_t i : idx) {
    if (!g.solved[g.canon[i]]) todo.insert(g.canon[i]);
  }
  const std::vector<std::size_t> list(todo.begin(), todo.end());
  std::vector<SolveReport> out(list.size());
  parallel_for(list.size(), [&](std::size_t k) { out[k] = sweep.inner(g.grid.points[list[k]]); });
  for (std::size_t k = 0; k < list.size(); ++k) g.solved[list[k]] = std::move(out[k]);
}

CurvePoint pick(const GridState& g, const std::vector<std::size_t>& idx, double r_prime,
                double step, bool maximize) {
  CurvePoint pt;
  pt.r_prime = r_prime;
  pt.grid_step = step;
  pt.epsilon = g.epsilon;
  const double sign = maximize ? 1.0 : -1.0;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i : idx) {
    const double v = sign * g.solved[g.canon[i]]->value;
    if (v > best + kTie) {
      best = v;
      arg = i;
    }
  }
  const SolveReport& rep = *g.solved[g.canon[arg]];
  pt.raw_value = pt.value = rep.value;
  pt.winning_w = static_cast<int>(arg);
  pt.iterations = rep.iterations;
  pt.gap = rep.gap;
  pt.winning_rate = g.rates[arg];
  pt.status = rep.converged ? PointStatus::ok : PointStatus::inner_nonconverged;
  // Orbit representatives have the smallest index, so the winner is always
  // one that was solved directly.
  pt.w = g.grid.points[arg];
  if (!rep.argopt.empty()) pt.encoder = rep.argopt[0];
  return pt;
}

}  // namespace

std::vector<CurvePoint> sweep_grid(const std::vector<double>& r_primes, const SweepSpec& sweep) {
  for (double r : r_primes) {
    if (!(r >= 0.0)) throw std::invalid_argument("r_prime must be >= 0");
  }
  GridState coarse = make_state(sweep, sweep.step);
  std::optional<GridState> fine;
  const double fine_step = sweep.step / 2.0;

  const std::size_t n = r_primes.size();
  std::vector<double> clamped(n);
  std::vector<std::vector<std::size_t>> band(n);
  std::vector<bool> use_fine(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    clamped[k] = std::min(r_primes[k], sweep.r_max);
    band[k] = feasible(coarse, clamped[k]);
    if (band[k].empty()) {
      if (!fine) fine = make_state(sweep, fine_step);
      band[k] = feasible(*fine, clamped[k]);
      use_fine[k] = true;
    }
  }
  std::vector<std::size_t> need_coarse, need_fine;
  for (std::size_t k = 0; k < n; ++k) {
    auto& dst = use_fine[k] ? need_fine : need_coarse;
    dst.insert(dst.end(), band[k].begin(), band[k].end());
  }
  solve_needed(coarse, need_coarse, sweep);
  if (fine) solve_needed(*fine, need_fine, sweep);

  std::vector<CurvePoint> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (band[k].empty()) {
      CurvePoint& p = pts[k];
      p.r_prime = clamped[k];
      p.status = PointStatus::no_feasible_w;
      p.grid_step = fine_step;
      p.epsilon = fine->epsilon;
      continue;
    }
    pts[k] = use_fine[k] ? pick(*fine, band[k], clamped[k], fine_step, sweep.maximize)
                         : pick(coarse, band[k], clamped[k], sweep.step, sweep.maximize);
  }

  // Running max (or min) over increasing r'.
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return clamped[a] < clamped[b]; });
  const double sign = sweep.maximize ? 1.0 : -1.0;
  double running = -std::numeric_limits<double>::infinity();
  for (std::size_t k : order) {
    if (pts[k].status == PointStatus::no_feasible_w) continue;
    running = std::max(running, sign * pts[k].raw_value);
    pts[k].value = sign * running;
  }
  return pts;
}

}  // namespace sideinfo::detail

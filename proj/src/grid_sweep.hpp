#pragma once

#include "sideinfo/ba.hpp"
#include "sideinfo/case2.hpp"
#include "sideinfo/prob.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <thread>
#include <vector>

namespace sideinfo::detail {

// Worker count from SIDEINFO_THREADS; 0 or 1 runs inline.  Unset means one
// worker per hardware thread.
inline int worker_count() {
  if (const char* env = std::getenv("SIDEINFO_THREADS")) {
    return std::max(0, std::atoi(env));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Runs body(i) for i in [0, n).  Each index is handled by exactly one
// worker and results are expected in per-index slots, so the outcome does
// not depend on the thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(worker_count());
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t used = std::min(workers, n);
  for (std::size_t w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += used) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// For each grid point, the smallest grid index producing the same optimum.
// Relabeling the auxiliary alphabet leaves every objective unchanged, and a
// kernel whose rows all agree carries no information, like the degenerate
// kernel at index 0.
inline std::vector<std::size_t> canonical_grid_index(const SimplexGrid& grid) {
  const std::size_t n = grid.points.size();
  std::vector<std::size_t> canon(n);
  std::iota(canon.begin(), canon.end(), std::size_t{0});
  if (n == 0) return canon;

  const auto key = [&](const RowMajorMatrix& m) {
    std::vector<long> k(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) k[i] = std::lround(m.data()[i] / grid.step);
    return k;
  };
  std::map<std::vector<long>, std::size_t> lookup;
  for (std::size_t i = 0; i < n; ++i) lookup.emplace(key(grid.points[i].matrix()), i);

  const int k = static_cast<int>(grid.points[0].cols());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  if (k <= 6) {
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
  }

  for (std::size_t i = 0; i < n; ++i) {
    const RowMajorMatrix& m = grid.points[i].matrix();
    bool rows_equal = true;
    for (Eigen::Index r = 1; r < m.rows() && rows_equal; ++r) {
      rows_equal = (m.row(r) - m.row(0)).cwiseAbs().maxCoeff() < 1e-12;
    }
    if (rows_equal) {
      canon[i] = 0;
      continue;
    }
    for (const auto& p : perms) {
      RowMajorMatrix relabeled(m.rows(), m.cols());
      for (int c = 0; c < k; ++c) relabeled.col(c) = m.col(p[c]);
      const auto it = lookup.find(key(relabeled));
      if (it != lookup.end()) canon[i] = std::min(canon[i], it->second);
    }
  }
  return canon;
}

// Default acceptance band: the coarser of 0.02 bits and the widest gap
// between neighbouring side-information rates the grid can produce.
inline double auto_band(std::vector<double> rates) {
  std::sort(rates.begin(), rates.end());
  double widest = 0.0;
  for (std::size_t i = 1; i < rates.size(); ++i) widest = std::max(widest, rates[i] - rates[i - 1]);
  return std::max(0.02, widest);
}

// Grid search over auxiliary kernels: for each r' (clamped to r_max) keep
// grid points with r' - epsilon <= rate <= r', solve the inner problem on
// each and report the best.  An empty band halves the step once.
struct SweepSpec {
  std::function<SimplexGrid(double)> make_grid;
  std::function<double(const CondKernel&)> rate;
  std::function<SolveReport(const CondKernel&)> inner;
  double r_max = 0.0;
  double epsilon = 0.0;  // 0 picks auto_band
  double step = 0.05;
  bool maximize = true;
};

std::vector<CurvePoint> sweep_grid(const std::vector<double>& r_primes, const SweepSpec& sweep);

}  // namespace sideinfo::detail

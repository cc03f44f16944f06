#pragma once

#include "sideinfo/instances.hpp"
#include "sideinfo/prob.hpp"

#include <random>

namespace testing_util {

inline Eigen::VectorXd random_simplex(std::mt19937& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = e(rng);
  return v / v.sum();
}

inline sideinfo::JointPmf random_joint(std::mt19937& rng, std::vector<sideinfo::Alphabet> axes) {
  const auto n = static_cast<int>(sideinfo::cell_count(axes));
  return sideinfo::JointPmf(std::move(axes), random_simplex(rng, n));
}

inline sideinfo::RowMajorMatrix random_rows(std::mt19937& rng, int rows, int cols) {
  sideinfo::RowMajorMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) m.row(r) = random_simplex(rng, cols).transpose();
  return m;
}

inline sideinfo::CondKernel random_kernel(std::mt19937& rng, std::vector<sideinfo::Alphabet> given,
                                          std::vector<sideinfo::Alphabet> out) {
  const auto r = static_cast<int>(sideinfo::cell_count(given));
  const auto c = static_cast<int>(sideinfo::cell_count(out));
  return sideinfo::CondKernel(std::move(given), std::move(out), random_rows(rng, r, c));
}

// Binary channel instance with random state pmf and kernel.
inline sideinfo::ChannelInstance random_binary_channel(std::mt19937& rng) {
  using sideinfo::Alphabet;
  const Alphabet X(2, "X"), Y(2, "Y"), S1(2, "S1"), S2(2, "S2");
  return sideinfo::ChannelInstance(random_joint(rng, {S1, S2}), random_kernel(rng, {X, S1, S2}, {Y}));
}

inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

}  // namespace testing_util

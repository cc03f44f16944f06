#include "sideinfo/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sideinfo {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kZeroThreshold = 1e-15;

void validate_axes(const AxisSet& set, int rank, const char* what) {
  for (int a : set) {
    if (a < 0 || a >= rank) {
      throw std::invalid_argument(std::string(what) + ": axis " +
                                  std::to_string(a) + " out of range");
    }
  }
  AxisSet sorted = set;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument(std::string(what) + ": repeated axis");
  }
}

// For every flat cell of `axes`, the flat index of its projection onto
// `keep` (in the order given by `keep`).
std::vector<Eigen::Index> projection_map(std::span<const Alphabet> axes,
                                         const AxisSet& keep) {
  const Eigen::Index n = cell_count(axes);
  std::vector<Eigen::Index> kept_stride(axes.size(), 0);
  Eigen::Index s = 1;
  for (auto it = keep.rbegin(); it != keep.rend(); ++it) {
    kept_stride[*it] = s;
    s *= axes[*it].size;
  }
  std::vector<Eigen::Index> out(static_cast<std::size_t>(n));
  std::vector<int> idx(axes.size(), 0);
  Eigen::Index target = 0;
  for (Eigen::Index flat = 0; flat < n; ++flat) {
    out[static_cast<std::size_t>(flat)] = target;
    for (int a = static_cast<int>(axes.size()) - 1; a >= 0; --a) {
      if (++idx[a] < axes[a].size) {
        target += kept_stride[a];
        break;
      }
      target -= kept_stride[a] * (axes[a].size - 1);
      idx[a] = 0;
    }
  }
  return out;
}

double entropy_of(const Eigen::VectorXd& v) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double p = v[i];
    if (p > kZeroThreshold) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

Eigen::VectorXd normalized(Eigen::VectorXd probs, const char* what) {
  if (!probs.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
  if ((probs.array() < 0.0).any()) {
    throw std::invalid_argument(std::string(what) + ": negative probability");
  }
  const double total = probs.sum();
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw std::invalid_argument(std::string(what) + ": entries sum to " +
                                std::to_string(total));
  }
  probs /= total;
  return probs;
}

}  // namespace

Alphabet::Alphabet(int size_, std::string label_)
    : size(size_), label(std::move(label_)) {
  if (size < 1) {
    throw std::invalid_argument("alphabet '" + label + "' must be nonempty");
  }
}

Eigen::Index cell_count(std::span<const Alphabet> axes) {
  Eigen::Index n = 1;
  for (const auto& a : axes) n *= a.size;
  return n;
}

std::vector<Eigen::Index> row_major_strides(std::span<const Alphabet> axes) {
  std::vector<Eigen::Index> strides(axes.size(), 1);
  for (int a = static_cast<int>(axes.size()) - 2; a >= 0; --a) {
    strides[a] = strides[a + 1] * axes[a + 1].size;
  }
  return strides;
}

std::vector<int> unravel(Eigen::Index flat, std::span<const Alphabet> axes) {
  std::vector<int> idx(axes.size(), 0);
  for (int a = static_cast<int>(axes.size()) - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % axes[a].size);
    flat /= axes[a].size;
  }
  return idx;
}

// ---------------------------------------------------------------------------
// JointPmf

JointPmf::JointPmf(std::vector<Alphabet> axes, Eigen::VectorXd probs)
    : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("JointPmf: no axes");
  if (probs.size() != cell_count(axes_)) {
    throw std::invalid_argument("JointPmf: expected " +
                                std::to_string(cell_count(axes_)) +
                                " entries, got " + std::to_string(probs.size()));
  }
  probs_ = normalized(std::move(probs), "JointPmf");
}

JointPmf JointPmf::uniform(std::vector<Alphabet> axes) {
  const Eigen::Index n = cell_count(axes);
  return JointPmf(std::move(axes),
                  Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

JointPmf JointPmf::point_mass(std::vector<Alphabet> axes,
                              std::initializer_list<int> index) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(cell_count(axes));
  JointPmf tmp = uniform(axes);
  v[tmp.flat_index(std::span<const int>(index.begin(), index.size()))] = 1.0;
  return JointPmf(std::move(axes), std::move(v));
}

Eigen::Index JointPmf::flat_index(std::span<const int> index) const {
  if (index.size() != axes_.size()) {
    throw std::invalid_argument("JointPmf: index rank mismatch");
  }
  Eigen::Index flat = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (index[a] < 0 || index[a] >= axes_[a].size) {
      throw std::out_of_range("JointPmf: index out of range");
    }
    flat = flat * axes_[a].size + index[a];
  }
  return flat;
}

double JointPmf::at(std::span<const int> index) const {
  return probs_[flat_index(index)];
}

double JointPmf::at(std::initializer_list<int> index) const {
  return at(std::span<const int>(index.begin(), index.size()));
}

// ---------------------------------------------------------------------------
// CondKernel

CondKernel::CondKernel(std::vector<Alphabet> given, std::vector<Alphabet> out,
                       RowMajorMatrix probs)
    : given_(std::move(given)), out_(std::move(out)), probs_(std::move(probs)) {
  if (out_.empty()) throw std::invalid_argument("CondKernel: no out axes");
  if (probs_.rows() != cell_count(given_) || probs_.cols() != cell_count(out_)) {
    throw std::invalid_argument("CondKernel: table shape does not match axes");
  }
  if (!probs_.allFinite() || (probs_.array() < 0.0).any()) {
    throw std::invalid_argument("CondKernel: entries must be finite and >= 0");
  }
  for (Eigen::Index r = 0; r < probs_.rows(); ++r) {
    const double total = probs_.row(r).sum();
    if (std::abs(total - 1.0) > kNormTolerance) {
      throw std::invalid_argument("CondKernel: slice " + std::to_string(r) +
                                  " sums to " + std::to_string(total));
    }
    probs_.row(r) /= total;
  }
}

CondKernel CondKernel::uniform(std::vector<Alphabet> given,
                               std::vector<Alphabet> out) {
  const Eigen::Index rows = cell_count(given);
  const Eigen::Index cols = cell_count(out);
  return CondKernel(std::move(given), std::move(out),
                    RowMajorMatrix::Constant(rows, cols, 1.0 / cols));
}

CondKernel CondKernel::deterministic(std::vector<Alphabet> given,
                                     std::vector<Alphabet> out,
                                     std::span<const int> map) {
  const Eigen::Index rows = cell_count(given);
  const Eigen::Index cols = cell_count(out);
  if (static_cast<Eigen::Index>(map.size()) != rows) {
    throw std::invalid_argument("CondKernel::deterministic: map size mismatch");
  }
  RowMajorMatrix m = RowMajorMatrix::Zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (map[r] < 0 || map[r] >= cols) {
      throw std::invalid_argument("CondKernel::deterministic: bad target");
    }
    m(r, map[r]) = 1.0;
  }
  return CondKernel(std::move(given), std::move(out), std::move(m));
}

// ---------------------------------------------------------------------------
// Operations

JointPmf marginalize(const JointPmf& p, const AxisSet& keep_axes) {
  if (keep_axes.empty()) throw std::invalid_argument("marginalize: empty axis set");
  validate_axes(keep_axes, p.rank(), "marginalize");
  AxisSet keep = keep_axes;
  std::sort(keep.begin(), keep.end());

  std::vector<Alphabet> out_axes;
  for (int a : keep) out_axes.push_back(p.axes()[a]);
  const auto map = projection_map(p.axes(), keep);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(cell_count(out_axes));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[map[i]] += p.probs()[i];
  return JointPmf(std::move(out_axes), std::move(out));
}

JointPmf permute_axes(const JointPmf& p, const AxisSet& order) {
  if (static_cast<int>(order.size()) != p.rank()) {
    throw std::invalid_argument("permute_axes: order must name every axis");
  }
  validate_axes(order, p.rank(), "permute_axes");
  std::vector<Alphabet> out_axes;
  for (int a : order) out_axes.push_back(p.axes()[a]);
  const auto map = projection_map(p.axes(), order);
  Eigen::VectorXd out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) out[map[i]] = p.probs()[i];
  return JointPmf(std::move(out_axes), std::move(out));
}

JointPmf chain(const JointPmf& p, const CondKernel& k, const AxisSet& bind) {
  if (bind.size() != k.given_axes().size()) {
    throw std::invalid_argument("chain: bind must map every given axis");
  }
  validate_axes(bind, p.rank(), "chain");
  for (std::size_t i = 0; i < bind.size(); ++i) {
    if (p.axes()[bind[i]].size != k.given_axes()[i].size) {
      throw std::invalid_argument("chain: alphabet size mismatch on axis " +
                                  std::to_string(bind[i]));
    }
  }
  std::vector<Alphabet> out_axes = p.axes();
  out_axes.insert(out_axes.end(), k.out_axes().begin(), k.out_axes().end());

  const auto row_of = projection_map(p.axes(), bind);
  const Eigen::Index cols = k.cols();
  Eigen::VectorXd out(p.size() * cols);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    out.segment(i * cols, cols) =
        p.probs()[i] * k.matrix().row(row_of[i]).transpose();
  }
  return JointPmf(std::move(out_axes), std::move(out));
}

double entropy(const JointPmf& p) { return entropy_of(p.probs()); }

double entropy(const JointPmf& p, const AxisSet& axes) {
  if (axes.empty()) return 0.0;
  return entropy_of(marginalize(p, axes).probs());
}

double conditional_mutual_information(const JointPmf& p, const AxisSet& a,
                                      const AxisSet& b, const AxisSet& c) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("conditional_mutual_information: empty set");
  }
  AxisSet all;
  all.insert(all.end(), a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  all.insert(all.end(), c.begin(), c.end());
  validate_axes(all, p.rank(), "conditional_mutual_information");

  AxisSet ac = a, bc = b;
  ac.insert(ac.end(), c.begin(), c.end());
  bc.insert(bc.end(), c.begin(), c.end());
  const double v =
      entropy(p, ac) + entropy(p, bc) - entropy(p, all) - entropy(p, c);
  return std::max(v, 0.0);
}

MarkovCheck check_markov(const JointPmf& p, const AxisSet& a, const AxisSet& b,
                         const AxisSet& c, double tol) {
  MarkovCheck out;
  if (b.empty()) {
    out.violation = conditional_mutual_information(p, a, c);
  } else {
    out.violation = conditional_mutual_information(p, a, c, b);
  }
  out.holds = out.violation <= tol;
  return out;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// ---------------------------------------------------------------------------
// Simplex grids

std::size_t simplex_slice_count(int parts, int codomain) {
  // C(parts + codomain - 1, codomain - 1)
  std::size_t r = 1;
  for (int i = 1; i < codomain; ++i) {
    r = r * static_cast<std::size_t>(parts + i) / static_cast<std::size_t>(i);
  }
  return r;
}

namespace {

// All compositions of `parts` into `k` nonnegative integers, lexicographic
// with the first coordinate ascending.
void compositions(int parts, int k, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k - 1) {
    cur.push_back(parts);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= parts; ++v) {
    cur.push_back(v);
    compositions(parts - v, k, cur, out);
    cur.pop_back();
  }
}

}  // namespace

SimplexGrid simplex_grid(const Alphabet& given, const Alphabet& codomain,
                         double step) {
  if (!(step > 0.0) || step > 1.0) {
    throw std::invalid_argument("simplex_grid: step must lie in (0, 1]");
  }
  const double inv = 1.0 / step;
  const int parts = static_cast<int>(std::lround(inv));
  if (parts < 1 || std::abs(parts * step - 1.0) > 1e-9) {
    throw std::invalid_argument("simplex_grid: step must divide 1");
  }

  std::vector<std::vector<int>> rows;
  std::vector<int> cur;
  compositions(parts, codomain.size, cur, rows);

  const int slices = given.size;
  std::size_t total = 1;
  for (int s = 0; s < slices; ++s) {
    total *= rows.size();
    if (total > 10'000'000) {
      throw std::invalid_argument("simplex_grid: grid too large");
    }
  }

  SimplexGrid grid;
  grid.free_dims = codomain.size - 1;
  grid.step = step;
  grid.points.reserve(total);
  std::vector<std::size_t> digit(slices, 0);
  for (std::size_t n = 0; n < total; ++n) {
    RowMajorMatrix m(slices, codomain.size);
    for (int s = 0; s < slices; ++s) {
      for (int j = 0; j < codomain.size; ++j) {
        m(s, j) = static_cast<double>(rows[digit[s]][j]) / parts;
      }
    }
    grid.points.emplace_back(std::vector<Alphabet>{given},
                             std::vector<Alphabet>{codomain}, std::move(m));
    for (int s = slices - 1; s >= 0; --s) {
      if (++digit[s] < rows.size()) break;
      digit[s] = 0;
    }
  }
  return grid;
}

SimplexGrid simplex_grid(int slices, const Alphabet& codomain, double step) {
  return simplex_grid(Alphabet(slices, "slice"), codomain, step);
}

}  // namespace sideinfo

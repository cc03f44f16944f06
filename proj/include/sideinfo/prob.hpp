#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sideinfo {

// Finite alphabet; symbols are the indices 0..size-1.
struct Alphabet {
  int size = 1;
  std::string label;

  Alphabet() = default;
  Alphabet(int size, std::string label);

  bool operator==(const Alphabet&) const = default;
};

using AxisSet = std::vector<int>;
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row-major flattening helpers; the last axis varies fastest.
Eigen::Index cell_count(std::span<const Alphabet> axes);
std::vector<Eigen::Index> row_major_strides(std::span<const Alphabet> axes);
std::vector<int> unravel(Eigen::Index flat, std::span<const Alphabet> axes);

// Dense probability tensor over an ordered list of alphabets.
//
// Construction validates nonnegativity and normalizes when the total is
// within 1e-9 of one; larger deviations are rejected.
class JointPmf {
 public:
  JointPmf(std::vector<Alphabet> axes, Eigen::VectorXd probs);

  static JointPmf uniform(std::vector<Alphabet> axes);
  static JointPmf point_mass(std::vector<Alphabet> axes,
                             std::initializer_list<int> index);

  const std::vector<Alphabet>& axes() const { return axes_; }
  int rank() const { return static_cast<int>(axes_.size()); }
  int axis_size(int axis) const { return axes_.at(axis).size; }
  Eigen::Index size() const { return probs_.size(); }
  const Eigen::VectorXd& probs() const { return probs_; }

  Eigen::Index flat_index(std::span<const int> index) const;
  double at(std::span<const int> index) const;
  double at(std::initializer_list<int> index) const;

 private:
  std::vector<Alphabet> axes_;
  Eigen::VectorXd probs_;
};

// Conditional probability table p(out... | given...).  Rows enumerate the
// given-index tuples, columns the out-index tuples, both row-major.
class CondKernel {
 public:
  CondKernel(std::vector<Alphabet> given, std::vector<Alphabet> out,
             RowMajorMatrix probs);

  static CondKernel uniform(std::vector<Alphabet> given,
                            std::vector<Alphabet> out);
  // Deterministic kernel: row r puts all mass on column map[r].
  static CondKernel deterministic(std::vector<Alphabet> given,
                                  std::vector<Alphabet> out,
                                  std::span<const int> map);

  const std::vector<Alphabet>& given_axes() const { return given_; }
  const std::vector<Alphabet>& out_axes() const { return out_; }
  Eigen::Index rows() const { return probs_.rows(); }
  Eigen::Index cols() const { return probs_.cols(); }
  const RowMajorMatrix& matrix() const { return probs_; }
  double operator()(Eigen::Index row, Eigen::Index col) const {
    return probs_(row, col);
  }

 private:
  std::vector<Alphabet> given_;
  std::vector<Alphabet> out_;
  RowMajorMatrix probs_;
};

// Sums out every axis not in keep_axes.  Kept axes retain their relative
// order in p.
JointPmf marginalize(const JointPmf& p, const AxisSet& keep_axes);

// Product joint p(a) k(b | a[bind]).  bind[i] names the axis of p feeding
// given-axis i of k; the result has p's axes followed by k's out-axes.
JointPmf chain(const JointPmf& p, const CondKernel& k, const AxisSet& bind);

// Reorders axes; order must be a permutation of 0..rank-1.
JointPmf permute_axes(const JointPmf& p, const AxisSet& order);

// Shannon entropy in bits, 0 log 0 = 0.
double entropy(const JointPmf& p);
double entropy(const JointPmf& p, const AxisSet& axes);

// I(A;B|C) in bits.  c may be empty.
double conditional_mutual_information(const JointPmf& p, const AxisSet& a,
                                      const AxisSet& b, const AxisSet& c = {});

inline double mutual_information(const JointPmf& p, const AxisSet& a,
                                 const AxisSet& b) {
  return conditional_mutual_information(p, a, b, {});
}

struct MarkovCheck {
  bool holds = false;
  double violation = 0.0;  // I(A;C|B) in bits
};

// Tests the Markov chain A - B - C.
MarkovCheck check_markov(const JointPmf& p, const AxisSet& a, const AxisSet& b,
                         const AxisSet& c, double tol = 1e-10);

// Binary entropy function in bits.
double binary_entropy(double p);

// Kernels whose rows are probability vectors on a uniform lattice of
// spacing `step`.  Points are in lexicographic order of their rows, first
// row most significant, each row ordered with its first coordinate
// ascending.
struct SimplexGrid {
  int free_dims = 0;
  double step = 1.0;
  std::vector<CondKernel> points;
};

SimplexGrid simplex_grid(const Alphabet& given, const Alphabet& codomain,
                         double step);
SimplexGrid simplex_grid(int slices, const Alphabet& codomain, double step);

// Number of lattice points on one simplex slice: C(n + k - 1, k - 1).
std::size_t simplex_slice_count(int parts, int codomain);

}  // namespace sideinfo

#pragma once

#include "sideinfo/instances.hpp"
#include "sideinfo/prob.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace sideinfo {

class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::size_t kDefaultStrategyCap = 4096;

// Every deterministic map from the product of domain_axes to codomain.
//
// Strategy t is the base-|codomain| number whose digits are the table
// entries, the last domain cell being the least significant digit.  Domain
// cells are the row-major flattening of domain_axes.
class StrategySpace {
 public:
  StrategySpace(std::vector<Alphabet> domain_axes, Alphabet codomain,
                std::vector<std::vector<int>> tables);

  const std::vector<Alphabet>& domain_axes() const { return domain_; }
  const Alphabet& codomain() const { return codomain_; }
  int size() const { return static_cast<int>(tables_.size()); }
  int domain_cells() const { return cells_; }
  const std::vector<int>& table(int t) const { return tables_.at(t); }
  int operator()(int t, int cell) const { return tables_[t][cell]; }
  Alphabet alphabet(std::string label = "T") const {
    return Alphabet(size(), std::move(label));
  }

 private:
  std::vector<Alphabet> domain_;
  Alphabet codomain_;
  int cells_ = 1;
  std::vector<std::vector<int>> tables_;
};

StrategySpace enumerate_strategies(std::vector<Alphabet> domain_axes,
                                   Alphabet codomain,
                                   std::size_t cap = kDefaultStrategyCap);

// p(y | t, s1, s2, v2) = p(y | x = t(s1, v2), s1, s2).  Strategies must map
// S1 x V2 -> X; `v2` names the auxiliary alphabet.
CondKernel lift_channel(const ChannelInstance& ch, const StrategySpace& strategies,
                        const Alphabet& v2);

// d(x, t, s) = d(x, t(s)) for strategies S -> Xhat.
class LiftedDistortion {
 public:
  LiftedDistortion(int x_size, int t_size, int s_size)
      : x_(x_size), t_(t_size), s_(s_size),
        values_(static_cast<std::size_t>(x_size) * t_size * s_size, 0.0) {}

  double operator()(int x, int t, int s) const { return values_[index(x, t, s)]; }
  double& operator()(int x, int t, int s) { return values_[index(x, t, s)]; }
  int x_size() const { return x_; }
  int t_size() const { return t_; }
  int s_size() const { return s_; }

 private:
  std::size_t index(int x, int t, int s) const {
    return (static_cast<std::size_t>(x) * t_ + t) * s_ + s;
  }
  int x_, t_, s_;
  std::vector<double> values_;
};

LiftedDistortion lift_source(const Eigen::MatrixXd& distortion,
                             const StrategySpace& strategies);
LiftedDistortion lift_source(const SourceInstance& src,
                             const StrategySpace& strategies);

enum class CodingCase { CC1, CC2, CC2C, SC1, SC1C, SC2 };

CodingCase parse_coding_case(const std::string& id);
std::string to_string(CodingCase c);

struct AlphabetSizes {
  int x = 1;
  int s1 = 1;
  int s2 = 1;
};

struct CardinalityBound {
  long long v = 0;
  long long u = 0;
};

// Auxiliary alphabet bounds sufficient for each coding case.
CardinalityBound cardinality_bounds(CodingCase c, const AlphabetSizes& sizes);

}  // namespace sideinfo

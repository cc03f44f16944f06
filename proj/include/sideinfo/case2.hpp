#pragma once

#include "sideinfo/ba.hpp"
#include "sideinfo/instances.hpp"
#include "sideinfo/prob.hpp"
#include "sideinfo/strategy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sideinfo {

struct Case2Options {
  double epsilon = 0.0;  // bits; 0 picks max(0.02, grid resolution of R_w)
  double delta = 1e-6;   // bits
  double grid_step = 0.05;
  int v2_size = 2;
  int max_inner_iters = 5000;
  std::size_t strategy_cap = kDefaultStrategyCap;
};

enum class PointStatus { ok, no_feasible_w, inner_nonconverged };

std::string to_string(PointStatus s);

struct CurvePoint {
  double r_prime = 0.0;    // after clamping
  double value = 0.0;      // after the curve post-pass
  double raw_value = 0.0;  // best over the grid at this point alone
  int winning_w = -1;      // index into the grid of step `grid_step`
  PointStatus status = PointStatus::ok;
  int iterations = 0;
  double gap = 0.0;
  double grid_step = 0.0;
  double epsilon = 0.0;
  double winning_rate = 0.0;  // side-information rate of the winning w
  std::optional<CondKernel> w;        // winning auxiliary kernel
  std::optional<CondKernel> encoder;  // its optimizing q
};

// R_w = I(V2;S2) - I(V2;S1) on p(s1,s2) w(v2|s2).
double r_w(const ChannelInstance& ch, const CondKernel& w);

// Strategy channel with encoder state e = (s1, v2), output o = (y, s2, v2)
// and strategies S1 x V2 -> X.
StrategyChannel case2_strategy_channel(const ChannelInstance& ch, const CondKernel& w,
                                       const StrategySpace& strategies);
StrategySpace case2_strategies(const ChannelInstance& ch, int v2_size,
                               std::size_t cap = kDefaultStrategyCap);

// C_w: max over q(t|s1,v2) of J_w, argopt[0] = q.
SolveReport inner_max(const ChannelInstance& ch, const CondKernel& w,
                      const Case2Options& opts = {});
// J_w(q, Q) and U_w(q); q is |S1||V2| x |T|, Q is |Y||S2||V2| x |T|.
double j_w(const ChannelInstance& ch, const CondKernel& w, const RowMajorMatrix& q,
           const RowMajorMatrix& Q);
double u_w_bound(const ChannelInstance& ch, const CondKernel& w, const RowMajorMatrix& q);

SimplexGrid case2_w_grid(const ChannelInstance& ch, int v2_size, double step);

CurvePoint capacity_case2(const ChannelInstance& ch, double r_prime,
                          const Case2Options& opts = {});
// Evaluates every r' sharing one grid sweep; values get a running max over
// increasing r'.
std::vector<CurvePoint> capacity_case2_curve(const ChannelInstance& ch,
                                             const std::vector<double>& r_primes,
                                             const Case2Options& opts = {});

// Causal variant: R_w = I(V2;S2), inner value sum_v2 p(v2) C_v2 with C_v2
// the capacity of strategies S1 -> X into (Y, S2) given V2 = v2.
double r_w_causal(const ChannelInstance& ch, const CondKernel& w);
SolveReport inner_max_causal(const ChannelInstance& ch, const CondKernel& w,
                             const Case2Options& opts = {});
CurvePoint capacity_case2_causal(const ChannelInstance& ch, double r_prime,
                                 const Case2Options& opts = {});
std::vector<CurvePoint> capacity_case2_causal_curve(const ChannelInstance& ch,
                                                    const std::vector<double>& r_primes,
                                                    const Case2Options& opts = {});

// Joint over (S1, S2, V, U, X, Y) realized by w and q(u|s1,v) with
// x = u(s1, v), U ranging over case2_strategies.
JointPmf case2_joint(const ChannelInstance& ch, const CondKernel& w, const RowMajorMatrix& q);

}  // namespace sideinfo

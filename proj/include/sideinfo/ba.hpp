#pragma once

#include "sideinfo/instances.hpp"
#include "sideinfo/prob.hpp"
#include "sideinfo/strategy.hpp"

#include <vector>

namespace sideinfo {

struct BaOptions {
  double delta = 1e-6;  // bits
  int max_iters = 10000;
};

struct TracePoint {
  double objective = 0.0;
  double bound = 0.0;
};

// Result of an alternating-optimization solve.  For maximizations the
// certified interval is [value, value + gap]; for minimizations it is
// [value - gap, value].
struct SolveReport {
  double value = 0.0;  // bits
  double gap = 0.0;    // bits
  int iterations = 0;
  bool converged = false;
  bool distortion_floor = false;  // requested D below the achievable minimum
  double multiplier = 0.0;        // Lagrange multiplier on distortion (bits)
  double distortion = 0.0;        // achieved expected distortion
  std::vector<CondKernel> argopt;
  std::vector<TracePoint> trace;
  // Strategy solves only: log2 q(t|e) of the final iterate.  Entries of
  // argopt[0] may underflow to zero where these stay finite.
  RowMajorMatrix log2_encoder;
};

// Classic capacity max_{p(x)} I(X;Y) of a kernel with given axis X, out Y.
SolveReport ba_capacity(const CondKernel& channel, const BaOptions& opts = {});

// Classic R(D) = min I(X; Xhat) s.t. E d <= D.  argopt[0] is the test
// channel p(xhat | x).
SolveReport ba_rate_distortion(const JointPmf& px, const Eigen::MatrixXd& distortion,
                               double max_distortion, const BaOptions& opts = {});

// Wyner-Ziv source: X seen by the encoder, S by the decoder.
struct WzSource {
  JointPmf joint;               // axes (X, S)
  Eigen::MatrixXd distortion;   // |X| x |Xhat|
};

// Encoder observes (X, S1) as one symbol, decoder observes S2.
WzSource wyner_ziv_view(const SourceInstance& src);

// Minimum expected distortion reachable with any q(t|x).
double wz_distortion_floor(const WzSource& src, const StrategySpace& strategies);
// Smallest distortion reachable at zero rate (a single strategy).
double wz_zero_rate_distortion(const WzSource& src, const StrategySpace& strategies);

// Wyner-Ziv R(D) = min_{q(t|x)} I(T;X|S) over strategies S -> Xhat, by
// alternating minimization with a multiplier sweep.  argopt[0] is q(t|x).
SolveReport wz_primal(const WzSource& src, const StrategySpace& strategies,
                      double max_distortion, const BaOptions& opts = {});

// Inner problem at a fixed multiplier: min_q I(T;X|S) + beta E d (bits).
SolveReport wz_lagrangian(const WzSource& src, const StrategySpace& strategies,
                          double beta, const BaOptions& opts = {});

// ---------------------------------------------------------------------------
// Strategy channels: an encoder observing e ~ p(e) selects a strategy t with
// q(t|e); the decoder sees o ~ p(o | t, e).  The objective
//   J(q, Q) = sum p(e) q(t|e) p(o|t,e) log Q(t|o) / q(t|e)
// equals I(T;O) - I(T;E) at Q = Q*(q).
struct StrategyChannel {
  Eigen::VectorXd encoder_prob;  // p(e)
  int strategies = 0;
  int outputs = 0;
  RowMajorMatrix lifted;  // row t * |E| + e, column o

  int encoder_states() const { return static_cast<int>(encoder_prob.size()); }
  auto lifted_row(int t, int e) const {
    return lifted.row(static_cast<Eigen::Index>(t) * encoder_states() + e);
  }
};

// q is |E| x |T|, Q is |O| x |T|; rows are distributions over strategies.
RowMajorMatrix uniform_encoder(const StrategyChannel& sc);
RowMajorMatrix decoder_posterior(const StrategyChannel& sc, const RowMajorMatrix& q);
RowMajorMatrix encoder_update(const StrategyChannel& sc, const RowMajorMatrix& Q);
double strategy_objective(const StrategyChannel& sc, const RowMajorMatrix& q,
                          const RowMajorMatrix& Q);
double strategy_upper_bound(const StrategyChannel& sc, const RowMajorMatrix& q);

// J(q, Q*(q)) and U(q) from log2 q(t|e), without forming q.
struct StrategyBounds {
  double objective = 0.0;
  double upper = 0.0;
};
StrategyBounds strategy_bounds_log2(const StrategyChannel& sc, const RowMajorMatrix& log2_q);

// Alternating maximization of J, stopping when U(q) - J(q, Q*) < delta.
// argopt[0] is q(t|e).
SolveReport maximize_strategy_objective(const StrategyChannel& sc,
                                        const BaOptions& opts = {});

// Which states each side observes in gp_channel_capacity.
struct StateVisibility {
  bool encoder_s1 = true;
  bool encoder_s2 = false;
  bool decoder_s1 = false;
  bool decoder_s2 = true;
};

// Strategy channel of `ch` when the encoder sees E and the decoder sees
// (Y, O-states).  Strategies map E -> X.
StrategyChannel state_strategy_channel(const ChannelInstance& ch,
                                       const StateVisibility& vis,
                                       std::size_t cap = kDefaultStrategyCap);

// max_{q(t|e)} I(T;O) - I(T;E), the Gelfand-Pinsker-type capacity with
// state information E at the encoder and O at the decoder.
SolveReport gp_channel_capacity(const ChannelInstance& ch, const StateVisibility& vis,
                                const BaOptions& opts = {});

}  // namespace sideinfo

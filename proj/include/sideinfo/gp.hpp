#pragma once

#include "sideinfo/ba.hpp"
#include "sideinfo/case2.hpp"
#include "sideinfo/instances.hpp"
#include "sideinfo/prob.hpp"
#include "sideinfo/strategy.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sideinfo {

class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace(std::move(trace)) {}
  std::vector<double> trace;
};

// a . z + offset <= 0, a given sparsely.
struct AffineConstraint {
  std::vector<std::pair<int, double>> terms;
  double offset = 0.0;
};

// Convex-form geometric program: maximize c . z subject to affine
// constraints, log sum_{i in G} exp(z_i) <= 0 for each group G, z_i >= 0
// for nonneg vars and z_i <= u for upper bounds.
struct GpProblem {
  int num_vars = 0;
  Eigen::VectorXd objective;
  std::vector<AffineConstraint> affine;
  std::vector<std::vector<int>> lse;
  std::vector<int> nonneg;
  std::vector<std::pair<int, double>> upper;
  double value_scale = 1.0;  // reported value = value_scale * c . z
  std::optional<Eigen::VectorXd> start;

  int constraint_count() const {
    return static_cast<int>(affine.size() + lse.size() + nonneg.size() + upper.size());
  }
};

struct GpOptions {
  double t0 = 1.0;
  double mu = 20.0;
  double newton_tol = 1e-10;  // on lambda^2 / 2
  double tol = 1e-9;          // stop when m / t < tol
  int max_newton_per_stage = 200;
  int max_stages = 60;
  double slater_slack = 1e-8;
};

struct GpReport {
  double value = 0.0;  // value_scale * c . z
  Eigen::VectorXd z_opt;
  int barrier_iters = 0;
  int newton_steps = 0;
  bool slater = false;
  bool certified = false;
  double duality_measure = 0.0;     // value_scale * m / t
  std::vector<double> trace;        // scaled objective after every Newton step
  std::vector<double> stage_values; // scaled objective at the end of each stage
  // Barrier estimates of the constraint multipliers, in the order of
  // affine, lse, nonneg, upper.
  Eigen::VectorXd affine_multipliers;
  Eigen::VectorXd lse_multipliers;
};

GpReport solve_gp(const GpProblem& p, const GpOptions& opts = {});

// Index layout of a Wyner-Ziv dual program.
struct WzGpLayout {
  std::vector<int> alpha;  // per x, -1 when p(x) = 0
  int gamma = -1;
  // y index per (x, s, t), -1 when p(x, s) = 0; flattened (x * |S| + s) * |T| + t
  std::vector<int> y;
  // affine constraint per (x, t) with p(x) > 0, flattened x * |T| + t, -1 otherwise
  std::vector<int> constraint;
  int x_size = 0, s_size = 0, t_size = 0;
};

// Lagrange dual of min I(T;X|S) s.t. E d(X, t(S)) <= D, in convex form over
// variables (alpha | gamma | y).  Works in nats; value_scale converts to bits.
// gamma is capped at 50 / min positive distortion so that D = 0 stays bounded.
GpProblem build_wz_gp(const WzSource& src, const StrategySpace& strategies, double max_distortion,
                      WzGpLayout* layout = nullptr);

struct WzGpOptions {
  GpOptions gp;
  BaOptions primal;
  double tight_tol = 1e-3;
  bool cross_check = true;
};

struct WzGpReport {
  double value = 0.0;  // GP lower bound on R(D), bits
  GpReport gp;
  bool tight = false;  // |value - primal_value| <= tight_tol
  double primal_value = 0.0;
  // q(t|x) recovered from the affine multipliers and the rate and distortion
  // it achieves.
  RowMajorMatrix q;
  double primal_rate = 0.0;
  double primal_distortion = 0.0;
};

WzGpReport wz_rate_via_gp(const WzSource& src, const StrategySpace& strategies,
                          double max_distortion, const WzGpOptions& opts = {});

// q(t|x) from the multipliers of a solved Wyner-Ziv program.
RowMajorMatrix recover_encoder(const GpReport& rep, const WzGpLayout& layout);
// I(T;X|S) in bits and E d for an encoder q(t|x).
std::pair<double, double> wz_rate_and_distortion(const WzSource& src,
                                                 const StrategySpace& strategies,
                                                 const RowMajorMatrix& q);

// Encoder sees (X, S1, V1), decoder sees (S2, V1) with V1 ~ w(v1|s1).
// Joint axes (X', S') with X' = (x, s1, v1) and S' = (s2, v1).
WzSource case1_pair_source(const SourceInstance& src, const CondKernel& w);
StrategySpace case1_strategies(const SourceInstance& src, int v1_size,
                               std::size_t cap = kDefaultStrategyCap);

// Case-1 rate-distortion program for a fixed w: the Wyner-Ziv dual of the
// pair source, with zero-mass cells removed.
GpProblem build_case1_rd_gp(const SourceInstance& src, const CondKernel& w,
                            const StrategySpace& strategies, double max_distortion,
                            WzGpLayout* layout = nullptr);

struct RdCase1Options {
  double epsilon = 0.0;  // 0 picks max(0.02, grid resolution of R_w)
  double grid_step = 0.05;
  int v1_size = 2;
  GpOptions gp;
  std::size_t strategy_cap = kDefaultStrategyCap;
};

// I(V1;S1|S2) on p(s1, s2) w(v1|s1).
double r_w_source(const SourceInstance& src, const CondKernel& w);
SimplexGrid case1_w_grid(const SourceInstance& src, int v1_size, double step);

// Minimum over feasible grid kernels w of the GP value; `encoder` holds
// q(t | x, s1, v1) recovered from the winning program.
CurvePoint rd_case1(const SourceInstance& src, double max_distortion, double r_prime,
                    const RdCase1Options& opts = {});
// Running min over increasing r'.
std::vector<CurvePoint> rd_case1_curve(const SourceInstance& src, double max_distortion,
                                       const std::vector<double>& r_primes,
                                       const RdCase1Options& opts = {});

// Joint over (X, S1, S2, V, U, Xhat) with xhat = u(s2, v).
JointPmf case1_joint(const SourceInstance& src, const CondKernel& w, const RowMajorMatrix& q);

}  // namespace sideinfo

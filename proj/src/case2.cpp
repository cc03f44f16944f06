#include "sideinfo/case2.hpp"

#include "grid_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

namespace sideinfo {

std::string to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::no_feasible_w: return "no-feasible-w";
    case PointStatus::inner_nonconverged: return "inner-nonconverged";
  }
  return "?";
}

namespace {

constexpr double kTiny = 1e-15;

void check_w(const ChannelInstance& ch, const CondKernel& w) {
  if (w.given_axes().size() != 1 || w.given_axes()[0].size != ch.s2.size ||
      w.out_axes().size() != 1) {
    throw std::invalid_argument("w must be a kernel p(v2 | s2) over the channel's S2");
  }
}

// p(s1, s2, v2) with axes (S1, S2, V2).
JointPmf state_aux_joint(const ChannelInstance& ch, const CondKernel& w) {
  check_w(ch, w);
  return chain(ch.states, w, {1});
}

void check_options(const Case2Options& o) {
  if (o.epsilon < 0.0 || !(o.delta > 0.0) || !(o.grid_step > 0.0) || o.grid_step > 1.0 ||
      o.v2_size < 1 || o.max_inner_iters < 1) {
    throw std::invalid_argument("invalid Case2Options");
  }
}

BaOptions inner_options(const Case2Options& o) { return {o.delta, o.max_inner_iters}; }

}  // namespace

double r_w(const ChannelInstance& ch, const CondKernel& w) {
  const JointPmf p = state_aux_joint(ch, w);
  const double r = mutual_information(p, {2}, {1}) - mutual_information(p, {2}, {0});
  const double direct = conditional_mutual_information(p, {2}, {1}, {0});
  if (std::abs(r - direct) > 1e-10) {
    throw std::logic_error("r_w: I(V2;S2) - I(V2;S1) disagrees with I(V2;S2|S1)");
  }
  return r;
}

StrategySpace case2_strategies(const ChannelInstance& ch, int v2_size, std::size_t cap) {
  return enumerate_strategies({ch.s1, Alphabet(v2_size, "V2")}, ch.x, cap);
}

StrategyChannel case2_strategy_channel(const ChannelInstance& ch, const CondKernel& w,
                                       const StrategySpace& strategies) {
  const JointPmf p = state_aux_joint(ch, w);
  const Alphabet v2 = w.out_axes()[0];
  const CondKernel lifted = lift_channel(ch, strategies, v2);
  const int n1 = ch.s1.size, n2 = ch.s2.size, nv = v2.size, ny = ch.y.size;
  const int nt = strategies.size();

  StrategyChannel sc;
  sc.strategies = nt;
  sc.outputs = ny * n2 * nv;
  sc.encoder_prob = Eigen::VectorXd::Zero(n1 * nv);
  for (int s1 = 0; s1 < n1; ++s1) {
    for (int s2 = 0; s2 < n2; ++s2) {
      for (int v = 0; v < nv; ++v) sc.encoder_prob[s1 * nv + v] += p.at({s1, s2, v});
    }
  }
  const int ne = n1 * nv;
  sc.lifted = RowMajorMatrix::Zero(static_cast<Eigen::Index>(nt) * ne, sc.outputs);
  for (int t = 0; t < nt; ++t) {
    for (int s1 = 0; s1 < n1; ++s1) {
      for (int v = 0; v < nv; ++v) {
        const int e = s1 * nv + v;
        const Eigen::Index row = static_cast<Eigen::Index>(t) * ne + e;
        const double pe = sc.encoder_prob[e];
        if (pe <= kTiny) {
          sc.lifted.row(row).setConstant(1.0 / sc.outputs);
          continue;
        }
        for (int s2 = 0; s2 < n2; ++s2) {
          const double ps2 = p.at({s1, s2, v}) / pe;
          if (ps2 <= 0.0) continue;
          const Eigen::Index lrow = ((static_cast<Eigen::Index>(t) * n1 + s1) * n2 + s2) * nv + v;
          for (int y = 0; y < ny; ++y) {
            sc.lifted(row, (y * n2 + s2) * nv + v) += ps2 * lifted(lrow, y);
          }
        }
      }
    }
  }
  return sc;
}

SolveReport inner_max(const ChannelInstance& ch, const CondKernel& w, const Case2Options& opts) {
  const StrategySpace st = case2_strategies(ch, w.out_axes()[0].size, opts.strategy_cap);
  return maximize_strategy_objective(case2_strategy_channel(ch, w, st), inner_options(opts));
}

double j_w(const ChannelInstance& ch, const CondKernel& w, const RowMajorMatrix& q,
           const RowMajorMatrix& Q) {
  const StrategySpace st = case2_strategies(ch, w.out_axes()[0].size,
                                            std::numeric_limits<std::size_t>::max());
  return strategy_objective(case2_strategy_channel(ch, w, st), q, Q);
}

double u_w_bound(const ChannelInstance& ch, const CondKernel& w, const RowMajorMatrix& q) {
  const StrategySpace st = case2_strategies(ch, w.out_axes()[0].size,
                                            std::numeric_limits<std::size_t>::max());
  return strategy_upper_bound(case2_strategy_channel(ch, w, st), q);
}

SimplexGrid case2_w_grid(const ChannelInstance& ch, int v2_size, double step) {
  return simplex_grid(ch.s2, Alphabet(v2_size, "V2"), step);
}

CurvePoint capacity_case2(const ChannelInstance& ch, double r_prime, const Case2Options& opts) {
  return capacity_case2_curve(ch, {r_prime}, opts).front();
}

std::vector<CurvePoint> capacity_case2_curve(const ChannelInstance& ch,
                                             const std::vector<double>& r_primes,
                                             const Case2Options& opts) {
  const double r_max = entropy(ch.states) - entropy(ch.states, {0});
  check_options(opts);
  detail::SweepSpec sweep;
  sweep.make_grid = [&](double step) { return case2_w_grid(ch, opts.v2_size, step); };
  sweep.rate = [&](const CondKernel& w) { return r_w(ch, w); };
  sweep.inner = [&](const CondKernel& w) { return inner_max(ch, w, opts); };
  sweep.r_max = r_max;
  sweep.epsilon = opts.epsilon;
  sweep.step = opts.grid_step;
  return detail::sweep_grid(r_primes, sweep);
}

double r_w_causal(const ChannelInstance& ch, const CondKernel& w) {
  return mutual_information(state_aux_joint(ch, w), {2}, {1});
}

SolveReport inner_max_causal(const ChannelInstance& ch, const CondKernel& w,
                             const Case2Options& opts) {
  const JointPmf p = state_aux_joint(ch, w);
  const int n1 = ch.s1.size, n2 = ch.s2.size, nv = w.out_axes()[0].size, ny = ch.y.size;
  const StrategySpace st = enumerate_strategies({ch.s1}, ch.x, opts.strategy_cap);
  const int nt = st.size();

  SolveReport total;
  total.converged = true;
  RowMajorMatrix q = RowMajorMatrix::Constant(nv, nt, 1.0 / nt);
  for (int v = 0; v < nv; ++v) {
    double pv = 0.0;
    for (int s1 = 0; s1 < n1; ++s1) {
      for (int s2 = 0; s2 < n2; ++s2) pv += p.at({s1, s2, v});
    }
    if (pv <= kTiny) continue;
    RowMajorMatrix k = RowMajorMatrix::Zero(nt, ny * n2);
    for (int t = 0; t < nt; ++t) {
      for (int s1 = 0; s1 < n1; ++s1) {
        for (int s2 = 0; s2 < n2; ++s2) {
          const double ps = p.at({s1, s2, v}) / pv;
          if (ps <= 0.0) continue;
          for (int y = 0; y < ny; ++y) k(t, y * n2 + s2) += ps * ch.transition(y, st(t, s1), s1, s2);
        }
      }
    }
    const SolveReport r = ba_capacity(
        CondKernel({st.alphabet("U")}, {ch.y, ch.s2}, std::move(k)), inner_options(opts));
    total.value += pv * r.value;
    total.gap += pv * r.gap;
    total.iterations = std::max(total.iterations, r.iterations);
    total.converged = total.converged && r.converged;
    q.row(v) = r.argopt[0].matrix().row(0);
  }
  total.argopt.emplace_back(std::vector<Alphabet>{w.out_axes()[0]},
                            std::vector<Alphabet>{st.alphabet("U")}, std::move(q));
  return total;
}

CurvePoint capacity_case2_causal(const ChannelInstance& ch, double r_prime,
                                 const Case2Options& opts) {
  return capacity_case2_causal_curve(ch, {r_prime}, opts).front();
}

std::vector<CurvePoint> capacity_case2_causal_curve(const ChannelInstance& ch,
                                                    const std::vector<double>& r_primes,
                                                    const Case2Options& opts) {
  const double r_max = entropy(ch.states, {1});
  check_options(opts);
  detail::SweepSpec sweep;
  sweep.make_grid = [&](double step) { return case2_w_grid(ch, opts.v2_size, step); };
  sweep.rate = [&](const CondKernel& w) { return r_w_causal(ch, w); };
  sweep.inner = [&](const CondKernel& w) { return inner_max_causal(ch, w, opts); };
  sweep.r_max = r_max;
  sweep.epsilon = opts.epsilon;
  sweep.step = opts.grid_step;
  return detail::sweep_grid(r_primes, sweep);
}

JointPmf case2_joint(const ChannelInstance& ch, const CondKernel& w, const RowMajorMatrix& q) {
  const JointPmf p = state_aux_joint(ch, w);
  const Alphabet v2 = w.out_axes()[0];
  const StrategySpace st =
      case2_strategies(ch, v2.size, std::numeric_limits<std::size_t>::max());
  const int n1 = ch.s1.size, n2 = ch.s2.size, nv = v2.size, nx = ch.x.size, ny = ch.y.size;
  const int nt = st.size();
  if (q.rows() != n1 * nv || q.cols() != nt) {
    throw std::invalid_argument("case2_joint: q must be |S1||V2| x |T|");
  }
  const std::vector<Alphabet> axes{ch.s1, ch.s2, v2, st.alphabet("U"), ch.x, ch.y};
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(cell_count(axes));
  for (int s1 = 0; s1 < n1; ++s1) {
    for (int s2 = 0; s2 < n2; ++s2) {
      for (int v = 0; v < nv; ++v) {
        const double base = p.at({s1, s2, v});
        if (base <= 0.0) continue;
        for (int u = 0; u < nt; ++u) {
          const double pu = base * q(s1 * nv + v, u);
          if (pu <= 0.0) continue;
          const int x = st(u, s1 * nv + v);
          for (int y = 0; y < ny; ++y) {
            const Eigen::Index idx =
                ((((static_cast<Eigen::Index>(s1) * n2 + s2) * nv + v) * nt + u) * nx + x) * ny + y;
            probs[idx] = pu * ch.transition(y, x, s1, s2);
          }
        }
      }
    }
  }
  return JointPmf(axes, std::move(probs));
}

}  // namespace sideinfo

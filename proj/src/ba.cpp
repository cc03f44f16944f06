#include "sideinfo/ba.hpp"

#include "multiplier_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sideinfo {

namespace {

constexpr double kTiny = 1e-15;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Inner solves of a multiplier sweep run tighter than the outer tolerance so
// that the swept value inherits the requested accuracy.
BaOptions inner_options(const BaOptions& opts) {
  BaOptions inner = opts;
  inner.delta = std::min(opts.delta * 1e-2, 1e-9);
  return inner;
}

double min_positive(const Eigen::MatrixXd& d) {
  double m = kInf;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d.data()[i] > 0.0) m = std::min(m, d.data()[i]);
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Channel capacity

SolveReport ba_capacity(const CondKernel& channel, const BaOptions& opts) {
  if (!(opts.delta > 0.0)) throw std::invalid_argument("ba_capacity: delta must be > 0");
  const RowMajorMatrix& W = channel.matrix();
  const Eigen::Index nx = W.rows(), ny = W.cols();
  Eigen::VectorXd p = Eigen::VectorXd::Constant(nx, 1.0 / nx);

  // D(W(.|x) || py) in bits for every x.
  auto divergences = [&](const Eigen::VectorXd& py) {
    Eigen::VectorXd div = Eigen::VectorXd::Zero(nx);
    for (Eigen::Index x = 0; x < nx; ++x) {
      for (Eigen::Index y = 0; y < ny; ++y) {
        const double w = W(x, y);
        if (w > kTiny) div[x] += w * std::log2(w / py[y]);
      }
    }
    return div;
  };

  SolveReport rep;
  for (int it = 1; it <= opts.max_iters; ++it) {
    const Eigen::VectorXd py = W.transpose() * p;
    const Eigen::VectorXd div = divergences(py);
    const double mi = p.dot(div);
    const double upper = div.maxCoeff();
    rep.trace.push_back({mi, upper});
    rep.iterations = it;
    rep.value = mi;
    rep.gap = std::max(upper - mi, 0.0);
    if (rep.gap < opts.delta) {
      rep.converged = true;
      break;
    }
    if (it == opts.max_iters) break;  // keep p consistent with the reported value
    Eigen::VectorXd next(nx);
    for (Eigen::Index x = 0; x < nx; ++x) next[x] = p[x] * std::exp2(div[x] - upper);
    p = next / next.sum();
  }
  RowMajorMatrix px = p.transpose();
  rep.argopt.emplace_back(std::vector<Alphabet>{Alphabet(1, "1")},
                          channel.given_axes(), std::move(px));
  return rep;
}

// ---------------------------------------------------------------------------
// Classic rate-distortion

namespace {

SolveReport rd_lagrangian(const Eigen::VectorXd& px, const Eigen::MatrixXd& d,
                          double beta, const BaOptions& opts) {
  const Eigen::Index nx = d.rows(), nh = d.cols();
  Eigen::MatrixXd A(nx, nh);
  for (Eigen::Index x = 0; x < nx; ++x) {
    for (Eigen::Index h = 0; h < nh; ++h) A(x, h) = std::exp2(-beta * d(x, h));
  }
  Eigen::VectorXd q = Eigen::VectorXd::Constant(nh, 1.0 / nh);
  Eigen::MatrixXd Q(nx, nh);
  SolveReport rep;
  for (int it = 1; it <= opts.max_iters; ++it) {
    const Eigen::VectorXd Z = A * q;
    for (Eigen::Index x = 0; x < nx; ++x) {
      Q.row(x) = (A.row(x).array() * q.transpose().array()) / Z[x];
    }
    const Eigen::VectorXd qn = Q.transpose() * px;

    double objective = 0.0, dist = 0.0;
    for (Eigen::Index x = 0; x < nx; ++x) {
      if (px[x] <= kTiny) continue;
      for (Eigen::Index h = 0; h < nh; ++h) {
        const double w = px[x] * Q(x, h);
        if (w <= kTiny) continue;
        objective += w * (std::log2(Q(x, h) / qn[h]) + beta * d(x, h));
        dist += w * d(x, h);
      }
    }
    double lower = 0.0;
    for (Eigen::Index x = 0; x < nx; ++x) {
      if (px[x] > kTiny) lower -= px[x] * std::log2(Z[x]);
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nh);
    for (Eigen::Index x = 0; x < nx; ++x) {
      if (px[x] > kTiny) c += px[x] * A.row(x).transpose() / Z[x];
    }
    lower -= std::log2(c.maxCoeff());

    rep.trace.push_back({objective, lower});
    rep.iterations = it;
    rep.value = objective;
    rep.gap = std::max(objective - lower, 0.0);
    rep.distortion = dist;
    q = qn;
    if (rep.gap < opts.delta) {
      rep.converged = true;
      break;
    }
  }
  rep.multiplier = beta;
  RowMajorMatrix Qr = Q;
  rep.argopt.emplace_back(std::vector<Alphabet>{Alphabet(int(nx), "X")},
                          std::vector<Alphabet>{Alphabet(int(nh), "Xhat")},
                          std::move(Qr));
  return rep;
}

// Sweeps the distortion multiplier: R(D) = max_beta F(beta) - beta D, where
// F(beta) is the Lagrangian minimum.  `solve` returns the inner report with
// value F(beta) and distortion E d; the outer value is converted to a rate.
//
// Every inner solve also yields an achievable (distortion, rate) pair, and
// mixing two encoders moves the distortion linearly while the rate stays at
// or below the chord.  Near a kink of R(D) the inner iteration converges
// slowly at the optimal multiplier but quickly on either side, so the chord
// between the best bracketing pair is usually the sharper estimate.
template <typename Solve>
SolveReport sweep_multiplier(Solve&& solve, double max_distortion, double floor,
                             double beta_max) {
  SolveReport rep;
  if (max_distortion < floor - 1e-12) {
    rep = solve(beta_max);
    rep.distortion_floor = true;
    rep.value -= beta_max * rep.distortion;  // rate at the floor
    return rep;
  }
  struct Point {
    double distortion, rate;
    RowMajorMatrix encoder;
  };
  std::vector<Point> points;
  double dual_lower = 0.0;
  auto evaluate = [&](double beta) {
    SolveReport r = solve(beta);
    const double lower = r.trace.empty() ? r.value : r.trace.back().bound;
    dual_lower = std::max(dual_lower, lower - beta * max_distortion);
    points.push_back({r.distortion, r.value - beta * r.distortion, r.argopt.at(0).matrix()});
    return r;
  };
  auto dual = [&](double beta) { return evaluate(beta).value - beta * max_distortion; };
  const auto best = detail::golden_section_max(dual, 0.0, beta_max, 1e-7);
  rep = evaluate(best.argmax);
  rep.value = std::max(rep.value - best.argmax * max_distortion, 0.0);

  double chord = kInf;
  int ia = -1, ib = -1;
  double lambda = 1.0;
  for (int a = 0; a < static_cast<int>(points.size()); ++a) {
    if (points[a].distortion > max_distortion) continue;
    if (points[a].rate < chord) {
      chord = points[a].rate;
      ia = ib = a;
      lambda = 1.0;
    }
    for (int b = 0; b < static_cast<int>(points.size()); ++b) {
      if (points[b].distortion <= max_distortion) continue;
      const double l = (points[b].distortion - max_distortion) /
                       (points[b].distortion - points[a].distortion);
      const double r = l * points[a].rate + (1.0 - l) * points[b].rate;
      if (r < chord) {
        chord = r;
        ia = a;
        ib = b;
        lambda = l;
      }
    }
  }
  if (ia >= 0 && chord < rep.value) {
    rep.value = std::max(chord, 0.0);
    rep.distortion = lambda * points[ia].distortion + (1.0 - lambda) * points[ib].distortion;
    const CondKernel& k = rep.argopt.at(0);
    rep.argopt[0] = CondKernel(k.given_axes(), k.out_axes(),
                               lambda * points[ia].encoder + (1.0 - lambda) * points[ib].encoder);
  }
  rep.gap = std::max(rep.value - dual_lower, 0.0);
  return rep;
}

}  // namespace

SolveReport ba_rate_distortion(const JointPmf& px, const Eigen::MatrixXd& distortion,
                               double max_distortion, const BaOptions& opts) {
  if (px.rank() != 1 || px.size() != distortion.rows()) {
    throw std::invalid_argument("ba_rate_distortion: p(x) and d(x, xhat) disagree");
  }
  if (max_distortion < 0.0) throw std::invalid_argument("ba_rate_distortion: D < 0");
  if (!(opts.delta > 0.0)) throw std::invalid_argument("ba_rate_distortion: delta <= 0");
  const Eigen::VectorXd& p = px.probs();
  const Eigen::Index nx = distortion.rows(), nh = distortion.cols();

  // Zero rate: a constant reconstruction.
  Eigen::VectorXd per_const = distortion.transpose() * p;
  Eigen::Index best_h = 0;
  const double zero_rate = per_const.minCoeff(&best_h);
  if (zero_rate <= max_distortion) {
    SolveReport rep;
    rep.converged = true;
    rep.distortion = zero_rate;
    RowMajorMatrix Q = RowMajorMatrix::Zero(nx, nh);
    Q.col(best_h).setOnes();
    rep.argopt.emplace_back(std::vector<Alphabet>{Alphabet(int(nx), "X")},
                            std::vector<Alphabet>{Alphabet(int(nh), "Xhat")},
                            std::move(Q));
    rep.trace.push_back({0.0, 0.0});
    return rep;
  }
  double floor = 0.0;
  for (Eigen::Index x = 0; x < nx; ++x) floor += p[x] * distortion.row(x).minCoeff();
  const double beta_max = 50.0 / min_positive(distortion);
  const BaOptions inner = inner_options(opts);
  auto solve = [&](double beta) { return rd_lagrangian(p, distortion, beta, inner); };
  SolveReport rep = sweep_multiplier(solve, max_distortion, floor, beta_max);
  rep.converged = rep.converged && rep.gap < opts.delta;
  return rep;
}

// ---------------------------------------------------------------------------
// Wyner-Ziv primal

WzSource wyner_ziv_view(const SourceInstance& src) {
  const int nx = src.x.size, n1 = src.s1.size;
  const Alphabet pair(nx * n1, src.s1.size == 1 ? src.x.label : src.x.label + src.s1.label);
  Eigen::VectorXd p = src.joint.probs();  // (x, s1, s2) row-major == (x', s2)
  Eigen::MatrixXd d(nx * n1, src.xhat.size);
  for (int x = 0; x < nx; ++x) {
    for (int s1 = 0; s1 < n1; ++s1) d.row(x * n1 + s1) = src.distortion.row(x);
  }
  return WzSource{JointPmf({pair, src.s2}, std::move(p)), std::move(d)};
}

namespace {

struct WzData {
  Eigen::Index nx, ns, nt;
  Eigen::MatrixXd pxs;      // p(x, s)
  Eigen::VectorXd px, ps;
  Eigen::MatrixXd s_given_x;  // p(s|x)
  Eigen::MatrixXd x_given_s;  // p(x|s), indexed (x, s)
};

WzData wz_data(const WzSource& src, const StrategySpace& strategies) {
  if (src.joint.rank() != 2) throw std::invalid_argument("wz: joint must be p(x, s)");
  if (strategies.domain_cells() != src.joint.axis_size(1) ||
      strategies.codomain().size != src.distortion.cols() ||
      src.distortion.rows() != src.joint.axis_size(0)) {
    throw std::invalid_argument("wz: strategies must map S -> Xhat");
  }
  WzData w;
  w.nx = src.joint.axis_size(0);
  w.ns = src.joint.axis_size(1);
  w.nt = strategies.size();
  w.pxs = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>(src.joint.probs().data(),
                                                           w.nx, w.ns);
  w.px = w.pxs.rowwise().sum();
  w.ps = w.pxs.colwise().sum().transpose();
  w.s_given_x = Eigen::MatrixXd::Zero(w.nx, w.ns);
  w.x_given_s = Eigen::MatrixXd::Zero(w.nx, w.ns);
  for (Eigen::Index x = 0; x < w.nx; ++x) {
    for (Eigen::Index s = 0; s < w.ns; ++s) {
      if (w.px[x] > kTiny) w.s_given_x(x, s) = w.pxs(x, s) / w.px[x];
      if (w.ps[s] > kTiny) w.x_given_s(x, s) = w.pxs(x, s) / w.ps[s];
    }
  }
  return w;
}

}  // namespace

double wz_distortion_floor(const WzSource& src, const StrategySpace& strategies) {
  const WzData w = wz_data(src, strategies);
  const LiftedDistortion d = lift_source(src.distortion, strategies);
  double floor = 0.0;
  for (Eigen::Index x = 0; x < w.nx; ++x) {
    double best = kInf;
    for (int t = 0; t < w.nt; ++t) {
      double e = 0.0;
      for (Eigen::Index s = 0; s < w.ns; ++s) e += w.s_given_x(x, s) * d(int(x), t, int(s));
      best = std::min(best, e);
    }
    floor += w.px[x] * best;
  }
  return floor;
}

double wz_zero_rate_distortion(const WzSource& src, const StrategySpace& strategies) {
  const WzData w = wz_data(src, strategies);
  const LiftedDistortion d = lift_source(src.distortion, strategies);
  double best = kInf;
  for (int t = 0; t < w.nt; ++t) {
    double e = 0.0;
    for (Eigen::Index x = 0; x < w.nx; ++x) {
      for (Eigen::Index s = 0; s < w.ns; ++s) e += w.pxs(x, s) * d(int(x), t, int(s));
    }
    best = std::min(best, e);
  }
  return best;
}

SolveReport wz_lagrangian(const WzSource& src, const StrategySpace& strategies,
                          double beta, const BaOptions& opts) {
  const WzData w = wz_data(src, strategies);
  const LiftedDistortion d = lift_source(src.distortion, strategies);
  const Eigen::Index nx = w.nx, ns = w.ns, nt = w.nt;

  RowMajorMatrix q = RowMajorMatrix::Constant(nx, nt, 1.0 / nt);
  RowMajorMatrix Q(ns, nt);
  auto marginal = [&](const RowMajorMatrix& qq) {
    RowMajorMatrix out = RowMajorMatrix::Constant(ns, nt, 1.0 / nt);
    for (Eigen::Index s = 0; s < ns; ++s) {
      if (w.ps[s] <= kTiny) continue;
      out.row(s).setZero();
      for (Eigen::Index x = 0; x < nx; ++x) out.row(s) += w.x_given_s(x, s) * qq.row(x);
    }
    return out;
  };

  SolveReport rep;
  rep.multiplier = beta;
  Q = marginal(q);
  Eigen::VectorXd score(nt);
  for (int it = 1; it <= opts.max_iters; ++it) {
    // q <- argmin given Q
    for (Eigen::Index x = 0; x < nx; ++x) {
      if (w.px[x] <= kTiny) continue;
      for (Eigen::Index t = 0; t < nt; ++t) {
        double e = 0.0;
        for (Eigen::Index s = 0; s < ns; ++s) {
          const double ps = w.s_given_x(x, s);
          if (ps <= 0.0) continue;
          e += ps * (std::log2(Q(s, t)) - beta * d(int(x), int(t), int(s)));
        }
        score[t] = e;
      }
      const double mx = score.maxCoeff();
      for (Eigen::Index t = 0; t < nt; ++t) q(x, t) = std::exp2(score[t] - mx);
      q.row(x) /= q.row(x).sum();
    }
    Q = marginal(q);

    double objective = 0.0, dist = 0.0, lower = 0.0;
    for (Eigen::Index x = 0; x < nx; ++x) {
      if (w.px[x] <= kTiny) continue;
      double alpha = kInf;
      for (Eigen::Index t = 0; t < nt; ++t) {
        double per_t = 0.0;
        for (Eigen::Index s = 0; s < ns; ++s) {
          const double ps = w.s_given_x(x, s);
          if (ps <= 0.0) continue;
          const double dd = d(int(x), int(t), int(s));
          const double term = std::log2(q(x, t) / Q(s, t)) + beta * dd;
          per_t += ps * term;
          const double wgt = w.pxs(x, s) * q(x, t);
          if (wgt > 0.0) {
            objective += wgt * term;
            dist += wgt * dd;
          }
        }
        alpha = std::min(alpha, per_t);
      }
      lower += w.px[x] * alpha;
    }
    rep.trace.push_back({objective, lower});
    rep.iterations = it;
    rep.value = objective;
    rep.gap = std::max(objective - lower, 0.0);
    rep.distortion = dist;
    if (rep.gap < opts.delta) {
      rep.converged = true;
      break;
    }
  }
  rep.argopt.emplace_back(std::vector<Alphabet>{src.joint.axes()[0]},
                          std::vector<Alphabet>{strategies.alphabet()}, q);
  return rep;
}

SolveReport wz_primal(const WzSource& src, const StrategySpace& strategies,
                      double max_distortion, const BaOptions& opts) {
  if (max_distortion < 0.0) throw std::invalid_argument("wz_primal: D < 0");
  if (!(opts.delta > 0.0)) throw std::invalid_argument("wz_primal: delta <= 0");
  const WzData w = wz_data(src, strategies);
  const LiftedDistortion d = lift_source(src.distortion, strategies);

  // Zero rate: one strategy for every x.
  int best_t = 0;
  double zero_rate = kInf;
  for (int t = 0; t < w.nt; ++t) {
    double e = 0.0;
    for (Eigen::Index x = 0; x < w.nx; ++x) {
      for (Eigen::Index s = 0; s < w.ns; ++s) e += w.pxs(x, s) * d(int(x), t, int(s));
    }
    if (e < zero_rate) {
      zero_rate = e;
      best_t = t;
    }
  }
  if (zero_rate <= max_distortion) {
    SolveReport rep;
    rep.converged = true;
    rep.distortion = zero_rate;
    RowMajorMatrix q = RowMajorMatrix::Zero(w.nx, w.nt);
    q.col(best_t).setOnes();
    rep.argopt.emplace_back(std::vector<Alphabet>{src.joint.axes()[0]},
                            std::vector<Alphabet>{strategies.alphabet()}, std::move(q));
    rep.trace.push_back({0.0, 0.0});
    return rep;
  }

  const double floor = wz_distortion_floor(src, strategies);
  const double beta_max = 50.0 / min_positive(src.distortion);
  const BaOptions inner = inner_options(opts);
  auto solve = [&](double beta) { return wz_lagrangian(src, strategies, beta, inner); };
  SolveReport rep = sweep_multiplier(solve, max_distortion, floor, beta_max);
  rep.converged = rep.converged && rep.gap < opts.delta;
  return rep;
}

// ---------------------------------------------------------------------------
// Strategy channels

RowMajorMatrix uniform_encoder(const StrategyChannel& sc) {
  return RowMajorMatrix::Constant(sc.encoder_states(), sc.strategies,
                                  1.0 / sc.strategies);
}

RowMajorMatrix decoder_posterior(const StrategyChannel& sc, const RowMajorMatrix& q) {
  const int ne = sc.encoder_states(), nt = sc.strategies, no = sc.outputs;
  RowMajorMatrix Q = RowMajorMatrix::Zero(no, nt);
  for (int t = 0; t < nt; ++t) {
    for (int e = 0; e < ne; ++e) {
      const double w = sc.encoder_prob[e] * q(e, t);
      if (w <= 0.0) continue;
      Q.col(t) += w * sc.lifted_row(t, e).transpose();
    }
  }
  for (int o = 0; o < no; ++o) {
    const double total = Q.row(o).sum();
    if (total > 0.0) {
      Q.row(o) /= total;
    } else {
      Q.row(o).setConstant(1.0 / nt);
    }
  }
  return Q;
}

RowMajorMatrix encoder_update(const StrategyChannel& sc, const RowMajorMatrix& Q) {
  const int ne = sc.encoder_states(), nt = sc.strategies, no = sc.outputs;
  RowMajorMatrix q = uniform_encoder(sc);
  Eigen::VectorXd score(nt);
  for (int e = 0; e < ne; ++e) {
    if (sc.encoder_prob[e] <= kTiny) continue;
    for (int t = 0; t < nt; ++t) {
      double s = 0.0;
      const auto row = sc.lifted_row(t, e);
      for (int o = 0; o < no; ++o) {
        const double p = row[o];
        if (p <= 0.0) continue;
        s += Q(o, t) > 0.0 ? p * std::log2(Q(o, t)) : -kInf;
      }
      score[t] = s;
    }
    const double mx = score.maxCoeff();
    if (!std::isfinite(mx)) continue;
    for (int t = 0; t < nt; ++t) q(e, t) = std::exp2(score[t] - mx);
    q.row(e) /= q.row(e).sum();
  }
  return q;
}

double strategy_objective(const StrategyChannel& sc, const RowMajorMatrix& q,
                          const RowMajorMatrix& Q) {
  const int ne = sc.encoder_states(), nt = sc.strategies, no = sc.outputs;
  double j = 0.0;
  for (int e = 0; e < ne; ++e) {
    const double pe = sc.encoder_prob[e];
    if (pe <= kTiny) continue;
    for (int t = 0; t < nt; ++t) {
      if (q(e, t) <= 0.0) continue;
      const auto row = sc.lifted_row(t, e);
      const double lq = std::log2(q(e, t));
      for (int o = 0; o < no; ++o) {
        const double p = row[o];
        if (p <= 0.0) continue;
        if (Q(o, t) <= 0.0) return -kInf;
        j += pe * q(e, t) * p * (std::log2(Q(o, t)) - lq);
      }
    }
  }
  return j;
}

double strategy_upper_bound(const StrategyChannel& sc, const RowMajorMatrix& q) {
  const RowMajorMatrix Q = decoder_posterior(sc, q);
  const int ne = sc.encoder_states(), nt = sc.strategies, no = sc.outputs;
  double u = 0.0;
  for (int e = 0; e < ne; ++e) {
    const double pe = sc.encoder_prob[e];
    if (pe <= kTiny) continue;
    double best = -kInf;
    for (int t = 0; t < nt; ++t) {
      if (q(e, t) <= 0.0) return kInf;
      const auto row = sc.lifted_row(t, e);
      const double lq = std::log2(q(e, t));
      double v = 0.0;
      for (int o = 0; o < no; ++o) {
        const double p = row[o];
        if (p <= 0.0) continue;
        // Q*(t|o) > 0 whenever q(t|e) > 0 and p(o|t,e) > 0.
        v += p * (std::log2(Q(o, t)) - lq);
      }
      best = std::max(best, v);
    }
    u += pe * best;
  }
  return u;
}

namespace {

// Log-domain iterates. Strategies that die out keep finite log weights long
// after their probabilities would underflow, so U stays finite.
struct LogIterate {
  RowMajorMatrix lq;  // log2 q(t|e)
  RowMajorMatrix lQ;  // log2 Q(t|o)
};

double log2_sum_exp2(const double* v, int n) {
  double mx = -kInf;
  for (int i = 0; i < n; ++i) mx = std::max(mx, v[i]);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp2(v[i] - mx);
  return mx + std::log2(s);
}

void log_encoder_update(const StrategyChannel& sc, LogIterate& it) {
  const int ne = sc.encoder_states(), nt = sc.strategies, no = sc.outputs;
  for (int e = 0; e < ne; ++e) {
    if (sc.encoder_prob[e] <= kTiny) {
      it.lq.row(e).setConstant(-std::log2(double(nt)));
      continue;
    }
    for (int t = 0; t < nt; ++t) {
      const auto row = sc.lifted_row(t, e);
      double s = 0.0;
      for (int o = 0; o < no; ++o) {
        if (row[o] > 0.0) s += row[o] * it.lQ(o, t);
      }
      it.lq(e, t) = s;
    }
    const double z = log2_sum_exp2(it.lq.row(e).data(), nt);
    it.lq.row(e).array() -= z;
  }
}

void log_decoder_update(const StrategyChannel& sc, LogIterate& it) {
  const int ne = sc.encoder_states(), nt = sc.strategies, no = sc.outputs;
  std::vector<double> terms;
  terms.reserve(ne);
  for (int o = 0; o < no; ++o) {
    for (int t = 0; t < nt; ++t) {
      terms.clear();
      for (int e = 0; e < ne; ++e) {
        const double pe = sc.encoder_prob[e], p = sc.lifted_row(t, e)[o];
        if (pe > kTiny && p > 0.0) terms.push_back(std::log2(pe * p) + it.lq(e, t));
      }
      it.lQ(o, t) = log2_sum_exp2(terms.data(), int(terms.size()));
    }
    const double z = log2_sum_exp2(it.lQ.row(o).data(), nt);
    if (std::isfinite(z)) {
      it.lQ.row(o).array() -= z;
    } else {
      it.lQ.row(o).setConstant(-std::log2(double(nt)));
    }
  }
}

std::pair<double, double> log_objective_and_bound(const StrategyChannel& sc,
                                                  const LogIterate& it) {
  const int ne = sc.encoder_states(), nt = sc.strategies, no = sc.outputs;
  double j = 0.0, u = 0.0;
  for (int e = 0; e < ne; ++e) {
    const double pe = sc.encoder_prob[e];
    if (pe <= kTiny) continue;
    double best = -kInf;
    for (int t = 0; t < nt; ++t) {
      const auto row = sc.lifted_row(t, e);
      double v = 0.0;
      for (int o = 0; o < no; ++o) {
        if (row[o] > 0.0) v += row[o] * (it.lQ(o, t) - it.lq(e, t));
      }
      best = std::max(best, v);
      if (it.lq(e, t) > -kInf) j += pe * std::exp2(it.lq(e, t)) * v;
    }
    u += pe * best;
  }
  return {j, u};
}

}  // namespace

SolveReport maximize_strategy_objective(const StrategyChannel& sc,
                                        const BaOptions& opts) {
  if (!(opts.delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  if (sc.strategies < 1) throw std::invalid_argument("empty strategy space");
  LogIterate it{RowMajorMatrix(sc.encoder_states(), sc.strategies),
                RowMajorMatrix::Constant(sc.outputs, sc.strategies,
                                         -std::log2(double(sc.strategies)))};
  SolveReport rep;
  for (int k = 1; k <= opts.max_iters; ++k) {
    log_encoder_update(sc, it);
    log_decoder_update(sc, it);
    const auto [j, u] = log_objective_and_bound(sc, it);
    rep.trace.push_back({j, u});
    rep.iterations = k;
    rep.value = j;
    rep.gap = std::max(u - j, 0.0);
    if (u - j < opts.delta) {
      rep.converged = true;
      break;
    }
  }
  RowMajorMatrix q = it.lq.unaryExpr([](double v) { return std::exp2(v); });
  rep.argopt.emplace_back(std::vector<Alphabet>{Alphabet(sc.encoder_states(), "E")},
                          std::vector<Alphabet>{Alphabet(sc.strategies, "T")}, std::move(q));
  rep.log2_encoder = std::move(it.lq);
  return rep;
}

StrategyBounds strategy_bounds_log2(const StrategyChannel& sc, const RowMajorMatrix& log2_q) {
  if (log2_q.rows() != sc.encoder_states() || log2_q.cols() != sc.strategies) {
    throw std::invalid_argument("strategy_bounds_log2: shape mismatch");
  }
  LogIterate it{log2_q, RowMajorMatrix(sc.outputs, sc.strategies)};
  log_decoder_update(sc, it);
  const auto [j, u] = log_objective_and_bound(sc, it);
  return {j, u};
}

StrategyChannel state_strategy_channel(const ChannelInstance& ch,
                                       const StateVisibility& vis, std::size_t cap) {
  const int n1 = ch.s1.size, n2 = ch.s2.size;
  std::vector<Alphabet> enc;
  if (vis.encoder_s1) enc.push_back(ch.s1);
  if (vis.encoder_s2) enc.push_back(ch.s2);
  const StrategySpace strategies =
      enumerate_strategies(enc.empty() ? std::vector<Alphabet>{Alphabet(1, "1")} : enc,
                           ch.x, cap);

  auto enc_index = [&](int s1, int s2) {
    int e = 0;
    if (vis.encoder_s1) e = e * n1 + s1;
    if (vis.encoder_s2) e = e * n2 + s2;
    return e;
  };
  const int n_dec = (vis.decoder_s1 ? n1 : 1) * (vis.decoder_s2 ? n2 : 1);
  auto dec_index = [&](int y, int s1, int s2) {
    int o = y;
    if (vis.decoder_s1) o = o * n1 + s1;
    if (vis.decoder_s2) o = o * n2 + s2;
    return o;
  };

  StrategyChannel sc;
  const int ne = strategies.domain_cells();
  sc.strategies = strategies.size();
  sc.outputs = ch.y.size * n_dec;
  sc.encoder_prob = Eigen::VectorXd::Zero(ne);
  for (int s1 = 0; s1 < n1; ++s1) {
    for (int s2 = 0; s2 < n2; ++s2) sc.encoder_prob[enc_index(s1, s2)] += ch.states.at({s1, s2});
  }
  sc.lifted = RowMajorMatrix::Zero(static_cast<Eigen::Index>(sc.strategies) * ne, sc.outputs);
  for (int t = 0; t < sc.strategies; ++t) {
    for (int s1 = 0; s1 < n1; ++s1) {
      for (int s2 = 0; s2 < n2; ++s2) {
        const int e = enc_index(s1, s2);
        const double pe = sc.encoder_prob[e];
        if (pe <= kTiny) continue;
        const double ps = ch.states.at({s1, s2}) / pe;
        const int x = strategies(t, e);
        for (int y = 0; y < ch.y.size; ++y) {
          sc.lifted(static_cast<Eigen::Index>(t) * ne + e, dec_index(y, s1, s2)) +=
              ps * ch.transition(y, x, s1, s2);
        }
      }
    }
  }
  // Unreachable encoder states keep a valid (if irrelevant) output law.
  for (int t = 0; t < sc.strategies; ++t) {
    for (int e = 0; e < ne; ++e) {
      if (sc.encoder_prob[e] <= kTiny) {
        sc.lifted.row(static_cast<Eigen::Index>(t) * ne + e).setConstant(1.0 / sc.outputs);
      }
    }
  }
  return sc;
}

SolveReport gp_channel_capacity(const ChannelInstance& ch, const StateVisibility& vis,
                                const BaOptions& opts) {
  return maximize_strategy_objective(state_strategy_channel(ch, vis), opts);
}

}  // namespace sideinfo

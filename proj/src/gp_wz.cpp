#include "sideinfo/gp.hpp"

#include "grid_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sideinfo {

namespace {

constexpr double kTiny = 1e-15;

struct PairMarginals {
  Eigen::Index nx = 0, ns = 0;
  Eigen::MatrixXd pxs;
  Eigen::VectorXd px, ps;
};

PairMarginals pair_marginals(const WzSource& src) {
  if (src.joint.rank() != 2 || src.distortion.rows() != src.joint.axis_size(0)) {
    throw std::invalid_argument("Wyner-Ziv source must be p(x, s) with d(x, xhat)");
  }
  PairMarginals m;
  m.nx = src.joint.axis_size(0);
  m.ns = src.joint.axis_size(1);
  m.pxs.resize(m.nx, m.ns);
  for (Eigen::Index x = 0; x < m.nx; ++x) {
    for (Eigen::Index s = 0; s < m.ns; ++s) m.pxs(x, s) = src.joint.probs()[x * m.ns + s];
  }
  m.px = m.pxs.rowwise().sum();
  m.ps = m.pxs.colwise().sum().transpose();
  return m;
}

double gamma_cap(const Eigen::MatrixXd& d) {
  double mn = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d.data()[i] > 0.0) mn = std::min(mn, d.data()[i]);
  }
  return std::isfinite(mn) ? 50.0 / mn : 1.0;
}

}  // namespace

GpProblem build_wz_gp(const WzSource& src, const StrategySpace& strategies, double max_distortion,
                      WzGpLayout* layout_out) {
  if (max_distortion < 0.0) throw std::invalid_argument("build_wz_gp: D < 0");
  const PairMarginals m = pair_marginals(src);
  if (strategies.domain_cells() != m.ns || strategies.codomain().size != src.distortion.cols()) {
    throw std::invalid_argument("build_wz_gp: strategies must map S -> Xhat");
  }
  const int nx = static_cast<int>(m.nx), ns = static_cast<int>(m.ns), nt = strategies.size();

  WzGpLayout L;
  L.x_size = nx;
  L.s_size = ns;
  L.t_size = nt;
  L.alpha.assign(nx, -1);
  L.y.assign(static_cast<std::size_t>(nx) * ns * nt, -1);
  L.constraint.assign(static_cast<std::size_t>(nx) * nt, -1);
  int next = 0;
  for (int x = 0; x < nx; ++x) {
    if (m.px[x] > kTiny) L.alpha[x] = next++;
  }
  L.gamma = next++;
  for (int x = 0; x < nx; ++x) {
    for (int s = 0; s < ns; ++s) {
      if (m.px[x] <= kTiny || m.pxs(x, s) <= kTiny) continue;
      for (int t = 0; t < nt; ++t) L.y[(static_cast<std::size_t>(x) * ns + s) * nt + t] = next++;
    }
  }
  const auto y_at = [&](int x, int s, int t) {
    return L.y[(static_cast<std::size_t>(x) * ns + s) * nt + t];
  };

  GpProblem p;
  p.num_vars = next;
  p.objective = Eigen::VectorXd::Zero(next);
  p.value_scale = 1.0 / std::log(2.0);
  for (int x = 0; x < nx; ++x) {
    if (L.alpha[x] >= 0) p.objective[L.alpha[x]] = m.px[x];
  }
  p.objective[L.gamma] = -max_distortion;

  for (int x = 0; x < nx; ++x) {
    if (L.alpha[x] < 0) continue;
    for (int t = 0; t < nt; ++t) {
      AffineConstraint a;
      a.terms.emplace_back(L.alpha[x], 1.0);
      double dist = 0.0;
      for (int s = 0; s < ns; ++s) {
        const double ps_x = m.pxs(x, s) / m.px[x];
        if (m.pxs(x, s) <= kTiny) continue;
        dist += ps_x * src.distortion(x, strategies(t, s));
        a.offset += ps_x * std::log(m.pxs(x, s) / m.ps[s]);
        a.terms.emplace_back(y_at(x, s, t), -ps_x);
      }
      a.terms.emplace_back(L.gamma, -dist);
      L.constraint[static_cast<std::size_t>(x) * nt + t] = static_cast<int>(p.affine.size());
      p.affine.push_back(std::move(a));
    }
  }
  for (int s = 0; s < ns; ++s) {
    if (m.ps[s] <= kTiny) continue;
    for (int t = 0; t < nt; ++t) {
      std::vector<int> group;
      for (int x = 0; x < nx; ++x) {
        if (y_at(x, s, t) >= 0) group.push_back(y_at(x, s, t));
      }
      if (!group.empty()) p.lse.push_back(std::move(group));
    }
  }
  p.nonneg.push_back(L.gamma);
  const double cap = gamma_cap(src.distortion);
  p.upper.emplace_back(L.gamma, cap);

  // Interior start: y strictly inside each LSE group, gamma strictly inside
  // its box, alpha strictly below every affine bound.
  Eigen::VectorXd z = Eigen::VectorXd::Zero(next);
  for (const auto& g : p.lse) {
    for (int i : g) z[i] = std::log(1.0 / static_cast<double>(g.size())) - 0.1;
  }
  z[L.gamma] = std::min(0.1, cap / 2.0);
  for (int x = 0; x < nx; ++x) {
    if (L.alpha[x] < 0) continue;
    double lowest = std::numeric_limits<double>::infinity();
    for (int t = 0; t < nt; ++t) {
      const AffineConstraint& a = p.affine[L.constraint[static_cast<std::size_t>(x) * nt + t]];
      double rest = a.offset;
      for (const auto& [i, v] : a.terms) {
        if (i != L.alpha[x]) rest += v * z[i];
      }
      lowest = std::min(lowest, -rest);
    }
    z[L.alpha[x]] = lowest - 0.1;
  }
  p.start = z;
  if (layout_out) *layout_out = std::move(L);
  return p;
}

RowMajorMatrix recover_encoder(const GpReport& rep, const WzGpLayout& L) {
  RowMajorMatrix q = RowMajorMatrix::Constant(L.x_size, L.t_size, 1.0 / L.t_size);
  for (int x = 0; x < L.x_size; ++x) {
    double total = 0.0;
    for (int t = 0; t < L.t_size; ++t) {
      const int c = L.constraint[static_cast<std::size_t>(x) * L.t_size + t];
      if (c >= 0) total += rep.affine_multipliers[c];
    }
    if (!(total > 0.0)) continue;
    for (int t = 0; t < L.t_size; ++t) {
      q(x, t) = rep.affine_multipliers[L.constraint[static_cast<std::size_t>(x) * L.t_size + t]] /
                total;
    }
  }
  return q;
}

std::pair<double, double> wz_rate_and_distortion(const WzSource& src,
                                                 const StrategySpace& strategies,
                                                 const RowMajorMatrix& q) {
  const PairMarginals m = pair_marginals(src);
  const int nt = strategies.size();
  if (q.rows() != m.nx || q.cols() != nt) {
    throw std::invalid_argument("wz_rate_and_distortion: q must be |X| x |T|");
  }
  RowMajorMatrix Q = RowMajorMatrix::Zero(m.ns, nt);
  for (Eigen::Index s = 0; s < m.ns; ++s) {
    if (m.ps[s] <= kTiny) continue;
    for (Eigen::Index x = 0; x < m.nx; ++x) Q.row(s) += (m.pxs(x, s) / m.ps[s]) * q.row(x);
  }
  double rate = 0.0, dist = 0.0;
  for (Eigen::Index x = 0; x < m.nx; ++x) {
    for (Eigen::Index s = 0; s < m.ns; ++s) {
      for (int t = 0; t < nt; ++t) {
        const double w = m.pxs(x, s) * q(x, t);
        if (w <= kTiny) continue;
        rate += w * std::log2(q(x, t) / Q(s, t));
        dist += w * src.distortion(x, strategies(t, static_cast<int>(s)));
      }
    }
  }
  return {rate, dist};
}

WzGpReport wz_rate_via_gp(const WzSource& src, const StrategySpace& strategies,
                          double max_distortion, const WzGpOptions& opts) {
  WzGpLayout layout;
  const GpProblem p = build_wz_gp(src, strategies, max_distortion, &layout);
  WzGpReport out;
  out.gp = solve_gp(p, opts.gp);
  out.value = out.gp.value;
  out.q = recover_encoder(out.gp, layout);
  std::tie(out.primal_rate, out.primal_distortion) = wz_rate_and_distortion(src, strategies, out.q);
  if (opts.cross_check) {
    out.primal_value = wz_primal(src, strategies, max_distortion, opts.primal).value;
    out.tight = std::abs(out.value - out.primal_value) <= opts.tight_tol;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Case 1 rate-distortion

WzSource case1_pair_source(const SourceInstance& src, const CondKernel& w) {
  if (w.given_axes().size() != 1 || w.given_axes()[0].size != src.s1.size ||
      w.out_axes().size() != 1) {
    throw std::invalid_argument("w must be a kernel p(v1 | s1) over the source's S1");
  }
  const int nx = src.x.size, n1 = src.s1.size, n2 = src.s2.size;
  const int nv = w.out_axes()[0].size;
  const Alphabet xp(nx * n1 * nv, "XS1V1"), sp(n2 * nv, "S2V1");
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(xp.size) * sp.size);
  Eigen::MatrixXd d(xp.size, src.distortion.cols());
  for (int x = 0; x < nx; ++x) {
    for (int s1 = 0; s1 < n1; ++s1) {
      for (int v = 0; v < nv; ++v) {
        const int xi = (x * n1 + s1) * nv + v;
        d.row(xi) = src.distortion.row(x);
        for (int s2 = 0; s2 < n2; ++s2) {
          probs[static_cast<Eigen::Index>(xi) * sp.size + s2 * nv + v] =
              src.joint.at({x, s1, s2}) * w(s1, v);
        }
      }
    }
  }
  return WzSource{JointPmf({xp, sp}, std::move(probs)), std::move(d)};
}

StrategySpace case1_strategies(const SourceInstance& src, int v1_size, std::size_t cap) {
  return enumerate_strategies({src.s2, Alphabet(v1_size, "V1")}, src.xhat, cap);
}

GpProblem build_case1_rd_gp(const SourceInstance& src, const CondKernel& w,
                            const StrategySpace& strategies, double max_distortion,
                            WzGpLayout* layout) {
  const auto& dom = strategies.domain_axes();
  if (dom.size() != 2 || dom[0].size != src.s2.size || dom[1].size != w.out_axes()[0].size) {
    throw std::invalid_argument("build_case1_rd_gp: strategies must map S2 x V1 -> Xhat");
  }
  return build_wz_gp(case1_pair_source(src, w), strategies, max_distortion, layout);
}

double r_w_source(const SourceInstance& src, const CondKernel& w) {
  const JointPmf states = marginalize(src.joint, {1, 2});
  return conditional_mutual_information(chain(states, w, {0}), {2}, {0}, {1});
}

SimplexGrid case1_w_grid(const SourceInstance& src, int v1_size, double step) {
  return simplex_grid(src.s1, Alphabet(v1_size, "V1"), step);
}

namespace {

SolveReport case1_inner(const SourceInstance& src, const CondKernel& w, double D,
                        const RdCase1Options& opts) {
  const StrategySpace st = case1_strategies(src, w.out_axes()[0].size, opts.strategy_cap);
  const WzSource pair = case1_pair_source(src, w);
  WzGpLayout layout;
  const GpReport gp = solve_gp(build_wz_gp(pair, st, D, &layout), opts.gp);
  SolveReport r;
  r.value = std::max(gp.value, 0.0);
  r.gap = gp.duality_measure;
  r.iterations = gp.newton_steps;
  r.converged = gp.certified;
  r.argopt.emplace_back(std::vector<Alphabet>{pair.joint.axes()[0]},
                        std::vector<Alphabet>{st.alphabet("U")}, recover_encoder(gp, layout));
  return r;
}

}  // namespace

CurvePoint rd_case1(const SourceInstance& src, double max_distortion, double r_prime,
                    const RdCase1Options& opts) {
  return rd_case1_curve(src, max_distortion, {r_prime}, opts).front();
}

std::vector<CurvePoint> rd_case1_curve(const SourceInstance& src, double max_distortion,
                                       const std::vector<double>& r_primes,
                                       const RdCase1Options& opts) {
  if (max_distortion < 0.0) throw std::invalid_argument("rd_case1: D < 0");
  if (opts.epsilon < 0.0 || !(opts.grid_step > 0.0) || opts.grid_step > 1.0 || opts.v1_size < 1) {
    throw std::invalid_argument("invalid RdCase1Options");
  }
  const JointPmf states = marginalize(src.joint, {1, 2});
  detail::SweepSpec sweep;
  sweep.make_grid = [&](double step) { return case1_w_grid(src, opts.v1_size, step); };
  sweep.rate = [&](const CondKernel& w) { return r_w_source(src, w); };
  sweep.inner = [&](const CondKernel& w) { return case1_inner(src, w, max_distortion, opts); };
  sweep.r_max = entropy(states) - entropy(states, {1});
  sweep.epsilon = opts.epsilon;
  sweep.step = opts.grid_step;
  sweep.maximize = false;
  return detail::sweep_grid(r_primes, sweep);
}

JointPmf case1_joint(const SourceInstance& src, const CondKernel& w, const RowMajorMatrix& q) {
  const int nx = src.x.size, n1 = src.s1.size, n2 = src.s2.size, nh = src.xhat.size;
  const Alphabet v1 = w.out_axes()[0];
  const int nv = v1.size;
  const StrategySpace st = case1_strategies(src, nv, std::numeric_limits<std::size_t>::max());
  const int nt = st.size();
  if (q.rows() != nx * n1 * nv || q.cols() != nt) {
    throw std::invalid_argument("case1_joint: q must be |X||S1||V1| x |T|");
  }
  const std::vector<Alphabet> axes{src.x, src.s1, src.s2, v1, st.alphabet("U"), src.xhat};
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(cell_count(axes));
  for (int x = 0; x < nx; ++x) {
    for (int s1 = 0; s1 < n1; ++s1) {
      for (int s2 = 0; s2 < n2; ++s2) {
        for (int v = 0; v < nv; ++v) {
          const double base = src.joint.at({x, s1, s2}) * w(s1, v);
          if (base <= 0.0) continue;
          for (int u = 0; u < nt; ++u) {
            const double pu = base * q((x * n1 + s1) * nv + v, u);
            if (pu <= 0.0) continue;
            const int xh = st(u, s2 * nv + v);
            const Eigen::Index idx =
                ((((static_cast<Eigen::Index>(x) * n1 + s1) * n2 + s2) * nv + v) * nt + u) * nh + xh;
            probs[idx] += pu;
          }
        }
      }
    }
  }
  return JointPmf(axes, std::move(probs));
}

}  // namespace sideinfo

#include "sideinfo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sideinfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// f(z) = lin . z + offset + [log sum_{i in group} exp(z_i)].
struct Row {
  std::vector<std::pair<int, double>> lin;
  double offset = 0.0;
  std::vector<int> group;
};

std::vector<Row> rows_of(const GpProblem& p) {
  std::vector<Row> rows;
  rows.reserve(p.constraint_count());
  for (const auto& a : p.affine) rows.push_back({a.terms, a.offset, {}});
  for (const auto& g : p.lse) rows.push_back({{}, 0.0, g});
  for (int i : p.nonneg) rows.push_back({{{i, -1.0}}, 0.0, {}});
  for (const auto& [i, u] : p.upper) rows.push_back({{{i, 1.0}}, -u, {}});
  return rows;
}

double log_sum_exp(const std::vector<int>& group, const Eigen::VectorXd& z) {
  double mx = -kInf;
  for (int i : group) mx = std::max(mx, z[i]);
  double s = 0.0;
  for (int i : group) s += std::exp(z[i] - mx);
  return mx + std::log(s);
}

double eval_row(const Row& r, const Eigen::VectorXd& z) {
  double f = r.offset;
  for (const auto& [i, a] : r.lin) f += a * z[i];
  if (!r.group.empty()) f += log_sum_exp(r.group, z);
  return f;
}

double max_row(const std::vector<Row>& rows, const Eigen::VectorXd& z) {
  double m = -kInf;
  for (const auto& r : rows) m = std::max(m, eval_row(r, z));
  return m;
}

// Barrier objective t * (-c . z) - sum log(-f_i); +inf outside the domain.
double barrier_value(const std::vector<Row>& rows, const Eigen::VectorXd& c, double t,
                     const Eigen::VectorXd& z) {
  double v = -t * c.dot(z);
  for (const auto& r : rows) {
    const double f = eval_row(r, z);
    if (!(f < 0.0)) return kInf;
    v -= std::log(-f);
  }
  return v;
}

struct Centering {
  int steps = 0;
  bool ok = true;
};

// Newton's method on the barrier objective at fixed t.  `on_step` sees every
// accepted iterate; returning true from it stops early.
template <typename OnStep>
Centering center(const std::vector<Row>& rows, const Eigen::VectorXd& c, double t,
                 Eigen::VectorXd& z, const GpOptions& opts, OnStep&& on_step) {
  const Eigen::Index n = z.size();
  Centering out;
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd g(n);
  std::vector<std::pair<int, double>> grad_f;
  for (int it = 0; it < opts.max_newton_per_stage; ++it) {
    H.setZero();
    g = -t * c;
    for (const auto& r : rows) {
      const double f = eval_row(r, z);
      const double inv = 1.0 / (-f);
      grad_f.assign(r.lin.begin(), r.lin.end());
      if (!r.group.empty()) {
        const double lse = log_sum_exp(r.group, z);
        for (int i : r.group) {
          const double pi = std::exp(z[i] - lse);
          grad_f.emplace_back(i, pi);
          H(i, i) += inv * pi;
          for (int j : r.group) H(i, j) -= inv * pi * std::exp(z[j] - lse);
        }
      }
      const double inv2 = inv * inv;
      for (const auto& [i, a] : grad_f) {
        g[i] += inv * a;
        for (const auto& [j, b] : grad_f) H(i, j) += inv2 * a * b;
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Eigen::VectorXd dz = ldlt.solve(-g);
    if (ldlt.info() != Eigen::Success || !dz.allFinite()) {
      const double ridge = 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
      Eigen::LDLT<Eigen::MatrixXd> reg(H + ridge * Eigen::MatrixXd::Identity(n, n));
      dz = reg.solve(-g);
      if (!dz.allFinite()) {
        out.ok = false;
        return out;
      }
    }
    const double decrement = -g.dot(dz);
    if (decrement / 2.0 <= opts.newton_tol) break;

    const double phi = barrier_value(rows, c, t, z);
    double step = 1.0;
    Eigen::VectorXd next = z + dz;
    int halvings = 0;
    while (!(barrier_value(rows, c, t, next) <= phi + 0.01 * step * g.dot(dz))) {
      step *= 0.5;
      next = z + step * dz;
      if (++halvings > 80) break;
    }
    // No representable decrease left: the iterate is as centered as
    // floating point allows.
    if (halvings > 80 || (next - z).cwiseAbs().maxCoeff() == 0.0) break;
    z = next;
    ++out.steps;
    if (on_step(z)) break;
  }
  return out;
}

// Finds a point with every constraint at most -margin, starting near z0.
Eigen::VectorXd phase_one(const std::vector<Row>& rows, const Eigen::VectorXd& z0,
                          const GpOptions& opts, double margin) {
  const Eigen::Index n = z0.size();
  std::vector<Row> aug = rows;
  for (auto& r : aug) r.lin.emplace_back(static_cast<int>(n), -1.0);
  aug.push_back({{{static_cast<int>(n), -1.0}}, -1.0, {}});  // s >= -1
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
  c[n] = -1.0;
  Eigen::VectorXd z(n + 1);
  z.head(n) = z0;
  z[n] = std::max(max_row(rows, z0), -0.5) + 1.0;

  double t = opts.t0;
  bool done = false;
  for (int stage = 0; stage < opts.max_stages && !done; ++stage) {
    center(aug, c, t, z, opts, [&](const Eigen::VectorXd& zz) {
      done = max_row(rows, zz.head(n)) <= -margin;
      return done;
    });
    if (max_row(rows, z.head(n)) <= -margin) done = true;
    if (static_cast<double>(aug.size()) / t < opts.tol) break;
    t *= opts.mu;
  }
  if (!done) throw InfeasibleError("geometric program has no strictly feasible point");
  return z.head(n);
}

}  // namespace

GpReport solve_gp(const GpProblem& p, const GpOptions& opts) {
  if (p.num_vars < 1 || p.objective.size() != p.num_vars) {
    throw std::invalid_argument("solve_gp: objective size must equal num_vars");
  }
  const auto in_range = [&](int i) { return i >= 0 && i < p.num_vars; };
  for (const auto& a : p.affine) {
    for (const auto& [i, v] : a.terms) {
      if (!in_range(i) || !std::isfinite(v)) throw std::invalid_argument("solve_gp: bad affine term");
    }
  }
  for (const auto& g : p.lse) {
    if (g.empty()) throw std::invalid_argument("solve_gp: empty LSE group");
    for (int i : g) {
      if (!in_range(i)) throw std::invalid_argument("solve_gp: LSE index out of range");
    }
  }
  for (int i : p.nonneg) {
    if (!in_range(i)) throw std::invalid_argument("solve_gp: nonneg index out of range");
  }
  for (const auto& [i, u] : p.upper) {
    if (!in_range(i)) throw std::invalid_argument("solve_gp: bound index out of range");
  }
  const std::vector<Row> rows = rows_of(p);
  const double m = static_cast<double>(rows.size());
  if (rows.empty()) throw std::invalid_argument("solve_gp: no constraints");

  Eigen::VectorXd z = p.start ? *p.start : Eigen::VectorXd::Zero(p.num_vars);
  if (z.size() != p.num_vars) throw std::invalid_argument("solve_gp: start has wrong size");
  if (!(max_row(rows, z) < 0.0)) z = phase_one(rows, z, opts, 1e-6);

  GpReport rep;
  rep.slater = max_row(rows, z) <= -opts.slater_slack;
  const double scale = p.value_scale;
  rep.trace.push_back(scale * p.objective.dot(z));

  double t = opts.t0;
  bool centered = true;
  for (int stage = 0; stage < opts.max_stages; ++stage) {
    const Centering cs = center(rows, p.objective, t, z, opts, [&](const Eigen::VectorXd& zz) {
      rep.trace.push_back(scale * p.objective.dot(zz));
      return false;
    });
    if (!cs.ok) throw NumericalError("solve_gp: Newton system not solvable", rep.trace);
    rep.newton_steps += cs.steps;
    rep.barrier_iters = stage + 1;
    rep.stage_values.push_back(scale * p.objective.dot(z));
    centered = cs.steps < opts.max_newton_per_stage;
    if (m / t < opts.tol) break;
    t *= opts.mu;
  }
  if (!z.allFinite()) throw NumericalError("solve_gp: iterate diverged", rep.trace);

  rep.z_opt = z;
  rep.value = scale * p.objective.dot(z);
  rep.duality_measure = std::abs(scale) * m / t;
  rep.certified = rep.slater && centered && m / t < opts.tol;
  rep.affine_multipliers.resize(static_cast<Eigen::Index>(p.affine.size()));
  rep.lse_multipliers.resize(static_cast<Eigen::Index>(p.lse.size()));
  for (std::size_t i = 0; i < p.affine.size(); ++i) {
    rep.affine_multipliers[i] = 1.0 / (t * -eval_row(rows[i], z));
  }
  for (std::size_t i = 0; i < p.lse.size(); ++i) {
    rep.lse_multipliers[i] = 1.0 / (t * -eval_row(rows[p.affine.size() + i], z));
  }
  return rep;
}

}  // namespace sideinfo

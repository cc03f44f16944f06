// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any
// criterion fails.

#include "sideinfo/ba.hpp"
#include "sideinfo/case2.hpp"
#include "sideinfo/gp.hpp"
#include "sideinfo/theory.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace sideinfo;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void run(int id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out.pass) ++failures;
  std::printf("%s criterion %d: %s (%.2f s)%s\n", out.pass ? "PASS" : "FAIL", id, title, secs,
              out.detail.str().c_str());
  std::fflush(stdout);
}

double seconds_of(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double h2(double p) { return binary_entropy(p); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

const BaOptions kOracle{1e-10, 200000};

WzSource ex3_view() { return wyner_ziv_view(example3_source(0.3)); }
StrategySpace ex3_strategies() {
  const SourceInstance s = example3_source(0.3);
  return enumerate_strategies({s.s2}, s.xhat);
}

Eigen::VectorXd random_simplex(std::mt19937& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = e(rng);
  return v / v.sum();
}

RowMajorMatrix random_rows(std::mt19937& rng, int rows, int cols) {
  RowMajorMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) m.row(r) = random_simplex(rng, cols).transpose();
  return m;
}

// Lifts a causal encoder (rows v, strategies S1 -> X) to the noncausal
// strategy space S1 x V2 -> X, giving every causal strategy the table that
// ignores v.
RowMajorMatrix lift_causal_encoder(const ChannelInstance& ch, int nv, const RowMajorMatrix& qv) {
  const StrategySpace causal = enumerate_strategies({ch.s1}, ch.x);
  const StrategySpace full = case2_strategies(ch, nv);
  RowMajorMatrix q = RowMajorMatrix::Zero(ch.s1.size * nv, full.size());
  for (int t = 0; t < causal.size(); ++t) {
    int index = 0;
    for (int s1 = 0; s1 < ch.s1.size; ++s1) {
      for (int v = 0; v < nv; ++v) index = index * ch.x.size + causal(t, s1);
    }
    for (int s1 = 0; s1 < ch.s1.size; ++s1) {
      for (int v = 0; v < nv; ++v) q(s1 * nv + v, index) = qv(v, t);
    }
  }
  return q;
}

}  // namespace

int main() {
  run(1, "closed-form Blahut-Arimoto checks", [](Outcome& o) {
    RowMajorMatrix m(2, 2);
    m << 0.9, 0.1, 0.1, 0.9;
    const CondKernel bsc({Alphabet(2, "X")}, {Alphabet(2, "Y")}, m);
    double cap = 0, rd = 0;
    const double t1 = seconds_of([&] { cap = ba_capacity(bsc).value; });
    const double t2 = seconds_of([&] {
      rd = ba_rate_distortion(JointPmf({Alphabet(2, "X")}, Eigen::Vector2d(0.5, 0.5)),
                              hamming_distortion(2), 0.1)
               .value;
    });
    o.detail << " capacity=" << fmt(cap) << " rd=" << fmt(rd);
    o.require(std::abs(cap - 0.531004) <= 1e-6 && std::abs(cap - (1 - h2(0.1))) <= 1e-6, "BSC capacity");
    o.require(std::abs(rd - 0.531004) <= 1e-6 && std::abs(rd - (1 - h2(0.1))) <= 1e-6, "rate-distortion");
    o.require(t1 < 1.0 && t2 < 1.0, "runtime");
  });

  run(2, "Wyner-Ziv endpoints on the crossover-0.3 source", [](Outcome& o) {
    const WzSource wz = ex3_view();
    const StrategySpace st = ex3_strategies();
    const double r0 = wz_primal(wz, st, 0.0).value;
    o.detail << " R(0)=" << fmt(r0);
    o.require(std::abs(r0 - 0.881291) <= 1e-4, "R(0)");
    for (double D : {0.3, 0.35, 0.5}) {
      const double r = wz_primal(wz, st, D).value;
      o.require(std::abs(r) <= 1e-6, "R(" + fmt(D) + ") = " + fmt(r));
    }
  });

  // Shared by criteria 3 and 4.
  std::vector<WzGpReport> gp_runs;
  std::vector<double> primal_values;
  run(3, "GP dual tight to the Wyner-Ziv primal", [&](Outcome& o) {
    const WzSource wz = ex3_view();
    const StrategySpace st = ex3_strategies();
    WzGpOptions opts;
    opts.cross_check = false;
    double worst = 0.0;
    const double secs = seconds_of([&] {
      for (int k = 0; k <= 5; ++k) {
        const double D = 0.05 * k;
        gp_runs.push_back(wz_rate_via_gp(wz, st, D, opts));
        primal_values.push_back(wz_primal(wz, st, D).value);
        worst = std::max(worst, std::abs(gp_runs.back().value - primal_values.back()));
      }
    });
    o.detail << " max|gp-primal|=" << worst;
    o.require(worst <= 1e-3, "tightness");
    o.require(secs < 30.0, "runtime");
  });

  run(4, "weak duality along every barrier iterate", [&](Outcome& o) {
    o.require(gp_runs.size() == 6, "criterion 3 runs available");
    double worst = -INFINITY;
    std::size_t iterates = 0;
    for (std::size_t i = 0; i < gp_runs.size(); ++i) {
      for (double v : gp_runs[i].gp.trace) {
        worst = std::max(worst, v - primal_values[i]);
        ++iterates;
      }
    }
    o.detail << " iterates=" << iterates << " max(objective-primal)=" << worst;
    o.require(iterates > 0, "nonempty traces");
    o.require(worst <= 1e-6, "objective exceeds primal");
  });

  run(5, "semi-iterative algorithm on the first example", [](Outcome& o) {
    const ChannelInstance ch = example1_channel(0.1);
    const double rmax = h2(0.2);
    std::vector<double> grid;
    for (int k = 0; k <= 14; ++k) grid.push_back(0.05 * k);
    grid.push_back(rmax);
    grid.push_back(0.8);
    grid.push_back(1.0);
    Case2Options opts;
    opts.grid_step = 0.05;
    opts.v2_size = 2;
    std::vector<CurvePoint> curve;
    const double secs = seconds_of([&] { curve = capacity_case2_curve(ch, grid, opts); });

    bool monotone = true;
    for (std::size_t i = 1; i < curve.size(); ++i) monotone = monotone && curve[i].value >= curve[i - 1].value;
    o.require(monotone, "(a) nondecreasing");
    const double at_max = curve[15].value;
    o.require(curve[16].value == at_max && curve[17].value == at_max, "(b) constant beyond H(S2|S1)");

    const double cc = gp_channel_capacity(ch, {}, kOracle).value;
    StateVisibility full;
    full.encoder_s2 = true;
    const double full_s2 = gp_channel_capacity(ch, full, kOracle).value;
    o.detail << " C(0)=" << fmt(curve[0].value) << " oracle=" << fmt(cc) << " C(Rmax)=" << fmt(at_max)
             << " oracle=" << fmt(full_s2);
    o.require(std::abs(curve[0].value - cc) <= 5e-3, "(c) Cover-Chiang endpoint");
    o.require(std::abs(at_max - full_s2) <= 5e-3, "(d) full-S2 endpoint");
    o.require(at_max >= curve[0].value, "(e) C(Rmax) >= C(0)");
    for (const auto& p : curve) o.require(p.status == PointStatus::ok, "status ok");
    o.require(secs < 300.0, "runtime");
  });

  run(6, "closed form for the xor source", [](Outcome& o) {
    const SourceInstance src = example2_source();
    RdCase1Options opts;
    opts.grid_step = 0.05;
    opts.v1_size = 2;
    const std::vector<double> rps{0.0, 0.1, 0.2, 0.4};
    double worst = 0.0;
    const double secs = seconds_of([&] {
      for (double D : {0.05, 0.1, 0.2}) {
        const auto curve = rd_case1_curve(src, D, rps, opts);
        for (std::size_t i = 0; i < rps.size(); ++i) {
          const double err = std::abs(curve[i].value - example2_closed_form(D, rps[i]));
          worst = std::max(worst, err);
          o.require(curve[i].status == PointStatus::ok, "status ok");
        }
      }
    });
    o.detail << " max error=" << worst;
    o.require(worst <= 2e-2, "agreement");
    o.require(secs < 600.0, "runtime");
  });

  run(7, "consistency on the two-noise source", [](Outcome& o) {
    const SourceInstance src = example4_source(0.3, 0.001);
    const WzSource pair = wyner_ziv_view(src);
    const StrategySpace st = enumerate_strategies({src.s2}, src.xhat);
    for (double D : {0.1, 0.3}) {
      const double a = rd_case1(src, D, 0.0).value;
      const double b = wz_primal(pair, st, D).value;
      o.detail << " D=" << D << ": " << fmt(a) << " vs " << fmt(b);
      o.require(std::abs(a - b) <= 1e-3, "R'=0 against the pair-source Wyner-Ziv rate");
    }
    const std::vector<double> ds{0.05, 0.1, 0.2, 0.3}, rps{0.0, 0.25, 0.5, 1.0};
    std::vector<std::vector<CurvePoint>> table;
    for (double D : ds) table.push_back(rd_case1_curve(src, D, rps));
    for (std::size_t i = 0; i < ds.size(); ++i) {
      for (std::size_t j = 0; j < rps.size(); ++j) {
        if (j > 0) o.require(table[i][j].value <= table[i][j - 1].value + 1e-9, "nonincreasing in R'");
        if (i > 0) o.require(table[i][j].value <= table[i - 1][j].value + 1e-9, "nonincreasing in D");
      }
    }
  });

  run(8, "inner-functional lemma suite on 200 random instances", [](Outcome& o) {
    std::mt19937 rng(20240611);
    const Alphabet X(2, "X"), Y(2, "Y"), S1(2, "S1"), S2(2, "S2"), V(2, "V2");
    double worst_concavity = 0, worst_gap = 0;
    int bad_q = 0, bad_Q = 0, bad_u = 0, bad_trace = 0, unconverged = 0;
    Case2Options opts;
    opts.delta = 1e-9;
    // Optima on the simplex boundary converge sublinearly; a few draws need
    // several hundred thousand sweeps.
    opts.max_inner_iters = 2000000;
    for (int trial = 0; trial < 200; ++trial) {
      const ChannelInstance ch(JointPmf({S1, S2}, random_simplex(rng, 4)),
                               CondKernel({X, S1, S2}, {Y}, random_rows(rng, 8, 2)));
      const CondKernel w({S2}, {V}, random_rows(rng, 2, 2));
      const StrategyChannel sc = case2_strategy_channel(ch, w, case2_strategies(ch, 2));
      const int ne = sc.encoder_states(), no = sc.outputs, nt = sc.strategies;

      for (double a : {0.25, 0.5, 0.75}) {
        const RowMajorMatrix q1 = random_rows(rng, ne, nt), q2 = random_rows(rng, ne, nt);
        const RowMajorMatrix Q1 = random_rows(rng, no, nt), Q2 = random_rows(rng, no, nt);
        const double lhs = j_w(ch, w, a * q1 + (1 - a) * q2, a * Q1 + (1 - a) * Q2);
        const double rhs = a * j_w(ch, w, q1, Q1) + (1 - a) * j_w(ch, w, q2, Q2);
        worst_concavity = std::max(worst_concavity, rhs - lhs);
      }

      const RowMajorMatrix q = random_rows(rng, ne, nt);
      const RowMajorMatrix Qs = decoder_posterior(sc, q);
      const double j_star = j_w(ch, w, q, Qs);
      const RowMajorMatrix Q = random_rows(rng, no, nt);
      const RowMajorMatrix qs = encoder_update(sc, Q);
      const double j_qstar = j_w(ch, w, qs, Q);
      for (int k = 0; k < 100; ++k) {
        if (j_w(ch, w, q, random_rows(rng, no, nt)) > j_star + 1e-12) ++bad_Q;
        if (j_w(ch, w, random_rows(rng, ne, nt), Q) > j_qstar + 1e-12) ++bad_q;
      }
      // U_w(q) bounds J_w at any other encoder paired with its best decoder.
      const double u = u_w_bound(ch, w, q);
      for (int k = 0; k < 10; ++k) {
        const RowMajorMatrix q2 = random_rows(rng, ne, nt);
        if (j_w(ch, w, q2, decoder_posterior(sc, q2)) > u + 1e-12) ++bad_u;
      }
      if (j_star > u + 1e-12) ++bad_u;

      const SolveReport r = inner_max(ch, w, opts);
      for (std::size_t i = 0; i < r.trace.size(); ++i) {
        if (r.trace[i].bound < r.trace[i].objective - 1e-12) ++bad_u;
        if (i > 0 && r.trace[i].objective < r.trace[i - 1].objective - 1e-12) ++bad_trace;
      }
      if (!r.converged) ++unconverged;
      // Recomputed from the final log weights: dying strategies underflow in
      // argopt[0], which would make U infinite for the rounded encoder.
      const StrategyBounds fb = strategy_bounds_log2(sc, r.log2_encoder);
      worst_gap = std::max(worst_gap, fb.upper - fb.objective);
    }
    o.detail << " concavity slack=" << worst_concavity << " fixed-point gap=" << worst_gap;
    o.require(worst_concavity <= 1e-10, "joint concavity");
    o.require(bad_Q == 0, "Q* optimality");
    o.require(bad_q == 0, "q* optimality");
    o.require(bad_u == 0, "U_w >= J_w");
    o.require(bad_trace == 0, "monotone inner traces");
    o.require(unconverged == 0 && worst_gap < 1e-8, "fixed-point gap");
  });

  run(9, "evaluators reproduce optimizer objectives; dualize is an involution", [](Outcome& o) {
    double worst = 0.0;
    auto track = [&](double a, double b, const std::string& what) {
      worst = std::max(worst, std::abs(a - b));
      o.require(std::abs(a - b) <= 1e-9, what);
    };
    auto markov_ok = [&](const EvalResult& r, const std::string& what) {
      for (const auto& m : r.markov_violations) o.require(m.violation < 1e-10, what + " " + m.chain);
    };

    const ChannelInstance ch = example1_channel();
    for (const CurvePoint& p : capacity_case2_curve(ch, {0.0, 0.2, 0.4, h2(0.2)})) {
      const StrategyChannel sc = case2_strategy_channel(ch, *p.w, case2_strategies(ch, 2));
      const RowMajorMatrix q = p.encoder->matrix();
      const EvalResult r = eval_cc(CcBound::case2lb, case2_joint(ch, *p.w, q), &ch);
      track(r.objective, j_w(ch, *p.w, q, decoder_posterior(sc, q)), "case 2 objective");
      track(r.objective, p.raw_value, "case 2 reported value");
      track(r.r_prime_required, r_w(ch, *p.w), "case 2 rate");
      markov_ok(r, "case 2");
    }
    for (const CurvePoint& p : capacity_case2_causal_curve(ch, {0.0, 0.5, 1.0})) {
      const int nv = p.w->out_axes()[0].size;
      const RowMajorMatrix q = lift_causal_encoder(ch, nv, p.encoder->matrix());
      const EvalResult r = eval_cc(CcBound::case2c, case2_joint(ch, *p.w, q), &ch);
      track(r.objective, p.raw_value, "causal objective");
      track(r.r_prime_required, r_w_causal(ch, *p.w), "causal rate");
      markov_ok(r, "causal");
    }

    const SourceInstance ex3 = example3_source(0.3);
    const CondKernel none = CondKernel::uniform({ex3.s1}, {Alphabet(1, "V1")});
    for (double D : {0.05, 0.15, 0.25}) {
      const WzGpReport g = wz_rate_via_gp(ex3_view(), ex3_strategies(), D);
      const EvalResult r = eval_sc(ScBound::case1, case1_joint(ex3, none, g.q), ex3.distortion);
      track(r.objective, g.primal_rate, "Wyner-Ziv recovered rate");
      track(*r.distortion, g.primal_distortion, "Wyner-Ziv recovered distortion");
      markov_ok(r, "Wyner-Ziv");
    }
    const SourceInstance ex2 = example2_source();
    for (const CurvePoint& p : rd_case1_curve(ex2, 0.1, {0.0, 0.2})) {
      const RowMajorMatrix q = p.encoder->matrix();
      const StrategySpace st = case1_strategies(ex2, p.w->out_axes()[0].size);
      const auto [rate, dist] = wz_rate_and_distortion(case1_pair_source(ex2, *p.w), st, q);
      const EvalResult r = eval_sc(ScBound::case1, case1_joint(ex2, *p.w, q), ex2.distortion);
      track(r.objective, rate, "source case 1 rate");
      track(*r.distortion, dist, "source case 1 distortion");
      track(r.r_prime_required, r_w_source(ex2, *p.w), "source case 1 description rate");
      markov_ok(r, "source case 1");
    }

    // degenerate description: lower and upper case-2 evaluators coincide
    const CondKernel point = CondKernel::deterministic({ch.s2}, {Alphabet(2, "V2")}, std::vector<int>{0, 0});
    const CurvePoint zero = capacity_case2(ch, 0.0);
    const JointPmf j = case2_joint(ch, point, zero.encoder->matrix());
    const EvalResult lb = eval_cc(CcBound::case2lb, j);
    for (CcBound ub : {CcBound::case2ub1, CcBound::case2ub2}) {
      const EvalResult r = eval_cc(ub, j);
      track(r.objective, lb.objective, "lb/ub objective");
      track(r.r_prime_required, lb.r_prime_required, "lb/ub rate");
    }

    for (CodingCase c : {CodingCase::CC1, CodingCase::CC2, CodingCase::CC2C, CodingCase::SC1,
                         CodingCase::SC1C, CodingCase::SC2}) {
      o.require(dualize(dualize(case_descriptor(c))) == case_descriptor(c), "involution " + to_string(c));
    }
    o.detail << " max mismatch=" << worst;
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

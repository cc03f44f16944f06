#include "doctest.h"
#include "helpers.hpp"

#include "sideinfo/case2.hpp"
#include "sideinfo/gp.hpp"
#include "sideinfo/theory.hpp"

using namespace sideinfo;
using namespace testing_util;

namespace {
const Alphabet V(2, "V"), U(3, "U");

CondKernel point_v(const Alphabet& given) {
  return CondKernel::deterministic({given}, {V}, std::vector<int>(given.size, 0));
}

// (S1, S2, V, U, X, Y) built by chaining w(v|s2), u|(s1,v), x|(u,s1,v), y|(x,s1,s2).
JointPmf channel_joint(std::mt19937& rng, const ChannelInstance& ch, const CondKernel& w) {
  JointPmf j = chain(ch.states, w, {1});
  j = chain(j, random_kernel(rng, {ch.s1, V}, {U}), {0, 2});
  j = chain(j, random_kernel(rng, {U, ch.s1, V}, {ch.x}), {3, 0, 2});
  return chain(j, ch.kernel, {4, 0, 1});
}

// (X, S1, S2, V, U, Xhat)
JointPmf source_joint(std::mt19937& rng, const SourceInstance& src, const CondKernel& w) {
  JointPmf j = chain(src.joint, w, {1});
  j = chain(j, random_kernel(rng, {src.x, src.s1, V}, {U}), {0, 1, 3});
  return chain(j, random_kernel(rng, {U, src.s2, V}, {src.xhat}), {4, 2, 3});
}

double max_violation(const EvalResult& r) {
  double m = 0.0;
  for (const auto& v : r.markov_violations) m = std::max(m, v.violation);
  return m;
}
}  // namespace

TEST_CASE("eval_cc") {
  std::mt19937 rng(12);
  const ChannelInstance ch = random_binary_channel(rng);
  const JointPmf deg = channel_joint(rng, ch, point_v(ch.s2));
  enum { S1, S2, Vx, Ux, X, Y };
  const EvalResult lb = eval_cc(CcBound::case2lb, deg, &ch);
  CHECK(lb.objective == doctest::Approx(mutual_information(deg, {Ux}, {Y, S2}) -
                                        mutual_information(deg, {Ux}, {S1}))
                            .epsilon(1e-12));
  CHECK(std::abs(lb.r_prime_required) < 1e-12);
  CHECK(max_violation(lb) < 1e-10);
  for (CcBound ub : {CcBound::case2ub1, CcBound::case2ub2}) {
    const EvalResult r = eval_cc(ub, deg);
    CHECK(r.objective == lb.objective);
    CHECK(r.r_prime_required == lb.r_prime_required);
  }

  // U independent of everything
  JointPmf ind = chain(ch.states, point_v(ch.s2), {1});
  ind = chain(ind, CondKernel({V}, {U}, random_rows(rng, 1, 3).replicate(2, 1)), {2});
  ind = chain(ind, random_kernel(rng, {ch.s1, ch.s2}, {ch.x}), {0, 1});
  ind = chain(ind, ch.kernel, {4, 0, 1});
  CHECK(std::abs(eval_cc(CcBound::case2lb, ind).objective) < 1e-12);

  const JointPmf gen = channel_joint(rng, ch, random_kernel(rng, {ch.s2}, {V}));
  const EvalResult g = eval_cc(CcBound::case2lb, gen, &ch);
  CHECK(g.r_prime_required == doctest::Approx(conditional_mutual_information(gen, {Vx}, {S2}, {S1})));
  CHECK(max_violation(g) < 1e-10);
}

TEST_CASE("eval_cc reproduces the inner objective") {
  const ChannelInstance ch = example1_channel();
  const CurvePoint p = capacity_case2(ch, 0.3);
  REQUIRE(p.w.has_value());
  REQUIRE(p.encoder.has_value());
  const StrategyChannel sc = case2_strategy_channel(ch, *p.w, case2_strategies(ch, 2));
  const RowMajorMatrix q = p.encoder->matrix();
  const double j = j_w(ch, *p.w, q, decoder_posterior(sc, q));
  const EvalResult r = eval_cc(CcBound::case2lb, case2_joint(ch, *p.w, q), &ch);
  CHECK(std::abs(r.objective - j) < 1e-9);
  CHECK(std::abs(r.r_prime_required - r_w(ch, *p.w)) < 1e-12);
  CHECK(max_violation(r) < 1e-10);
}

TEST_CASE("eval_sc") {
  std::mt19937 rng(21);
  const SourceInstance src = example4_source();
  enum { X, S1, S2, Vx, Ux, XH };
  JointPmf copy = chain(src.joint, point_v(src.s1), {1});
  copy = chain(copy, random_kernel(rng, {src.x, src.s1, V}, {U}), {0, 1, 3});
  copy = chain(copy, CondKernel::deterministic({src.x}, {src.xhat}, std::vector<int>{0, 1}), {0});
  CHECK(*eval_sc(ScBound::case1, copy, src.distortion).distortion == doctest::Approx(0.0));

  const JointPmf deg = source_joint(rng, src, point_v(src.s1));
  const EvalResult r = eval_sc(ScBound::case1, deg, src.distortion);
  CHECK(r.objective == doctest::Approx(mutual_information(deg, {Ux}, {X, S1}) -
                                       mutual_information(deg, {Ux}, {S2}))
                           .epsilon(1e-12));
  CHECK(std::abs(r.r_prime_required) < 1e-12);
  CHECK(max_violation(r) < 1e-10);

  // distortion oracle by direct summation
  const JointPmf gen = source_joint(rng, src, random_kernel(rng, {src.s1}, {V}));
  const JointPmf xx = marginalize(gen, {X, XH});
  double d = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int h = 0; h < 2; ++h) d += xx.at({x, h}) * src.distortion(x, h);
  }
  CHECK(*eval_sc(ScBound::case2, gen, src.distortion).distortion == doctest::Approx(d).epsilon(1e-14));
}

TEST_CASE("eval_sc on the recovered case-1 encoder") {
  const SourceInstance xr = example2_source();
  const CurvePoint p = rd_case1(xr, 0.1, 0.2);
  REQUIRE(p.w.has_value());
  REQUIRE(p.encoder.has_value());
  const JointPmf j = case1_joint(xr, *p.w, p.encoder->matrix());
  const EvalResult r = eval_sc(ScBound::case1, j, xr.distortion);
  CHECK(r.objective == doctest::Approx(0.3310).epsilon(2e-2));
  CHECK(*r.distortion <= 0.1 + 1e-3);
  CHECK(r.r_prime_required <= 0.2 + 1e-9);

  const StrategySpace st = case1_strategies(xr, p.w->out_axes()[0].size);
  const auto [rate, dist] =
      wz_rate_and_distortion(case1_pair_source(xr, *p.w), st, p.encoder->matrix());
  CHECK(std::abs(r.objective - rate) < 1e-9);
  CHECK(std::abs(*r.distortion - dist) < 1e-12);
}

TEST_CASE("eval_fact") {
  std::mt19937 rng(31);
  const ChannelInstance ch = random_binary_channel(rng);
  const Alphabet V1(2, "V1"), V2(2, "V2");
  auto fact1_joint = [&](const CondKernel& w1, const CondKernel& w2) {
    JointPmf j = chain(ch.states, w1, {0});
    j = chain(j, w2, {1});
    j = chain(j, random_kernel(rng, {ch.s1, V1, V2}, {U}), {0, 2, 3});
    j = chain(j, random_kernel(rng, {U, ch.s1, V1, V2}, {ch.x}), {4, 0, 2, 3});
    return chain(j, ch.kernel, {5, 0, 1});
  };
  const auto deg1 = CondKernel::deterministic({ch.s1}, {V1}, std::vector<int>{0, 0});
  const auto deg2 = CondKernel::deterministic({ch.s2}, {V2}, std::vector<int>{1, 1});

  const JointPmf both = fact1_joint(deg1, deg2);
  enum { S1, S2, W1, W2, Ux, X, Y };
  const EvalResult f = eval_fact(1, both);
  CHECK(f.objective == doctest::Approx(mutual_information(both, {Ux}, {Y, S2}) -
                                       mutual_information(both, {Ux}, {S1}))
                           .epsilon(1e-12));
  CHECK(std::abs(f.r_prime_required) < 1e-12);
  CHECK(std::abs(*f.r_prime_required_2) < 1e-12);

  // V2 a point mass: collapses to channel case 1 on (S1, S2, V1, U, X, Y)
  const JointPmf one = fact1_joint(random_kernel(rng, {ch.s1}, {V1}), deg2);
  const EvalResult g = eval_fact(1, one);
  const EvalResult c1 = eval_cc(CcBound::case1, marginalize(one, {S1, S2, W1, Ux, X, Y}));
  CHECK(g.objective == doctest::Approx(c1.objective).epsilon(1e-12));
  CHECK(g.r_prime_required == doctest::Approx(c1.r_prime_required).epsilon(1e-12));
  CHECK(std::abs(*g.r_prime_required_2) < 1e-12);

  const SourceInstance src = example4_source();
  JointPmf s = chain(src.joint, CondKernel::deterministic({src.s1}, {V1}, std::vector<int>{0, 0}), {1});
  s = chain(s, CondKernel::deterministic({src.s2}, {V2}, std::vector<int>{0, 0}), {2});
  s = chain(s, random_kernel(rng, {src.x, src.s1}, {U}), {0, 1});
  s = chain(s, random_kernel(rng, {U, src.s2}, {src.xhat}), {5, 2});
  const EvalResult f2 = eval_fact(2, s, &src.distortion);
  CHECK(f2.objective == doctest::Approx(mutual_information(s, {5}, {0, 1}) -
                                        mutual_information(s, {5}, {2}))
                            .epsilon(1e-12));
  CHECK(std::abs(f2.r_prime_required) < 1e-12);
  CHECK(std::abs(*f2.r_prime_required_2) < 1e-12);
  CHECK(f2.distortion.has_value());
}

TEST_CASE("dualize") {
  const std::vector<CodingCase> all{CodingCase::CC1,  CodingCase::CC2, CodingCase::CC2C,
                                    CodingCase::SC1,  CodingCase::SC1C, CodingCase::SC2};
  for (CodingCase c : all) CHECK(dualize(dualize(case_descriptor(c))) == case_descriptor(c));
  CHECK(dualize(case_descriptor(CodingCase::CC2C)) == case_descriptor(CodingCase::SC1C));
  CHECK(dualize(case_descriptor(CodingCase::CC2)) == case_descriptor(CodingCase::SC1));
  const CaseDescriptor d = dualize(case_descriptor(CodingCase::CC1));
  CHECK(d == case_descriptor(CodingCase::SC2));
  CHECK(d.roles.at("encoder_state") == "S1");
  CHECK(d.r_prime.front().b == std::vector<std::string>{"S2"});
}

TEST_CASE("example2_closed_form") {
  CHECK(example2_closed_form(0.1, 0.2) == doctest::Approx(0.3310).epsilon(1e-4));
  CHECK(example2_closed_form(0.1, 0.2) == doctest::Approx(1 - h2(0.1) - 0.2).epsilon(1e-14));
  for (double rp : {0.0, 0.3, 1.0}) CHECK(example2_closed_form(0.5, rp) == 0.0);
  CHECK(example2_closed_form(0.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("bound ids") {
  CHECK(parse_cc_bound("2lb") == CcBound::case2lb);
  CHECK(parse_cc_bound("cc2lb") == CcBound::case2lb);
  CHECK(parse_cc_bound("CC-2C") == CcBound::case2c);
  CHECK(parse_sc_bound("sc1c") == ScBound::case1c);
  CHECK_THROWS_AS(parse_cc_bound("3"), std::invalid_argument);
}

#include "doctest.h"
#include "helpers.hpp"

#include "sideinfo/strategy.hpp"

#include <set>

using namespace sideinfo;
using namespace testing_util;

TEST_CASE("strategy counts and ordering") {
  const Alphabet D2(2, "D"), C2(2, "C"), C3(3, "Xhat");
  CHECK(enumerate_strategies({D2}, C2).size() == 4);
  CHECK(enumerate_strategies({Alphabet(2, "S1"), Alphabet(2, "V2")}, Alphabet(2, "X")).size() == 16);
  CHECK(enumerate_strategies({Alphabet(2, "S")}, C3).size() == 9);

  const StrategySpace st = enumerate_strategies({D2}, C2);
  CHECK(st.table(0) == std::vector<int>{0, 0});
  CHECK(st.table(1) == std::vector<int>{0, 1});
  CHECK(st.table(2) == std::vector<int>{1, 0});
  CHECK(st.table(3) == std::vector<int>{1, 1});

  CHECK_THROWS_AS(enumerate_strategies({Alphabet(13, "big")}, C2), CapacityError);
}

TEST_CASE("lift_channel") {
  const Alphabet X(2, "X"), Y(2, "Y"), S1(2, "S1"), S2(2, "S2"), V(2, "V2");
  const StrategySpace st = enumerate_strategies({S1, V}, X);

  // y = x regardless of state
  const ChannelInstance clean(JointPmf::uniform({S1, S2}),
                              CondKernel::deterministic({X, S1, S2}, {Y},
                                                        std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1}));
  const CondKernel lifted = lift_channel(clean, st, V);
  for (int t = 0; t < st.size(); ++t) {
    for (int s1 = 0; s1 < 2; ++s1) {
      for (int s2 = 0; s2 < 2; ++s2) {
        for (int v = 0; v < 2; ++v) {
          const Eigen::Index row = ((t * 2 + s1) * 2 + s2) * 2 + v;
          CHECK(lifted(row, st(t, s1 * 2 + v)) == 1.0);
        }
      }
    }
  }

  const ChannelInstance ex1 = example1_channel();
  const CondKernel zero = lift_channel(ex1, st, V);
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      for (int v = 0; v < 2; ++v) {
        const Eigen::Index row = (s1 * 2 + s2) * 2 + v;  // t = 0
        for (int y = 0; y < 2; ++y) CHECK(zero(row, y) == ex1.transition(y, 0, s1, s2));
      }
    }
  }

  std::mt19937 rng(5);
  const ChannelInstance ch = random_binary_channel(rng);
  const CondKernel all = lift_channel(ch, st, V);
  std::set<std::vector<double>> seen;
  for (int t = 0; t < 16; ++t) {
    for (int s1 = 0; s1 < 2; ++s1) {
      for (int s2 = 0; s2 < 2; ++s2) {
        for (int v = 0; v < 2; ++v) {
          const int x = st.table(t)[s1 * 2 + v];
          const Eigen::Index row = ((t * 2 + s1) * 2 + s2) * 2 + v;
          for (int y = 0; y < 2; ++y) CHECK(all(row, y) == ch.transition(y, x, s1, s2));
          CHECK(all.matrix().row(row).sum() == doctest::Approx(1.0).epsilon(1e-15));
        }
      }
    }
  }
}

TEST_CASE("lift_source") {
  const Alphabet S(2, "S"), XH(2, "Xhat");
  const Eigen::MatrixXd d = hamming_distortion(2);
  const StrategySpace st = enumerate_strategies({S}, XH);
  const LiftedDistortion ld = lift_source(d, st);
  // identity strategy t(s) = s is table {0, 1}, index 1
  for (int x = 0; x < 2; ++x) {
    for (int s = 0; s < 2; ++s) {
      CHECK(ld(x, 1, s) == (x != s ? 1.0 : 0.0));
      CHECK(ld(x, 0, s) == d(x, 0));
    }
  }
  for (int t = 0; t < 4; ++t) {
    for (int x = 0; x < 2; ++x) {
      for (int s = 0; s < 2; ++s) CHECK(ld(x, t, s) == d(x, st(t, s)));
    }
  }
}

TEST_CASE("cardinality bounds") {
  const AlphabetSizes bin{2, 2, 2};
  const auto cc2 = cardinality_bounds(CodingCase::CC2, bin);
  CHECK(cc2.v == 5);
  CHECK(cc2.u == 40);
  const auto cc2c = cardinality_bounds(CodingCase::CC2C, bin);
  CHECK(cc2c.v == 3);
  CHECK(cc2c.u == 12);
  const auto sc1c = cardinality_bounds(CodingCase::SC1C, bin);
  CHECK(sc1c.v == 3);
  CHECK(sc1c.u == 12);
}

TEST_CASE("coding case ids") {
  for (auto c : {CodingCase::CC1, CodingCase::CC2, CodingCase::CC2C, CodingCase::SC1,
                 CodingCase::SC1C, CodingCase::SC2}) {
    CHECK(parse_coding_case(to_string(c)) == c);
  }
  CHECK_THROWS_AS(parse_coding_case("cc9"), std::invalid_argument);
}

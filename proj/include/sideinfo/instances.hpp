#pragma once

#include "sideinfo/prob.hpp"

namespace sideinfo {

// State-dependent channel p(y | x, s1, s2) with states (s1, s2) ~ p(s1, s2).
// S1 is known to the encoder, S2 to the decoder.
struct ChannelInstance {
  Alphabet x, y, s1, s2;
  JointPmf states;    // axes (S1, S2)
  CondKernel kernel;  // given (X, S1, S2), out (Y)

  ChannelInstance(JointPmf states, CondKernel kernel);

  double transition(int y, int x, int s1, int s2) const;
};

// Source X with encoder side information S1 and decoder side information
// S2, drawn from p(x, s1, s2), and a distortion d(x, xhat) >= 0.
struct SourceInstance {
  Alphabet x, xhat, s1, s2;
  JointPmf joint;                 // axes (X, S1, S2)
  Eigen::MatrixXd distortion;     // |X| x |Xhat|

  SourceInstance(JointPmf joint, Eigen::MatrixXd distortion,
                 Alphabet xhat);
};

Eigen::MatrixXd hamming_distortion(int size);

// Binary channel of the two-state example: Z-channel with crossover eps at
// (s1,s2)=(1,0), noiseless at (1,1), inverting at (0,0), S-channel with
// crossover eps at (0,1); states drawn from [[0.1,0.4],[0.4,0.1]].
ChannelInstance example1_channel(double eps = 0.1);

// X = S1 xor S2 with S1, S2 i.i.d. Bernoulli(0.5), Hamming distortion.
SourceInstance example2_source();

// Classic Wyner-Ziv setup: X ~ Bernoulli(0.5), decoder side information S
// with Pr{S != X} = crossover.  S1 is trivial (size 1); S2 plays S.
SourceInstance example3_source(double crossover = 0.3);

// Switched binary source: X = S1 xor Z0 when S2 = 0, S1 xor Z1 when S2 = 1.
SourceInstance example4_source(double z0 = 0.3, double z1 = 0.001);

}  // namespace sideinfo

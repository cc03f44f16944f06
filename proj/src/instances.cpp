#include "sideinfo/instances.hpp"

#include <stdexcept>

namespace sideinfo {

ChannelInstance::ChannelInstance(JointPmf states_, CondKernel kernel_)
    : states(std::move(states_)), kernel(std::move(kernel_)) {
  if (states.rank() != 2) {
    throw std::invalid_argument("ChannelInstance: states must have axes (S1, S2)");
  }
  if (kernel.given_axes().size() != 3 || kernel.out_axes().size() != 1) {
    throw std::invalid_argument(
        "ChannelInstance: kernel must be p(y | x, s1, s2)");
  }
  s1 = states.axes()[0];
  s2 = states.axes()[1];
  x = kernel.given_axes()[0];
  y = kernel.out_axes()[0];
  if (kernel.given_axes()[1].size != s1.size ||
      kernel.given_axes()[2].size != s2.size) {
    throw std::invalid_argument("ChannelInstance: state alphabets disagree");
  }
}

double ChannelInstance::transition(int yv, int xv, int s1v, int s2v) const {
  return kernel((static_cast<Eigen::Index>(xv) * s1.size + s1v) * s2.size + s2v,
                yv);
}

SourceInstance::SourceInstance(JointPmf joint_, Eigen::MatrixXd distortion_,
                               Alphabet xhat_)
    : xhat(std::move(xhat_)),
      joint(std::move(joint_)),
      distortion(std::move(distortion_)) {
  if (joint.rank() != 3) {
    throw std::invalid_argument("SourceInstance: joint must have axes (X, S1, S2)");
  }
  x = joint.axes()[0];
  s1 = joint.axes()[1];
  s2 = joint.axes()[2];
  if (distortion.rows() != x.size || distortion.cols() != xhat.size) {
    throw std::invalid_argument("SourceInstance: distortion shape mismatch");
  }
  if (!distortion.allFinite() || (distortion.array() < 0.0).any()) {
    throw std::invalid_argument(
        "SourceInstance: distortion must be finite and nonnegative");
  }
}

Eigen::MatrixXd hamming_distortion(int size) {
  return Eigen::MatrixXd::Ones(size, size) -
         Eigen::MatrixXd::Identity(size, size);
}

ChannelInstance example1_channel(double eps) {
  if (eps < 0.0 || eps > 1.0) {
    throw std::invalid_argument("example1_channel: eps must lie in [0, 1]");
  }
  const Alphabet X(2, "X"), Y(2, "Y"), S1(2, "S1"), S2(2, "S2");
  Eigen::VectorXd states(4);
  states << 0.1, 0.4, 0.4, 0.1;

  // Rows (x, s1, s2), columns y.
  RowMajorMatrix k(8, 2);
  auto set = [&](int xv, int s1v, int s2v, double p0) {
    const int r = (xv * 2 + s1v) * 2 + s2v;
    k(r, 0) = p0;
    k(r, 1) = 1.0 - p0;
  };
  // (s1,s2) = (0,0): inverting channel.
  set(0, 0, 0, 0.0);
  set(1, 0, 0, 1.0);
  // (0,1): S-channel, 1 -> 1 always, 0 -> 1 with probability eps.
  set(0, 0, 1, 1.0 - eps);
  set(1, 0, 1, 0.0);
  // (1,0): Z-channel, 0 -> 0 always, 1 -> 0 with probability eps.
  set(0, 1, 0, 1.0);
  set(1, 1, 0, eps);
  // (1,1): noiseless.
  set(0, 1, 1, 1.0);
  set(1, 1, 1, 0.0);

  return ChannelInstance(JointPmf({S1, S2}, states),
                         CondKernel({X, S1, S2}, {Y}, std::move(k)));
}

SourceInstance example2_source() {
  const Alphabet X(2, "X"), S1(2, "S1"), S2(2, "S2");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(8);
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      const int x = s1 ^ s2;
      p[(x * 2 + s1) * 2 + s2] = 0.25;
    }
  }
  return SourceInstance(JointPmf({X, S1, S2}, p), hamming_distortion(2),
                        Alphabet(2, "Xhat"));
}

SourceInstance example3_source(double crossover) {
  const Alphabet X(2, "X"), S1(1, "S1"), S2(2, "S2");
  Eigen::VectorXd p(4);
  p << 0.5 * (1.0 - crossover), 0.5 * crossover, 0.5 * crossover,
      0.5 * (1.0 - crossover);
  return SourceInstance(JointPmf({X, S1, S2}, p), hamming_distortion(2),
                        Alphabet(2, "Xhat"));
}

SourceInstance example4_source(double z0, double z1) {
  const Alphabet X(2, "X"), S1(2, "S1"), S2(2, "S2");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(8);
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      const double flip = s2 == 0 ? z0 : z1;
      p[(s1 * 2 + s1) * 2 + s2] += 0.25 * (1.0 - flip);
      p[((1 - s1) * 2 + s1) * 2 + s2] += 0.25 * flip;
    }
  }
  return SourceInstance(JointPmf({X, S1, S2}, p), hamming_distortion(2),
                        Alphabet(2, "Xhat"));
}

}  // namespace sideinfo

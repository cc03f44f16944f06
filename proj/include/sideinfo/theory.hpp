#pragma once

#include "sideinfo/instances.hpp"
#include "sideinfo/prob.hpp"
#include "sideinfo/strategy.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sideinfo {

struct MarkovViolation {
  std::string chain;
  double violation = 0.0;  // bits
};

struct EvalResult {
  double objective = 0.0;         // bits
  double r_prime_required = 0.0;  // bits; the first description for facts
  std::optional<double> r_prime_required_2;
  std::optional<double> distortion;
  std::vector<MarkovViolation> markov_violations;
};

enum class CcBound { case1, case2lb, case2ub1, case2ub2, case2c };
enum class ScBound { case1, case1c, case2 };

// Accepts "1", "2lb", "2ub1", "2ub2", "2c", optionally prefixed "cc".
CcBound parse_cc_bound(const std::string& id);
// Accepts "1", "1c", "2", optionally prefixed "sc".
ScBound parse_sc_bound(const std::string& id);

// Joint axes (S1, S2, V, U, X, Y).  When `ch` is given, the deviation of
// p(y|x,s1,s2) from the channel is reported as an extra entry.
EvalResult eval_cc(CcBound c, const JointPmf& joint, const ChannelInstance* ch = nullptr);

// Joint axes (X, S1, S2, V, U, Xhat); d is |X| x |Xhat|.
EvalResult eval_sc(ScBound c, const JointPmf& joint, const Eigen::MatrixXd& distortion);

// Fact 1 joint axes (S1, S2, V1, V2, U, X, Y); Fact 2 joint axes
// (X, S1, S2, V1, V2, U, Xhat) and a distortion matrix.
EvalResult eval_fact(int fact, const JointPmf& joint,
                     const Eigen::MatrixXd* distortion = nullptr);

// Signed mutual-information term sign * I(a; b | c) over symbol names.
struct MiTerm {
  int sign = 1;
  std::vector<std::string> a, b, c;
  bool operator==(const MiTerm&) const = default;
};

// Syntactic description of a coding case: which symbol plays which role,
// the optimization direction and the objective / rate requirement.
struct CaseDescriptor {
  std::string kind;  // "channel" or "source"
  CodingCase coding_case = CodingCase::CC1;
  std::string goal;  // "max" or "min"
  std::map<std::string, std::string> roles;  // role -> symbol
  std::vector<MiTerm> objective;
  std::vector<MiTerm> r_prime;
  bool operator==(const CaseDescriptor&) const = default;
};

CaseDescriptor case_descriptor(CodingCase c);
// Channel cases 1, 2, 2C map to source cases 2, 1, 1C and back, with
// X <-> Xhat, Y <-> X, S1 <-> S2, V1 <-> V2.
CaseDescriptor dualize(const CaseDescriptor& d);

// max{1 - H(D) - R', 0} for the xor source, with D clamped to [0, 1/2].
double example2_closed_form(double max_distortion, double r_prime);

}  // namespace sideinfo

#include "sideinfo/theory.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace sideinfo {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
  s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
  return s;
}

void require_rank(const JointPmf& p, int rank, const char* what) {
  if (p.rank() != rank) {
    throw std::invalid_argument(std::string(what) + ": joint must have " + std::to_string(rank) +
                                " axes, got " + std::to_string(p.rank()));
  }
}

void add_chain(EvalResult& r, const JointPmf& p, const std::string& name, const AxisSet& a,
               const AxisSet& b, const AxisSet& c) {
  r.markov_violations.push_back({name, check_markov(p, a, b, c).violation});
}

double expected_distortion(const JointPmf& p, int x_axis, int xhat_axis,
                           const Eigen::MatrixXd& d) {
  const JointPmf m = marginalize(p, {x_axis, xhat_axis});
  if (d.rows() != m.axis_size(0) || d.cols() != m.axis_size(1)) {
    throw std::invalid_argument("distortion matrix does not match the X and Xhat axes");
  }
  double e = 0.0;
  for (int x = 0; x < m.axis_size(0); ++x) {
    for (int h = 0; h < m.axis_size(1); ++h) e += m.at({x, h}) * d(x, h);
  }
  return e;
}

}  // namespace

CcBound parse_cc_bound(const std::string& id) {
  std::string s = lower(id);
  if (s.rfind("cc", 0) == 0) s = s.substr(2);
  if (s == "1") return CcBound::case1;
  if (s == "2lb" || s == "2") return CcBound::case2lb;
  if (s == "2ub1") return CcBound::case2ub1;
  if (s == "2ub2") return CcBound::case2ub2;
  if (s == "2c") return CcBound::case2c;
  throw std::invalid_argument("unknown channel case '" + id + "'");
}

ScBound parse_sc_bound(const std::string& id) {
  std::string s = lower(id);
  if (s.rfind("sc", 0) == 0) s = s.substr(2);
  if (s == "1") return ScBound::case1;
  if (s == "1c") return ScBound::case1c;
  if (s == "2") return ScBound::case2;
  throw std::invalid_argument("unknown source case '" + id + "'");
}

EvalResult eval_cc(CcBound c, const JointPmf& p, const ChannelInstance* ch) {
  require_rank(p, 6, "eval_cc");
  enum { S1, S2, V, U, X, Y };
  EvalResult r;
  if (c == CcBound::case2c) {
    r.objective = conditional_mutual_information(p, {U}, {Y, S2}, {V});
  } else {
    r.objective = conditional_mutual_information(p, {U}, {Y, S2}, {V}) -
                  conditional_mutual_information(p, {U}, {S1}, {V});
  }
  switch (c) {
    case CcBound::case1:
      r.r_prime_required = mutual_information(p, {V}, {S1}) - mutual_information(p, {V}, {Y, S2});
      add_chain(r, p, "V-S1-S2", {V}, {S1}, {S2});
      add_chain(r, p, "U-(S1,V)-S2", {U}, {S1, V}, {S2});
      break;
    case CcBound::case2lb:
    case CcBound::case2ub1:
    case CcBound::case2ub2:
      r.r_prime_required = conditional_mutual_information(p, {V}, {S2}, {S1});
      if (c != CcBound::case2ub1) add_chain(r, p, "V-S2-S1", {V}, {S2}, {S1});
      if (c != CcBound::case2ub2) add_chain(r, p, "U-(S1,V)-S2", {U}, {S1, V}, {S2});
      break;
    case CcBound::case2c:
      r.r_prime_required = mutual_information(p, {V}, {S2});
      add_chain(r, p, "V-S2-S1", {V}, {S2}, {S1});
      add_chain(r, p, "U-V-(S1,S2)", {U}, {V}, {S1, S2});
      break;
  }
  add_chain(r, p, "X-(U,S1,V)-S2", {X}, {U, S1, V}, {S2});
  add_chain(r, p, "Y-(X,S1,S2)-(U,V)", {Y}, {X, S1, S2}, {U, V});

  if (ch) {
    const JointPmf m = marginalize(p, {S1, S2, X, Y});
    double worst = 0.0;
    for (int s1 = 0; s1 < ch->s1.size; ++s1) {
      for (int s2 = 0; s2 < ch->s2.size; ++s2) {
        for (int x = 0; x < ch->x.size; ++x) {
          double px = 0.0;
          for (int y = 0; y < ch->y.size; ++y) px += m.at({s1, s2, x, y});
          if (px <= 0.0) continue;
          for (int y = 0; y < ch->y.size; ++y) {
            worst = std::max(worst, std::abs(m.at({s1, s2, x, y}) / px -
                                             ch->transition(y, x, s1, s2)));
          }
        }
      }
    }
    r.markov_violations.push_back({"p(y|x,s1,s2) deviation", worst});
  }
  return r;
}

EvalResult eval_sc(ScBound c, const JointPmf& p, const Eigen::MatrixXd& d) {
  require_rank(p, 6, "eval_sc");
  enum { X, S1, S2, V, U, XH };
  EvalResult r;
  if (c == ScBound::case1c) {
    r.objective = conditional_mutual_information(p, {U}, {X, S1}, {V});
  } else {
    r.objective = conditional_mutual_information(p, {U}, {X, S1}, {V}) -
                  conditional_mutual_information(p, {U}, {S2}, {V});
  }
  switch (c) {
    case ScBound::case1:
      r.r_prime_required = conditional_mutual_information(p, {V}, {S1}, {S2});
      add_chain(r, p, "V-S1-(X,S2)", {V}, {S1}, {X, S2});
      break;
    case ScBound::case1c:
      r.r_prime_required = mutual_information(p, {V}, {S1});
      add_chain(r, p, "V-S1-(X,S2)", {V}, {S1}, {X, S2});
      break;
    case ScBound::case2:
      r.r_prime_required = mutual_information(p, {V}, {S2}) - mutual_information(p, {V}, {X, S1});
      add_chain(r, p, "V-S2-(X,S1)", {V}, {S2}, {X, S1});
      break;
  }
  add_chain(r, p, "U-(X,S1,V)-S2", {U}, {X, S1, V}, {S2});
  add_chain(r, p, "Xhat-(U,S2,V)-(X,S1)", {XH}, {U, S2, V}, {X, S1});
  r.distortion = expected_distortion(p, X, XH, d);
  return r;
}

EvalResult eval_fact(int fact, const JointPmf& p, const Eigen::MatrixXd* d) {
  EvalResult r;
  if (fact == 1) {
    require_rank(p, 7, "eval_fact");
    enum { S1, S2, V1, V2, U, X, Y };
    r.objective = conditional_mutual_information(p, {U}, {Y, S2}, {V1, V2}) -
                  conditional_mutual_information(p, {U}, {S1}, {V1, V2});
    r.r_prime_required =
        mutual_information(p, {V1}, {S1}) - mutual_information(p, {V1}, {Y, S2, V2});
    r.r_prime_required_2 =
        mutual_information(p, {V2}, {S2}) - mutual_information(p, {V2}, {S1, V1});
    add_chain(r, p, "V1-S1-(S2,V2)", {V1}, {S1}, {S2, V2});
    add_chain(r, p, "V2-S2-(S1,V1)", {V2}, {S2}, {S1, V1});
    add_chain(r, p, "U-(S1,V1,V2)-S2", {U}, {S1, V1, V2}, {S2});
    add_chain(r, p, "X-(U,S1,V1,V2)-S2", {X}, {U, S1, V1, V2}, {S2});
    add_chain(r, p, "Y-(X,S1,S2)-(U,V1,V2)", {Y}, {X, S1, S2}, {U, V1, V2});
    return r;
  }
  if (fact == 2) {
    require_rank(p, 7, "eval_fact");
    enum { X, S1, S2, V1, V2, U, XH };
    r.objective = conditional_mutual_information(p, {U}, {X, S1}, {V1, V2}) -
                  conditional_mutual_information(p, {U}, {S2}, {V1, V2});
    r.r_prime_required =
        mutual_information(p, {V1}, {S1}) - mutual_information(p, {V1}, {S2, V2});
    r.r_prime_required_2 =
        mutual_information(p, {V2}, {S2}) - mutual_information(p, {V2}, {X, S1, V1});
    add_chain(r, p, "V1-S1-(X,S2,V2)", {V1}, {S1}, {X, S2, V2});
    add_chain(r, p, "V2-S2-(X,S1,V1)", {V2}, {S2}, {X, S1, V1});
    add_chain(r, p, "U-(X,S1,V1,V2)-S2", {U}, {X, S1, V1, V2}, {S2});
    add_chain(r, p, "Xhat-(U,S2,V1,V2)-(X,S1)", {XH}, {U, S2, V1, V2}, {X, S1});
    if (d) r.distortion = expected_distortion(p, X, XH, *d);
    return r;
  }
  throw std::invalid_argument("eval_fact: fact must be 1 or 2");
}

// ---------------------------------------------------------------------------
// Duality

namespace {

MiTerm mi(int sign, std::vector<std::string> a, std::vector<std::string> b,
          std::vector<std::string> c = {}) {
  return MiTerm{sign, std::move(a), std::move(b), std::move(c)};
}

std::map<std::string, std::string> channel_roles(const std::string& v) {
  return {{"input", "X"}, {"output", "Y"}, {"encoder_state", "S1"},
          {"decoder_state", "S2"}, {"description", v}, {"auxiliary", "U"}};
}

std::map<std::string, std::string> source_roles(const std::string& v) {
  return {{"reconstruction", "Xhat"}, {"source", "X"}, {"encoder_state", "S1"},
          {"decoder_state", "S2"}, {"description", v}, {"auxiliary", "U"}};
}

const std::map<std::string, std::string>& symbol_dual() {
  static const std::map<std::string, std::string> m{
      {"X", "Xhat"}, {"Xhat", "X"}, {"Y", "X"}, {"S1", "S2"}, {"S2", "S1"},
      {"V1", "V2"},  {"V2", "V1"},  {"U", "U"}};
  return m;
}

}  // namespace

CaseDescriptor case_descriptor(CodingCase c) {
  CaseDescriptor d;
  d.coding_case = c;
  switch (c) {
    case CodingCase::CC1:
      d.kind = "channel";
      d.goal = "max";
      d.roles = channel_roles("V1");
      d.objective = {mi(1, {"U"}, {"Y", "S2"}, {"V1"}), mi(-1, {"U"}, {"S1"}, {"V1"})};
      d.r_prime = {mi(1, {"V1"}, {"S1"}), mi(-1, {"V1"}, {"Y", "S2"})};
      break;
    case CodingCase::CC2:
      d.kind = "channel";
      d.goal = "max";
      d.roles = channel_roles("V2");
      d.objective = {mi(1, {"U"}, {"Y", "S2"}, {"V2"}), mi(-1, {"U"}, {"S1"}, {"V2"})};
      d.r_prime = {mi(1, {"V2"}, {"S2"}, {"S1"})};
      break;
    case CodingCase::CC2C:
      d.kind = "channel";
      d.goal = "max";
      d.roles = channel_roles("V2");
      d.objective = {mi(1, {"U"}, {"Y", "S2"}, {"V2"})};
      d.r_prime = {mi(1, {"V2"}, {"S2"})};
      break;
    case CodingCase::SC1:
      d.kind = "source";
      d.goal = "min";
      d.roles = source_roles("V1");
      d.objective = {mi(1, {"U"}, {"X", "S1"}, {"V1"}), mi(-1, {"U"}, {"S2"}, {"V1"})};
      d.r_prime = {mi(1, {"V1"}, {"S1"}, {"S2"})};
      break;
    case CodingCase::SC1C:
      d.kind = "source";
      d.goal = "min";
      d.roles = source_roles("V1");
      d.objective = {mi(1, {"U"}, {"X", "S1"}, {"V1"})};
      d.r_prime = {mi(1, {"V1"}, {"S1"})};
      break;
    case CodingCase::SC2:
      d.kind = "source";
      d.goal = "min";
      d.roles = source_roles("V2");
      d.objective = {mi(1, {"U"}, {"X", "S1"}, {"V2"}), mi(-1, {"U"}, {"S2"}, {"V2"})};
      d.r_prime = {mi(1, {"V2"}, {"S2"}), mi(-1, {"V2"}, {"X", "S1"})};
      break;
  }
  return d;
}

CaseDescriptor dualize(const CaseDescriptor& d) {
  static const std::map<CodingCase, CodingCase> case_dual{
      {CodingCase::CC1, CodingCase::SC2},  {CodingCase::SC2, CodingCase::CC1},
      {CodingCase::CC2, CodingCase::SC1},  {CodingCase::SC1, CodingCase::CC2},
      {CodingCase::CC2C, CodingCase::SC1C}, {CodingCase::SC1C, CodingCase::CC2C}};
  static const std::map<std::string, std::string> role_dual{
      {"input", "reconstruction"}, {"reconstruction", "input"}, {"output", "source"},
      {"source", "output"},        {"encoder_state", "decoder_state"},
      {"decoder_state", "encoder_state"}, {"description", "description"},
      {"auxiliary", "auxiliary"}};
  if (d.kind != "channel" && d.kind != "source") {
    throw std::invalid_argument("dualize: kind must be channel or source");
  }
  const bool to_source = d.kind == "channel";
  // Y maps to X on the way to a source; X maps back to Y on the return.
  const auto sym = [&](const std::string& s) {
    if (!to_source && s == "X") return std::string("Y");
    if (!to_source && s == "Xhat") return std::string("X");
    const auto it = symbol_dual().find(s);
    if (it == symbol_dual().end()) throw std::invalid_argument("dualize: unknown symbol " + s);
    return it->second;
  };
  const auto map_all = [&](const std::vector<std::string>& v) {
    std::vector<std::string> out;
    for (const auto& s : v) out.push_back(sym(s));
    return out;
  };
  const auto map_terms = [&](const std::vector<MiTerm>& ts) {
    std::vector<MiTerm> out;
    for (const auto& t : ts) out.push_back(MiTerm{t.sign, map_all(t.a), map_all(t.b), map_all(t.c)});
    return out;
  };

  CaseDescriptor out;
  out.kind = to_source ? "source" : "channel";
  out.coding_case = case_dual.at(d.coding_case);
  out.goal = d.goal == "max" ? "min" : "max";
  for (const auto& [role, s] : d.roles) {
    const auto it = role_dual.find(role);
    if (it == role_dual.end()) throw std::invalid_argument("dualize: unknown role " + role);
    out.roles[it->second] = sym(s);
  }
  out.objective = map_terms(d.objective);
  out.r_prime = map_terms(d.r_prime);
  return out;
}

double example2_closed_form(double max_distortion, double r_prime) {
  const double D = std::clamp(max_distortion, 0.0, 0.5);
  return std::max(1.0 - binary_entropy(D) - r_prime, 0.0);
}

}  // namespace sideinfo

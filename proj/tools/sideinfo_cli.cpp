#include "sideinfo/ba.hpp"
#include "sideinfo/case2.hpp"
#include "sideinfo/gp.hpp"
#include "sideinfo/problem_file.hpp"
#include "sideinfo/theory.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace sideinfo;
using nlohmann::json;

namespace {

constexpr int kParseError = 2;
constexpr int kSolverError = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", std::abs(v) < 5e-7 ? 0.0 : v);
  return buf;
}

// "a:b:s", inclusive of b up to a small slack.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad grid '" + text + "'");
    }
  }
  if (parts.size() != 3) throw UsageError("grid must look like a:b:s, got '" + text + "'");
  const double a = parts[0], b = parts[1], s = parts[2];
  if (!(s > 0.0) || b < a) throw UsageError("grid needs b >= a and s > 0");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = a + k * s;
    if (v > b + 1e-9) break;
    out.push_back(std::min(v, b));
  }
  return out;
}

std::vector<double> values_from(const std::optional<double>& single, const std::string& grid,
                                const char* what) {
  if (single && !grid.empty()) throw UsageError(std::string("give either --") + what + " or a grid");
  if (single) return {*single};
  if (!grid.empty()) return parse_grid(grid);
  throw UsageError(std::string("missing --") + what + " value");
}

ChannelInstance need_channel(const std::string& where) {
  ProblemFile p = load_problem(where);
  if (!p.channel) throw ProblemFileError("expected a channel problem");
  return *p.channel;
}

SourceInstance need_source(const std::string& where) {
  ProblemFile p = load_problem(where);
  if (!p.source) throw ProblemFileError("expected a source problem");
  return *p.source;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemFileError("cannot open '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ProblemFileError(std::string("malformed JSON: ") + e.what());
  }
}

// Rounds every floating value to six decimals for display.
json rounded(json j) {
  if (j.is_number_float()) return std::round(j.get<double>() * 1e6) / 1e6 + 0.0;
  if (j.is_structured()) {
    for (auto& e : j) e = rounded(e);
  }
  return j;
}

std::string normalize_case(std::string id) {
  std::string out;
  for (char c : id) {
    if (c != '-' && c != '_') out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// Rows of r_prime,value,raw_value,winning_w,iterations,gap,status, each
// optionally preceded by a leading D column.
int write_curve(std::ostream& os, const std::vector<CurvePoint>& pts,
                const std::optional<double>& prefix) {
  bool all_ok = true;
  for (const auto& p : pts) {
    if (prefix) os << fixed6(*prefix) << ',';
    os << fixed6(p.r_prime) << ',' << fixed6(p.value) << ',' << fixed6(p.raw_value) << ','
       << p.winning_w << ',' << p.iterations << ',' << fixed6(p.gap) << ',' << to_string(p.status)
       << '\n';
    all_ok = all_ok && p.status == PointStatus::ok;
  }
  return all_ok ? 0 : kSolverError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Side-information capacity and rate-distortion solvers"};
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("--out", out_path, "write output to this path instead of stdout");

  // capacity-case2 / capacity-case2c
  std::string problem, rprime_grid, d_grid;
  std::optional<double> rprime, d;
  Case2Options c2;
  auto add_case2 = [&](CLI::App* sub) {
    sub->add_option("--problem", problem, "problem file or builtin:<name>")->required();
    sub->add_option("--rprime-grid", rprime_grid, "a:b:s");
    sub->add_option("--rprime", rprime);
    sub->add_option("--grid-step", c2.grid_step);
    sub->add_option("--v2", c2.v2_size);
    sub->add_option("--epsilon", c2.epsilon);
    sub->add_option("--delta", c2.delta);
  };
  auto* cap2 = app.add_subcommand("capacity-case2", "lower bound with noncausal encoder states");
  add_case2(cap2);
  auto* cap2c = app.add_subcommand("capacity-case2c", "causal encoder variant");
  add_case2(cap2c);

  // wz-rate
  std::string via = "both";
  double tight_tol = 1e-3;
  auto* wz = app.add_subcommand("wz-rate", "Wyner-Ziv rate by alternating minimization or GP");
  wz->add_option("--problem", problem)->required();
  wz->add_option("--d", d);
  wz->add_option("--d-grid", d_grid);
  wz->add_option("--via", via)->check(CLI::IsMember({"ba", "gp", "both"}));
  wz->add_option("--tight-tol", tight_tol);

  // rd-case1
  RdCase1Options r1;
  auto* rd1 = app.add_subcommand("rd-case1", "rate-distortion with a rate-limited S1 description");
  rd1->add_option("--problem", problem)->required();
  rd1->add_option("--d", d);
  rd1->add_option("--d-grid", d_grid);
  rd1->add_option("--rprime", rprime);
  rd1->add_option("--rprime-grid", rprime_grid);
  rd1->add_option("--v1", r1.v1_size);
  rd1->add_option("--grid-step", r1.grid_step);
  rd1->add_option("--epsilon", r1.epsilon);

  // eval / dualize / show-problem
  std::string case_id, joint_path;
  auto* ev = app.add_subcommand("eval", "evaluate a bound expression on a joint distribution");
  ev->add_option("--case", case_id, "cc1, cc2lb, cc2ub1, cc2ub2, cc2c, sc1, sc1c, sc2, fact1, fact2")
      ->required();
  ev->add_option("--joint", joint_path)->required();
  ev->add_option("--problem", problem);
  auto* du = app.add_subcommand("dualize", "print the dual of a coding case");
  du->add_option("--case", case_id)->required();
  auto* show = app.add_subcommand("show-problem", "print a problem in file form");
  show->add_option("--problem", problem)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParseError;
  }

  try {
    Output out(out_path);
    std::ostream& os = out.stream();

    if (cap2->parsed() || cap2c->parsed()) {
      const ChannelInstance ch = need_channel(problem);
      const auto rs = values_from(rprime, rprime_grid, "rprime");
      const auto pts = cap2->parsed() ? capacity_case2_curve(ch, rs, c2)
                                      : capacity_case2_causal_curve(ch, rs, c2);
      os << "r_prime,value,raw_value,winning_w,iterations,gap,status\n";
      return write_curve(os, pts, std::nullopt);
    }

    if (wz->parsed()) {
      const SourceInstance src = need_source(problem);
      const auto ds = values_from(d, d_grid, "d");
      const WzSource view = wyner_ziv_view(src);
      const StrategySpace st = enumerate_strategies({src.s2}, src.xhat);
      WzGpOptions gopts;
      gopts.tight_tol = tight_tol;
      gopts.cross_check = false;
      if (via == "ba") os << "D,primal\n";
      if (via == "gp") os << "D,gp\n";
      if (via == "both") os << "D,primal,gp,gap\n";
      double worst = 0.0;
      for (double dv : ds) {
        os << fixed6(dv);
        double primal = 0.0, dual = 0.0;
        if (via != "gp") {
          primal = wz_primal(view, st, dv).value;
          os << ',' << fixed6(primal);
        }
        if (via != "ba") {
          dual = wz_rate_via_gp(view, st, dv, gopts).value;
          os << ',' << fixed6(dual);
        }
        if (via == "both") {
          os << ',' << fixed6(dual - primal);
          worst = std::max(worst, std::abs(dual - primal));
        }
        os << '\n';
      }
      os.flush();
      if (worst > tight_tol) {
        std::cerr << "max |gap| " << worst << " exceeds tight-tol " << tight_tol << '\n';
        return kSolverError;
      }
      return 0;
    }

    if (rd1->parsed()) {
      const SourceInstance src = need_source(problem);
      const auto ds = values_from(d, d_grid, "d");
      const auto rs = values_from(rprime, rprime_grid, "rprime");
      os << "D,r_prime,value,raw_value,winning_w,iterations,gap,status\n";
      int code = 0;
      for (double dv : ds) {
        code = std::max(code, write_curve(os, rd_case1_curve(src, dv, rs, r1), dv));
      }
      return code;
    }

    if (ev->parsed()) {
      const std::string id = normalize_case(case_id);
      const JointPmf joint = parse_joint(read_json(joint_path));
      EvalResult r;
      if (id.rfind("cc", 0) == 0) {
        std::optional<ChannelInstance> ch;
        if (!problem.empty()) ch = need_channel(problem);
        r = eval_cc(parse_cc_bound(id), joint, ch ? &*ch : nullptr);
      } else if (id.rfind("sc", 0) == 0 || id == "fact2") {
        Eigen::MatrixXd dist;
        if (!problem.empty()) {
          dist = need_source(problem).distortion;
        } else {
          dist = hamming_distortion(joint.axes().back().size);
        }
        r = id == "fact2" ? eval_fact(2, joint, &dist) : eval_sc(parse_sc_bound(id), joint, dist);
      } else if (id == "fact1") {
        r = eval_fact(1, joint);
      } else {
        throw UsageError("unknown case '" + case_id + "'");
      }
      os << rounded(to_json(r)).dump(2) << '\n';
      return 0;
    }

    if (du->parsed()) {
      const CaseDescriptor dual = dualize(case_descriptor(parse_coding_case(normalize_case(case_id))));
      os << to_json(dual).dump(2) << '\n';
      return 0;
    }

    if (show->parsed()) {
      os << to_json(load_problem(problem)).dump(2) << '\n';
      return 0;
    }
  } catch (const ProblemFileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverError;
  }
  return 0;
}

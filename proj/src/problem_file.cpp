#include "sideinfo/problem_file.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace sideinfo {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ProblemFileError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::map<std::string, int> read_alphabets(const json& j) {
  std::map<std::string, int> sizes;
  for (const auto& [name, size] : field(j, "alphabets").items()) {
    if (!size.is_number_integer() || size.get<int>() < 1) {
      throw ProblemFileError("alphabet '" + name + "' must have a positive integer size");
    }
    sizes[name] = size.get<int>();
  }
  return sizes;
}

// Reorders a row-major tensor declared over `declared` axes into the order
// `wanted`.
std::vector<double> reorder(const std::vector<double>& values,
                            const std::vector<std::string>& declared,
                            const std::vector<std::string>& wanted,
                            const std::map<std::string, int>& sizes, const std::string& what) {
  if (declared.size() != wanted.size()) {
    throw ProblemFileError(what + ": expected " + std::to_string(wanted.size()) + " axes");
  }
  std::vector<Alphabet> decl_axes;
  for (const auto& name : declared) {
    const auto it = sizes.find(name);
    if (it == sizes.end()) throw ProblemFileError(what + ": unknown axis '" + name + "'");
    decl_axes.emplace_back(it->second, name);
  }
  std::vector<int> source_of(wanted.size(), -1);
  for (std::size_t k = 0; k < wanted.size(); ++k) {
    for (std::size_t i = 0; i < declared.size(); ++i) {
      if (declared[i] == wanted[k]) source_of[k] = static_cast<int>(i);
    }
    if (source_of[k] < 0) throw ProblemFileError(what + ": axis '" + wanted[k] + "' missing");
  }
  const auto count = static_cast<std::size_t>(cell_count(decl_axes));
  if (values.size() != count) {
    throw ProblemFileError(what + ": expected " + std::to_string(count) + " entries, got " +
                           std::to_string(values.size()));
  }
  std::vector<Alphabet> want_axes;
  for (int s : source_of) want_axes.push_back(decl_axes[s]);
  const auto strides = row_major_strides(decl_axes);
  std::vector<double> out(count);
  for (std::size_t flat = 0; flat < count; ++flat) {
    const auto idx = unravel(static_cast<Eigen::Index>(flat), want_axes);
    Eigen::Index src = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) src += idx[k] * strides[source_of[k]];
    out[flat] = values[src];
  }
  return out;
}

std::vector<double> numbers(const json& j, const std::string& what) {
  if (!j.is_array()) throw ProblemFileError(what + " must be an array of numbers");
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) throw ProblemFileError(what + " must be an array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

std::vector<std::string> names(const json& j, const std::string& what) {
  if (!j.is_array()) throw ProblemFileError(what + " axes must be an array of names");
  std::vector<std::string> v;
  for (const auto& e : j) {
    if (!e.is_string()) throw ProblemFileError(what + " axes must be an array of names");
    v.push_back(e.get<std::string>());
  }
  return v;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ChannelInstance parse_channel(const json& j) {
  const auto sizes = read_alphabets(j);
  for (const char* a : {"X", "Y", "S1", "S2"}) {
    if (!sizes.count(a)) throw ProblemFileError(std::string("channel needs alphabet ") + a);
  }
  const Alphabet X(sizes.at("X"), "X"), Y(sizes.at("Y"), "Y"), S1(sizes.at("S1"), "S1"),
      S2(sizes.at("S2"), "S2");
  const json& joint = field(j, "joint");
  const auto states = reorder(numbers(field(joint, "probs"), "joint probs"),
                              names(field(joint, "axes"), "joint"), {"S1", "S2"}, sizes, "joint");
  const json& kernel = field(j, "kernel");
  const auto k = reorder(numbers(field(kernel, "probs"), "kernel probs"),
                         names(field(kernel, "axes"), "kernel"), {"X", "S1", "S2", "Y"}, sizes,
                         "kernel");
  RowMajorMatrix km = Eigen::Map<const RowMajorMatrix>(k.data(), X.size * S1.size * S2.size, Y.size);
  try {
    return ChannelInstance(JointPmf({S1, S2}, to_vector(states)),
                           CondKernel({X, S1, S2}, {Y}, std::move(km)));
  } catch (const std::invalid_argument& e) {
    throw ProblemFileError(e.what());
  }
}

SourceInstance parse_source(const json& j) {
  const auto sizes = read_alphabets(j);
  for (const char* a : {"X", "Xhat", "S1", "S2"}) {
    if (!sizes.count(a)) throw ProblemFileError(std::string("source needs alphabet ") + a);
  }
  const Alphabet X(sizes.at("X"), "X"), XH(sizes.at("Xhat"), "Xhat"), S1(sizes.at("S1"), "S1"),
      S2(sizes.at("S2"), "S2");
  const json& joint = field(j, "joint");
  const auto p = reorder(numbers(field(joint, "probs"), "joint probs"),
                         names(field(joint, "axes"), "joint"), {"X", "S1", "S2"}, sizes, "joint");
  const json& dist = field(j, "distortion");
  const auto d = reorder(numbers(field(dist, "values"), "distortion values"),
                         names(field(dist, "axes"), "distortion"), {"X", "Xhat"}, sizes,
                         "distortion");
  Eigen::MatrixXd dm(X.size, XH.size);
  for (int x = 0; x < X.size; ++x) {
    for (int h = 0; h < XH.size; ++h) dm(x, h) = d[static_cast<std::size_t>(x) * XH.size + h];
  }
  try {
    return SourceInstance(JointPmf({X, S1, S2}, to_vector(p)), std::move(dm), XH);
  } catch (const std::invalid_argument& e) {
    throw ProblemFileError(e.what());
  }
}

double param(const json& params, const char* key, double fallback) {
  if (!params.is_object() || !params.contains(key)) return fallback;
  if (!params.at(key).is_number()) throw ProblemFileError(std::string(key) + " must be a number");
  return params.at(key).get<double>();
}

json axis_list(const std::vector<Alphabet>& axes) {
  json a = json::array();
  for (const auto& ax : axes) a.push_back({{"label", ax.label}, {"size", ax.size}});
  return a;
}

json terms_json(const std::vector<MiTerm>& ts) {
  json a = json::array();
  for (const auto& t : ts) a.push_back({{"sign", t.sign}, {"a", t.a}, {"b", t.b}, {"c", t.c}});
  return a;
}

std::vector<MiTerm> terms_from(const json& j) {
  std::vector<MiTerm> out;
  for (const auto& t : j) {
    out.push_back(MiTerm{t.at("sign").get<int>(), t.at("a").get<std::vector<std::string>>(),
                         t.at("b").get<std::vector<std::string>>(),
                         t.at("c").get<std::vector<std::string>>()});
  }
  return out;
}

}  // namespace

ProblemFile builtin_problem(const std::string& name, const json& params) {
  ProblemFile p;
  p.builtin = name;
  try {
    if (name == "example1") {
      p.kind = "channel";
      p.channel = example1_channel(param(params, "epsilon", 0.1));
    } else if (name == "example2") {
      p.kind = "source";
      p.source = example2_source();
    } else if (name == "example3") {
      p.kind = "source";
      p.source = example3_source(param(params, "crossover", 0.3));
    } else if (name == "example4") {
      p.kind = "source";
      p.source = example4_source(param(params, "z0", 0.3), param(params, "z1", 0.001));
    } else {
      throw ProblemFileError("unknown builtin '" + name + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ProblemFileError(e.what());
  }
  return p;
}

ProblemFile parse_problem(const json& j) {
  if (!j.is_object()) throw ProblemFileError("problem file must be a JSON object");
  if (j.contains("builtin")) {
    if (!j.at("builtin").is_string()) throw ProblemFileError("builtin must be a string");
    ProblemFile p = builtin_problem(j.at("builtin").get<std::string>(), j);
    if (j.contains("kind") && j.at("kind") != p.kind) {
      throw ProblemFileError("builtin kind disagrees with declared kind");
    }
    return p;
  }
  const json& kind = field(j, "kind");
  ProblemFile p;
  if (kind == "channel") {
    p.kind = "channel";
    p.channel = parse_channel(j);
  } else if (kind == "source") {
    p.kind = "source";
    p.source = parse_source(j);
  } else {
    throw ProblemFileError("kind must be 'channel' or 'source'");
  }
  return p;
}

ProblemFile load_problem(const std::string& where) {
  const std::string prefix = "builtin:";
  if (where.rfind(prefix, 0) == 0) return builtin_problem(where.substr(prefix.size()));
  std::ifstream in(where);
  if (!in) throw ProblemFileError("cannot open problem file '" + where + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ProblemFileError(std::string("malformed JSON: ") + e.what());
  }
  return parse_problem(j);
}

json to_json(const ChannelInstance& ch) {
  json j;
  j["kind"] = "channel";
  j["alphabets"] = {{"X", ch.x.size}, {"Y", ch.y.size}, {"S1", ch.s1.size}, {"S2", ch.s2.size}};
  j["joint"] = {{"axes", {"S1", "S2"}},
                {"probs", std::vector<double>(ch.states.probs().begin(), ch.states.probs().end())}};
  const RowMajorMatrix& k = ch.kernel.matrix();
  j["kernel"] = {{"axes", {"X", "S1", "S2", "Y"}},
                 {"probs", std::vector<double>(k.data(), k.data() + k.size())}};
  return j;
}

json to_json(const SourceInstance& src) {
  json j;
  j["kind"] = "source";
  j["alphabets"] = {
      {"X", src.x.size}, {"Xhat", src.xhat.size}, {"S1", src.s1.size}, {"S2", src.s2.size}};
  j["joint"] = {{"axes", {"X", "S1", "S2"}},
                {"probs", std::vector<double>(src.joint.probs().begin(), src.joint.probs().end())}};
  std::vector<double> d;
  for (Eigen::Index x = 0; x < src.distortion.rows(); ++x) {
    for (Eigen::Index h = 0; h < src.distortion.cols(); ++h) d.push_back(src.distortion(x, h));
  }
  j["distortion"] = {{"axes", {"X", "Xhat"}}, {"values", d}};
  return j;
}

json to_json(const ProblemFile& p) {
  if (p.channel) return to_json(*p.channel);
  if (p.source) return to_json(*p.source);
  throw ProblemFileError("empty problem");
}

JointPmf parse_joint(const json& j) {
  std::vector<Alphabet> axes;
  for (const auto& a : field(j, "axes")) {
    if (a.is_object()) {
      axes.emplace_back(a.at("size").get<int>(), a.value("label", std::string()));
    } else {
      throw ProblemFileError("joint axes must be objects with label and size");
    }
  }
  const auto p = numbers(field(j, "probs"), "joint probs");
  try {
    if (static_cast<Eigen::Index>(p.size()) != cell_count(axes)) {
      throw ProblemFileError("joint: entry count does not match the axes");
    }
    return JointPmf(std::move(axes), to_vector(p));
  } catch (const std::invalid_argument& e) {
    throw ProblemFileError(e.what());
  }
}

json to_json(const JointPmf& p) {
  return {{"axes", axis_list(p.axes())},
          {"probs", std::vector<double>(p.probs().begin(), p.probs().end())}};
}

json to_json(const EvalResult& r) {
  json j;
  j["objective"] = r.objective;
  j["r_prime_required"] = r.r_prime_required;
  if (r.r_prime_required_2) j["r_prime_required_2"] = *r.r_prime_required_2;
  if (r.distortion) j["distortion"] = *r.distortion;
  json v = json::array();
  for (const auto& m : r.markov_violations) v.push_back({{"chain", m.chain}, {"violation", m.violation}});
  j["markov_violations"] = v;
  return j;
}

json to_json(const CaseDescriptor& d) {
  return {{"kind", d.kind},
          {"case", to_string(d.coding_case)},
          {"goal", d.goal},
          {"roles", d.roles},
          {"objective", terms_json(d.objective)},
          {"r_prime", terms_json(d.r_prime)}};
}

CaseDescriptor descriptor_from_json(const json& j) {
  try {
    CaseDescriptor d;
    d.kind = j.at("kind").get<std::string>();
    d.coding_case = parse_coding_case(j.at("case").get<std::string>());
    d.goal = j.at("goal").get<std::string>();
    d.roles = j.at("roles").get<std::map<std::string, std::string>>();
    d.objective = terms_from(j.at("objective"));
    d.r_prime = terms_from(j.at("r_prime"));
    return d;
  } catch (const json::exception& e) {
    throw ProblemFileError(std::string("bad case descriptor: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ProblemFileError(e.what());
  }
}

}  // namespace sideinfo

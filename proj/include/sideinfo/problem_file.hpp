#pragma once

#include "sideinfo/instances.hpp"
#include "sideinfo/theory.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace sideinfo {

// Raised for malformed or inconsistent problem files.
class ProblemFileError : public std::runtime_error {
 public:
  explicit ProblemFileError(const std::string& what) : std::runtime_error(what) {}
};

struct ProblemFile {
  std::string kind;  // "channel" or "source"
  std::optional<std::string> builtin;
  std::optional<ChannelInstance> channel;
  std::optional<SourceInstance> source;
};

// Channel files:
//   {"kind": "channel", "alphabets": {"X": 2, "Y": 2, "S1": 2, "S2": 2},
//    "joint":  {"axes": ["S1", "S2"], "probs": [...]},
//    "kernel": {"axes": ["X", "S1", "S2", "Y"], "probs": [...]}}
// Source files:
//   {"kind": "source", "alphabets": {"X": 2, "Xhat": 2, "S1": 2, "S2": 2},
//    "joint": {"axes": ["X", "S1", "S2"], "probs": [...]},
//    "distortion": {"axes": ["X", "Xhat"], "values": [...]}}
// Axes may be listed in any order; arrays are row-major in that order.  A
// file may instead name {"builtin": "example1", "epsilon": 0.1}.
ProblemFile parse_problem(const nlohmann::json& j);
// "builtin:<name>" or a path to a JSON file.
ProblemFile load_problem(const std::string& where);
ProblemFile builtin_problem(const std::string& name, const nlohmann::json& params = {});

nlohmann::json to_json(const ChannelInstance& ch);
nlohmann::json to_json(const SourceInstance& src);
nlohmann::json to_json(const ProblemFile& p);

// {"axes": [{"label": "S1", "size": 2}, ...], "probs": [...]}
JointPmf parse_joint(const nlohmann::json& j);
nlohmann::json to_json(const JointPmf& p);

nlohmann::json to_json(const EvalResult& r);
nlohmann::json to_json(const CaseDescriptor& d);
CaseDescriptor descriptor_from_json(const nlohmann::json& j);

}  // namespace sideinfo

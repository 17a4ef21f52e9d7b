// JSON (de)serialisation of ProblemSpec and the run-manifest emitted by the
// command-line tool.  The on-disk format:
//
// {
//   "parts": [ {"gamma": [1,1], "b": ["1","1"]}, {"gamma": [2], "b": ["1"]} ],
//   "restriction": [ {"p": 2, "rule": "coprime"} ],
//   "balanced": true,
//   "a": [ ["1/4","1/4"], ["1/2"] ]          // optional explicit weights
// }
//
// Rule forms: "all"; "coprime" (exponent 0 at every coordinate);
// {"p":3,"rule":"zero","coords":[[i,j],...]} with 1-based coordinates; and
// {"p":5,"rule":"exclude","patterns":[[...flat...],...]} for finite
// complements.
#pragma once

#include "divlab/model.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace divlab {

inline constexpr const char* kToolVersion = "divlab 0.1.0";

ProblemSpec parse_problem(const std::string& json_text);
ProblemSpec load_problem_file(const std::string& path);
std::string problem_to_json(const ProblemSpec& prob);

// Stable 64-bit FNV-1a fingerprint of the canonical serialisation; recorded
// in run manifests so results can be traced back to their inputs.
std::uint64_t fingerprint(const std::string& canonical_text);
std::uint64_t problem_fingerprint(const ProblemSpec& prob);
std::string problem_fingerprint_hex(const ProblemSpec& prob);

// Enough context to reproduce a run bit-for-bit.  Wall time is informational
// and excluded from replay comparisons.
struct RunManifest {
    std::string fingerprint;  // problem hash, or "-" for file-less commands
    std::string command;
    std::vector<std::pair<std::string, std::string>> parameters;  // sorted by key
    std::string version = kToolVersion;
    unsigned precision_bits = 0;
    double wall_seconds = 0.0;
    std::string result_summary;
};

std::string manifest_to_json(const RunManifest& m);

// Comma-separated values ("1/2,1/2,1/3" or "2,4,8") for --a and --grid.
std::vector<Rational> parse_rational_list(const std::string& text);
std::vector<Integer> parse_integer_list(const std::string& text);

}  // namespace divlab

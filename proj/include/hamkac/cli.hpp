#pragma once

// Job configuration, the verification pipeline and report emission behind
// the hamkac command.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamkac/hamalg.hpp"
#include "hamkac/kacmod.hpp"

namespace hamkac {

/// Invalid configuration; maps to exit status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string> kCheckNames{"jacobi", "gr",      "osp", "l0",      "law",
                                                  "chi_reduced", "meataxe", "hom", "classify"};

struct JobConfig {
  std::uint32_t p = 5;
  std::uint32_t t1 = 1;
  std::uint32_t t2 = 1;
  std::vector<std::string> chi{"I"};
  std::optional<std::vector<Residue>> lambdas;  // nullopt means 0..p-1
  std::set<std::string> checks{"classify"};
  LawMode mode = LawMode::Sampled;
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> cache;
  std::optional<std::filesystem::path> out;
  bool json = false;
  int workers = 0;  // 0 keeps the OpenMP default
  bool allow_any_height = false;
  bool timings = false;
};

struct ParseOutcome {
  std::optional<JobConfig> config;  // empty: exit with `exit_code`
  int exit_code = 0;
  std::string message;
};

/// Flags > config file (--config) > defaults; HAMKAC_CACHE overrides
/// --cache. Never throws.
ParseOutcome parse_args(int argc, const char* const* argv);

/// Structural checks not needing the algebra. Throws ConfigError.
void validate(const JobConfig& c);

/// "I", "II", "III" or "custom:key=val;..." with keys h, e, f, D1, D2 or
/// x<i1>_<i2>. Throws ConfigError.
Character parse_character(const HamAlgebra& g, const std::string& spec);

/// The fields that determine report content, in a fixed order.
nlohmann::ordered_json config_json(const JobConfig& c);
std::string config_hash(const JobConfig& c);

struct RunResult {
  int exit_code = 0;
  nlohmann::ordered_json report;
  std::string summary;  // plain-text table
  std::optional<std::filesystem::path> report_path;
};

/// Runs the requested pipeline and writes the report file. Exit 0 iff
/// every requested check passed, 1 on a failed check, 2 on invalid input.
RunResult run(const JobConfig& c);

}  // namespace hamkac

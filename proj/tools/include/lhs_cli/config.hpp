#pragma once

// YAML run configuration for the lhs tool. Every error carries the file, line and
// column of the offending node.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lhs/experiments.hpp"

namespace lhs::cli {

class ConfigFileError : public std::runtime_error {
 public:
  ConfigFileError(const std::string& file, int line, int column, const std::string& msg);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

struct SimulateSettings {
  Index N = 16;
  Index d = 2;
  double kappa0 = 1.0;
  double kappa1 = 0.0;
  double delta = 0.05;
  double dt = 1e-3;
  double t_end = 1.0;
  std::uint64_t seed = 1;
  std::string initial = "random";  // random | admissible
  std::string field = "lhs";       // lhs | ls
  OmegaSpec omega;
  double frequency_spread = 0.0;   // > 0: heterogeneous random frequencies
  int samples = 200;

  void validate() const;
  nlohmann::json to_json() const;
};

struct Mark {
  int line = 0;  // 1-based
  int column = 0;
};

struct SweepAxis {
  std::string parameter;
  std::vector<double> values;
  Mark mark;
};

// Parsed file. Keys that are absent stay unset so defaults can come from the
// experiment being run.
struct ConfigFile {
  std::string path;
  std::optional<std::string> experiment;
  nlohmann::json overrides = nlohmann::json::object();  // scalar keys as written
  std::optional<SweepAxis> sweep;
  std::optional<std::string> output_dir;
  std::map<std::string, Mark> marks;  // where each key was written

  // "file:line:col: " for the first key named in msg, or "file: " if none is.
  std::string locate(const std::string& msg) const;
};

ConfigFile load_config(const std::string& path);
ConfigFile parse_config(const std::string& text, const std::string& name);

// Applies the overrides on top of the defaults of `id`.
ExperimentConfig resolve_experiment(const ConfigFile& file, const std::string& id);
SimulateSettings resolve_simulate(const ConfigFile& file);

// Sets one named scalar parameter (used by sweeps); throws ConfigError for unknown names.
void set_parameter(ExperimentConfig& cfg, const std::string& name, double value);

std::string sha256_hex(const std::string& data);

}  // namespace lhs::cli

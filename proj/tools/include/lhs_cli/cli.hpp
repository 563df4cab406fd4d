#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lhs::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_hash;  // sha256 of the resolved config JSON
  std::string output_dir;
  std::vector<std::string> artifacts;  // relative to output_dir, includes manifest.json

  nlohmann::json to_json() const;
  void write() const;
};

// Entry point shared by the executable and the tests.
//   lhs simulate   --config PATH --out DIR [--seed U64] [--workers K]
//   lhs experiment --experiment ID [--config PATH] --out DIR [--seed U64] [--workers K]
//   lhs sweep      --config PATH --out DIR [--experiment ID] [--seed U64] [--workers K]
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lhs::cli

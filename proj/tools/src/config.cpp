#include "lhs_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <regex>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "lhs/errors.hpp"
#include "lhs/sampling.hpp"

namespace lhs::cli {

namespace {

std::string where(const std::string& file, int line, int column) {
  std::ostringstream os;
  os << file;
  if (line > 0) os << ':' << line << ':' << column;
  return os.str();
}

Mark mark_of(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.is_null()) return {};
  return {m.line + 1, m.column + 1};
}

enum class Kind { kReal, kInt, kUnsigned, kString };

const std::map<std::string, Kind>& scalar_keys() {
  static const std::map<std::string, Kind> keys{
      {"N", Kind::kInt},          {"d", Kind::kInt},
      {"kappa0", Kind::kReal},    {"kappa1", Kind::kReal},
      {"delta", Kind::kReal},     {"dt", Kind::kReal},
      {"t_end", Kind::kReal},     {"seed", Kind::kUnsigned},
      {"samples", Kind::kInt},    {"runs", Kind::kInt},
      {"levels", Kind::kInt},     {"horizon", Kind::kReal},
      {"perturbation", Kind::kReal}, {"hetero_spread", Kind::kReal},
      {"workers", Kind::kInt},    {"initial", Kind::kString},
      {"field", Kind::kString},   {"frequency_spread", Kind::kReal},
  };
  return keys;
}

const std::set<std::string>& simulate_only() {
  static const std::set<std::string> keys{"initial", "field", "frequency_spread"};
  return keys;
}

const std::set<std::string>& experiment_only() {
  static const std::set<std::string> keys{"runs", "levels", "horizon", "perturbation", "hetero_spread"};
  return keys;
}

class Parser {
 public:
  explicit Parser(std::string file) : file_(std::move(file)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    const Mark m = mark_of(n);
    throw ConfigFileError(file_, m.line, m.column, msg);
  }

  double real(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, key + ": expected a number");
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail(n, key + ": expected a finite number");
      return v;
    } catch (const YAML::BadConversion&) {
      fail(n, key + ": expected a number, got '" + n.Scalar() + "'");
    }
  }

  std::int64_t integer(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, key + ": expected an integer");
    try {
      return n.as<std::int64_t>();
    } catch (const YAML::BadConversion&) {
      fail(n, key + ": expected an integer, got '" + n.Scalar() + "'");
    }
  }

  std::uint64_t unsigned_integer(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar() || n.Scalar().empty() || n.Scalar().front() == '-') {
      fail(n, key + ": expected a non-negative integer");
    }
    try {
      return n.as<std::uint64_t>();
    } catch (const YAML::BadConversion&) {
      fail(n, key + ": expected a non-negative integer, got '" + n.Scalar() + "'");
    }
  }

  std::string string(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, key + ": expected a string");
    return n.Scalar();
  }

  std::vector<double> reals(const YAML::Node& n, const std::string& key) const {
    if (!n.IsSequence()) fail(n, key + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& item : n) out.push_back(real(item, key));
    return out;
  }

  ConfigFile parse(const YAML::Node& root) const {
    ConfigFile cfg;
    cfg.path = file_;
    if (root.IsNull()) return cfg;
    if (!root.IsMap()) fail(root, "top level must be a mapping of keys to values");
    for (const auto& kv : root) {
      const std::string key = kv.first.Scalar();
      const YAML::Node& v = kv.second;
      cfg.marks[key] = mark_of(kv.first);
      if (key == "experiment") {
        cfg.experiment = string(v, key);
      } else if (key == "omega") {
        parse_omega(v, cfg);
      } else if (key == "sweep") {
        cfg.sweep = parse_sweep(v);
      } else if (key == "output") {
        if (!v.IsMap()) fail(v, "output: expected a mapping with key 'dir'");
        for (const auto& o : v) {
          if (o.first.Scalar() != "dir") fail(o.first, "output: unknown key '" + o.first.Scalar() + "'");
          cfg.output_dir = string(o.second, "output.dir");
        }
      } else if (auto it = scalar_keys().find(key); it != scalar_keys().end()) {
        switch (it->second) {
          case Kind::kReal:
            cfg.overrides[key] = real(v, key);
            break;
          case Kind::kInt:
            cfg.overrides[key] = integer(v, key);
            break;
          case Kind::kUnsigned:
            cfg.overrides[key] = unsigned_integer(v, key);
            break;
          case Kind::kString:
            cfg.overrides[key] = string(v, key);
            break;
        }
      } else {
        fail(kv.first, "unknown key '" + key + "'");
      }
    }
    return cfg;
  }

 private:
  void parse_omega(const YAML::Node& v, ConfigFile& cfg) const {
    if (!v.IsMap()) fail(v, "omega: expected a mapping (kind, diagonal, spread)");
    nlohmann::json o = nlohmann::json::object();
    for (const auto& kv : v) {
      const std::string k = kv.first.Scalar();
      cfg.marks["omega." + k] = mark_of(kv.first);
      if (k == "kind") {
        const std::string kind = string(kv.second, "omega.kind");
        if (kind != "zero" && kind != "diagonal" && kind != "random") {
          fail(kv.second, "omega.kind: expected zero, diagonal or random, got '" + kind + "'");
        }
        o["kind"] = kind;
      } else if (k == "diagonal") {
        o["diagonal"] = reals(kv.second, "omega.diagonal");
      } else if (k == "spread") {
        o["spread"] = real(kv.second, "omega.spread");
      } else {
        fail(kv.first, "omega: unknown key '" + k + "'");
      }
    }
    cfg.overrides["omega"] = o;
  }

  SweepAxis parse_sweep(const YAML::Node& v) const {
    if (!v.IsMap()) fail(v, "sweep: expected a mapping (parameter, values | linspace)");
    SweepAxis axis;
    axis.mark = mark_of(v);
    bool have_values = false;
    for (const auto& kv : v) {
      const std::string k = kv.first.Scalar();
      if (k == "parameter") {
        axis.parameter = string(kv.second, "sweep.parameter");
      } else if (k == "values") {
        if (have_values) fail(kv.first, "sweep: give either values or linspace, not both");
        axis.values = reals(kv.second, "sweep.values");
        axis.mark = mark_of(kv.second);
        have_values = true;
      } else if (k == "linspace") {
        if (have_values) fail(kv.first, "sweep: give either values or linspace, not both");
        const YAML::Node& l = kv.second;
        if (!l.IsSequence() || l.size() != 3) fail(l, "sweep.linspace: expected [start, stop, count]");
        const double a = real(l[0], "sweep.linspace");
        const double b = real(l[1], "sweep.linspace");
        const std::int64_t n = integer(l[2], "sweep.linspace");
        if (n < 0) fail(l[2], "sweep.linspace: count must be >= 0");
        for (std::int64_t i = 0; i < n; ++i) {
          axis.values.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
        axis.mark = mark_of(l);
        have_values = true;
      } else {
        fail(kv.first, "sweep: unknown key '" + k + "'");
      }
    }
    if (axis.parameter.empty()) fail(v, "sweep: missing 'parameter'");
    if (!have_values) fail(v, "sweep: missing 'values' or 'linspace'");
    return axis;
  }

  std::string file_;
};

OmegaSpec omega_from(const nlohmann::json& o, OmegaSpec base) {
  if (o.contains("kind")) base.kind = o["kind"].get<std::string>();
  if (o.contains("diagonal")) base.diagonal = o["diagonal"].get<std::vector<double>>();
  if (o.contains("spread")) base.spread = o["spread"].get<double>();
  if (base.kind == "diagonal" && base.diagonal.empty() && !o.contains("diagonal")) base.diagonal = {1.0, -1.0};
  return base;
}

[[noreturn]] void reject_key(const ConfigFile& file, const std::string& key, const std::string& why) {
  const auto it = file.marks.find(key);
  const Mark m = it == file.marks.end() ? Mark{} : it->second;
  throw ConfigFileError(file.path, m.line, m.column, "key '" + key + "' " + why);
}

}  // namespace

ConfigFileError::ConfigFileError(const std::string& file, int line, int column, const std::string& msg)
    : std::runtime_error(where(file, line, column) + ": " + msg), line_(line), column_(column) {}

std::string ConfigFile::locate(const std::string& msg) const {
  int best_line = 0;
  int best_col = 0;
  std::size_t best_pos = std::string::npos;
  for (const auto& [key, mark] : marks) {
    if (key == "experiment") continue;
    const std::regex word("(^|[^A-Za-z0-9_.])" + std::regex_replace(key, std::regex(R"([.])"), R"(\.)") +
                          "([^A-Za-z0-9_]|$)");
    std::smatch m;
    if (std::regex_search(msg, m, word)) {
      const auto pos = static_cast<std::size_t>(m.position(0));
      if (pos < best_pos) {
        best_pos = pos;
        best_line = mark.line;
        best_col = mark.column;
      }
    }
  }
  return where(path, best_line, best_col) + ": ";
}

ConfigFile parse_config(const std::string& text, const std::string& name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigFileError(name, e.mark.line + 1, e.mark.column + 1, e.msg);
  }
  return Parser(name).parse(root);
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigFileError(path, 0, 0, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void set_parameter(ExperimentConfig& cfg, const std::string& name, double value) {
  auto as_int = [&](const char* what) {
    if (value != std::floor(value) || std::abs(value) > 9.0e15) {
      throw ConfigError(std::string(what) + " must be an integer");
    }
    return static_cast<std::int64_t>(value);
  };
  if (name == "N") cfg.N = as_int("N");
  else if (name == "d") cfg.d = as_int("d");
  else if (name == "kappa0") cfg.kappa0 = value;
  else if (name == "kappa1") cfg.kappa1 = value;
  else if (name == "delta") cfg.delta = value;
  else if (name == "dt") cfg.dt = value;
  else if (name == "t_end") cfg.t_end = value;
  else if (name == "seed") {
    const auto s = as_int("seed");
    if (s < 0) throw ConfigError("seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (name == "samples") cfg.samples = static_cast<int>(as_int("samples"));
  else if (name == "runs") cfg.runs = static_cast<int>(as_int("runs"));
  else if (name == "levels") cfg.levels = static_cast<int>(as_int("levels"));
  else if (name == "horizon") cfg.horizon = value;
  else if (name == "perturbation") cfg.perturbation = value;
  else if (name == "hetero_spread") cfg.hetero_spread = value;
  else if (name == "workers") cfg.workers = static_cast<int>(as_int("workers"));
  else throw ConfigError("unknown parameter '" + name + "'");
}

ExperimentConfig resolve_experiment(const ConfigFile& file, const std::string& id) {
  ExperimentConfig cfg = ExperimentConfig::defaults_for(id);
  for (const auto& [key, value] : file.overrides.items()) {
    if (simulate_only().count(key)) reject_key(file, key, "only applies to the simulate command");
    if (key == "omega") {
      cfg.omega = omega_from(value, cfg.omega);
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else {
      set_parameter(cfg, key, value.get<double>());
    }
  }
  return cfg;
}

SimulateSettings resolve_simulate(const ConfigFile& file) {
  SimulateSettings s;
  for (const auto& [key, value] : file.overrides.items()) {
    if (experiment_only().count(key)) reject_key(file, key, "only applies to experiments");
    if (key == "N") s.N = value.get<Index>();
    else if (key == "d") s.d = value.get<Index>();
    else if (key == "kappa0") s.kappa0 = value.get<double>();
    else if (key == "kappa1") s.kappa1 = value.get<double>();
    else if (key == "delta") s.delta = value.get<double>();
    else if (key == "dt") s.dt = value.get<double>();
    else if (key == "t_end") s.t_end = value.get<double>();
    else if (key == "seed") s.seed = value.get<std::uint64_t>();
    else if (key == "samples") s.samples = value.get<int>();
    else if (key == "initial") s.initial = value.get<std::string>();
    else if (key == "field") s.field = value.get<std::string>();
    else if (key == "frequency_spread") s.frequency_spread = value.get<double>();
    else if (key == "omega") s.omega = omega_from(value, s.omega);
    else if (key == "workers") {
      // accepted for symmetry with experiments; a single simulation runs sequentially
    }
  }
  return s;
}

void SimulateSettings::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(N >= 1, "N must be >= 1");
  require(d >= 1, "d must be >= 1");
  require(dt > 0.0, "dt must be > 0");
  require(t_end > 0.0, "t_end must be > 0");
  require(samples >= 1, "samples must be >= 1");
  require(frequency_spread >= 0.0, "frequency_spread must be >= 0");
  require(initial == "random" || initial == "admissible", "initial must be random or admissible");
  require(field == "lhs" || field == "ls", "field must be lhs or ls");
  if (initial == "admissible" && !admissible_parameters(kappa0, kappa1, delta)) {
    throw ConfigError("initial = admissible needs kappa0 > 0, |kappa1| < kappa0/2 and 0 < delta < 1 - 2|kappa1|/kappa0");
  }
  if (field == "ls") {
    require(initial == "random", "field = ls needs initial = random (real states are drawn)");
    require(omega.kind == "zero" && frequency_spread == 0.0, "field = ls needs omega.kind = zero");
  }
  (void)omega.build(d, seed);
}

nlohmann::json SimulateSettings::to_json() const {
  return {{"N", N},
          {"d", d},
          {"kappa0", kappa0},
          {"kappa1", kappa1},
          {"delta", delta},
          {"dt", dt},
          {"t_end", t_end},
          {"seed", seed},
          {"initial", initial},
          {"field", field},
          {"omega", {{"kind", omega.kind}, {"diagonal", omega.diagonal}, {"spread", omega.spread}}},
          {"frequency_spread", frequency_spread},
          {"samples", samples}};
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

}  // namespace lhs::cli

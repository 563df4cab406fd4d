#include "lhs_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "lhs/errors.hpp"
#include "lhs/experiments.hpp"
#include "lhs/integrators.hpp"
#include "lhs/sampling.hpp"
#include "lhs_cli/config.hpp"

namespace lhs::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

// Thrown for anything that should end the process with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ConfigFile load_or_empty(const Options& o) {
  if (o.config.empty()) {
    ConfigFile f;
    f.path = "<defaults>";
    return f;
  }
  return load_config(o.config);
}

std::string output_dir(const Options& o, const ConfigFile& f) {
  if (!o.out.empty()) return o.out;
  if (f.output_dir) return *f.output_dir;
  throw UsageError("no output directory: pass --out DIR or set output.dir in the config");
}

std::string experiment_id(const Options& o, const ConfigFile& f) {
  std::string id = !o.experiment.empty() ? o.experiment : f.experiment.value_or("");
  if (id.empty()) throw UsageError("no experiment id: pass --experiment ID or set 'experiment' in the config");
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    throw UsageError("unknown experiment id '" + id + "' (expected one of e1..e7)");
  }
  return id;
}

void apply_flags(ExperimentConfig& cfg, const Options& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
}

std::string hash_of(const nlohmann::json& resolved) { return sha256_hex(resolved.dump()); }

void print_report(const ExperimentReport& r, std::ostream& out) {
  for (const auto& v : r.verdicts) {
    out << (v.passed ? "PASS " : "FAIL ") << r.id << ' ' << v.name << " value=" << std::setprecision(6) << v.value
        << " threshold=" << v.threshold << " tol=" << v.tolerance << '\n';
  }
  out << r.id << (r.passed() ? " passed" : " FAILED") << '\n';
}

double metric_or_nan(const nlohmann::json& m, const char* key) {
  if (m.contains(key) && m[key].is_number()) return m[key].get<double>();
  return std::numeric_limits<double>::quiet_NaN();
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const ConfigFile file = load_or_empty(o);
  if (o.config.empty()) throw UsageError("simulate needs --config PATH");
  SimulateSettings s = resolve_simulate(file);
  if (o.seed) s.seed = *o.seed;
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw UsageError(file.locate(e.what()) + e.what());
  }
  const std::string dir = output_dir(o, file);

  Rng rng = make_rng(s.seed, 1);
  CMatrix z;
  if (s.initial == "admissible") {
    z = sample_admissible_states(s.N, s.d, s.kappa0, s.kappa1, s.delta, s.seed);
  } else if (s.field == "ls") {
    std::normal_distribution<double> g(0.0, 1.0);
    z = CMatrix::Zero(s.d, s.N);
    for (Index j = 0; j < s.N; ++j) {
      for (Index a = 0; a < s.d; ++a) z(a, j) = g(rng);
      z.col(j) /= z.col(j).norm();
    }
  } else {
    z = random_states(s.N, s.d, rng);
  }
  std::vector<SkewHermitian> freqs;
  if (s.frequency_spread > 0.0) {
    Rng fr = make_rng(s.seed, 2);
    for (Index j = 0; j < s.N; ++j) freqs.push_back(random_skew(s.d, s.frequency_spread, fr));
  } else {
    freqs.assign(static_cast<std::size_t>(s.N), s.omega.build(s.d, s.seed));
  }
  const Ensemble ens(std::move(z), std::move(freqs), {s.kappa0, s.kappa1});
  IntegratorConfig ic;
  ic.dt = s.dt;
  ic.t_end = s.t_end;
  ic.record_states = false;
  ic.record_every = static_cast<int>(std::max<std::int64_t>(1, ic.step_count() / s.samples));
  ic.field = s.field == "ls" ? VectorField::kLs : VectorField::kLhs;
  auto res = integrate(ens, ic);

  fs::create_directories(dir);
  RunManifest m{"simulate", o.config, hash_of(s.to_json()), dir, {}};
  {
    std::ofstream os(fs::path(dir) / "observables.csv", std::ios::binary);
    res.series.write_csv(os);
    if (!os) throw std::runtime_error("cannot write observables.csv");
  }
  m.artifacts = {"observables.csv", "manifest.json"};
  m.write();
  out << "simulate: " << res.series.size() << " records written to " << (fs::path(dir) / "observables.csv").string()
      << '\n';
  return kExitPass;
}

ExperimentConfig validated_experiment(const ConfigFile& file, const std::string& id, const Options& o) {
  ExperimentConfig cfg;
  try {
    cfg = resolve_experiment(file, id);
    apply_flags(cfg, o);
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(file.locate(e.what()) + e.what());
  }
  return cfg;
}

int cmd_experiment(const Options& o, std::ostream& out) {
  const ConfigFile file = load_or_empty(o);
  const std::string id = experiment_id(o, file);
  const ExperimentConfig cfg = validated_experiment(file, id, o);
  const std::string dir = output_dir(o, file);

  const ExperimentReport report = run_experiment(cfg);
  fs::create_directories(dir);
  RunManifest m{"experiment", o.config, hash_of(cfg.to_json()), dir, report.write(dir)};
  m.artifacts.push_back("manifest.json");
  m.write();
  print_report(report, out);
  return report.passed() ? kExitPass : kExitAssertion;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  if (o.config.empty()) throw UsageError("sweep needs --config PATH with a 'sweep' axis");
  const ConfigFile file = load_config(o.config);
  const std::string id = experiment_id(o, file);
  if (!file.sweep) throw UsageError(file.path + ": sweep needs a 'sweep' mapping (parameter, values | linspace)");
  const SweepAxis& axis = *file.sweep;
  const std::string at = file.path + ":" + std::to_string(axis.mark.line) + ":" + std::to_string(axis.mark.column) + ": ";
  if (axis.values.empty()) throw UsageError(at + "sweep axis is empty");

  ExperimentConfig base;
  try {
    base = resolve_experiment(file, id);
  } catch (const ConfigError& e) {
    throw UsageError(file.locate(e.what()) + e.what());
  }
  apply_flags(base, o);

  // Validate every point before anything is written.
  struct Point {
    ExperimentConfig cfg;
    bool admissible = true;
    std::string reason;
  };
  std::vector<Point> points;
  for (double v : axis.values) {
    Point p{base, true, {}};
    try {
      set_parameter(p.cfg, axis.parameter, v);
      p.cfg.validate();
    } catch (const InadmissibleError& e) {
      p.admissible = false;
      p.reason = e.what();
    } catch (const ConfigError& e) {
      std::ostringstream msg;
      msg << at << "sweep point " << axis.parameter << " = " << v << ": " << e.what();
      throw UsageError(msg.str());
    }
    points.push_back(std::move(p));
  }
  const std::string dir = output_dir(o, file);
  fs::create_directories(dir);

  std::vector<std::string> artifacts;
  std::vector<double> idx, val, adm, pass, rate, failed;
  nlohmann::json rows = nlohmann::json::array();
  bool all_pass = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::ostringstream name;
    name << "point_" << std::setw(3) << std::setfill('0') << i;
    const Point& p = points[i];
    nlohmann::json row{{"index", i}, {"value", axis.values[i]}, {"admissible", p.admissible}};
    idx.push_back(static_cast<double>(i));
    val.push_back(axis.values[i]);
    adm.push_back(p.admissible ? 1.0 : 0.0);
    if (!p.admissible) {
      pass.push_back(std::numeric_limits<double>::quiet_NaN());
      rate.push_back(std::numeric_limits<double>::quiet_NaN());
      failed.push_back(std::numeric_limits<double>::quiet_NaN());
      row["status"] = "inadmissible";
      row["reason"] = p.reason;
      out << name.str() << ' ' << axis.parameter << '=' << axis.values[i] << " inadmissible\n";
    } else {
      const ExperimentReport report = run_experiment(p.cfg);
      const std::string sub = (fs::path(dir) / name.str()).string();
      for (const auto& f : report.write(sub)) artifacts.push_back(name.str() + "/" + f);
      const auto n_failed = std::count_if(report.verdicts.begin(), report.verdicts.end(),
                                          [](const Verdict& v) { return !v.passed; });
      pass.push_back(report.passed() ? 1.0 : 0.0);
      rate.push_back(metric_or_nan(report.metrics, "fitted_decay_rate"));
      failed.push_back(static_cast<double>(n_failed));
      all_pass = all_pass && report.passed();
      row["status"] = report.passed() ? "passed" : "failed";
      row["fitted_decay_rate"] = report.metrics.value("fitted_decay_rate", nlohmann::json());
      out << name.str() << ' ' << axis.parameter << '=' << axis.values[i] << (report.passed() ? " passed" : " FAILED")
          << '\n';
    }
    rows.push_back(std::move(row));
  }

  {
    std::ofstream os(fs::path(dir) / "sweep.csv", std::ios::binary);
    write_csv(os, {"point", axis.parameter, "admissible", "passed", "fitted_decay_rate", "failed_verdicts"},
              {idx, val, adm, pass, rate, failed});
    artifacts.push_back("sweep.csv");
  }
  {
    std::vector<double> finite;
    for (double r : rate) {
      if (std::isfinite(r)) finite.push_back(r);
    }
    nlohmann::json summary{{"experiment", id}, {"parameter", axis.parameter}, {"points", rows}};
    if (!finite.empty()) {
      double mean = 0.0;
      for (double r : finite) mean += r;
      mean /= static_cast<double>(finite.size());
      double var = 0.0;
      for (double r : finite) var += (r - mean) * (r - mean);
      const double sd = finite.size() > 1 ? std::sqrt(var / static_cast<double>(finite.size() - 1)) : 0.0;
      summary["fitted_decay_rate"] = {{"count", finite.size()}, {"mean", mean}, {"std", sd}};
    }
    std::ofstream os(fs::path(dir) / "sweep_summary.json", std::ios::binary);
    os << summary.dump(2) << '\n';
    artifacts.push_back("sweep_summary.json");
  }
  nlohmann::json resolved = base.to_json();
  resolved["sweep"] = {{"parameter", axis.parameter}, {"values", axis.values}};
  RunManifest m{"sweep", o.config, hash_of(resolved), dir, std::move(artifacts)};
  m.artifacts.push_back("manifest.json");
  m.write();
  return all_pass ? kExitPass : kExitAssertion;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "YAML config file");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "override the config seed");
  sub->add_option("--workers", o.workers, "maximum worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},
          {"config_path", config_path},
          {"config_hash", config_hash},
          {"output_dir", output_dir},
          {"artifacts", artifacts}};
}

void RunManifest::write() const {
  std::ofstream os(fs::path(output_dir) / "manifest.json", std::ios::binary);
  os << to_json().dump(2) << '\n';
  if (!os) throw std::runtime_error("cannot write manifest.json");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lohe Hermitian sphere simulations and experiments", "lhs"};
  app.require_subcommand(1);
  Options o;
  auto* simulate = app.add_subcommand("simulate", "integrate one ensemble and write its observables");
  auto* experiment = app.add_subcommand("experiment", "run one of the experiments e1..e7");
  auto* sweep = app.add_subcommand("sweep", "run an experiment over a parameter axis");
  add_common(simulate, o);
  add_common(experiment, o);
  add_common(sweep, o);
  experiment->add_option("--experiment", o.experiment, "experiment id (e1..e7)");
  sweep->add_option("--experiment", o.experiment, "experiment id (e1..e7)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "lhs: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(o, out);
    if (*experiment) return cmd_experiment(o, out);
    return cmd_sweep(o, out);
  } catch (const UsageError& e) {
    err << "lhs: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigFileError& e) {
    err << "lhs: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IntegrationError& e) {
    err << "lhs: integration failed: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const std::exception& e) {
    err << "lhs: " << e.what() << '\n';
    return kExitAssertion;
  }
}

}  // namespace lhs::cli

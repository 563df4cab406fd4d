#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "lhs/errors.hpp"
#include "lhs/experiments.hpp"
#include "lhs/integrators.hpp"
#include "lhs/observables.hpp"
#include "lhs/sampling.hpp"
#include "lhs/transport.hpp"
#include "oracles.hpp"

using namespace lhs;
namespace fs = std::filesystem;

namespace {

const Verdict* find(const ExperimentReport& r, const std::string& name) {
  for (const auto& v : r.verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

void check_all_pass(const ExperimentReport& r) {
  for (const auto& v : r.verdicts) {
    INFO(r.id << " " << v.name << " value=" << v.value << " threshold=" << v.threshold << " " << v.detail);
    CHECK(v.passed);
  }
  CHECK(r.passed());
  REQUIRE(find(r, "pair_inequality") != nullptr);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lhs_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("admissibility check") {
  CHECK(AdmissibilityCheck::evaluate(1.0, 0.2, 0.05, 0.5).verdict);
  CHECK(AdmissibilityCheck::evaluate(1.0, 0.2, 0.05, 0.5).bound() == doctest::Approx(0.55));
  CHECK_FALSE(AdmissibilityCheck::evaluate(1.0, 0.2, 0.05, 0.55).verdict);
  CHECK_FALSE(AdmissibilityCheck::evaluate(1.0, 0.5, 0.0, 0.0).verdict);
  CHECK_FALSE(AdmissibilityCheck::evaluate(1.0, 0.0, 0.0, 0.0).verdict);
  CHECK(admissible_parameters(1.0, -0.4, 0.1));
  CHECK_FALSE(admissible_parameters(1.0, 0.45, 0.1));
  CHECK_FALSE(admissible_parameters(-1.0, 0.0, 0.1));
}

TEST_CASE("admissible sampler") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double k1 = -0.4 + 0.008 * static_cast<double>(seed);
    const auto ens = sample_admissible(32, 4, {1.0, k1}, 0.05, seed);
    const double F0 = functional_F(ens.states());
    CHECK(AdmissibilityCheck::evaluate(1.0, k1, 0.05, F0).verdict);
  }
  const auto tight = sample_admissible(64, 3, {1.0, 0.0}, 0.9, 5);
  CHECK(functional_F(tight.states()) < 0.1);
  CHECK(functional_F(sample_admissible(1, 3, {1.0, 0.2}, 0.1, 5).states()) <= 1e-15);
  CHECK_THROWS_AS(sample_admissible(4, 2, {1.0, 0.0}, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(sample_admissible(4, 2, {1.0, 0.6}, 0.1, 5), std::invalid_argument);
  CHECK(sample_admissible(8, 2, {1.0, 0.1}, 0.1, 9).states() == sample_admissible(8, 2, {1.0, 0.1}, 0.1, 9).states());
  CHECK(sample_admissible(8, 2, {1.0, 0.1}, 0.1, 9).states() != sample_admissible(8, 2, {1.0, 0.1}, 0.1, 10).states());

  Rng a = make_rng(3, 1);
  Rng b = make_rng(3, 2);
  CHECK(a() != b());
}

TEST_CASE("samplers") {
  Rng rng = make_rng(71);
  for (int t = 0; t < 50; ++t) {
    const CVector z = random_unit(3, rng);
    CHECK(std::abs(z.norm() - 1.0) < 1e-14);
    const CVector v = random_tangent(z, rng);
    CHECK(std::abs(v.norm() - 1.0) < 1e-14);
    CHECK(std::abs(oracle::rdot(z, v)) < 1e-14);
    const CMatrix cap = sample_cap(10, z, 0.3, rng);
    for (Index j = 0; j < 10; ++j) CHECK(oracle::rdot(z, cap.col(j)) >= std::cos(0.3) - 1e-14);
    const CMatrix moved = jitter(cap, 1e-3, rng);
    for (Index j = 0; j < 10; ++j) {
      CHECK(std::abs(moved.col(j).norm() - 1.0) < 1e-14);
      CHECK(std::abs((moved.col(j) - cap.col(j)).norm() - 2.0 * std::sin(5e-4)) < 1e-12);
    }
  }
}

TEST_CASE("stability constant and fitted rate") {
  CHECK(stability_constant(1.0, 0.0, 1.0) == doctest::Approx(54.598).epsilon(1e-5));
  CHECK(stability_constant(1.0, -0.2, 2.0) == doctest::Approx(std::exp(4.0 * 1.6)));
  std::vector<double> t;
  std::vector<double> y;
  for (int k = 0; k < 50; ++k) {
    t.push_back(0.1 * k);
    y.push_back(3.0 * std::exp(-0.7 * 0.1 * k));
  }
  CHECK(fitted_decay_rate(t, y) == doctest::Approx(0.7).epsilon(1e-12));
  y.push_back(0.0);
  t.push_back(5.0);
  CHECK(fitted_decay_rate(t, y) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("parallel_for visits every index once") {
  for (int workers : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(ExperimentConfig::defaults_for("e9"), ConfigError);
  auto cfg = ExperimentConfig::defaults_for("e1");
  CHECK(cfg.N == 64);
  CHECK(cfg.kappa1 == -0.2);
  CHECK_NOTHROW(cfg.validate());
  cfg.delta = 0.7;
  CHECK_THROWS_AS(cfg.validate(), InadmissibleError);
  CHECK_THROWS_AS(run_experiment(cfg), InadmissibleError);
  cfg = ExperimentConfig::defaults_for("e1");
  cfg.kappa1 = 0.5;
  CHECK_THROWS_AS(cfg.validate(), InadmissibleError);
  cfg = ExperimentConfig::defaults_for("e1");
  cfg.dt = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  auto e3 = ExperimentConfig::defaults_for("e3");
  e3.N = 100;
  CHECK_THROWS_AS(e3.validate(), ConfigError);
  auto e5 = ExperimentConfig::defaults_for("e5");
  e5.kappa1 = -0.6;
  CHECK_THROWS_AS(e5.validate(), ConfigError);
  OmegaSpec om;
  om.kind = "spiral";
  CHECK_THROWS_AS(om.build(2, 1), ConfigError);
  om.kind = "diagonal";
  om.diagonal = {1.0, -1.0, 2.0};
  CHECK_THROWS_AS(om.build(2, 1), ConfigError);
  om.diagonal = {1.0, -1.0};
  const SkewHermitian d = om.build(4, 1);
  CHECK(d.mat()(0, 0) == kImag);
  CHECK(d.mat()(1, 1) == -kImag);
  CHECK(d.mat()(2, 2) == Complex(0.0));
}

TEST_CASE("identical and duplicated initial data are trivial") {
  Rng rng = make_rng(72);
  const CVector z = random_unit(4, rng);
  CMatrix same(4, 8);
  for (Index j = 0; j < 8; ++j) same.col(j) = z;
  IntegratorConfig ic;
  ic.dt = 1e-2;
  ic.t_end = 5.0;
  const auto res = integrate(Ensemble::homogeneous(same, SkewHermitian::zero(4), {1.0, 0.2}), ic);
  for (std::size_t k = 0; k < res.series.size(); ++k) {
    CHECK(res.series.F[k] < 1e-15);
    CHECK(std::abs(res.series.R2[k] - 1.0) < 1e-14);
    CHECK(res.series.defect[k] < 1e-15);
  }

  const auto base = sample_admissible(6, 2, {1.0, 0.0}, 0.05, 3);
  CMatrix dup(2, 12);
  dup << base.states(), base.states();
  ic.record_every = 50;
  const auto a = integrate(base, ic);
  const auto b = integrate(Ensemble::homogeneous(dup, SkewHermitian::zero(2), base.params()), ic);
  for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
    const double w2 = wasserstein_general(EmpiricalMeasure::uniform(a.trajectory.states[k]),
                                          EmpiricalMeasure::uniform(b.trajectory.states[k]), 2.0)
                          .distance;
    CHECK(w2 <= 1e-7);
  }

  auto e7 = ExperimentConfig::defaults_for("e7");
  e7.omega = OmegaSpec{};
  e7.t_end = 0.5;
  const auto r7 = run_experiment(e7);
  const auto* split = find(r7, "splitting_error");
  REQUIRE(split != nullptr);
  CHECK(split->value == 0.0);
}

TEST_CASE("small experiment runs pass") {
  auto e1 = ExperimentConfig::defaults_for("e1");
  e1.N = 8;
  e1.t_end = 5.0;
  check_all_pass(run_experiment(e1));

  auto pair = ExperimentConfig::defaults_for("e1");
  pair.N = 2;
  pair.kappa1 = 0.0;
  pair.t_end = 10.0;
  const auto rp = run_experiment(pair);
  check_all_pass(rp);
  CHECK(rp.metrics["fitted_decay_rate"].get<double>() >= 0.1 * pair.kappa0 * pair.delta);

  auto e2 = ExperimentConfig::defaults_for("e2");
  e2.runs = 2;
  e2.N = 8;
  e2.t_end = 30.0;
  const auto r2 = run_experiment(e2);
  check_all_pass(r2);
  CHECK(find(r2, "lp_stability_p4_T2") != nullptr);

  auto e3 = ExperimentConfig::defaults_for("e3");
  e3.N = 4;
  e3.levels = 3;
  e3.t_end = 10.0;
  const auto r3 = run_experiment(e3);
  CHECK(r3.metrics["sup_w2"].size() == 2);

  auto e4 = ExperimentConfig::defaults_for("e4");
  e4.N = 8;
  e4.t_end = 20.0;
  check_all_pass(run_experiment(e4));

  auto e5 = ExperimentConfig::defaults_for("e5");
  e5.runs = 2;
  e5.N = 8;
  e5.dt = 5e-3;
  check_all_pass(run_experiment(e5));

  check_all_pass(run_experiment(ExperimentConfig::defaults_for("e6")));

  auto e7 = ExperimentConfig::defaults_for("e7");
  e7.t_end = 2.0;
  check_all_pass(run_experiment(e7));
}

TEST_CASE("reports are deterministic and list their files") {
  auto cfg = ExperimentConfig::defaults_for("e1");
  cfg.N = 6;
  cfg.t_end = 2.0;
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  const fs::path da = scratch_dir("det_a");
  const fs::path db = scratch_dir("det_b");
  const auto fa = a.write(da.string());
  const auto fb = b.write(db.string());
  REQUIRE(fa == fb);
  std::size_t on_disk = 0;
  for (const auto& entry : fs::directory_iterator(da)) {
    (void)entry;
    ++on_disk;
  }
  CHECK(on_disk == fa.size());
  for (const auto& f : fa) {
    CHECK(fs::exists(da / f));
    if (f.size() > 4 && f.substr(f.size() - 4) == ".csv") CHECK(slurp(da / f) == slurp(db / f));
  }
  auto ja = nlohmann::json::parse(slurp(da / "e1_report.json"));
  auto jb = nlohmann::json::parse(slurp(db / "e1_report.json"));
  ja.erase("wall_clock_seconds");
  jb.erase("wall_clock_seconds");
  CHECK(ja == jb);
  CHECK(ja["verdicts"].size() == a.verdicts.size());
  for (const auto& v : ja["verdicts"]) CHECK(v.contains("tolerance"));
  fs::remove_all(da);
  fs::remove_all(db);

  cfg.seed = 2;
  CHECK(run_experiment(cfg).series.at("observables").F != a.series.at("observables").F);
}

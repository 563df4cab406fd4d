#include <doctest.h>

#include <cmath>

#include "lhs/errors.hpp"
#include "lhs/integrators.hpp"
#include "lhs/sampling.hpp"
#include "oracles.hpp"

using namespace lhs;

namespace {

SkewHermitian diag_omega(Index d) {
  CMatrix a = CMatrix::Zero(d, d);
  a(0, 0) = kImag;
  a(1, 1) = -kImag;
  return SkewHermitian(a);
}

double max_norm_defect(const CMatrix& z) {
  double worst = 0.0;
  for (Index j = 0; j < z.cols(); ++j) worst = std::max(worst, std::abs(z.col(j).norm() - 1.0));
  return worst;
}

CMatrix run_steps(const Ensemble& ens, double dt, int steps) {
  Ensemble e = ens;
  for (int s = 0; s < steps; ++s) e = step_rk4(e, dt);
  return e.states();
}

}  // namespace

TEST_CASE("equilibrium is a fixed point of the step") {
  Rng rng = make_rng(41);
  const CVector z = random_unit(3, rng);
  CMatrix same(3, 6);
  for (Index j = 0; j < 6; ++j) same.col(j) = z;
  const auto ens = Ensemble::homogeneous(same, SkewHermitian::zero(3), {1.0, 0.3});
  CHECK(step_rk4(ens, 0.1).states() == ens.states());
}

TEST_CASE("single particle follows the linear flow") {
  Rng rng = make_rng(42);
  const SkewHermitian om = diag_omega(2);
  CMatrix z(2, 1);
  z.col(0) = random_unit(2, rng);
  const auto ens = Ensemble::homogeneous(z, om, {1.0, 0.5});
  double prev = 0.0;
  for (double dt : {0.2, 0.1, 0.05}) {
    const double err = (step_rk4(ens, dt).states() - matrix_exp(om, dt) * z).norm();
    CHECK(err <= std::pow(dt, 5));
    if (prev > 0.0) CHECK(prev / err >= 16.0);
    prev = err;
  }
}

TEST_CASE("one-step error falls by at least 16x when dt halves") {
  Rng rng = make_rng(43);
  const auto ens = Ensemble(random_states(8, 3, rng),
                            {random_skew(3, 0.5, rng), random_skew(3, 0.5, rng), random_skew(3, 0.5, rng),
                             random_skew(3, 0.5, rng), random_skew(3, 0.5, rng), random_skew(3, 0.5, rng),
                             random_skew(3, 0.5, rng), random_skew(3, 0.5, rng)},
                            {1.0, 0.3});
  auto one_step_error = [&](double dt) {
    return (step_rk4(ens, dt).states() - run_steps(ens, dt / 16.0, 16)).norm();
  };
  const double e1 = one_step_error(0.2);
  const double e2 = one_step_error(0.1);
  CHECK(e1 / e2 >= 16.0);
}

TEST_CASE("global error is fourth order") {
  Rng rng = make_rng(44);
  const auto ens = Ensemble::homogeneous(random_states(6, 2, rng), random_skew(2, 0.8, rng), {1.0, -0.2});
  const double T = 1.0;
  const CMatrix ref = run_steps(ens, T / 512.0, 512);
  const double e1 = (run_steps(ens, T / 16.0, 16) - ref).norm();
  const double e2 = (run_steps(ens, T / 32.0, 32) - ref).norm();
  const double ratio = e1 / e2;
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
}

TEST_CASE("forward then backward step returns to the start") {
  Rng rng = make_rng(45);
  for (int t = 0; t < 10; ++t) {
    const auto ens = Ensemble::homogeneous(random_states(10, 3, rng), random_skew(3, 1.0, rng), {1.0, 0.2});
    const auto fwd = step_rk4(ens, 1e-2);
    const auto back = step_rk4(fwd, 1e-2, TimeDirection::kBackward);
    CHECK(oracle::max_abs(back.states() - ens.states()) <= 1e-8);
  }
}

TEST_CASE("integrate bookkeeping") {
  Rng rng = make_rng(46);
  const auto ens = Ensemble::homogeneous(random_states(5, 3, rng), random_skew(3, 1.0, rng), {1.0, 0.1});

  IntegratorConfig zero;
  zero.t_end = 0.0;
  const auto r0 = integrate(ens, zero);
  REQUIRE(r0.trajectory.size() == 1);
  CHECK(r0.trajectory.times[0] == 0.0);
  CHECK(r0.trajectory.states[0] == ens.states());
  CHECK(r0.series.size() == 1);

  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 1.005;
  cfg.record_every = 10;
  int calls = 0;
  std::vector<double> seen;
  const std::vector<Observer> obs{[&](std::int64_t, double t, const Ensemble&) {
    ++calls;
    seen.push_back(t);
  }};
  const auto r = integrate(ens, cfg, obs);
  CHECK(cfg.step_count() == 101);
  CHECK(calls == 12);
  CHECK(seen.back() == 1.005);
  REQUIRE(r.trajectory.size() == 12);
  for (std::size_t s = 1; s < r.trajectory.size(); ++s) CHECK(r.trajectory.times[s] > r.trajectory.times[s - 1]);
  for (const auto& z : r.trajectory.states) CHECK(max_norm_defect(z) <= 1e-9);
  CHECK(r.series.size() == 12);
  CHECK(r.final_state.states() == r.trajectory.states.back());

  IntegratorConfig bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.dt = 1e-3;
  bad.t_end = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.t_end = 1.0;
  bad.renormalize_every = 0;
  CHECK_THROWS_AS(integrate(ens, bad), std::invalid_argument);
  CHECK_THROWS_AS(step_rk4(ens, -1e-3), std::invalid_argument);
}

TEST_CASE("drift beyond tolerance aborts the run") {
  Rng rng = make_rng(47);
  const auto ens = Ensemble::homogeneous(random_states(8, 3, rng), random_skew(3, 1.0, rng), {5.0, 1.0});
  IntegratorConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 1.0;
  cfg.renormalize_every = 1000;
  cfg.unit_drift_tol = 1e-15;
  CHECK_THROWS_AS(integrate(ens, cfg), IntegrationError);

  cfg.dt = 1e-2;
  cfg.renormalize_every = 10;
  cfg.unit_drift_tol = 1e-6;
  const auto r = integrate(ens, cfg);
  CHECK(r.series.size() == 101);
  CHECK(max_norm_defect(r.final_state.states()) <= 1e-12);
  double worst = 0.0;
  for (const auto& z : r.trajectory.states) worst = std::max(worst, max_norm_defect(z));
  CHECK(worst > 0.0);
  CHECK(worst <= 1e-6);
}

TEST_CASE("split_transform") {
  Rng rng = make_rng(48);
  const CMatrix z0 = random_states(6, 4, rng);

  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  cfg.record_every = 50;
  const auto plain = integrate(Ensemble::homogeneous(z0, SkewHermitian::zero(4), {1.0, 0.2}), cfg);
  const auto same = split_transform(plain.trajectory, SkewHermitian::zero(4));
  for (std::size_t s = 0; s < same.size(); ++s) CHECK(same.states[s] == plain.trajectory.states[s]);

  const SkewHermitian om = random_skew(4, 1.0, rng);
  cfg.t_end = 3.0;
  const auto free = integrate(Ensemble::homogeneous(z0, om, {0.0, 0.0}), cfg);
  for (const auto& w : split_transform(free.trajectory, om).states) CHECK(oracle::max_abs(w - z0) <= 1e-9);

  // w = exp(-Omega t) z must solve the Omega = 0 system: Richardson-extrapolated
  // centered differences against the coupling field.
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.record_every = 1;
  cfg.free_flow = FreeFlow::kInStage;
  const CouplingParams params{1.0, 0.3};
  const auto run = integrate(Ensemble::homogeneous(z0, om, params), cfg);
  const auto w = split_transform(run.trajectory, om);
  std::vector<SkewHermitian> none{SkewHermitian::zero(4)};
  const double h = cfg.dt;
  double worst = 0.0;
  for (std::size_t s : {std::size_t{100}, std::size_t{400}, std::size_t{800}}) {
    const CMatrix d1 = (w.states[s + 1] - w.states[s - 1]) / (2.0 * h);
    const CMatrix d2 = (w.states[s + 2] - w.states[s - 2]) / (4.0 * h);
    const CMatrix deriv = (4.0 * d1 - d2) / 3.0;
    CMatrix coupling;
    lhs_rhs_into(w.states[s], none, params, coupling);
    worst = std::max(worst, oracle::max_abs(deriv - coupling));
    CHECK(max_norm_defect(w.states[s]) <= 1e-9);
  }
  CHECK(worst <= 1e-6);

  const auto hetero = integrate(Ensemble(random_states(2, 4, rng), {om, random_skew(4, 1.0, rng)}, params), cfg);
  CHECK_THROWS_AS(split_transform(hetero.trajectory, om), std::invalid_argument);
}

TEST_CASE("splitting property over a short horizon") {
  Rng rng = make_rng(49);
  const CMatrix z0 = random_states(8, 4, rng);
  const SkewHermitian om = diag_omega(4);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  cfg.record_every = 100;
  cfg.free_flow = FreeFlow::kInStage;
  const auto with = integrate(Ensemble::homogeneous(z0, om, {1.0, 0.2}), cfg);
  const auto without = integrate(Ensemble::homogeneous(z0, SkewHermitian::zero(4), {1.0, 0.2}), cfg);
  REQUIRE(with.trajectory.size() == without.trajectory.size());
  double worst = 0.0;
  for (std::size_t s = 0; s < with.trajectory.size(); ++s) {
    const CMatrix pred = oracle::expm_eig(om.mat(), with.trajectory.times[s]) * without.trajectory.states[s];
    for (Index j = 0; j < 8; ++j) worst = std::max(worst, (with.trajectory.states[s].col(j) - pred.col(j)).norm());
  }
  CHECK(worst <= 1e-6);

  cfg.free_flow = FreeFlow::kExactRotation;
  const auto exact = integrate(Ensemble::homogeneous(z0, om, {1.0, 0.2}), cfg);
  double worst_exact = 0.0;
  for (std::size_t s = 0; s < exact.trajectory.size(); ++s) {
    const CMatrix pred = matrix_exp(om, exact.trajectory.times[s]) * without.trajectory.states[s];
    worst_exact = std::max(worst_exact, oracle::max_abs(exact.trajectory.states[s] - pred));
  }
  CHECK(worst_exact <= 1e-12);
}

#include "lhs/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lhs/errors.hpp"

namespace lhs {

namespace {

class Rk4Stepper {
 public:
  Rk4Stepper(const Ensemble& ens, VectorField field, FreeFlow free_flow)
      : params_(ens.params()), field_(field) {
    const auto& freqs = ens.frequencies();
    rotate_ = ens.is_homogeneous() && free_flow == FreeFlow::kExactRotation;
    if (ens.is_homogeneous()) {
      // A single shared matrix is enough for a homogeneous ensemble.
      freqs_ = std::span<const SkewHermitian>(freqs.data(), 1);
      in_stage_ = !rotate_ && !freqs.front().is_zero();
      if (rotate_ && freqs.front().is_zero()) rotate_ = false;
    } else {
      freqs_ = std::span<const SkewHermitian>(freqs.data(), freqs.size());
      in_stage_ = true;
    }
    if (field_ == VectorField::kLs && !is_real_ensemble(ens)) {
      throw std::invalid_argument("integrator: the real LS field needs real states and frequencies");
    }
  }

  // Advances z in place by the signed step h (no renormalization).
  void step(CMatrix& z, double h) {
    eval(z, k1_);
    tmp_ = z + (0.5 * h) * k1_;
    eval(tmp_, k2_);
    tmp_ = z + (0.5 * h) * k2_;
    eval(tmp_, k3_);
    tmp_ = z + h * k3_;
    eval(tmp_, k4_);
    z += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    if (rotate_) z = rotation(h) * z;
  }

 private:
  void eval(const CMatrix& z, CMatrix& out) {
    if (field_ == VectorField::kLs) {
      ls_rhs_into(z, freqs_, params_, out, in_stage_);
    } else {
      lhs_rhs_into(z, freqs_, params_, out, in_stage_);
    }
  }

  const CMatrix& rotation(double h) {
    if (!has_rotation_ || h != rotation_step_) {
      rotation_ = matrix_exp(freqs_.front(), h);
      rotation_step_ = h;
      has_rotation_ = true;
    }
    return rotation_;
  }

  CouplingParams params_;
  VectorField field_;
  std::span<const SkewHermitian> freqs_;
  bool in_stage_ = false;
  bool rotate_ = false;
  bool has_rotation_ = false;
  double rotation_step_ = 0.0;
  CMatrix rotation_;
  CMatrix k1_, k2_, k3_, k4_, tmp_;
};

// Projects every column onto the sphere; returns the largest | |z_j| - 1 | seen before.
double renormalize(CMatrix& z) {
  double drift = 0.0;
  for (Index j = 0; j < z.cols(); ++j) {
    const double n = z.col(j).norm();
    if (!std::isfinite(n) || n == 0.0) return std::numeric_limits<double>::quiet_NaN();
    drift = std::max(drift, std::abs(n - 1.0));
    z.col(j) /= n;
  }
  return drift;
}

double max_drift(const CMatrix& z) {
  double drift = 0.0;
  for (Index j = 0; j < z.cols(); ++j) {
    const double n = z.col(j).norm();
    if (!std::isfinite(n)) return std::numeric_limits<double>::quiet_NaN();
    drift = std::max(drift, std::abs(n - 1.0));
  }
  return drift;
}

[[noreturn]] void fail(const std::string& what, double t) {
  std::ostringstream msg;
  msg << what << " at t = " << t;
  throw IntegrationError(msg.str(), t);
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("IntegratorConfig: dt must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("IntegratorConfig: t_end must be >= 0");
  }
  if (renormalize_every < 1) throw std::invalid_argument("IntegratorConfig: renormalize_every must be >= 1");
  if (record_every < 1) throw std::invalid_argument("IntegratorConfig: record_every must be >= 1");
  if (!(unit_drift_tol > 0.0)) throw std::invalid_argument("IntegratorConfig: unit_drift_tol must be > 0");
}

std::int64_t IntegratorConfig::step_count() const {
  if (t_end == 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(t_end / dt - 1e-9));
}

Ensemble step_rk4(const Ensemble& ens, double dt, TimeDirection direction, VectorField field) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step_rk4: dt must be > 0");
  Rk4Stepper stepper(ens, field, FreeFlow::kInStage);
  CMatrix z = ens.states();
  stepper.step(z, direction == TimeDirection::kForward ? dt : -dt);
  const double drift = renormalize(z);
  if (!std::isfinite(drift)) fail("step_rk4: non-finite state", dt);
  return ens.with_states(std::move(z));
}

IntegrationResult integrate(const Ensemble& ens, const IntegratorConfig& cfg,
                            std::span<const Observer> observers) {
  cfg.validate();
  Rk4Stepper stepper(ens, cfg.field, cfg.free_flow);
  const std::int64_t steps = cfg.step_count();
  const double view_tol = std::max(kUnitTol, cfg.unit_drift_tol);

  Trajectory traj;
  traj.frequencies = std::make_shared<const std::vector<SkewHermitian>>(ens.frequencies());
  ObservableSeries series;

  CMatrix z = ens.states();
  auto record = [&](std::int64_t step, double t) {
    if (cfg.record_states) {
      traj.times.push_back(t);
      traj.states.push_back(z);
    }
    if (cfg.record_observables) series.record(t, z, ens.params(), cfg.exact_pair_limit, view_tol);
    if (!observers.empty()) {
      const Ensemble view = ens.with_states(z, view_tol);
      for (const auto& obs : observers) obs(step, t, view);
    }
  };

  record(0, 0.0);
  for (std::int64_t n = 1; n <= steps; ++n) {
    const bool last = n == steps;
    const double t = last ? cfg.t_end : static_cast<double>(n) * cfg.dt;
    const double h = last ? cfg.t_end - static_cast<double>(n - 1) * cfg.dt : cfg.dt;
    stepper.step(z, h);
    const bool project = n % cfg.renormalize_every == 0 || last;
    const double drift = project ? renormalize(z) : max_drift(z);
    if (!std::isfinite(drift)) fail("integrate: non-finite state", t);
    if (drift > cfg.unit_drift_tol) {
      std::ostringstream msg;
      msg << "integrate: unit-norm drift " << drift << " exceeds tolerance " << cfg.unit_drift_tol;
      fail(msg.str(), t);
    }
    if (n % cfg.record_every == 0 || last) record(n, t);
  }

  series.metadata["kappa0"] = ens.params().kappa0;
  series.metadata["kappa1"] = ens.params().kappa1;
  series.metadata["N"] = ens.size();
  series.metadata["d"] = ens.dim();
  series.metadata["dt"] = cfg.dt;
  series.metadata["t_end"] = cfg.t_end;
  if (!series.metadata.contains("pair_scan_exact")) series.metadata["pair_scan_exact"] = true;

  Ensemble final_state = ens.with_states(std::move(z), view_tol);
  return IntegrationResult{std::move(traj), std::move(series), std::move(final_state)};
}

Trajectory split_transform(const Trajectory& traj, const SkewHermitian& omega) {
  if (traj.frequencies) {
    for (const auto& f : *traj.frequencies) {
      if ((f.mat() - omega.mat()).norm() > 1e-12) {
        throw std::invalid_argument(
            "split_transform: trajectory is not a homogeneous ensemble with the given frequency");
      }
    }
  }
  Trajectory out;
  out.frequencies = std::make_shared<const std::vector<SkewHermitian>>(
      traj.frequencies ? traj.frequencies->size() : 0, SkewHermitian::zero(omega.dim()));
  out.times = traj.times;
  out.states.reserve(traj.states.size());
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    if (traj.states[s].rows() != omega.dim()) throw std::invalid_argument("split_transform: dimension mismatch");
    out.states.push_back(matrix_exp(omega, -traj.times[s]) * traj.states[s]);
  }
  return out;
}

}  // namespace lhs

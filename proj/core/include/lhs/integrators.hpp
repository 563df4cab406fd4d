#pragma once

// Classical RK4 on the particle system followed by projection back onto the sphere.
// The vector field is tangent, so the per-step norm drift is O(dt^5) and a
// projection after each step is enough to keep |z_j| = 1 at double precision.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "lhs/dynamics.hpp"
#include "lhs/series.hpp"

namespace lhs {

enum class VectorField {
  kLhs,  // complex LHS field
  kLs,   // real Lohe sphere field (requires real data)
};

// How a homogeneous frequency Omega enters the step.
enum class FreeFlow {
  // exp(Omega dt) is precomputed and applied after an RK4 step of the Omega = 0 field.
  // Exact for the rotation since the coupling commutes with a common unitary.
  kExactRotation,
  // Omega z is part of the RK4 stages, as for heterogeneous ensembles.
  kInStage,
};

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 0.0;
  int renormalize_every = 1;
  int record_every = 1;
  // Max | |z_j| - 1 | tolerated after any step, projected or not.
  double unit_drift_tol = 1e-9;
  VectorField field = VectorField::kLhs;
  FreeFlow free_flow = FreeFlow::kExactRotation;
  bool record_states = true;
  bool record_observables = true;
  Index exact_pair_limit = 4096;

  // Throws std::invalid_argument unless dt > 0, t_end >= 0, renormalize_every >= 1,
  // record_every >= 1 and unit_drift_tol > 0.
  void validate() const;
  std::int64_t step_count() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<CMatrix> states;
  // Constant in time; shared with the ensemble that produced the trajectory.
  std::shared_ptr<const std::vector<SkewHermitian>> frequencies;

  std::size_t size() const noexcept { return times.size(); }
};

// Called with (step index, time, current ensemble) at every recorded step.
using Observer = std::function<void(std::int64_t, double, const Ensemble&)>;

struct IntegrationResult {
  Trajectory trajectory;
  ObservableSeries series;
  Ensemble final_state;
};

enum class TimeDirection { kForward, kBackward };

// One RK4 step of size dt (> 0) with per-particle renormalization. kBackward
// integrates the negated field. Throws IntegrationError on non-finite output.
Ensemble step_rk4(const Ensemble& ens, double dt, TimeDirection direction = TimeDirection::kForward,
                  VectorField field = VectorField::kLhs);

// Integrates from t = 0 to cfg.t_end. Records (and calls observers) at step 0,
// every cfg.record_every steps and at the final step.
IntegrationResult integrate(const Ensemble& ens, const IntegratorConfig& cfg,
                            std::span<const Observer> observers = {});

// w_j(t) = exp(-Omega t) z_j(t) for every snapshot. Rejects trajectories whose
// frequencies are not all equal to omega.
Trajectory split_transform(const Trajectory& traj, const SkewHermitian& omega);

}  // namespace lhs

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "odo/gaussian.hpp"
#include "odo/state_model.hpp"

namespace odo {

struct BaroSample {
  double t = 0.0;
  double pressure_hpa = 0.0;
};

// A linearized measurement: y ~ N(h(x), R), H = dh/dx at the current mean.
struct MeasurementModel {
  std::string label;
  VecX y;
  MatX R;
  MatX H;
  std::function<VecX(const NavState&)> h;
};

struct UpdateResult {
  GaussianBelief belief;
  UpdateStats stats;
};

// Joseph-form EKF update on the navigation state: flatten, update, restore,
// renormalize the quaternion. NIS is returned in stats.
UpdateResult ekf_update(const GaussianBelief& b, const MeasurementModel& m);

// Zero-velocity pseudo-measurement: y = 0 on h(x) = v.
MeasurementModel make_zupt(const GaussianBelief& b, const FilterConfig& cfg);

// Absolute position fix y with noise covariance R.
MeasurementModel make_position_fix(const GaussianBelief& b, const Vec3& y,
                                   const Mat3& R);

// Loop-closure revisit: y = 0 on h(x) = p − anchor. Used both to condition a
// freshly opened anchor and for every later revisit of the same place.
MeasurementModel make_loop_closure(const GaussianBelief& b, int block_id,
                                   const FilterConfig& cfg);
UpdateResult apply_loop_closure(const GaussianBelief& b, int block_id,
                                const FilterConfig& cfg);

// Soft prior that people walk: y = target on h(x) = |v|. Returns nothing when
// the estimated speed is under the gate (gradient direction meaningless).
std::optional<MeasurementModel> make_pseudo_speed(const GaussianBelief& b,
                                                  const FilterConfig& cfg);

// Linearized barometric altitude: h = −K (P − P_ref) with variance from the
// configured single-sample noise.
double baro_altitude(double pressure_hpa, double ref_pressure_hpa,
                     const FilterConfig& cfg);

// Absolute mode: y = baro_altitude on h(x) = p_z.
MeasurementModel make_baro_absolute(const GaussianBelief& b, const BaroSample& s,
                                    double ref_pressure_hpa, const FilterConfig& cfg);

// Relative mode, step 1: open an altitude anchor tied to the current p_z.
std::pair<GaussianBelief, int> open_altitude_anchor(const GaussianBelief& b,
                                                    const FilterConfig& cfg);
// The tie measurement used when opening (y = 0 on h = p_z − anchor); exposed
// separately so a driver that traces structure steps can apply it itself.
MeasurementModel make_altitude_tie(const GaussianBelief& b, int block_id,
                                   const FilterConfig& cfg);
// Relative mode, step 2: observe the height change −K·(P_k − P_{k−1}) between
// the anchored epoch and now, with doubled baro variance (two samples enter
// the difference). Caller retires the block afterwards.
MeasurementModel make_baro_relative(const GaussianBelief& b, int block_id,
                                    double delta_alt, const FilterConfig& cfg);

// Wall-plane touch: two rows, distance n(θ)·p_xy − d and screen-normal
// heading minus θ (innovation angle-wrapped). Throws DegenerateNormal when
// the screen normal has no horizontal component.
MeasurementModel make_wall_observation(const GaussianBelief& b, int block_id,
                                       const FilterConfig& cfg);

}  // namespace odo

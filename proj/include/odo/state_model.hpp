#pragma once

#include <vector>

#include "odo/core_math.hpp"

namespace odo {

// ---------------------------------------------------------------------------
// State layout. Base navigation state is 19 scalars in this fixed order;
// augmented blocks (loop-closure anchors, wall lines, altitude anchors)
// append after it in insertion order.
// ---------------------------------------------------------------------------

inline constexpr int kPosOff = 0;       // p (3)
inline constexpr int kVelOff = 3;       // v (3)
inline constexpr int kQuatOff = 6;      // q (4, scalar first)
inline constexpr int kAccBiasOff = 10;  // b_a (3)
inline constexpr int kGyroBiasOff = 13; // b_w (3)
inline constexpr int kScaleOff = 16;    // diag of T_a (3)
inline constexpr int kBaseDim = 19;

enum class AugKind { kLoopClosureAnchor, kWallLine, kAltitudeAnchor };

inline int aug_dim(AugKind k) {
  switch (k) {
    case AugKind::kLoopClosureAnchor: return 3;  // anchored world position
    case AugKind::kWallLine: return 2;           // (theta, d)
    case AugKind::kAltitudeAnchor: return 1;     // anchored altitude
  }
  return 0;
}

struct AugBlock {
  AugKind kind;
  int id;      // session-unique handle
  VecX value;  // aug_dim(kind) entries
};

struct NavState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Quat q;
  Vec3 b_a = Vec3::Zero();
  Vec3 b_w = Vec3::Zero();
  Vec3 t_a = Vec3::Ones();  // accelerometer scale, diagonal model
  std::vector<AugBlock> aug;

  int dim() const;
  // Offset of block `id` in the flat vector; throws UnknownBlock.
  int block_offset(int id) const;
  const AugBlock& block(int id) const;
  bool has_block(int id) const;
};

VecX flatten(const NavState& x);
// Rebuilds a NavState with the same block layout as `layout`, coefficients
// taken from `v`. Throws DimensionMismatch.
NavState unflatten(const NavState& layout, const VecX& v);

struct GaussianBelief {
  NavState mean;
  MatX cov;
  double t = 0.0;
  int dim() const { return mean.dim(); }
};

enum class BaroMode { kAbsolute, kRelative };

struct FilterConfig {
  // Process noise spectral densities: per-sample variance is sigma² · dt.
  Vec3 sigma_acc = Vec3::Constant(0.2);    // m/s² / √Hz
  Vec3 sigma_gyro = Vec3::Constant(0.02);  // rad/s / √Hz
  // Optional random walks on the calibration states (density; default off).
  double bias_acc_rw = 0.0;
  double bias_gyro_rw = 0.0;
  double scale_rw = 0.0;

  Vec3 gravity = Vec3(0, 0, 9.80665);  // z-up world, specific force at rest +g

  // Priors at initialization.
  double prior_pos_std = 1e-3;
  double prior_vel_std = 1e-3;
  double prior_quat_std = 1e-2;
  double prior_yaw_std = M_PI;  // heading is unknown at start-up
  double prior_bias_acc_std = 0.1;
  double prior_bias_gyro_std = 0.01;
  double prior_scale_std = 0.05;

  // Measurement models.
  double zupt_noise_std = 0.01;        // m/s
  double zupt_cadence = 0.25;          // s between ZUPTs while stationary
  double pseudo_speed_target = 0.75;   // m/s
  double pseudo_speed_std = 2.0;       // m/s
  double pseudo_speed_gate = 0.1;      // skip below this estimated speed
  double pseudo_cadence = 1.0;         // s between pseudo-speed updates
  double lc_anchor_prior_std = 100.0;  // m
  double lc_meas_std = 0.3;            // m
  double baro_coeff_m_per_hpa = 8.43;  // altitude per unit pressure drop
  double baro_noise_std = 0.3;         // m, single-sample altitude noise
  double alt_anchor_prior_std = 100.0; // m
  double alt_anchor_open_std = 1e-3;   // m, anchor-to-state tie at open
  BaroMode baro_mode = BaroMode::kAbsolute;
  double wall_pos_std = 0.02;          // m, touch distance noise
  double wall_angle_std = 0.05;        // rad, touch heading noise
  double wall_prior_theta_std = 0.3;   // rad, new wall-line prior
  double wall_prior_d_std = 0.5;       // m
  double wall_min_normal_xy = 0.1;     // degenerate-normal threshold

  // Driver behaviour.
  double max_dt = 0.2;       // s, larger IMU gaps abort the session
  double init_window = 0.5;  // s of initial accelerometer data averaged
  double cov_jitter = 1e-12;
};

// Belief from a time-averaged specific-force sample: position and velocity
// zero, attitude the minimal rotation taking the measured direction onto
// world +z (zero yaw), biases zero, scale identity. Throws DegenerateGravity
// when the sample norm is below 1 m/s².
GaussianBelief init_belief(const FilterConfig& cfg, const Vec3& mean_accel,
                           double t0);

// Pure bookkeeping: append a block with given initial value and prior
// covariance, zero cross-covariance. Returns the new belief and block id.
std::pair<GaussianBelief, int> augment_block(const GaussianBelief& b, AugKind kind,
                                             const VecX& value, const MatX& prior);

// Marginalize a block out. Throws UnknownBlock.
GaussianBelief remove_block(const GaussianBelief& b, int id);

// Open a loop-closure anchor: wide prior at zero, then conditioned on the
// current position (see apply_loop_closure in updates.hpp). Defined in
// updates.cpp.
std::pair<GaussianBelief, int> augment_loop_closure(const GaussianBelief& b,
                                                    const FilterConfig& cfg);

// Open a wall line initialized from the current pose: theta from the device
// screen-normal heading, d = n(theta)·p_xy. Throws DegenerateNormal.
std::pair<GaussianBelief, int> augment_wall_line(const GaussianBelief& b,
                                                 const FilterConfig& cfg);

}  // namespace odo

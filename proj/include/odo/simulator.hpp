#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>

#include "odo/log_io.hpp"

namespace odo {

// Scenario description: a chain of motion segments plus scheduled sensor
// events. Headings/poses are carried across segments; walks go straight in
// the current heading, turns and pose changes happen in place, so every
// segment starts and ends at zero velocity and the profile stays C¹.
struct SegmentSpec {
  enum class Kind { kRest, kWalk, kTurn, kStairs, kPose };
  Kind kind = Kind::kRest;
  double duration = 1.0;
  double speed = 1.0;      // walk/stairs: cruise speed, m/s
  double dyaw = 0.0;       // turn: heading change, rad
  double rise = 0.0;       // stairs: altitude gain over the segment, m
  // pose targets (rad); NaN keeps the current value
  double pitch = std::numeric_limits<double>::quiet_NaN();
  double roll = std::numeric_limits<double>::quiet_NaN();
  double mount_yaw = std::numeric_limits<double>::quiet_NaN();
};

struct FixEvent {
  double t = 0.0;
  double sigma = 0.3;  // per-axis std of the reported position, m
};
struct LcEvent {
  double t = 0.0;
  int id = 0;
  bool open = false;
};
struct WallEvent {
  double t = 0.0;
  int id = 0;
  bool open = false;  // open = wall_open, otherwise wall_touch
};

struct SimScenario {
  double rate_hz = 100.0;
  double jitter_frac = 0.05;  // uniform ±5% per sample interval

  // Sensor corruption, same spectral-density convention as the filter.
  Vec3 sigma_acc = Vec3::Constant(0.2);
  Vec3 sigma_gyro = Vec3::Constant(0.02);
  Vec3 bias_acc = Vec3::Zero();
  Vec3 bias_gyro = Vec3::Zero();
  Vec3 scale_acc = Vec3::Ones();

  bool emit_baro = false;
  double baro_rate_hz = 0.75;
  double baro_noise_std_m = 0.3;
  double baro_drift_hpa_per_min = 0.0;
  double ref_pressure_hpa = 1013.25;
  double baro_coeff_m_per_hpa = 8.43;

  double init_heading = 0.0;  // rad; device yaw = heading + mount_yaw
  double init_mount_yaw = 0.0;
  double init_pitch = 0.0;
  double init_roll = 0.0;

  // Vertical gait bounce while walking: acceleration amplitude (m/s²) and
  // step frequency (Hz). This is what makes motion detectable.
  double gait_amp = 2.0;
  double gait_freq = 2.0;

  Vec3 gravity = Vec3(0, 0, 9.80665);

  std::vector<SegmentSpec> segments;
  std::vector<FixEvent> fixes;
  std::vector<LcEvent> lcs;
  std::vector<WallEvent> walls;
};

// Ground truth at the emitted IMU timestamps plus the injected calibration.
struct SimTruth {
  std::vector<double> t;
  std::vector<Vec3> p;
  std::vector<Vec3> v;
  std::vector<Quat> q;
  Vec3 bias_acc = Vec3::Zero();
  Vec3 bias_gyro = Vec3::Zero();
  Vec3 scale_acc = Vec3::Ones();
  double path_length = 0.0;

  Vec3 position_at(double t) const;  // linear interpolation
};

struct SimResult {
  std::vector<LogRecord> log;
  SimTruth truth;
};

// Deterministic for a given (scenario, seed). The truth trajectory is the
// discrete rollout of the strapdown recursion itself, and the ideal IMU
// stream is its exact inverse, so a zero-noise log reproduces the truth to
// round-off when filtered.
SimResult simulate(const SimScenario& sc, uint64_t seed);

SimScenario parse_scenario(std::istream& in);

void write_truth(std::ostream& out, const SimTruth& truth);
void write_truth_params(std::ostream& out, const SimTruth& truth);

struct ScoreMetrics {
  double duration = 0.0;
  double truth_path_length = 0.0;
  double endpoint_error = 0.0;
  double endpoint_pct = 0.0;  // endpoint error over true path length, %
  double rmse_pos = 0.0;
  double rmse_alt = 0.0;
  double max_pos_error = 0.0;
};

// Compares an estimated trajectory against truth (times interpolated).
// Throws TimeRangeMismatch when the estimate reaches outside the truth span.
ScoreMetrics score(const std::vector<TrajectoryRow>& estimate, const SimTruth& truth);

// Rebuild a SimTruth (trajectory part only) from a trajectory file, for the
// command-line score path.
SimTruth truth_from_rows(const std::vector<TrajectoryRow>& rows);

}  // namespace odo

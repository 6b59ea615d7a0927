#include "odo/updates.hpp"

#include <cmath>

#include "odo/errors.hpp"

namespace odo {

UpdateResult ekf_update(const GaussianBelief& b, const MeasurementModel& m) {
  UpdateResult out;
  out.belief = b;
  VecX mean = flatten(b.mean);
  out.stats = joseph_update(mean, out.belief.cov, m.H, m.R, m.y, m.h(b.mean), 1e-12);
  out.belief.mean = unflatten(b.mean, mean);
  out.belief.mean.q = out.belief.mean.q.normalized();
  return out;
}

MeasurementModel make_zupt(const GaussianBelief& b, const FilterConfig& cfg) {
  MeasurementModel m;
  m.label = "zupt";
  m.y = VecX::Zero(3);
  m.R = cfg.zupt_noise_std * cfg.zupt_noise_std * Mat3::Identity();
  m.H = MatX::Zero(3, b.dim());
  m.H.block<3, 3>(0, kVelOff).setIdentity();
  m.h = [](const NavState& x) { return VecX(x.v); };
  return m;
}

MeasurementModel make_position_fix(const GaussianBelief& b, const Vec3& y,
                                   const Mat3& R) {
  MeasurementModel m;
  m.label = "fix";
  m.y = y;
  m.R = R;
  m.H = MatX::Zero(3, b.dim());
  m.H.block<3, 3>(0, kPosOff).setIdentity();
  m.h = [](const NavState& x) { return VecX(x.p); };
  return m;
}

MeasurementModel make_loop_closure(const GaussianBelief& b, int block_id,
                                   const FilterConfig& cfg) {
  const int off = b.mean.block_offset(block_id);
  if (b.mean.block(block_id).kind != AugKind::kLoopClosureAnchor) {
    throw UnknownBlock("block " + std::to_string(block_id) +
                       " is not a loop-closure anchor");
  }
  MeasurementModel m;
  m.label = "loop_closure";
  m.y = VecX::Zero(3);
  m.R = cfg.lc_meas_std * cfg.lc_meas_std * Mat3::Identity();
  m.H = MatX::Zero(3, b.dim());
  m.H.block<3, 3>(0, kPosOff).setIdentity();
  m.H.block<3, 3>(0, off) = -Mat3::Identity();
  m.h = [block_id](const NavState& x) {
    return VecX(x.p - Vec3(x.block(block_id).value));
  };
  return m;
}

UpdateResult apply_loop_closure(const GaussianBelief& b, int block_id,
                                const FilterConfig& cfg) {
  return ekf_update(b, make_loop_closure(b, block_id, cfg));
}

std::pair<GaussianBelief, int> augment_loop_closure(const GaussianBelief& b,
                                                    const FilterConfig& cfg) {
  const MatX prior = cfg.lc_anchor_prior_std * cfg.lc_anchor_prior_std *
                     Mat3::Identity();
  auto [grown, id] = augment_block(b, AugKind::kLoopClosureAnchor,
                                   VecX::Zero(3), prior);
  return {apply_loop_closure(grown, id, cfg).belief, id};
}

std::optional<MeasurementModel> make_pseudo_speed(const GaussianBelief& b,
                                                  const FilterConfig& cfg) {
  const double speed = b.mean.v.norm();
  if (speed < cfg.pseudo_speed_gate) return std::nullopt;

  MeasurementModel m;
  m.label = "pseudo_speed";
  m.y = VecX::Constant(1, cfg.pseudo_speed_target);
  m.R = MatX::Constant(1, 1, cfg.pseudo_speed_std * cfg.pseudo_speed_std);
  m.H = MatX::Zero(1, b.dim());
  m.H.block<1, 3>(0, kVelOff) = b.mean.v.transpose() / speed;
  m.h = [](const NavState& x) { return VecX::Constant(1, x.v.norm()); };
  return m;
}

double baro_altitude(double pressure_hpa, double ref_pressure_hpa,
                     const FilterConfig& cfg) {
  return -cfg.baro_coeff_m_per_hpa * (pressure_hpa - ref_pressure_hpa);
}

MeasurementModel make_baro_absolute(const GaussianBelief& b, const BaroSample& s,
                                    double ref_pressure_hpa,
                                    const FilterConfig& cfg) {
  MeasurementModel m;
  m.label = "baro_abs";
  m.y = VecX::Constant(1, baro_altitude(s.pressure_hpa, ref_pressure_hpa, cfg));
  m.R = MatX::Constant(1, 1, cfg.baro_noise_std * cfg.baro_noise_std);
  m.H = MatX::Zero(1, b.dim());
  m.H(0, kPosOff + 2) = 1.0;
  m.h = [](const NavState& x) { return VecX::Constant(1, x.p[2]); };
  return m;
}

MeasurementModel make_altitude_tie(const GaussianBelief& b, int block_id,
                                   const FilterConfig& cfg) {
  MeasurementModel tie;
  tie.label = "alt_anchor_open";
  tie.y = VecX::Zero(1);
  tie.R = MatX::Constant(1, 1, cfg.alt_anchor_open_std * cfg.alt_anchor_open_std);
  tie.H = MatX::Zero(1, b.dim());
  tie.H(0, kPosOff + 2) = 1.0;
  tie.H(0, b.mean.block_offset(block_id)) = -1.0;
  tie.h = [block_id](const NavState& x) {
    return VecX::Constant(1, x.p[2] - x.block(block_id).value[0]);
  };
  return tie;
}

std::pair<GaussianBelief, int> open_altitude_anchor(const GaussianBelief& b,
                                                    const FilterConfig& cfg) {
  const MatX prior = MatX::Constant(
      1, 1, cfg.alt_anchor_prior_std * cfg.alt_anchor_prior_std);
  auto [grown, id] = augment_block(b, AugKind::kAltitudeAnchor,
                                   VecX::Constant(1, b.mean.p[2]), prior);
  // Tie the anchor to the current altitude; afterwards it drifts *with* the
  // state estimate, which is exactly what a height-difference needs.
  return {ekf_update(grown, make_altitude_tie(grown, id, cfg)).belief, id};
}

MeasurementModel make_baro_relative(const GaussianBelief& b, int block_id,
                                    double delta_alt, const FilterConfig& cfg) {
  const int off = b.mean.block_offset(block_id);
  if (b.mean.block(block_id).kind != AugKind::kAltitudeAnchor) {
    throw UnknownBlock("block " + std::to_string(block_id) +
                       " is not an altitude anchor");
  }
  MeasurementModel m;
  m.label = "baro_rel";
  m.y = VecX::Constant(1, delta_alt);
  // Two pressure samples enter the difference.
  m.R = MatX::Constant(1, 1, 2.0 * cfg.baro_noise_std * cfg.baro_noise_std);
  m.H = MatX::Zero(1, b.dim());
  m.H(0, kPosOff + 2) = 1.0;
  m.H(0, off) = -1.0;
  m.h = [block_id](const NavState& x) {
    return VecX::Constant(1, x.p[2] - x.block(block_id).value[0]);
  };
  return m;
}

MeasurementModel make_wall_observation(const GaussianBelief& b, int block_id,
                                       const FilterConfig& cfg) {
  const int off = b.mean.block_offset(block_id);
  if (b.mean.block(block_id).kind != AugKind::kWallLine) {
    throw UnknownBlock("block " + std::to_string(block_id) + " is not a wall line");
  }
  const Vec3 n_world = b.mean.q.rotate(Vec3::UnitZ());
  const double nx = n_world[0], ny = n_world[1];
  const double nxy2 = nx * nx + ny * ny;
  if (std::sqrt(nxy2) < cfg.wall_min_normal_xy) {
    throw DegenerateNormal("screen normal too vertical for a wall heading");
  }

  const double theta = b.mean.block(block_id).value[0];
  const double ct = std::cos(theta), st = std::sin(theta);
  const Vec3& p = b.mean.p;

  MeasurementModel m;
  m.label = "wall";
  m.y = VecX::Zero(2);
  m.R = MatX::Zero(2, 2);
  m.R(0, 0) = cfg.wall_pos_std * cfg.wall_pos_std;
  m.R(1, 1) = cfg.wall_angle_std * cfg.wall_angle_std;

  m.H = MatX::Zero(2, b.dim());
  // Row 0: distance to the line, n(θ)·p_xy − d.
  m.H(0, kPosOff + 0) = ct;
  m.H(0, kPosOff + 1) = st;
  m.H(0, off + 0) = -st * p[0] + ct * p[1];
  m.H(0, off + 1) = -1.0;
  // Row 1: screen-normal heading minus θ; atan2 gradient chained through the
  // attitude Jacobian of n = q e_z q*.
  const Eigen::RowVector3d g_atan2(-ny / nxy2, nx / nxy2, 0.0);
  m.H.block<1, 4>(1, kQuatOff) = g_atan2 * rotate_jacobian_quat(b.mean.q, Vec3::UnitZ());
  m.H(1, off + 0) = -1.0;

  m.h = [block_id](const NavState& x) {
    const VecX& wall = x.block(block_id).value;
    const Vec3 n = x.q.rotate(Vec3::UnitZ());
    VecX r(2);
    r[0] = std::cos(wall[0]) * x.p[0] + std::sin(wall[0]) * x.p[1] - wall[1];
    r[1] = wrap_angle(std::atan2(n[1], n[0]) - wall[0]);
    return r;
  };
  return m;
}

}  // namespace odo

#include "odo/state_model.hpp"

#include <algorithm>
#include <cmath>

#include "odo/errors.hpp"
#include "odo/gaussian.hpp"

namespace odo {

int NavState::dim() const {
  int d = kBaseDim;
  for (const auto& b : aug) d += aug_dim(b.kind);
  return d;
}

int NavState::block_offset(int id) const {
  int off = kBaseDim;
  for (const auto& b : aug) {
    if (b.id == id) return off;
    off += aug_dim(b.kind);
  }
  throw UnknownBlock("no augmented block with id " + std::to_string(id));
}

const AugBlock& NavState::block(int id) const {
  for (const auto& b : aug) {
    if (b.id == id) return b;
  }
  throw UnknownBlock("no augmented block with id " + std::to_string(id));
}

bool NavState::has_block(int id) const {
  return std::any_of(aug.begin(), aug.end(),
                     [id](const AugBlock& b) { return b.id == id; });
}

VecX flatten(const NavState& x) {
  VecX v(x.dim());
  v.segment<3>(kPosOff) = x.p;
  v.segment<3>(kVelOff) = x.v;
  v.segment<4>(kQuatOff) = x.q.coeffs();
  v.segment<3>(kAccBiasOff) = x.b_a;
  v.segment<3>(kGyroBiasOff) = x.b_w;
  v.segment<3>(kScaleOff) = x.t_a;
  int off = kBaseDim;
  for (const auto& b : x.aug) {
    v.segment(off, b.value.size()) = b.value;
    off += static_cast<int>(b.value.size());
  }
  return v;
}

NavState unflatten(const NavState& layout, const VecX& v) {
  if (v.size() != layout.dim()) {
    throw DimensionMismatch("flat vector has " + std::to_string(v.size()) +
                            " entries, layout needs " + std::to_string(layout.dim()));
  }
  NavState x = layout;
  x.p = v.segment<3>(kPosOff);
  x.v = v.segment<3>(kVelOff);
  x.q = Quat(Vec4(v.segment<4>(kQuatOff)));
  x.b_a = v.segment<3>(kAccBiasOff);
  x.b_w = v.segment<3>(kGyroBiasOff);
  x.t_a = v.segment<3>(kScaleOff);
  int off = kBaseDim;
  for (auto& b : x.aug) {
    b.value = v.segment(off, aug_dim(b.kind));
    off += aug_dim(b.kind);
  }
  return x;
}

GaussianBelief init_belief(const FilterConfig& cfg, const Vec3& mean_accel,
                           double t0) {
  const double n = mean_accel.norm();
  if (n < 1.0) {
    throw DegenerateGravity("mean specific force " + std::to_string(n) +
                            " m/s² too small to define down");
  }
  const Vec3 f = mean_accel / n;  // measured direction of specific force (body)
  const Vec3 up = Vec3::UnitZ();

  // Minimal rotation taking f onto +z: axis f × z, angle atan2(|f × z|, f·z).
  // This has no twist about z, i.e. yaw = 0.
  Quat q0;
  const Vec3 axis = f.cross(up);
  const double s = axis.norm();
  const double c = f.dot(up);
  if (s < 1e-12) {
    q0 = c > 0 ? Quat::identity()
               : Quat::from_axis_angle(Vec3(M_PI, 0, 0));  // upside down
  } else {
    q0 = Quat::from_axis_angle(axis / s * std::atan2(s, c));
  }

  GaussianBelief b;
  b.t = t0;
  b.mean.q = q0;
  b.cov = MatX::Zero(kBaseDim, kBaseDim);
  auto put = [&](int off, int len, double std) {
    b.cov.block(off, off, len, len) = std * std * MatX::Identity(len, len);
  };
  put(kPosOff, 3, cfg.prior_pos_std);
  put(kVelOff, 3, cfg.prior_vel_std);
  // Heading ignorance approximated by inflating the whole quaternion prior.
  const double qvar =
      cfg.prior_quat_std * cfg.prior_quat_std + cfg.prior_yaw_std * cfg.prior_yaw_std;
  b.cov.block(kQuatOff, kQuatOff, 4, 4) = qvar * Mat4::Identity();
  put(kAccBiasOff, 3, cfg.prior_bias_acc_std);
  put(kGyroBiasOff, 3, cfg.prior_bias_gyro_std);
  put(kScaleOff, 3, cfg.prior_scale_std);
  return b;
}

std::pair<GaussianBelief, int> augment_block(const GaussianBelief& b, AugKind kind,
                                             const VecX& value, const MatX& prior) {
  const int d = aug_dim(kind);
  if (value.size() != d || prior.rows() != d || prior.cols() != d) {
    throw DimensionMismatch("augmented block value/prior size mismatch");
  }
  int id = 0;
  for (const auto& blk : b.mean.aug) id = std::max(id, blk.id);
  ++id;

  GaussianBelief out = b;
  out.mean.aug.push_back({kind, id, value});
  const int n = b.dim();
  MatX P = MatX::Zero(n + d, n + d);
  P.topLeftCorner(n, n) = b.cov;
  P.bottomRightCorner(d, d) = prior;
  out.cov = std::move(P);
  return {std::move(out), id};
}

GaussianBelief remove_block(const GaussianBelief& b, int id) {
  const int off = b.mean.block_offset(id);
  const int d = aug_dim(b.mean.block(id).kind);
  const int n = b.dim();

  std::vector<int> keep;
  keep.reserve(n - d);
  for (int i = 0; i < n; ++i) {
    if (i < off || i >= off + d) keep.push_back(i);
  }

  GaussianBelief out;
  out.t = b.t;
  out.mean = b.mean;
  out.mean.aug.erase(
      std::remove_if(out.mean.aug.begin(), out.mean.aug.end(),
                     [id](const AugBlock& blk) { return blk.id == id; }),
      out.mean.aug.end());
  out.cov.resize(n - d, n - d);
  for (size_t i = 0; i < keep.size(); ++i) {
    for (size_t j = 0; j < keep.size(); ++j) {
      out.cov(i, j) = b.cov(keep[i], keep[j]);
    }
  }
  return out;
}

std::pair<GaussianBelief, int> augment_wall_line(const GaussianBelief& b,
                                                 const FilterConfig& cfg) {
  // Screen normal in the world frame; its xy heading defines the wall normal.
  const Vec3 n_world = b.mean.q.rotate(Vec3::UnitZ());
  const double nxy = std::hypot(n_world[0], n_world[1]);
  if (nxy < cfg.wall_min_normal_xy) {
    throw DegenerateNormal("screen normal too vertical (|n_xy| = " +
                           std::to_string(nxy) + ")");
  }
  const double theta = std::atan2(n_world[1], n_world[0]);
  const double d = std::cos(theta) * b.mean.p[0] + std::sin(theta) * b.mean.p[1];

  VecX value(2);
  value << theta, d;
  MatX prior = MatX::Zero(2, 2);
  prior(0, 0) = cfg.wall_prior_theta_std * cfg.wall_prior_theta_std;
  prior(1, 1) = cfg.wall_prior_d_std * cfg.wall_prior_d_std;
  return augment_block(b, AugKind::kWallLine, value, prior);
}

}  // namespace odo

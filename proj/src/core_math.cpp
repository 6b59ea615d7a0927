#include "odo/core_math.hpp"

#include <cmath>

namespace odo {

namespace {
constexpr double kSeriesThreshold = 1e-8;
}

Quat Quat::from_axis_angle(const Vec3& phi) {
  const double n = phi.norm();
  if (n < kSeriesThreshold) {
    // sin(n/2)/n ≈ 1/2 − n²/48 to the same order the Ω series keeps.
    const double s = 0.5 * (1.0 - n * n / 24.0);
    return Quat(1.0 - n * n / 8.0, s * phi[0], s * phi[1], s * phi[2]);
  }
  const double c = std::cos(0.5 * n);
  const double s = std::sin(0.5 * n) / n;
  return Quat(c, s * phi[0], s * phi[1], s * phi[2]);
}

Quat Quat::normalized() const {
  const double n = norm();
  if (n < 1e-12) throw DegenerateQuaternion("quaternion norm " + std::to_string(n));
  return Quat(Vec4(c_ / n));
}

Quat Quat::operator*(const Quat& r) const {
  const double w1 = c_[0];
  const Vec3 v1 = vec();
  const double w2 = r.c_[0];
  const Vec3 v2 = r.vec();
  const double w = w1 * w2 - v1.dot(v2);
  const Vec3 v = w1 * v2 + w2 * v1 + v1.cross(v2);
  return Quat(w, v[0], v[1], v[2]);
}

Vec3 Quat::rotate(const Vec3& a) const {
  const double w = c_[0];
  const Vec3 v = vec();
  return (w * w - v.squaredNorm()) * a + 2.0 * v.dot(a) * v + 2.0 * w * v.cross(a);
}

Mat3 Quat::rotation_matrix() const {
  Mat3 R;
  R.col(0) = rotate(Vec3::UnitX());
  R.col(1) = rotate(Vec3::UnitY());
  R.col(2) = rotate(Vec3::UnitZ());
  return R;
}

Vec3 quat_log(const Quat& q) {
  Vec4 c = q.coeffs();
  if (c[0] < 0.0) c = -c;  // shortest representative
  const double vn = c.tail<3>().norm();
  const double angle = 2.0 * std::atan2(vn, c[0]);
  if (vn < 1e-12) return Vec3::Zero();
  return c.tail<3>() * (angle / vn);
}

Mat4 quat_left_matrix(const Quat& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  Mat4 L;
  L << w, -x, -y, -z,
       x,  w, -z,  y,
       y,  z,  w, -x,
       z, -y,  x,  w;
  return L;
}

Mat4 pure_left_matrix(const Vec3& v) {
  const double x = v[0], y = v[1], z = v[2];
  Mat4 X;
  X << 0, -x, -y, -z,
       x,  0, -z,  y,
       y,  z,  0, -x,
       z, -y,  x,  0;
  return X;
}

Mat4 omega_update_matrix(const Vec3& phi) {
  const double n = phi.norm();
  if (n < kSeriesThreshold) {
    const double n2 = n * n;
    return (1.0 - n2 / 8.0) * Mat4::Identity() +
           0.5 * (1.0 - n2 / 24.0) * pure_left_matrix(phi);
  }
  const double c = std::cos(0.5 * n);
  const double s = std::sin(0.5 * n) / n;
  return c * Mat4::Identity() + s * pure_left_matrix(phi);
}

std::array<Mat4, 3> omega_update_matrix_grad(const Vec3& phi) {
  const double n = phi.norm();
  std::array<Mat4, 3> g;
  const Mat4 Xi = pure_left_matrix(phi);
  if (n < kSeriesThreshold) {
    // d/dphi_i of the series branch: cos term → −phi_i/4,
    // sin term → −phi_i/24 · Ξ(phi) + (1/2 − n²/48) Ξ(e_i).
    const double s = 0.5 * (1.0 - n * n / 24.0);
    for (int i = 0; i < 3; ++i) {
      g[i] = (-phi[i] / 4.0) * Mat4::Identity() + (-phi[i] / 24.0) * Xi +
             s * pure_left_matrix(Vec3::Unit(i));
    }
    return g;
  }
  const double c = std::cos(0.5 * n);
  const double s = std::sin(0.5 * n) / n;
  for (int i = 0; i < 3; ++i) {
    g[i] = (-0.5 * phi[i] * s) * Mat4::Identity() +
           (phi[i] * (0.5 * c - s) / (n * n)) * Xi +
           s * pure_left_matrix(Vec3::Unit(i));
  }
  return g;
}

Mat34 rotate_jacobian_quat(const Quat& q, const Vec3& a) {
  const double w = q.w();
  const Vec3 v = q.vec();
  Mat34 J;
  J.col(0) = 2.0 * (w * a + v.cross(a));
  J.block<3, 3>(0, 1) =
      2.0 * (v * a.transpose() - a * v.transpose() + v.dot(a) * Mat3::Identity() -
             w * skew(a));
  return J;
}

Mat3 skew(const Vec3& v) {
  Mat3 S;
  S << 0, -v[2], v[1],
       v[2], 0, -v[0],
      -v[1], v[0], 0;
  return S;
}

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);
  if (r <= -M_PI) r = M_PI;
  return r;
}

}  // namespace odo

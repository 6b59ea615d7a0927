#pragma once

#include <Eigen/Dense>
#include <array>

#include "odo/errors.hpp"

namespace odo {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Mat34 = Eigen::Matrix<double, 3, 4>;

// Unit quaternion, stored scalar-first (w, x, y, z). Convention used across
// the whole project: q maps body-frame vectors into the world frame, and
// attitude increments compose on the left, q_new = exp(phi/2) * q_old.
class Quat {
 public:
  Quat() : c_(1, 0, 0, 0) {}
  Quat(double w, double x, double y, double z) : c_(w, x, y, z) {}
  explicit Quat(const Vec4& wxyz) : c_(wxyz) {}

  static Quat identity() { return Quat(); }
  // Exponential map: rotation by |phi| radians about phi/|phi|.
  static Quat from_axis_angle(const Vec3& phi);

  double w() const { return c_[0]; }
  double x() const { return c_[1]; }
  double y() const { return c_[2]; }
  double z() const { return c_[3]; }
  const Vec4& coeffs() const { return c_; }  // (w, x, y, z)
  Vec3 vec() const { return c_.tail<3>(); }

  double norm() const { return c_.norm(); }
  Quat normalized() const;  // throws DegenerateQuaternion near zero
  Quat conjugate() const { return Quat(c_[0], -c_[1], -c_[2], -c_[3]); }

  Quat operator*(const Quat& r) const;  // Hamilton product

  // R(q) v via the homogeneous formula (w² − v·v)a + 2(v·a)v + 2w(v×a);
  // equals the rotation when |q| = 1.
  Vec3 rotate(const Vec3& a) const;
  Mat3 rotation_matrix() const;

 private:
  Vec4 c_;
};

// Rotation-vector logarithm: from_axis_angle(quat_log(q)) == ±q. Picks the
// representative with angle in [0, pi].
Vec3 quat_log(const Quat& q);

// Left-multiplication matrix L(q): L(q) vec(p) = vec(q ⊗ p), scalar-first.
Mat4 quat_left_matrix(const Quat& q);

// Left-multiplication matrix of the pure quaternion (0, v).
Mat4 pure_left_matrix(const Vec3& v);

// Attitude update matrix: vec(q_new) = omega_update_matrix(phi) vec(q_old),
// equal to cos(|phi|/2) I + sin(|phi|/2)/|phi| * pure_left_matrix(phi).
// Below |phi| = 1e-8 a second-order series keeps it smooth through zero.
Mat4 omega_update_matrix(const Vec3& phi);

// Analytic per-component derivatives d omega_update_matrix / d phi_i.
std::array<Mat4, 3> omega_update_matrix_grad(const Vec3& phi);

// Jacobian of the homogeneous rotation q a q* with respect to the four
// quaternion coefficients (not assuming |q| = 1).
Mat34 rotate_jacobian_quat(const Quat& q, const Vec3& a);

Mat3 skew(const Vec3& v);

// Wrap to (-pi, pi].
double wrap_angle(double a);

}  // namespace odo

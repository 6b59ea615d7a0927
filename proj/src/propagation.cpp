#include "odo/propagation.hpp"

#include <cmath>

#include "odo/errors.hpp"
#include "odo/gaussian.hpp"

namespace odo {

std::pair<Vec3, Vec3> correct_inputs(const NavState& x, const ImuSample& s) {
  return {x.t_a.cwiseProduct(s.a) - x.b_a, s.w - x.b_w};
}

NavState mechanize(const NavState& x, const ImuSample& s, double dt,
                   const Vec3& gravity, const Vec3& eps_a, const Vec3& eps_w) {
  const auto [a_cal, w_cal] = correct_inputs(x, s);
  const Vec3 phi = (w_cal + eps_w) * dt;

  NavState out = x;
  const Vec4 u = omega_update_matrix(phi) * x.q.coeffs();
  out.q = Quat(u).normalized();
  out.v = x.v + (out.q.rotate(a_cal + eps_a) - gravity) * dt;
  out.p = x.p + x.v * dt;
  return out;
}

NavState propagate_mean(const NavState& x, const ImuSample& s, double dt,
                        const Vec3& gravity) {
  return mechanize(x, s, dt, gravity);
}

PropagationJacobians propagation_jacobians(const NavState& x, const ImuSample& s,
                                           double dt, const Vec3& gravity) {
  (void)gravity;  // additive constant, drops out of every derivative
  const auto [a_cal, w_cal] = correct_inputs(x, s);
  const Vec3 phi = w_cal * dt;

  const Mat4 Om = omega_update_matrix(phi);
  const Vec4 u = Om * x.q.coeffs();
  const double nu = u.norm();
  if (nu < 1e-12) throw DegenerateQuaternion("propagated quaternion collapsed");
  const Vec4 qn = u / nu;
  const Quat q_new{qn};

  // Normalization projection: d(u/|u|)/du.
  const Mat4 P_N = (Mat4::Identity() - qn * qn.transpose()) / nu;

  // J_w(:,i) = dΩ/dphi_i · q_old; phi depends on b_w (−dt) and ε_ω (+dt).
  const auto dOm = omega_update_matrix_grad(phi);
  Eigen::Matrix<double, 4, 3> J_w;
  for (int i = 0; i < 3; ++i) J_w.col(i) = dOm[i] * x.q.coeffs();

  const Mat34 D = rotate_jacobian_quat(q_new, a_cal);  // d(q a q*)/dq at q⁺
  const Mat34 DPN = D * P_N;
  const Mat3 R_new = q_new.rotation_matrix();

  const int n = x.dim();
  PropagationJacobians J;
  J.F_x = MatX::Identity(n, n);
  J.F_eps = MatX::Zero(n, 6);

  // p row
  J.F_x.block<3, 3>(kPosOff, kVelOff) = dt * Mat3::Identity();
  // v row
  J.F_x.block<3, 4>(kVelOff, kQuatOff) = dt * DPN * Om;
  J.F_x.block<3, 3>(kVelOff, kAccBiasOff) = -dt * R_new;
  J.F_x.block<3, 3>(kVelOff, kGyroBiasOff) = -dt * dt * DPN * J_w;
  J.F_x.block<3, 3>(kVelOff, kScaleOff) = dt * R_new * s.a.asDiagonal();
  // q row
  J.F_x.block<4, 4>(kQuatOff, kQuatOff) = P_N * Om;
  J.F_x.block<4, 3>(kQuatOff, kGyroBiasOff) = -dt * P_N * J_w;

  // Noise columns: ε_a then ε_ω.
  J.F_eps.block<3, 3>(kVelOff, 0) = dt * R_new;
  J.F_eps.block<3, 3>(kVelOff, 3) = dt * dt * DPN * J_w;
  J.F_eps.block<4, 3>(kQuatOff, 3) = dt * P_N * J_w;
  return J;
}

GaussianBelief ekf_predict(const GaussianBelief& b, const ImuSample& s,
                           const FilterConfig& cfg, MatX* F_out) {
  const double dt = s.t - b.t;
  if (dt <= 0.0) {
    throw NonPositiveDt("dt = " + std::to_string(dt) + " at t = " + std::to_string(s.t));
  }
  if (dt > cfg.max_dt) {
    throw GapTooLarge("IMU gap " + std::to_string(dt) + " s > " +
                      std::to_string(cfg.max_dt) + " s at t = " + std::to_string(s.t));
  }

  const auto J = propagation_jacobians(b.mean, s, dt, cfg.gravity);
  if (F_out) *F_out = J.F_x;

  GaussianBelief out;
  out.t = s.t;
  out.mean = propagate_mean(b.mean, s, dt, cfg.gravity);

  Eigen::Matrix<double, 6, 1> q_diag;
  q_diag << cfg.sigma_acc.cwiseAbs2(), cfg.sigma_gyro.cwiseAbs2();
  out.cov = J.F_x * b.cov * J.F_x.transpose() +
            J.F_eps * (dt * q_diag).asDiagonal() * J.F_eps.transpose();

  // Optional calibration random walk (density convention as well).
  out.cov.block<3, 3>(kAccBiasOff, kAccBiasOff).diagonal().array() +=
      cfg.bias_acc_rw * cfg.bias_acc_rw * dt;
  out.cov.block<3, 3>(kGyroBiasOff, kGyroBiasOff).diagonal().array() +=
      cfg.bias_gyro_rw * cfg.bias_gyro_rw * dt;
  out.cov.block<3, 3>(kScaleOff, kScaleOff).diagonal().array() +=
      cfg.scale_rw * cfg.scale_rw * dt;

  symmetrize(out.cov, cfg.cov_jitter);
  check_psd(out.cov);
  return out;
}

}  // namespace odo

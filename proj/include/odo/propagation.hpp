#pragma once

#include "odo/state_model.hpp"

namespace odo {

struct ImuSample {
  double t = 0.0;
  Vec3 a = Vec3::Zero();  // raw accelerometer, m/s²
  Vec3 w = Vec3::Zero();  // raw gyroscope, rad/s
};

// Calibrated inputs per the sensor model: ã = t_a ∘ a_raw − b_a,
// ω̃ = ω_raw − b_w.
std::pair<Vec3, Vec3> correct_inputs(const NavState& x, const ImuSample& s);

// One strapdown step. The attitude is advanced first and renormalized, the
// velocity row uses the *new* attitude, the position row the *old* velocity:
//   q⁺ = normalize(Ω[(ω̃ + ε_ω) dt] q),
//   v⁺ = v + (q⁺ (ã + ε_a) q⁺* − g) dt,
//   p⁺ = p + v dt.
// Biases, scale and augmented blocks carry over unchanged. The noise inputs
// ε default to zero (that specialization is the mean propagation); non-zero
// ε is what the process-noise Jacobian is taken against.
NavState mechanize(const NavState& x, const ImuSample& s, double dt,
                   const Vec3& gravity, const Vec3& eps_a = Vec3::Zero(),
                   const Vec3& eps_w = Vec3::Zero());

NavState propagate_mean(const NavState& x, const ImuSample& s, double dt,
                        const Vec3& gravity);

struct PropagationJacobians {
  MatX F_x;    // n × n, d mechanize / d state
  MatX F_eps;  // n × 6, d mechanize / d (ε_a, ε_ω) at ε = 0
};

// Closed-form Jacobians of mechanize, including the renormalization
// projection so they match finite differences of propagate_mean exactly.
PropagationJacobians propagation_jacobians(const NavState& x, const ImuSample& s,
                                           double dt, const Vec3& gravity);

// Covariance propagation: P ← F P Fᵀ + F_ε Q F_εᵀ with Q = diag(σ²)·dt
// (spectral-density convention), plus optional calibration random walk.
// Throws NonPositiveDt / GapTooLarge on bad timing and CovarianceNotPSD if
// the result loses positive semidefiniteness. When F_out is given, the
// state-transition Jacobian is copied there (for the smoother trace).
GaussianBelief ekf_predict(const GaussianBelief& b, const ImuSample& s,
                           const FilterConfig& cfg, MatX* F_out = nullptr);

}  // namespace odo

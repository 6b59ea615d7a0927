#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "odo/propagation.hpp"
#include "odo/updates.hpp"

namespace odo::selfcheck {

// Central-difference Jacobian of f at x.
MatX fd_jacobian(const std::function<VecX(const VecX&)>& f, const VecX& x,
                 double h);

// max over entries of |A − B| / max(1, |A|).
double max_rel_err(const MatX& A, const MatX& B);

// Closed-form propagation Jacobians against finite differences of the mean
// propagation itself; returns the worst relative error.
double check_Fx(const NavState& x, const ImuSample& s, double dt, const Vec3& g,
                double h = 1e-6);
double check_Feps(const NavState& x, const ImuSample& s, double dt, const Vec3& g,
                  double h = 1e-6);

// Measurement Jacobian H against finite differences of h.
double check_model(const GaussianBelief& b, const MeasurementModel& m,
                   double h = 1e-6);

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;
};

// Full battery: propagation Jacobians over random states (both Ω branches),
// every measurement model, Ω branch continuity, and a zero-noise round trip
// through the simulator and the filter. Deterministic for a given seed.
std::vector<CheckResult> run_all(uint64_t seed = 20240817);

}  // namespace odo::selfcheck

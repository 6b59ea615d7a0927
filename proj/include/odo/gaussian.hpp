#pragma once

#include "odo/core_math.hpp"

namespace odo {

// Flat-vector Gaussian machinery shared by the navigation filter, the
// smoother, and the linear sanity tests. Everything here is dimension-
// agnostic; the state semantics live one layer up.

// Force exact symmetry and add jitter on the diagonal.
void symmetrize(MatX& P, double jitter);

// Throws CovarianceNotPSD if an LDLT factorization reports a diagonal entry
// below -tol_scale * trace(P).
void check_psd(const MatX& P, double tol_scale = 1e-6);

struct UpdateStats {
  VecX innovation;
  MatX S;
  double nis = 0.0;
};

// Joseph-form measurement update in place:
//   S = H P Hᵀ + R, K = P Hᵀ S⁻¹,
//   m += K (y − h(m)), P = (I−KH) P (I−KH)ᵀ + K R Kᵀ.
// Throws SingularInnovation when cond(S) > 1e12.
UpdateStats joseph_update(VecX& m, MatX& P, const MatX& H, const MatX& R,
                          const VecX& y, const VecX& h_of_m, double jitter);

// Solve A x = b for symmetric positive definite A with diagonal
// equilibration; throws SingularPredictedCovariance when the equilibrated
// matrix has condition number above 1e12. Returns A⁻¹ B.
MatX spd_solve(const MatX& A, const MatX& B);

}  // namespace odo

#include "odo/gaussian.hpp"

#include <Eigen/Eigenvalues>

#include "odo/errors.hpp"

namespace odo {

void symmetrize(MatX& P, double jitter) {
  P = 0.5 * (P + P.transpose()).eval();
  P.diagonal().array() += jitter;
}

void check_psd(const MatX& P, double tol_scale) {
  Eigen::LDLT<MatX> ldlt(P);
  const double floor = -tol_scale * std::max(P.trace(), 1.0);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < floor) {
    throw CovarianceNotPSD("covariance lost positive semidefiniteness (min D = " +
                           std::to_string(ldlt.vectorD().minCoeff()) + ")");
  }
}

UpdateStats joseph_update(VecX& m, MatX& P, const MatX& H, const MatX& R,
                          const VecX& y, const VecX& h_of_m, double jitter) {
  const int n = static_cast<int>(m.size());
  const int d = static_cast<int>(y.size());
  if (H.rows() != d || H.cols() != n || R.rows() != d || R.cols() != d ||
      h_of_m.size() != d) {
    throw DimensionMismatch("measurement model dimensions inconsistent with state");
  }

  MatX S = H * P * H.transpose() + R;
  S = 0.5 * (S + S.transpose()).eval();

  // Innovation covariances are small (d ≤ 3 in practice); a dense
  // eigendecomposition is the cheapest robust conditioning check.
  Eigen::SelfAdjointEigenSolver<MatX> es(S);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 0.0) || lmax / lmin > 1e12) {
    throw SingularInnovation("innovation covariance ill-conditioned (eig range " +
                             std::to_string(lmin) + " .. " + std::to_string(lmax) + ")");
  }
  const MatX S_inv = es.eigenvectors() *
                     es.eigenvalues().cwiseInverse().asDiagonal() *
                     es.eigenvectors().transpose();

  const MatX K = P * H.transpose() * S_inv;
  UpdateStats stats;
  stats.innovation = y - h_of_m;
  stats.S = S;
  stats.nis = stats.innovation.dot(S_inv * stats.innovation);

  m += K * stats.innovation;
  const MatX IKH = MatX::Identity(n, n) - K * H;
  P = IKH * P * IKH.transpose() + K * R * K.transpose();
  symmetrize(P, jitter);
  return stats;
}

MatX spd_solve(const MatX& A, const MatX& B) {
  // Equilibrate so that structurally tiny directions (e.g. the quaternion
  // norm direction pinned at the jitter level) do not masquerade as rank
  // deficiency: solve (D⁻¹AD⁻¹)(D x) = D⁻¹ b with D = sqrt(diag(A)).
  const int n = static_cast<int>(A.rows());
  VecX d = A.diagonal().cwiseMax(0.0).cwiseSqrt();
  for (int i = 0; i < n; ++i) {
    if (d[i] <= 0.0) d[i] = 1.0;
  }
  const MatX As = d.cwiseInverse().asDiagonal() * A * d.cwiseInverse().asDiagonal();

  Eigen::SelfAdjointEigenSolver<MatX> es(As);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 0.0) || lmax / lmin > 1e12) {
    throw SingularPredictedCovariance(
        "predicted covariance not invertible (equilibrated eig range " +
        std::to_string(lmin) + " .. " + std::to_string(lmax) + ")");
  }
  const MatX X = Eigen::LDLT<MatX>(As).solve(d.cwiseInverse().asDiagonal() * B);
  return d.cwiseInverse().asDiagonal() * X;
}

}  // namespace odo

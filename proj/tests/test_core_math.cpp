#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "odo/core_math.hpp"
#include "oracles.hpp"

using namespace odo;
using oracles::TestRng;

TEST_CASE("quaternion product and rotation match Eigen") {
  TestRng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Quat a = oracles::axis_angle_quat(rng.gauss3(2.0));
    const Quat b = oracles::axis_angle_quat(rng.gauss3(2.0));
    const auto ea = oracles::to_eigen(a), eb = oracles::to_eigen(b);

    const Quat ab = a * b;
    const Eigen::Quaterniond eab = ea * eb;
    CHECK(ab.w() == doctest::Approx(eab.w()).epsilon(1e-14));
    CHECK((ab.vec() - eab.vec()).norm() < 1e-14);

    const Vec3 v = rng.gauss3(3.0);
    CHECK((a.rotate(v) - ea * v).norm() < 1e-12);
    CHECK((a.rotation_matrix() - ea.toRotationMatrix()).norm() < 1e-12);
  }
}

TEST_CASE("rotation of a non-unit quaternion is homogeneous of degree two") {
  TestRng rng(2);
  const Quat q = oracles::axis_angle_quat(rng.gauss3(1.0));
  const Vec3 v = rng.gauss3(1.0);
  const double s = 1.7;
  const Quat qs(s * q.w(), s * q.x(), s * q.y(), s * q.z());
  CHECK((qs.rotate(v) - s * s * q.rotate(v)).norm() < 1e-12);
}

TEST_CASE("axis-angle maps match Eigen and log inverts them") {
  TestRng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec3 phi = rng.gauss3(1.2);
    const Quat q = Quat::from_axis_angle(phi);
    const auto eq = oracles::to_eigen(oracles::axis_angle_quat(phi));
    CHECK(std::abs(q.w() - eq.w()) < 1e-14);
    CHECK((q.vec() - eq.vec()).norm() < 1e-14);

    if (phi.norm() < M_PI) {  // log picks the representative in [0, pi]
      CHECK((quat_log(q) - phi).norm() < 1e-10);
    }
  }
  // tiny angles go through the series branch of both maps
  const Vec3 tiny(3e-10, -2e-10, 1e-10);
  CHECK((quat_log(Quat::from_axis_angle(tiny)) - tiny).norm() < 1e-20);
  CHECK((quat_log(Quat::identity())).norm() == 0.0);
}

TEST_CASE("normalized() rejects the null quaternion") {
  CHECK_THROWS_AS(Quat(0, 0, 0, 0).normalized(), DegenerateQuaternion);
  CHECK_THROWS_AS(Quat(1e-200, 0, 0, 0).normalized(), DegenerateQuaternion);
  CHECK(Quat(2, 0, 0, 0).normalized().w() == doctest::Approx(1.0));
}

TEST_CASE("left-multiplication matrices reproduce the product") {
  TestRng rng(4);
  for (int i = 0; i < 50; ++i) {
    const Quat q = oracles::axis_angle_quat(rng.gauss3(2.0));
    const Quat p = oracles::axis_angle_quat(rng.gauss3(2.0));
    CHECK((quat_left_matrix(q) * p.coeffs() - (q * p).coeffs()).norm() < 1e-14);

    const Vec3 v = rng.gauss3(1.0);
    const Quat pv(0, v[0], v[1], v[2]);
    CHECK((pure_left_matrix(v) * p.coeffs() - (pv * p).coeffs()).norm() < 1e-14);
  }
}

TEST_CASE("attitude update matrix equals left-multiplication by the exponential") {
  TestRng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Vec3 phi = rng.gauss3(i % 3 == 0 ? 1e-9 : 1.5);
    const Quat q = oracles::axis_angle_quat(rng.gauss3(1.0));
    const Vec4 via_matrix = omega_update_matrix(phi) * q.coeffs();
    const Vec4 via_product = (oracles::axis_angle_quat(phi) * q).coeffs();
    CHECK((via_matrix - via_product).norm() < 1e-14);
  }
  CHECK((omega_update_matrix(Vec3::Zero()) - Mat4::Identity()).norm() == 0.0);
}

TEST_CASE("attitude update matrix is orthogonal (norm preserving)") {
  TestRng rng(6);
  for (int i = 0; i < 30; ++i) {
    const Mat4 O = omega_update_matrix(rng.gauss3(2.0));
    CHECK((O.transpose() * O - Mat4::Identity()).norm() < 1e-14);
  }
}

static Mat4 fd_omega_grad(const Vec3& phi, int i, double h) {
  Vec3 hi = Vec3::Zero(), lo = Vec3::Zero();
  hi[i] = h;
  lo[i] = -h;
  return (omega_update_matrix(phi + hi) - omega_update_matrix(phi + lo)) / (2 * h);
}

TEST_CASE("attitude update matrix gradient matches finite differences") {
  TestRng rng(7);
  for (int rep = 0; rep < 40; ++rep) {
    const Vec3 phi = rng.gauss3(1.0);
    const auto grad = omega_update_matrix_grad(phi);
    for (int i = 0; i < 3; ++i) {
      CHECK((grad[i] - fd_omega_grad(phi, i, 1e-6)).norm() < 1e-8);
    }
  }
}

TEST_CASE("attitude update matrix series branch joins the exact one smoothly") {
  // Evaluate the exact closed form just above the switch radius and compare
  // with the series evaluated at the same point.
  for (double n : {2e-8, 1e-7, 1e-6}) {
    const Vec3 phi = Vec3(1, -2, 2).normalized() * n;
    const Mat4 exact = omega_update_matrix(phi);
    const double half = n / 2;
    const Mat4 series = (1.0 - half * half / 2) * Mat4::Identity() +
                        0.5 * (1.0 - n * n / 24.0) * pure_left_matrix(phi);
    CHECK((exact - series).norm() < 1e-15);
  }
}

TEST_CASE("rotation jacobian wrt quaternion coefficients matches finite differences") {
  TestRng rng(8);
  for (int rep = 0; rep < 40; ++rep) {
    // deliberately not normalized: the formula is for the raw homogeneous map
    const Quat q(rng.gauss(), rng.gauss(), rng.gauss(), rng.gauss());
    const Vec3 a = rng.gauss3(3.0);
    const Mat34 J = rotate_jacobian_quat(q, a);
    for (int i = 0; i < 4; ++i) {
      Vec4 d = Vec4::Zero();
      d[i] = 1e-6;
      const Vec3 fd =
          (Quat(Vec4(q.coeffs() + d)).rotate(a) - Quat(Vec4(q.coeffs() - d)).rotate(a)) /
          2e-6;
      CHECK((J.col(i) - fd).norm() < 1e-7);
    }
  }
}

TEST_CASE("skew matrix reproduces the cross product") {
  TestRng rng(9);
  const Vec3 u = rng.gauss3(), v = rng.gauss3();
  CHECK((skew(u) * v - u.cross(v)).norm() < 1e-15);
  CHECK((skew(u) + skew(u).transpose()).norm() == 0.0);
}

TEST_CASE("wrap_angle lands in (-pi, pi] and preserves the angle mod 2pi") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(2 * M_PI) == doctest::Approx(0.0));
  TestRng rng(10);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(-50, 50);
    const double w = wrap_angle(a);
    CHECK(w > -M_PI - 1e-12);
    CHECK(w <= M_PI + 1e-12);
    CHECK(std::abs(std::remainder(a - w, 2 * M_PI)) < 1e-9);
  }
}

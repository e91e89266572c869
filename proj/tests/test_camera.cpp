#include <doctest.h>

#include <numbers>
#include <random>

#include "monogeo/camera.hpp"

using namespace monogeo;
using std::numbers::pi;

namespace {

CameraIntrinsics kitti_like() {
  auto k = CameraIntrinsics::pinhole(721.5377, 721.5377, 609.5593, 172.854);
  k.P(0, 3) = 44.85728;
  k.P(1, 3) = 0.2163791;
  return k;
}

}  // namespace

TEST_CASE("project_point") {
  const auto id = CameraIntrinsics::pinhole(1, 1, 0, 0);
  const Vector2 o = project_point(id, Vector3(0, 0, 1));
  CHECK(o.x() == 0);
  CHECK(o.y() == 0);

  const auto k = CameraIntrinsics::pinhole(700, 700, 600, 180);
  CHECK(project_point(k, Vector3(0, 1.5, 35)).y() == doctest::Approx(210).epsilon(1e-14));
  CHECK_THROWS_AS(project_point(k, Vector3(0, 0, -1)), BehindCameraError);
  CHECK_THROWS_AS(project_point(k, Vector3(0, 0, 0)), BehindCameraError);
}

TEST_CASE("project_point applies the fourth column") {
  const auto k = kitti_like();
  const Vector3 p(2, 1, 20);
  const Vector2 uv = project_point(k, p);
  CHECK(uv.x() == doctest::Approx((721.5377 * 2 + 609.5593 * 20 + 44.85728) / 20));
  CHECK(uv.y() == doctest::Approx((721.5377 * 1 + 172.854 * 20 + 0.2163791) / 20));
}

TEST_CASE("box_corners, axis aligned") {
  const Box3D b{1.5, 1.6, 3.9, Vector3(0, 1.5, 10), 0};
  const auto c = box_corners(b);
  for (int i = 0; i < 8; ++i) {
    const double y = c(1, i);
    CHECK((y == doctest::Approx(1.5) || y == doctest::Approx(0.0)));
    CHECK(std::abs(std::abs(c(0, i)) - 3.9 / 2) < 1e-15);
    CHECK(std::abs(std::abs(c(2, i) - 10) - 1.6 / 2) < 1e-12);
  }
  CHECK(c.block<1, 4>(1, 0).isConstant(1.5));
  CHECK(c.block<1, 4>(1, 4).isConstant(0.0));
}

TEST_CASE("box_corners at yaw pi negates x' and z'") {
  Box3D b{1.2, 1.7, 4.1, Vector3(3, 1.6, 25), 0};
  const auto c0 = box_corners(b);
  b.rotation_y = pi;
  const auto c1 = box_corners(b);
  const Vector3 t = b.location;
  for (int i = 0; i < 8; ++i) {
    CHECK(c1(0, i) - t.x() == doctest::Approx(-(c0(0, i) - t.x())));
    CHECK(c1(1, i) == doctest::Approx(c0(1, i)));
    CHECK(c1(2, i) - t.z() == doctest::Approx(-(c0(2, i) - t.z())));
  }
}

TEST_CASE("box_corners matches direct rotation at yaw pi/4") {
  const double yaw = pi / 4;
  const Box3D b{1, 1, 1, Vector3(0.5, 1, 8), yaw};
  const auto c = box_corners(b);
  const double cs = std::cos(yaw);
  const double sn = std::sin(yaw);
  // Written out by hand: x = c x' + s z', z = -s x' + c z'.
  std::vector<Vector3> expected;
  for (double xl : {0.5, -0.5}) {
    for (double yl : {0.0, -1.0}) {
      for (double zl : {0.5, -0.5}) expected.emplace_back(cs * xl + sn * zl + 0.5, yl + 1, -sn * xl + cs * zl + 8);
    }
  }
  for (const auto& e : expected) {
    double best = 1e9;
    for (int i = 0; i < 8; ++i) best = std::min(best, (c.col(i) - e).norm());
    CHECK(best < 1e-14);
  }
}

TEST_CASE("project_box near face with camera at mid-height") {
  const auto k = CameraIntrinsics::pinhole(721.5377, 721.5377, 609.5593, 172.854);
  const double H = 1.5;
  const double W = 1.6;
  const double z = 20;
  const Box3D b{H, W, 3.9, Vector3(0, H / 2, z), 0};
  const BBox2D bb = project_box(k, b);
  CHECK(bb.height() == doctest::Approx(721.5377 * H / (z - W / 2)).epsilon(1e-13));
}

TEST_CASE("project_box limits and symmetry") {
  // Bottom face in the camera's horizontal plane, so only H spreads it vertically.
  const auto flat = CameraIntrinsics::pinhole(721.5377, 721.5377, 609.5593, 172.854);
  Box3D b{1e-9, 1.6, 3.9, Vector3(1, 0, 30), 0.3};
  CHECK(project_box(flat, b).height() < 1e-6);

  const auto k = kitti_like();

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    Box3D r{1 + u(rng), 1.4 + u(rng), 3 + 2 * u(rng), Vector3(-10 + 20 * u(rng), 1 + u(rng), 8 + 50 * u(rng)),
            -pi + 2 * pi * u(rng)};
    const auto a = project_box(k, r);
    r.rotation_y += pi;
    const auto c = project_box(k, r);
    CHECK(std::abs(a.left - c.left) < 1e-9);
    CHECK(std::abs(a.right - c.right) < 1e-9);
    CHECK(std::abs(a.top - c.top) < 1e-9);
    CHECK(std::abs(a.bottom - c.bottom) < 1e-9);
  }
}

TEST_CASE("project_box errors and clipping") {
  auto k = kitti_like();
  const Box3D straddling{1.5, 1.6, 3.9, Vector3(0, 1.6, 1.0), pi / 2};
  CHECK_THROWS_AS(project_box(k, straddling), BehindCameraError);
  const Box3D wide{1.5, 1.6, 3.9, Vector3(-3, 1.6, 6), 0};
  CHECK_THROWS_AS(project_box(k, wide, true), ContractError);
  k.image_width = 1242;
  k.image_height = 375;
  const auto clipped = project_box(k, wide, true);
  const auto raw = project_box(k, wide);
  CHECK(raw.left < 0);
  CHECK(clipped.left == 0);
  CHECK(clipped.right == raw.right);
}

TEST_CASE("projected_center_height") {
  const auto k = CameraIntrinsics::pinhole(700, 700, 600, 180);
  CHECK(projected_center_height(k, Box3D{1.5, 1.6, 3.9, Vector3(0, 1.6, 35), 0}) == doctest::Approx(30));
  CHECK(projected_center_height(k, Box3D{0, 1.6, 3.9, Vector3(0, 1.6, 35), 0}) == 0);
  CHECK_THROWS_AS(projected_center_height(k, Box3D{1.5, 1.6, 3.9, Vector3(0, 1.6, -3), 0}), BehindCameraError);

  // Center column endpoints through project_point.
  const auto kk = kitti_like();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const Box3D b{0.5 + 2 * u(rng), 1.5, 4, Vector3(-15 + 30 * u(rng), 0.5 + 2 * u(rng), 3 + 70 * u(rng)), 0};
    const double bottom = project_point(kk, b.location).y();
    const double top = project_point(kk, Vector3(b.location - Vector3(0, b.height, 0))).y();
    const double hc = projected_center_height(kk, b);
    CHECK(std::abs((bottom - top) - hc) <= 1e-12 * hc);

    // Common scaling of H and Z leaves h_c unchanged.
    Box3D s = b;
    s.height *= 3.7;
    s.location.z() *= 3.7;
    CHECK(projected_center_height(kk, s) == doctest::Approx(hc).epsilon(1e-14));
  }
}

TEST_CASE("h_bbox is never below h_c") {
  const auto k = kitti_like();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const Box3D b{0.5 + 3 * u(rng), 0.5 + 2 * u(rng), 0.5 + 8 * u(rng),
                  Vector3(-20 + 40 * u(rng), -1 + 4 * u(rng), 1 + 80 * u(rng)), -pi + 2 * pi * u(rng)};
    if (box_corners(b).row(2).minCoeff() <= 0.05) continue;
    ++checked;
    CHECK(project_box(k, b).height() >= projected_center_height(k, b) * (1 - 1e-12));
  }
  CHECK(checked > 4000);
}

TEST_CASE("alpha_from_rotation") {
  CHECK(alpha_from_rotation(0.7, 0.0, 10.0) == doctest::Approx(0.7));
  CHECK(alpha_from_rotation(std::atan2(3.0, 12.0), 3.0, 12.0) == doctest::Approx(0.0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 1000; ++i) {
    const double ry = pi * u(rng);
    const double x = 30 * u(rng);
    const double z = 1 + 60 * (u(rng) + 1);
    const double a = alpha_from_rotation(ry, x, z);
    CHECK(a > -pi);
    CHECK(a <= pi);
    CHECK(std::abs(wrap_angle(a + std::atan2(x, z) - ry)) < 1e-12);
  }
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3 * pi) == doctest::Approx(pi));
}

TEST_CASE("single precision instantiation") {
  const auto k = CameraIntrinsicsT<float>::pinhole(700.f, 700.f, 600.f, 180.f);
  const Box3DT<float> b{1.5f, 1.6f, 3.9f, Vector3T<float>(0.f, 0.75f, 20.f), 0.f};
  CHECK(project_box(k, b).height() == doctest::Approx(700.0 * 1.5 / 19.2).epsilon(1e-5));
  CHECK(projected_center_height(k, b) == doctest::Approx(52.5f));
}

TEST_CASE("intrinsics validation") {
  auto k = CameraIntrinsics::pinhole(700, 700, 600, 180);
  CHECK_NOTHROW(k.validate());
  k.P(1, 1) = 0;
  CHECK_THROWS_AS(k.validate(), ContractError);
  k = CameraIntrinsics::pinhole(700, 700, 600, 180);
  k.image_width = 0;
  CHECK_THROWS_AS(k.validate(), ContractError);
}

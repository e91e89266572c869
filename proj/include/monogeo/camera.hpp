#pragma once

// Pinhole projection of points and 3D boxes in the KITTI rectified camera
// frame (x right, y down, z forward).

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "monogeo/error.hpp"

namespace monogeo {

template <typename Scalar>
using Vector3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vector2T = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix34T = Eigen::Matrix<Scalar, 3, 4>;

/// Camera intrinsics built around the full 3x4 KITTI `P2` matrix.
///
/// The fourth column carries the stereo baseline terms and is applied in
/// point projection. Height relations use the vertical focal length f_v.
template <typename Scalar>
struct CameraIntrinsicsT {
  Matrix34T<Scalar> P = Matrix34T<Scalar>::Zero();
  std::optional<int> image_width;
  std::optional<int> image_height;

  Scalar f_u() const { return P(0, 0); }
  Scalar f_v() const { return P(1, 1); }
  Scalar c_u() const { return P(0, 2); }
  Scalar c_v() const { return P(1, 2); }
  Vector3T<Scalar> tx_term() const { return P.col(3); }
  bool has_image_size() const { return image_width.has_value() && image_height.has_value(); }

  static CameraIntrinsicsT pinhole(Scalar f_u, Scalar f_v, Scalar c_u, Scalar c_v) {
    CameraIntrinsicsT k;
    k.P << f_u, 0, c_u, 0,
           0, f_v, c_v, 0,
           0, 0, 1, 0;
    return k;
  }

  void validate() const {
    using std::isfinite;
    detail::require(f_u() > 0, "intrinsics: f_u must be positive");
    detail::require(f_v() > 0, "intrinsics: f_v must be positive");
    detail::require(isfinite(c_u()) && isfinite(c_v()), "intrinsics: principal point must be finite");
    if (image_width) detail::require(*image_width > 0, "intrinsics: image_width must be positive");
    if (image_height) detail::require(*image_height > 0, "intrinsics: image_height must be positive");
  }
};

/// Oriented 3D box, KITTI convention: `location` is the bottom-face center,
/// `rotation_y` is the yaw about the camera y axis.
template <typename Scalar>
struct Box3DT {
  Scalar height = 0;
  Scalar width = 0;
  Scalar length = 0;
  Vector3T<Scalar> location = Vector3T<Scalar>::Zero();
  Scalar rotation_y = 0;

  Scalar volume() const { return height * width * length; }
  // y extent is [location.y - height, location.y] since y points down.
  Scalar top_y() const { return location.y() - height; }
  Scalar bottom_y() const { return location.y(); }
};

template <typename Scalar>
struct BBox2DT {
  Scalar left = 0;
  Scalar top = 0;
  Scalar right = 0;
  Scalar bottom = 0;

  Scalar width() const { return right - left; }
  Scalar height() const { return bottom - top; }
  Scalar area() const { return width() * height(); }
};

using CameraIntrinsics = CameraIntrinsicsT<double>;
using Box3D = Box3DT<double>;
using BBox2D = BBox2DT<double>;
using Vector3 = Vector3T<double>;
using Vector2 = Vector2T<double>;

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> rotation_about_y(Scalar yaw) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(yaw);
  const Scalar s = sin(yaw);
  Eigen::Matrix<Scalar, 3, 3> r;
  r << c, 0, s,
       0, 1, 0,
      -s, 0, c;
  return r;
}

/// Projects a camera-frame point through the full 3x4 matrix.
template <typename Scalar>
Vector2T<Scalar> project_point(const CameraIntrinsicsT<Scalar>& intr, const Vector3T<Scalar>& p) {
  if (!(p.z() > 0)) {
    throw BehindCameraError("project_point: point has z = " + std::to_string(static_cast<double>(p.z())) +
                            " <= 0");
  }
  const Vector3T<Scalar> h = intr.P.template leftCols<3>() * p + intr.P.col(3);
  if (!(h.z() > 0)) throw BehindCameraError("project_point: homogeneous depth <= 0");
  return h.template head<2>() / h.z();
}

/// The 8 corners of `box` in the camera frame, one per column.
/// Columns 0-3 are the bottom face (y = location.y), 4-7 the top face.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 8> box_corners(const Box3DT<Scalar>& box) {
  const Scalar l = box.length / 2;
  const Scalar w = box.width / 2;
  const Scalar h = box.height;
  Eigen::Matrix<Scalar, 3, 8> obj;
  obj << l, l, -l, -l, l, l, -l, -l,
         0, 0, 0, 0, -h, -h, -h, -h,
         w, -w, -w, w, w, -w, -w, w;
  return (rotation_about_y(box.rotation_y) * obj).colwise() + box.location;
}

/// Tight image rectangle around a set of camera-frame vertices (one per
/// column). Every vertex must lie in front of the camera.
template <typename Scalar, typename Derived>
BBox2DT<Scalar> project_vertices(const CameraIntrinsicsT<Scalar>& intr, const Eigen::MatrixBase<Derived>& vertices) {
  BBox2DT<Scalar> out{std::numeric_limits<Scalar>::infinity(), std::numeric_limits<Scalar>::infinity(),
                      -std::numeric_limits<Scalar>::infinity(), -std::numeric_limits<Scalar>::infinity()};
  for (Eigen::Index i = 0; i < vertices.cols(); ++i) {
    if (!(vertices(2, i) > 0)) {
      throw BehindCameraError("vertex " + std::to_string(i) + " has z = " +
                              std::to_string(static_cast<double>(vertices(2, i))) + " <= 0");
    }
    const Vector2T<Scalar> uv = project_point<Scalar>(intr, vertices.col(i));
    out.left = std::min(out.left, uv.x());
    out.right = std::max(out.right, uv.x());
    out.top = std::min(out.top, uv.y());
    out.bottom = std::max(out.bottom, uv.y());
  }
  return out;
}

template <typename Scalar>
BBox2DT<Scalar> clip_to_image(const BBox2DT<Scalar>& b, const CameraIntrinsicsT<Scalar>& intr) {
  if (!intr.has_image_size()) throw ContractError("clip_to_image: intrinsics carry no image size");
  const auto w = static_cast<Scalar>(*intr.image_width);
  const auto h = static_cast<Scalar>(*intr.image_height);
  BBox2DT<Scalar> c;
  c.left = std::clamp<Scalar>(b.left, 0, w);
  c.right = std::clamp<Scalar>(b.right, 0, w);
  c.top = std::clamp<Scalar>(b.top, 0, h);
  c.bottom = std::clamp<Scalar>(b.bottom, 0, h);
  return c;
}

/// Amodal 2D box of a 3D box; boxes with any corner behind the camera are
/// rejected rather than partially projected.
template <typename Scalar>
BBox2DT<Scalar> project_box(const CameraIntrinsicsT<Scalar>& intr, const Box3DT<Scalar>& box,
                            bool clip = false) {
  if (clip && !intr.has_image_size()) throw ContractError("project_box: clipping requires image dimensions");
  const BBox2DT<Scalar> b = project_vertices(intr, box_corners(box));
  return clip ? clip_to_image(b, intr) : b;
}

/// h_c: pixel height of a height-H segment through the box center, parallel
/// to the image plane.
template <typename Scalar>
Scalar projected_center_height(const CameraIntrinsicsT<Scalar>& intr, const Box3DT<Scalar>& box) {
  const Scalar z = box.location.z();
  if (!(z > 0)) throw BehindCameraError("projected_center_height: center depth <= 0");
  return intr.f_v() * box.height / z;
}

/// Wraps to (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  using std::remainder;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar r = remainder(a, 2 * pi);
  if (r <= -pi) r += 2 * pi;
  return r;
}

template <typename Scalar>
Scalar alpha_from_rotation(Scalar rotation_y, Scalar x, Scalar z) {
  using std::atan2;
  return wrap_angle<Scalar>(rotation_y - atan2(x, z));
}

}  // namespace monogeo

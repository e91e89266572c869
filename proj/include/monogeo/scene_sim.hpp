#pragma once

// Brute-force synthetic scenes: vehicle vertex sets placed on a flat ground
// plane, projected vertex by vertex. Used as the oracle for the closed forms
// in camera, geodepth and bias_model.

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "monogeo/bias_model.hpp"
#include "monogeo/camera.hpp"
#include "monogeo/geodepth.hpp"

namespace monogeo {

enum class VehicleProfile { cuboid, trapezoid_prism };

/// A cuboid, or a cuboid whose front (+x' end) is cut by a hood wedge: the
/// front face rises to H - hood_drop and the hood slopes up to full height
/// over hood_run. The rear is vertical.
struct VehicleShape {
  VehicleProfile profile = VehicleProfile::cuboid;
  double height = 1.5;
  double width = 1.6;
  double length = 3.9;
  double hood_run = 0;   // l_a
  double hood_drop = 0;

  void validate() const;
};

/// Object-frame vertices (x' forward, y' down, bottom face at y' = 0), one
/// per column: 8 for a cuboid, 10 for a trapezoid prism.
Eigen::Matrix3Xd make_vehicle(const VehicleShape& shape);

struct SimCamera {
  CameraIntrinsics intrinsics = CameraIntrinsics::pinhole(721.5377, 721.5377, 609.5593, 172.854);
  double camera_height = 1.65;  // ground plane at y = camera_height
};

struct SimPose {
  double yaw = 0;
  double center_depth = 20;
  double lateral_x = 0;
};

struct SimObservation {
  BBox2D bbox;
  double h_bbox = 0;
  double Z_center = 0;
  double Z_geo = 0;
  double Z_err = 0;
  double nearest_vertex_depth = 0;
};

SimObservation observe(const SimCamera& camera, const VehicleShape& vehicle, const SimPose& pose);

/// Yaw values 2*pi*k/steps, k = 0..steps-1.
std::vector<SimObservation> orientation_sweep(const SimCamera& camera, const VehicleShape& vehicle,
                                              double center_depth, double lateral_x, int steps);

/// Center depths evenly spaced over [z_min, z_max]; steps = 1 gives z_min.
std::vector<SimObservation> depth_sweep(const SimCamera& camera, const VehicleShape& vehicle, double yaw,
                                        double lateral_x, double z_min, double z_max, int steps);

/// Yaw that points the vehicle front at the camera (side view of the hood).
inline constexpr double kFacingCameraYaw = 1.5707963267948966;

/// Closed-form scenario for `vehicle` at yaw kFacingCameraYaw and the given
/// center depth: Z_w = center_depth - L/2, l_b1 = L/2 - l_a, l_b2 = L/2.
BiasScenario side_view_scenario(const SimCamera& camera, const VehicleShape& vehicle, double center_depth);

struct NormalParam {
  double mean = 0;
  double stddev = 0;
};

enum class DepthDistribution { uniform, normal };

struct FleetConfig {
  SimCamera camera;
  // When > 0, camera height = gamma * H per object; otherwise camera.camera_height.
  double gamma = 1.0;
  VehicleProfile profile = VehicleProfile::cuboid;
  NormalParam height{1.53, 0.14};
  NormalParam width{1.63, 0.10};
  NormalParam length{3.88, 0.43};
  double hood_run_fraction = 0.25;   // of L, trapezoid only
  double hood_drop_fraction = 0.35;  // of H, trapezoid only
  DepthDistribution depth_kind = DepthDistribution::uniform;
  double depth_a = 5;   // uniform: lower bound; normal: mean
  double depth_b = 60;  // uniform: upper bound; normal: stddev
  double depth_min = 5;
  double lateral_range = 0;  // lateral_x ~ U(-range, range)

  void validate() const;
};

/// n GeometryRecords from independently sampled vehicles. Each sample draws
/// from its own stream seeded by (seed, index), so results do not depend on
/// evaluation order.
std::vector<GeometryRecord> sample_fleet(std::uint64_t seed, int n, const FleetConfig& config);

}  // namespace monogeo

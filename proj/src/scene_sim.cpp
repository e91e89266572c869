#include "monogeo/scene_sim.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace monogeo {

void VehicleShape::validate() const {
  detail::require(height > 0 && width > 0 && length > 0, "VehicleShape: dims must be positive");
  if (profile == VehicleProfile::trapezoid_prism) {
    detail::require(hood_run > 0 && hood_run < length, "VehicleShape: need 0 < hood_run < length");
    detail::require(hood_drop > 0 && hood_drop < height, "VehicleShape: need 0 < hood_drop < height");
  }
}

Eigen::Matrix3Xd make_vehicle(const VehicleShape& s) {
  s.validate();
  const double l = s.length / 2;
  const double w = s.width / 2;
  const double h = s.height;
  if (s.profile == VehicleProfile::cuboid) {
    Eigen::Matrix3Xd v(3, 8);
    v << l, l, -l, -l, l, l, -l, -l,
         0, 0, 0, 0, -h, -h, -h, -h,
         w, -w, -w, w, w, -w, -w, w;
    return v;
  }
  const double front_top = -(h - s.hood_drop);
  const double hood_end = l - s.hood_run;
  Eigen::Matrix3Xd v(3, 10);
  // bottom (4), front face top (2), hood end (2), rear roof (2)
  v << l, l, -l, -l, l, l, hood_end, hood_end, -l, -l,
       0, 0, 0, 0, front_top, front_top, -h, -h, -h, -h,
       w, -w, -w, w, w, -w, w, -w, w, -w;
  return v;
}

SimObservation observe(const SimCamera& camera, const VehicleShape& vehicle, const SimPose& pose) {
  const Eigen::Matrix3Xd local = make_vehicle(vehicle);
  const Vector3 origin(pose.lateral_x, camera.camera_height, pose.center_depth);
  const Eigen::Matrix3Xd world = (rotation_about_y(pose.yaw) * local).colwise() + origin;

  const double z_min = world.row(2).minCoeff();
  const double z_max = world.row(2).maxCoeff();
  if (z_max <= 0) throw BehindCameraError("observe: vehicle is behind the camera");
  if (z_min <= 0) throw BehindCameraError("observe: vehicle intersects the camera plane");

  SimObservation obs;
  obs.bbox = project_vertices(camera.intrinsics, world);
  obs.h_bbox = obs.bbox.height();
  if (!(obs.h_bbox > 0)) throw DegenerateError("observe: projected box has zero height");
  obs.Z_center = pose.center_depth;
  obs.Z_geo = camera.intrinsics.f_v() * vehicle.height / obs.h_bbox;
  obs.Z_err = obs.Z_center - obs.Z_geo;
  obs.nearest_vertex_depth = z_min;
  return obs;
}

std::vector<SimObservation> orientation_sweep(const SimCamera& camera, const VehicleShape& vehicle,
                                              double center_depth, double lateral_x, int steps) {
  detail::require(steps >= 4, "orientation_sweep: steps must be >= 4");
  std::vector<SimObservation> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const double yaw = 2 * std::numbers::pi * k / steps;
    out.push_back(observe(camera, vehicle, {yaw, center_depth, lateral_x}));
  }
  return out;
}

std::vector<SimObservation> depth_sweep(const SimCamera& camera, const VehicleShape& vehicle, double yaw,
                                        double lateral_x, double z_min, double z_max, int steps) {
  detail::require(steps >= 1, "depth_sweep: steps must be >= 1");
  detail::require(z_min > 0 && z_max >= z_min, "depth_sweep: need 0 < z_min <= z_max");
  std::vector<SimObservation> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const double z = steps == 1 ? z_min : (k == steps - 1 ? z_max : z_min + (z_max - z_min) * k / (steps - 1));
    out.push_back(observe(camera, vehicle, {yaw, z, lateral_x}));
  }
  return out;
}

BiasScenario side_view_scenario(const SimCamera& camera, const VehicleShape& vehicle, double center_depth) {
  detail::require(vehicle.profile == VehicleProfile::trapezoid_prism, "side_view_scenario: needs a trapezoid prism");
  vehicle.validate();
  detail::require(vehicle.hood_run <= vehicle.length / 2, "side_view_scenario: hood_run must be <= L/2");
  BiasScenario s;
  s.camera_height = camera.camera_height;
  s.object_height = vehicle.height;
  s.wheel_depth = center_depth - vehicle.length / 2;
  s.hood_run = vehicle.hood_run;
  s.body_front = vehicle.length / 2 - vehicle.hood_run;
  s.body_rear = vehicle.length / 2;
  return s;
}

void FleetConfig::validate() const {
  camera.intrinsics.validate();
  detail::require(gamma > 0 || camera.camera_height > 0, "FleetConfig: need gamma > 0 or camera_height > 0");
  for (const auto* p : {&height, &width, &length}) {
    detail::require(p->mean > 0, "FleetConfig: dimension mean must be positive");
    detail::require(p->stddev >= 0, "FleetConfig: dimension stddev must be nonnegative");
  }
  if (profile == VehicleProfile::trapezoid_prism) {
    detail::require(hood_run_fraction > 0 && hood_run_fraction < 1, "FleetConfig: hood_run_fraction in (0,1)");
    detail::require(hood_drop_fraction > 0 && hood_drop_fraction < 1, "FleetConfig: hood_drop_fraction in (0,1)");
  }
  if (depth_kind == DepthDistribution::uniform) {
    detail::require(depth_a > 0 && depth_b >= depth_a, "FleetConfig: uniform depth needs 0 < a <= b");
  } else {
    detail::require(depth_b > 0, "FleetConfig: normal depth stddev must be positive");
  }
  detail::require(depth_min > 0, "FleetConfig: depth_min must be positive");
  detail::require(lateral_range >= 0, "FleetConfig: lateral_range must be nonnegative");
}

namespace {

double positive_normal(std::mt19937_64& rng, const NormalParam& p) {
  if (p.stddev == 0) return p.mean;
  std::normal_distribution<double> d(p.mean, p.stddev);
  for (int i = 0; i < 1000; ++i) {
    const double v = d(rng);
    if (v > 0.05 * p.mean) return v;
  }
  return p.mean;
}

}  // namespace

std::vector<GeometryRecord> sample_fleet(std::uint64_t seed, int n, const FleetConfig& config) {
  detail::require(n >= 1, "sample_fleet: n must be >= 1");
  config.validate();
  std::vector<GeometryRecord> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);

    VehicleShape shape;
    shape.profile = config.profile;
    shape.height = positive_normal(rng, config.height);
    shape.width = positive_normal(rng, config.width);
    shape.length = positive_normal(rng, config.length);
    if (shape.profile == VehicleProfile::trapezoid_prism) {
      shape.hood_run = config.hood_run_fraction * shape.length;
      shape.hood_drop = config.hood_drop_fraction * shape.height;
    }

    SimPose pose;
    pose.yaw = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(rng);
    const double reach = 0.5 * std::hypot(shape.length, shape.width) + 0.1;
    const double floor_depth = std::max(config.depth_min, reach);
    double z = 0;
    for (int tries = 0; tries < 1000; ++tries) {
      z = config.depth_kind == DepthDistribution::uniform
              ? std::uniform_real_distribution<double>(config.depth_a, config.depth_b)(rng)
              : std::normal_distribution<double>(config.depth_a, config.depth_b)(rng);
      if (z >= floor_depth) break;
    }
    pose.center_depth = std::max(z, floor_depth);
    if (config.lateral_range > 0) {
      pose.lateral_x = std::uniform_real_distribution<double>(-config.lateral_range, config.lateral_range)(rng);
    }

    SimCamera cam = config.camera;
    if (config.gamma > 0) cam.camera_height = config.gamma * shape.height;

    const SimObservation obs = observe(cam, shape, pose);
    out.push_back(make_geometry_record(cam.intrinsics.f_v(), shape.height, obs.h_bbox, pose.center_depth));
  }
  return out;
}

}  // namespace monogeo

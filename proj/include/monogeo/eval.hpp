#pragma once

// KITTI-protocol evaluation: rotated BEV / 3D IoU, difficulty levels and
// average precision at 40 recall positions.

#include <array>
#include <string>
#include <vector>

#include "monogeo/camera.hpp"
#include "monogeo/kitti_io.hpp"

namespace monogeo {

enum class Difficulty { easy = 0, moderate = 1, hard = 2, ignored = 3 };
enum class Metric { ap3d, apbev };

const char* to_string(Difficulty d);
const char* to_string(Metric m);

struct EvalConfig {
  std::string class_name = "Car";
  double iou_threshold = 0.7;
  Difficulty difficulty = Difficulty::moderate;
  Metric metric = Metric::ap3d;

  void validate() const;
};

inline constexpr int kRecallPositions = 40;
inline constexpr double kDontCareOverlap = 0.5;

struct PRPoint {
  double recall = 0;
  double precision = 0;
  double score = 0;  // lowest score admitted at this operating point
};

struct PRCurve {
  std::vector<PRPoint> points;
  std::array<double, kRecallPositions> sampled{};  // interpolated precision at recall k/40, k = 1..40
};

struct EvalResult {
  double average_precision = 0;  // fraction in [0,1]
  PRCurve curve;
  int num_gt = 0;
  int true_positives = 0;
  int false_positives = 0;
};

struct EvalFrame {
  std::vector<ObjectLabel> gts;
  std::vector<ObjectLabel> preds;
};

/// Area of the intersection of the two bird's-eye-view footprints (x-z plane).
double bev_intersection_area(const Box3D& a, const Box3D& b);
double bev_iou(const Box3D& a, const Box3D& b);
double iou_3d(const Box3D& a, const Box3D& b);

// Intersection area over the area of `pred` (KITTI's DontCare criterion).
double box_overlap_2d(const BBox2D& pred, const BBox2D& region);

/// Strictest level the ground-truth object qualifies for.
Difficulty assign_difficulty(const ObjectLabel& label);

EvalResult average_precision_r40(const std::vector<EvalFrame>& frames, const EvalConfig& config);

}  // namespace monogeo

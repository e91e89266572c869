#pragma once

// KITTI calibration / label / prediction text formats.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "monogeo/camera.hpp"
#include "monogeo/error.hpp"

namespace monogeo {

struct ObjectLabel {
  std::string class_name;
  double truncation = 0;
  int occlusion = 0;
  double alpha = 0;
  BBox2D bbox;
  double height = 0;  // H
  double width = 0;   // W
  double length = 0;  // L
  Vector3 location = Vector3::Zero();
  double rotation_y = 0;
  std::optional<double> score;

  bool is_dont_care() const { return class_name == "DontCare"; }
  // Usable by geometry ops: positive dims, in front of the camera, non-empty box.
  bool is_geometric() const {
    return !is_dont_care() && height > 0 && width > 0 && length > 0 && location.z() > 0 &&
           bbox.bottom > bbox.top && bbox.right > bbox.left;
  }
  Box3D box() const { return Box3D{height, width, length, location, rotation_y}; }
};

struct Frame {
  std::string id;
  CameraIntrinsics intrinsics;
  std::vector<ObjectLabel> labels;
};

struct Dataset {
  std::vector<Frame> frames;
};

/// One problem found while loading a split. `line` is 0 for file-level issues.
struct LoadIssue {
  std::string id;
  std::filesystem::path path;
  int line = 0;
  std::string message;
};

class DatasetError : public Error {
 public:
  explicit DatasetError(std::vector<LoadIssue> issues);
  const std::vector<LoadIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<LoadIssue> issues_;
};

CameraIntrinsics parse_calibration(std::string_view text);
// Emits a single `P2:` line with 12 significant digits per value.
std::string serialize_calibration(const CameraIntrinsics& intr);

ObjectLabel parse_label_line(std::string_view line);
std::string serialize_label(const ObjectLabel& label);       // 15 fields
std::string serialize_prediction(const ObjectLabel& label);  // 16 fields, requires score

/// Parses a whole label file; blank lines are skipped. Errors carry the
/// 1-based line number.
std::vector<ObjectLabel> parse_label_file(std::string_view text);

Dataset load_split(const std::filesystem::path& label_dir, const std::filesystem::path& calib_dir,
                   const std::vector<std::string>& ids);

// Frame ids of every `*.txt` in `dir`, sorted.
std::vector<std::string> list_frame_ids(const std::filesystem::path& dir);
// One frame id per line (KITTI ImageSets format).
std::vector<std::string> read_id_list(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace monogeo

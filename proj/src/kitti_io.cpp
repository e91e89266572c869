#include "monogeo/kitti_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "text_util.hpp"

namespace monogeo {

namespace {

std::string format_issues(const std::vector<LoadIssue>& issues) {
  std::ostringstream os;
  os << issues.size() << " problem(s) loading split:";
  for (const auto& i : issues) {
    os << "\n  [" << i.id << "] " << i.path.string();
    if (i.line > 0) os << ":" << i.line;
    os << ": " << i.message;
  }
  return os.str();
}

constexpr int kLabelFields = 15;
constexpr int kPredictionFields = 16;

}  // namespace

DatasetError::DatasetError(std::vector<LoadIssue> issues)
    : Error("dataset", format_issues(issues)), issues_(std::move(issues)) {}

CameraIntrinsics parse_calibration(std::string_view text) {
  for (std::string_view line : text_util::split_lines(text)) {
    auto tokens = text_util::split_ws(line);
    if (tokens.empty() || tokens.front() != "P2:") continue;
    if (tokens.size() != 13) {
      throw FormatError("calibration: P2 has " + std::to_string(tokens.size() - 1) + " values, expected 12");
    }
    CameraIntrinsics k;
    for (int i = 0; i < 12; ++i) {
      const auto v = text_util::parse_double(tokens[static_cast<std::size_t>(i) + 1]);
      if (!v) {
        throw FormatError("calibration: P2 value " + std::to_string(i) + " is not a number: '" +
                          std::string(tokens[static_cast<std::size_t>(i) + 1]) + "'");
      }
      k.P(i / 4, i % 4) = *v;
    }
    return k;
  }
  throw FormatError("calibration: missing key 'P2:'");
}

std::string serialize_calibration(const CameraIntrinsics& intr) {
  std::string out = "P2:";
  for (int i = 0; i < 12; ++i) {
    out += ' ';
    out += text_util::format_scientific(intr.P(i / 4, i % 4), 12);
  }
  out += '\n';
  return out;
}

ObjectLabel parse_label_line(std::string_view line) {
  const auto tok = text_util::split_ws(line);
  const int n = static_cast<int>(tok.size());
  if (n != kLabelFields && n != kPredictionFields) {
    throw FormatError("label: " + std::to_string(n) + " fields, expected 15 or 16");
  }
  std::array<double, kPredictionFields> v{};
  for (int i = 1; i < n; ++i) {
    const auto d = text_util::parse_double(tok[static_cast<std::size_t>(i)]);
    if (!d) {
      throw FormatError("label: field " + std::to_string(i) + " is not a number: '" +
                        std::string(tok[static_cast<std::size_t>(i)]) + "'");
    }
    v[static_cast<std::size_t>(i)] = *d;
  }
  if (v[2] != std::floor(v[2])) throw FormatError("label: field 2 (occluded) is not an integer");

  ObjectLabel l;
  l.class_name = std::string(tok[0]);
  l.truncation = v[1];
  l.occlusion = static_cast<int>(v[2]);
  l.alpha = v[3];
  l.bbox = BBox2D{v[4], v[5], v[6], v[7]};
  l.height = v[8];
  l.width = v[9];
  l.length = v[10];
  l.location = Vector3(v[11], v[12], v[13]);
  l.rotation_y = v[14];
  if (n == kPredictionFields) l.score = v[15];
  return l;
}

namespace {

std::string serialize_fields(const ObjectLabel& l) {
  using text_util::format_fixed;
  std::string out = l.class_name;
  auto put = [&out](double x) {
    out += ' ';
    out += format_fixed(x, 6);
  };
  put(l.truncation);
  out += ' ';
  out += std::to_string(l.occlusion);
  put(l.alpha);
  put(l.bbox.left);
  put(l.bbox.top);
  put(l.bbox.right);
  put(l.bbox.bottom);
  put(l.height);
  put(l.width);
  put(l.length);
  put(l.location.x());
  put(l.location.y());
  put(l.location.z());
  put(l.rotation_y);
  return out;
}

}  // namespace

std::string serialize_label(const ObjectLabel& label) { return serialize_fields(label); }

std::string serialize_prediction(const ObjectLabel& label) {
  if (!label.score) throw ContractError("serialize_prediction: label has no score");
  return serialize_fields(label) + ' ' + text_util::format_fixed(*label.score, 6);
}

std::vector<ObjectLabel> parse_label_file(std::string_view text) {
  std::vector<ObjectLabel> out;
  int line_no = 0;
  for (std::string_view line : text_util::split_lines(text)) {
    ++line_no;
    if (text_util::split_ws(line).empty()) continue;
    try {
      out.push_back(parse_label_line(line));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset load_split(const std::filesystem::path& label_dir, const std::filesystem::path& calib_dir,
                   const std::vector<std::string>& ids) {
  detail::require(!ids.empty(), "load_split: no frame ids given");
  {
    std::set<std::string> seen;
    for (const auto& id : ids) {
      detail::require(seen.insert(id).second, "load_split: duplicate frame id '" + id + "'");
    }
  }

  Dataset ds;
  ds.frames.reserve(ids.size());
  std::vector<LoadIssue> issues;
  for (const auto& id : ids) {
    Frame fr;
    fr.id = id;
    bool ok = true;

    const auto calib_path = calib_dir / (id + ".txt");
    if (!std::filesystem::is_regular_file(calib_path)) {
      issues.push_back({id, calib_path, 0, "missing calibration file"});
      ok = false;
    } else {
      try {
        fr.intrinsics = parse_calibration(read_text_file(calib_path));
        fr.intrinsics.validate();
      } catch (const Error& e) {
        issues.push_back({id, calib_path, 0, e.what()});
        ok = false;
      }
    }

    const auto label_path = label_dir / (id + ".txt");
    if (!std::filesystem::is_regular_file(label_path)) {
      issues.push_back({id, label_path, 0, "missing label file"});
      ok = false;
    } else {
      int line_no = 0;
      const std::string text = read_text_file(label_path);
      for (std::string_view line : text_util::split_lines(text)) {
        ++line_no;
        if (text_util::split_ws(line).empty()) continue;
        try {
          fr.labels.push_back(parse_label_line(line));
        } catch (const FormatError& e) {
          issues.push_back({id, label_path, line_no, e.what()});
          ok = false;
        }
      }
    }
    if (ok) ds.frames.push_back(std::move(fr));
  }
  if (!issues.empty()) throw DatasetError(std::move(issues));
  return ds;
}

std::vector<std::string> list_frame_ids(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("io", "not a directory: " + dir.string());
  std::vector<std::string> ids;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") ids.push_back(e.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::string> read_id_list(const std::filesystem::path& path) {
  std::vector<std::string> ids;
  const std::string text = read_text_file(path);
  for (std::string_view line : text_util::split_lines(text)) {
    auto tok = text_util::split_ws(line);
    if (!tok.empty()) ids.emplace_back(tok.front());
  }
  return ids;
}

}  // namespace monogeo

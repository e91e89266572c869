#include "monogeo/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "monogeo/bias_model.hpp"
#include "monogeo/eval.hpp"
#include "monogeo/geodepth.hpp"
#include "monogeo/kitti_io.hpp"
#include "monogeo/records_io.hpp"
#include "monogeo/scene_sim.hpp"
#include "monogeo/stats.hpp"
#include "monogeo/svg.hpp"
#include "text_util.hpp"

#ifndef MONOGEO_VERSION
#define MONOGEO_VERSION "0.0.0"
#endif

namespace monogeo::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered key/value echo of the effective configuration.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

std::string fmt(double v) { return text_util::format_exact(v); }

std::vector<std::string> metadata_lines(const std::string& sub, const ConfigEcho& echo) {
  std::string cfg = "config:";
  for (const auto& [k, v] : echo) cfg += " " + k + "=" + v;
  return {std::string("monogeo ") + MONOGEO_VERSION + " " + sub, cfg};
}

Json metadata_json(const std::string& sub, const ConfigEcho& echo) {
  Json cfg = Json::object();
  for (const auto& [k, v] : echo) cfg[k] = v;
  return Json{{"tool", "monogeo"}, {"version", MONOGEO_VERSION}, {"subcommand", sub}, {"config", cfg}};
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot write " + path);
  f << content;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// --- shared input handling -------------------------------------------------

struct SplitInputs {
  std::string labels;
  std::string calib;
  std::string ids;
};

void add_split_options(CLI::App* sub, SplitInputs& in) {
  sub->add_option("--labels", in.labels, "Label directory (one <id>.txt per frame) or a single label file");
  sub->add_option("--calib", in.calib, "Calibration directory or a single calibration file");
  sub->add_option("--ids", in.ids, "File with one frame id per line (default: every label file)")
      ->check(CLI::ExistingFile);
}

void resolve_split(SplitInputs& in) {
  if (const char* root = std::getenv(kKittiRootEnv); root && *root) {
    if (in.labels.empty()) in.labels = (fs::path(root) / "label_2").string();
    if (in.calib.empty()) in.calib = (fs::path(root) / "calib").string();
  }
  if (in.labels.empty() || in.calib.empty()) {
    throw UsageError(std::string("--labels and --calib are required (or set ") + kKittiRootEnv + ")");
  }
  for (const auto& p : {in.labels, in.calib}) {
    if (!fs::exists(p)) throw UsageError("path does not exist: " + p);
  }
}

Dataset load_inputs(const SplitInputs& in) {
  if (fs::is_regular_file(in.labels)) {
    if (!fs::is_regular_file(in.calib)) throw UsageError("--labels is a file, so --calib must be a file too");
    const auto dir_l = fs::path(in.labels).parent_path();
    const auto dir_c = fs::path(in.calib).parent_path();
    const auto id = fs::path(in.labels).stem().string();
    if (fs::path(in.calib).stem().string() == id) return load_split(dir_l, dir_c, {id});
    Frame fr;
    fr.id = id;
    fr.intrinsics = parse_calibration(read_text_file(in.calib));
    fr.intrinsics.validate();
    fr.labels = parse_label_file(read_text_file(in.labels));
    Dataset ds;
    ds.frames.push_back(std::move(fr));
    return ds;
  }
  const auto ids = in.ids.empty() ? list_frame_ids(in.labels) : read_id_list(in.ids);
  return load_split(in.labels, in.calib, ids);
}

// --- validate ----------------------------------------------------------------

struct ValidateOptions {
  SplitInputs split;
  bool predictions = false;
  std::string out;
};

int run_validate(ValidateOptions o, std::ostream& out) {
  resolve_split(o.split);
  ConfigEcho echo{{"labels", o.split.labels}, {"calib", o.split.calib}, {"ids", o.split.ids},
                  {"predictions", o.predictions ? "true" : "false"}};
  Json report;
  report["meta"] = metadata_json("validate", echo);
  Dataset ds;
  try {
    ds = load_inputs(o.split);
  } catch (const DatasetError& e) {
    Json issues = Json::array();
    for (const auto& i : e.issues()) {
      issues.push_back({{"id", i.id}, {"path", i.path.string()}, {"line", i.line}, {"message", i.message}});
    }
    report["ok"] = false;
    report["issues"] = issues;
    emit(o.out, dump(report), out);
    return kExitDomainError;
  }

  std::map<std::string, int> by_class;
  int objects = 0;
  int dont_care = 0;
  double max_alpha_dev = 0;
  Json problems = Json::array();
  for (const auto& fr : ds.frames) {
    for (std::size_t i = 0; i < fr.labels.size(); ++i) {
      const auto& l = fr.labels[i];
      ++objects;
      ++by_class[l.class_name];
      auto problem = [&](const std::string& msg) {
        problems.push_back({{"id", fr.id}, {"object", i}, {"message", msg}});
      };
      if (o.predictions && !l.score) problem("prediction without score");
      if (l.is_dont_care()) {
        ++dont_care;
        continue;
      }
      if (!(l.bbox.right > l.bbox.left) || !(l.bbox.bottom > l.bbox.top)) problem("degenerate 2D box");
      if (!(l.height > 0 && l.width > 0 && l.length > 0)) problem("nonpositive 3D dimensions");
      if (!(l.location.z() > 0)) problem("object behind the camera");
      if (l.truncation < 0 || l.truncation > 1) problem("truncation outside [0,1]");
      if (l.occlusion < 0 || l.occlusion > 3) problem("occlusion outside {0,1,2,3}");
      if (l.location.z() > 0) {
        const double a = alpha_from_rotation(l.rotation_y, l.location.x(), l.location.z());
        max_alpha_dev = std::max(max_alpha_dev, std::abs(wrap_angle(a - l.alpha)));
      }
    }
  }
  report["ok"] = problems.empty();
  report["frames"] = ds.frames.size();
  report["objects"] = objects;
  report["dont_care"] = dont_care;
  report["by_class"] = by_class;
  report["max_alpha_deviation"] = max_alpha_dev;
  report["problems"] = problems;
  emit(o.out, dump(report), out);
  return problems.empty() ? kExitOk : kExitDomainError;
}

// --- geomdepth ---------------------------------------------------------------

struct GeomDepthOptions {
  SplitInputs split;
  std::string class_name;
  std::string out;
};

int run_geomdepth(GeomDepthOptions o, std::ostream& out) {
  resolve_split(o.split);
  const Dataset ds = load_inputs(o.split);
  std::vector<GeometryRecord> records;
  int skipped = 0;
  for (const auto& fr : ds.frames) {
    for (const auto& l : fr.labels) {
      if (l.is_dont_care()) continue;
      if (!o.class_name.empty() && l.class_name != o.class_name) continue;
      if (!l.is_geometric()) {
        ++skipped;
        continue;
      }
      records.push_back(make_geometry_record(fr.intrinsics.f_v(), l.height, l.bbox.height(), l.location.z()));
    }
  }
  ConfigEcho echo{{"labels", o.split.labels}, {"calib", o.split.calib}, {"ids", o.split.ids},
                  {"class", o.class_name.empty() ? "*" : o.class_name}};
  auto meta = metadata_lines("geomdepth", echo);
  meta.push_back("frames=" + std::to_string(ds.frames.size()) + " rows=" + std::to_string(records.size()) +
                 " skipped_nongeometric=" + std::to_string(skipped));
  std::ostringstream os;
  write_geometry_csv(os, records, meta);
  emit(o.out, os.str(), out);
  return kExitOk;
}

// --- stats -------------------------------------------------------------------

struct StatsOptions {
  std::string in;
  std::string out;
  std::string format = "json";
  std::string svg_dir;
  int bins = 40;
};

Json box_json(const BoxplotSummary& b) {
  return Json{{"median", b.median},
              {"q1", b.q1},
              {"q3", b.q3},
              {"iqr", b.iqr},
              {"whisker_low", b.whisker_low},
              {"whisker_high", b.whisker_high},
              {"whisker_span", b.whisker_span()},
              {"outlier_count", b.outlier_count},
              {"skewness", b.skewness}};
}

int run_stats(const StatsOptions& o, std::ostream& out) {
  const auto records = read_geometry_csv(read_text_file(o.in));
  const DifficultyReport rep = difficulty_report(records);
  ConfigEcho echo{{"in", o.in}, {"format", o.format}, {"bins", std::to_string(o.bins)},
                  {"quantiles", kQuantileMethod}, {"whiskers", kWhiskerMethod}};

  if (!o.svg_dir.empty()) {
    fs::create_directories(o.svg_dir);
    const std::string comment = "<!-- monogeo " MONOGEO_VERSION " stats in=" + o.in + " -->\n";
    emit((fs::path(o.svg_dir) / "boxplot.svg").string(),
         comment + render_boxplot_svg(rep.attributes, "Standardized depth-related attributes"), out);
    for (const auto& name : kDifficultyAttributes) {
      const auto values = attribute_values(records, name);
      emit((fs::path(o.svg_dir) / ("hist_" + name + ".svg")).string(),
           comment + render_histogram_svg(histogram(values, o.bins), name), out);
    }
  }

  if (o.format == "svg") {
    emit(o.out, render_boxplot_svg(rep.attributes, "Standardized depth-related attributes"), out);
    return kExitOk;
  }
  if (o.format == "csv") {
    std::ostringstream os;
    for (const auto& m : metadata_lines("stats", echo)) os << "# " << m << '\n';
    os << "# ranking:";
    for (const auto& r : rep.ranking) os << ' ' << r;
    os << " matches_expected_order=" << (rep.matches_expected_order ? "true" : "false") << '\n';
    os << "attribute,raw_median,raw_iqr,std_median,std_iqr,std_whisker_low,std_whisker_high,outliers,skewness\n";
    for (const auto& a : rep.attributes) {
      const auto& b = a.standardized;
      os << a.name << ',' << fmt(a.raw_median) << ',' << fmt(a.raw_iqr) << ',' << fmt(b.median) << ','
         << fmt(b.iqr) << ',' << fmt(b.whisker_low) << ',' << fmt(b.whisker_high) << ',' << b.outlier_count << ','
         << fmt(b.skewness) << '\n';
    }
    emit(o.out, os.str(), out);
    return kExitOk;
  }

  Json j;
  j["meta"] = metadata_json("stats", echo);
  j["records"] = rep.record_count;
  Json attrs = Json::object();
  for (const auto& a : rep.attributes) {
    attrs[a.name] = Json{{"raw_median", a.raw_median},
                         {"raw_iqr", a.raw_iqr},
                         {"constant", a.constant},
                         {"standardized", box_json(a.standardized)}};
  }
  j["attributes"] = attrs;
  j["ranking"] = rep.ranking;
  j["expected_ranking"] = "Z > h_err > H_err > Z_err ~ H >> h_bbox";
  j["matches_expected_order"] = rep.matches_expected_order;
  j["median_Z_err"] = rep.median_Z_err;
  j["median_H_err"] = rep.median_H_err;
  emit(o.out, dump(j), out);
  return kExitOk;
}

// --- bias-sweep --------------------------------------------------------------

struct BiasOptions {
  std::string preset;
  std::string config;
  std::optional<double> camera_height, object_height, wheel_depth, hood_run, body_front, body_rear;
  std::string vary = "wheel_depth";
  double from = 10;
  double to = 100;
  int steps = 10;
  std::string format = "csv";
  std::string out;
};

const std::vector<std::string> kBiasKeys{"camera_height", "object_height", "wheel_depth",
                                         "hood_run",      "body_front",    "body_rear"};

BiasScenario bias_preset(const std::string& name) {
  // Body runs put the center at the middle of the length.
  if (name == "low-ratio") return {1.5, 1.8, 50, 1.0, 0.94, 1.94};
  if (name == "high-ratio") return {1.5, 1.25, 50, 0.5, 0.5, 1.0};
  throw UsageError("unknown preset '" + name + "' (expected low-ratio or high-ratio)");
}

void apply_bias_config(BiasScenario& s, const KeyValueConfig& cfg) {
  if (const auto bad = cfg.unknown_keys(kBiasKeys); !bad.empty()) {
    throw FormatError("bias config: unknown key '" + bad.front() + "'");
  }
  if (auto v = cfg.get_double("camera_height")) s.camera_height = *v;
  if (auto v = cfg.get_double("object_height")) s.object_height = *v;
  if (auto v = cfg.get_double("wheel_depth")) s.wheel_depth = *v;
  if (auto v = cfg.get_double("hood_run")) s.hood_run = *v;
  if (auto v = cfg.get_double("body_front")) s.body_front = *v;
  if (auto v = cfg.get_double("body_rear")) s.body_rear = *v;
}

int run_bias(const BiasOptions& o, std::ostream& out) {
  BiasScenario s = bias_preset(o.preset.empty() ? "low-ratio" : o.preset);
  if (!o.config.empty()) apply_bias_config(s, KeyValueConfig::parse(read_text_file(o.config)));
  if (o.camera_height) s.camera_height = *o.camera_height;
  if (o.object_height) s.object_height = *o.object_height;
  if (o.wheel_depth) s.wheel_depth = *o.wheel_depth;
  if (o.hood_run) s.hood_run = *o.hood_run;
  if (o.body_front) s.body_front = *o.body_front;
  if (o.body_rear) s.body_rear = *o.body_rear;

  const auto vary = o.vary == "gamma" ? BiasSweepVariable::gamma : BiasSweepVariable::wheel_depth;
  const auto series = bias_sweep(s, vary, o.from, o.to, o.steps);

  ConfigEcho echo{{"preset", o.preset.empty() ? "low-ratio" : o.preset},
                  {"config", o.config},
                  {"camera_height", fmt(s.camera_height)},
                  {"object_height", fmt(s.object_height)},
                  {"wheel_depth", fmt(s.wheel_depth)},
                  {"hood_run", fmt(s.hood_run)},
                  {"body_front", fmt(s.body_front)},
                  {"body_rear", fmt(s.body_rear)},
                  {"vary", o.vary},
                  {"from", fmt(o.from)},
                  {"to", fmt(o.to)},
                  {"steps", std::to_string(o.steps)}};

  if (o.format == "json") {
    Json rows = Json::array();
    for (const auto& p : series) {
      rows.push_back({{"varied_value", p.value},
                      {"regime", to_string(p.result.regime)},
                      {"l_bias", p.result.l_bias},
                      {"sigma", p.result.sigma},
                      {"Z_geo", p.result.Z_geo},
                      {"Z_err", p.result.Z_err}});
    }
    emit(o.out, dump(Json{{"meta", metadata_json("bias-sweep", echo)}, {"series", rows}}), out);
    return kExitOk;
  }
  std::ostringstream os;
  for (const auto& m : metadata_lines("bias-sweep", echo)) os << "# " << m << '\n';
  os << "varied_value,regime,l_bias,sigma,Z_geo,Z_err\n";
  for (const auto& p : series) {
    os << fmt(p.value) << ',' << to_string(p.result.regime) << ',' << fmt(p.result.l_bias) << ','
       << fmt(p.result.sigma) << ',' << fmt(p.result.Z_geo) << ',' << fmt(p.result.Z_err) << '\n';
  }
  emit(o.out, os.str(), out);
  return kExitOk;
}

// --- simulate ----------------------------------------------------------------

struct SimOptions {
  std::string config;
  bool depth_sweep = false;
  bool orientation_sweep = false;
  int fleet = 0;
  std::optional<std::string> profile;
  std::optional<double> gamma, camera_height, focal, c_u, c_v;
  std::optional<double> height, width, length, hood_run, hood_drop;
  std::optional<double> yaw, depth, lateral_x, z_min, z_max;
  std::optional<int> steps;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  std::string format = "csv";
  std::string out;
};

const std::vector<std::string> kSimKeys{
    "profile",     "gamma",       "camera_height", "focal",          "c_u",          "c_v",
    "height",      "width",       "length",        "hood_run",       "hood_drop",    "yaw",
    "depth",       "lateral_x",   "z_min",         "z_max",          "steps",        "height_std",
    "width_std",   "length_std",  "depth_kind",    "depth_a",        "depth_b",      "depth_min",
    "lateral_range", "hood_run_fraction", "hood_drop_fraction"};

struct SimSettings {
  SimCamera camera;
  double gamma = 1;
  VehicleShape shape;
  SimPose pose;
  double z_min = 5;
  double z_max = 80;
  int steps = 200;
  FleetConfig fleet;
  ConfigEcho echo;
};

VehicleProfile parse_profile(const std::string& s) {
  if (s == "cuboid") return VehicleProfile::cuboid;
  if (s == "trapezoid" || s == "trapezoid_prism") return VehicleProfile::trapezoid_prism;
  throw UsageError("unknown profile '" + s + "' (expected cuboid or trapezoid)");
}

SimSettings resolve_sim(const SimOptions& o) {
  KeyValueConfig cfg;
  if (!o.config.empty()) {
    cfg = KeyValueConfig::parse(read_text_file(o.config));
    if (const auto bad = cfg.unknown_keys(kSimKeys); !bad.empty()) {
      throw FormatError("simulate config: unknown key '" + bad.front() + "'");
    }
  }
  auto num = [&cfg](const std::optional<double>& flag, const char* key, double def) {
    if (flag) return *flag;
    if (auto v = cfg.get_double(key)) return *v;
    return def;
  };

  SimSettings s;
  const std::string profile = o.profile ? *o.profile : cfg.get("profile").value_or("cuboid");
  s.shape.profile = parse_profile(profile);
  s.shape.height = num(o.height, "height", 1.53);
  s.shape.width = num(o.width, "width", 1.63);
  s.shape.length = num(o.length, "length", 3.88);
  const bool trap = s.shape.profile == VehicleProfile::trapezoid_prism;
  s.shape.hood_run = num(o.hood_run, "hood_run", trap ? 0.9 : 0.0);
  s.shape.hood_drop = num(o.hood_drop, "hood_drop", trap ? 0.5 : 0.0);

  const double f = num(o.focal, "focal", 721.5377);
  s.camera.intrinsics = CameraIntrinsics::pinhole(f, f, num(o.c_u, "c_u", 609.5593), num(o.c_v, "c_v", 172.854));
  s.gamma = num(o.gamma, "gamma", 1.0);
  s.camera.camera_height = s.gamma > 0 ? s.gamma * s.shape.height : num(o.camera_height, "camera_height", 1.65);
  if (s.gamma <= 0 && s.camera.camera_height <= 0) throw UsageError("need --gamma > 0 or --camera-height > 0");

  s.pose.yaw = num(o.yaw, "yaw", trap ? kFacingCameraYaw : 0.0);
  s.pose.center_depth = num(o.depth, "depth", 35.0);
  s.pose.lateral_x = num(o.lateral_x, "lateral_x", 0.0);
  s.z_min = num(o.z_min, "z_min", 5.0);
  s.z_max = num(o.z_max, "z_max", 80.0);
  s.steps = o.steps ? *o.steps : static_cast<int>(num(std::nullopt, "steps", 200));

  s.fleet.camera = s.camera;
  s.fleet.gamma = s.gamma;
  s.fleet.profile = s.shape.profile;
  s.fleet.height = {s.shape.height, num(std::nullopt, "height_std", 0.14)};
  s.fleet.width = {s.shape.width, num(std::nullopt, "width_std", 0.10)};
  s.fleet.length = {s.shape.length, num(std::nullopt, "length_std", 0.43)};
  s.fleet.hood_run_fraction = num(std::nullopt, "hood_run_fraction", 0.25);
  s.fleet.hood_drop_fraction = num(std::nullopt, "hood_drop_fraction", 0.35);
  const std::string dk = cfg.get("depth_kind").value_or("uniform");
  if (dk != "uniform" && dk != "normal") throw FormatError("simulate config: depth_kind must be uniform or normal");
  s.fleet.depth_kind = dk == "uniform" ? DepthDistribution::uniform : DepthDistribution::normal;
  s.fleet.depth_a = num(std::nullopt, "depth_a", 5.0);
  s.fleet.depth_b = num(std::nullopt, "depth_b", 60.0);
  s.fleet.depth_min = num(std::nullopt, "depth_min", 5.0);
  s.fleet.lateral_range = num(std::nullopt, "lateral_range", 0.0);

  s.echo = {{"config", o.config},
            {"profile", profile},
            {"gamma", fmt(s.gamma)},
            {"camera_height", fmt(s.camera.camera_height)},
            {"focal", fmt(f)},
            {"height", fmt(s.shape.height)},
            {"width", fmt(s.shape.width)},
            {"length", fmt(s.shape.length)},
            {"hood_run", fmt(s.shape.hood_run)},
            {"hood_drop", fmt(s.shape.hood_drop)},
            {"yaw", fmt(s.pose.yaw)},
            {"depth", fmt(s.pose.center_depth)},
            {"lateral_x", fmt(s.pose.lateral_x)},
            {"z_min", fmt(s.z_min)},
            {"z_max", fmt(s.z_max)},
            {"steps", std::to_string(s.steps)},
            {"seed", std::to_string(o.seed)},
            {"tolerance", fmt(o.tolerance)}};
  return s;
}

struct SimRow {
  double yaw, depth, lateral_x;
  SimObservation obs;
};

std::string series_output(const std::string& mode, const SimOptions& o, const SimSettings& s,
                          const std::vector<SimRow>& rows, const Json& report) {
  if (o.format == "json") {
    Json arr = Json::array();
    for (const auto& r : rows) {
      arr.push_back({{"yaw", r.yaw},
                     {"center_depth", r.depth},
                     {"lateral_x", r.lateral_x},
                     {"bbox", {r.obs.bbox.left, r.obs.bbox.top, r.obs.bbox.right, r.obs.bbox.bottom}},
                     {"h_bbox", r.obs.h_bbox},
                     {"Z_geo", r.obs.Z_geo},
                     {"Z_err", r.obs.Z_err},
                     {"nearest_vertex_depth", r.obs.nearest_vertex_depth}});
    }
    return dump(Json{{"meta", metadata_json("simulate " + mode, s.echo)}, {"report", report}, {"series", arr}});
  }
  std::ostringstream os;
  for (const auto& m : metadata_lines("simulate " + mode, s.echo)) os << "# " << m << '\n';
  os << "# report:";
  for (const auto& [k, v] : report.items()) os << ' ' << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump());
  os << '\n';
  os << "yaw,center_depth,lateral_x,left,top,right,bottom,h_bbox,Z_center,Z_geo,Z_err,nearest_vertex_depth\n";
  for (const auto& r : rows) {
    os << fmt(r.yaw) << ',' << fmt(r.depth) << ',' << fmt(r.lateral_x) << ',' << fmt(r.obs.bbox.left) << ','
       << fmt(r.obs.bbox.top) << ',' << fmt(r.obs.bbox.right) << ',' << fmt(r.obs.bbox.bottom) << ','
       << fmt(r.obs.h_bbox) << ',' << fmt(r.obs.Z_center) << ',' << fmt(r.obs.Z_geo) << ',' << fmt(r.obs.Z_err)
       << ',' << fmt(r.obs.nearest_vertex_depth) << '\n';
  }
  return os.str();
}

int run_simulate(const SimOptions& o, std::ostream& out) {
  const int modes = int(o.depth_sweep) + int(o.orientation_sweep) + int(o.fleet > 0);
  if (modes > 1) throw UsageError("choose one of --depth-sweep, --orientation-sweep, --fleet");
  const SimSettings s = resolve_sim(o);

  if (o.fleet > 0) {
    const auto records = sample_fleet(o.seed, o.fleet, s.fleet);
    if (o.format == "json") {
      Json arr = Json::array();
      for (const auto& r : records) {
        arr.push_back({{"f", r.f}, {"H", r.H}, {"h_bbox", r.h_bbox}, {"h_c", r.h_c}, {"Z_gt", r.Z_gt},
                       {"Z_geo", r.Z_geo}, {"Z_err", r.Z_err}, {"H_err", r.H_err}, {"h_err", r.h_err}});
      }
      emit(o.out, dump(Json{{"meta", metadata_json("simulate fleet", s.echo)}, {"records", arr}}), out);
    } else {
      std::ostringstream os;
      auto meta = metadata_lines("simulate fleet", s.echo);
      meta.push_back("fleet=" + std::to_string(o.fleet));
      write_geometry_csv(os, records, meta);
      emit(o.out, os.str(), out);
    }
    return kExitOk;
  }

  std::vector<SimRow> rows;
  Json report = Json::object();
  if (o.orientation_sweep) {
    const auto series = orientation_sweep(s.camera, s.shape, s.pose.center_depth, s.pose.lateral_x, s.steps);
    double max_dev = 0;
    for (std::size_t k = 0; k < series.size(); ++k) {
      const double yaw = 2 * std::numbers::pi * static_cast<double>(k) / s.steps;
      rows.push_back({yaw, s.pose.center_depth, s.pose.lateral_x, series[k]});
      const double nearest_face = (s.shape.width * std::abs(std::cos(yaw)) + s.shape.length * std::abs(std::sin(yaw))) / 2;
      max_dev = std::max(max_dev, std::abs(series[k].Z_err - nearest_face));
    }
    if (s.shape.profile == VehicleProfile::cuboid && s.gamma == 1) {
      report["max_abs_deviation_from_nearest_face"] = max_dev;
      report["matches_nearest_face"] = max_dev < o.tolerance;
    }
  } else if (o.depth_sweep) {
    const auto series = depth_sweep(s.camera, s.shape, s.pose.yaw, s.pose.lateral_x, s.z_min, s.z_max, s.steps);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double bias_dev = 0;
    const bool side_view = s.shape.profile == VehicleProfile::trapezoid_prism && s.pose.yaw == kFacingCameraYaw &&
                           s.shape.hood_run <= s.shape.length / 2;
    for (const auto& obs : series) {
      rows.push_back({s.pose.yaw, obs.Z_center, s.pose.lateral_x, obs});
      lo = std::min(lo, obs.Z_err);
      hi = std::max(hi, obs.Z_err);
      if (side_view) {
        const auto closed = analyze_bias(side_view_scenario(s.camera, s.shape, obs.Z_center));
        bias_dev = std::max(bias_dev, std::abs(closed.Z_geo - obs.Z_geo));
      }
    }
    report["z_err_spread"] = hi - lo;
    report["tolerance"] = o.tolerance;
    report["perspective_invariant"] = (hi - lo) < o.tolerance;
    if (side_view) report["max_abs_deviation_from_bias_model"] = bias_dev;
  } else {
    const auto obs = observe(s.camera, s.shape, s.pose);
    rows.push_back({s.pose.yaw, s.pose.center_depth, s.pose.lateral_x, obs});
  }
  const std::string mode = o.orientation_sweep ? "orientation-sweep" : o.depth_sweep ? "depth-sweep" : "single";
  emit(o.out, series_output(mode, o, s, rows, report), out);
  return kExitOk;
}

// --- eval --------------------------------------------------------------------

struct EvalOptions {
  std::string gt;
  std::string pred;
  std::string class_name = "Car";
  std::optional<double> iou;
  std::string metric = "3d";
  std::string ids;
  std::string pr_csv;
  std::string out;
};

int run_eval(const EvalOptions& o, std::ostream& out) {
  const auto ids = o.ids.empty() ? list_frame_ids(o.gt) : read_id_list(o.ids);
  std::vector<EvalFrame> frames;
  frames.reserve(ids.size());
  for (const auto& id : ids) {
    EvalFrame fr;
    const auto gt_path = fs::path(o.gt) / (id + ".txt");
    try {
      fr.gts = parse_label_file(read_text_file(gt_path));
    } catch (const FormatError& e) {
      throw FormatError(gt_path.string() + ": " + e.what());
    }
    const auto pred_path = fs::path(o.pred) / (id + ".txt");
    if (fs::is_regular_file(pred_path)) {
      try {
        fr.preds = parse_label_file(read_text_file(pred_path));
      } catch (const FormatError& e) {
        throw FormatError(pred_path.string() + ": " + e.what());
      }
    }
    frames.push_back(std::move(fr));
  }

  EvalConfig cfg;
  cfg.class_name = o.class_name;
  cfg.iou_threshold = o.iou ? *o.iou : (o.class_name == "Car" ? 0.7 : 0.5);
  cfg.metric = o.metric == "bev" ? Metric::apbev : Metric::ap3d;

  ConfigEcho echo{{"gt", o.gt},         {"pred", o.pred},       {"class", cfg.class_name},
                  {"iou", fmt(cfg.iou_threshold)}, {"metric", to_string(cfg.metric)}, {"ids", o.ids}};
  Json j;
  j["meta"] = metadata_json("eval", echo);
  j["class"] = cfg.class_name;
  j["metric"] = to_string(cfg.metric);
  j["iou_threshold"] = cfg.iou_threshold;
  j["frames"] = frames.size();
  std::ostringstream pr;
  if (!o.pr_csv.empty()) {
    for (const auto& m : metadata_lines("eval", echo)) pr << "# " << m << '\n';
    pr << "difficulty,k,recall,interpolated_precision\n";
  }
  Json num_gt = Json::object();
  for (const Difficulty d : {Difficulty::easy, Difficulty::moderate, Difficulty::hard}) {
    cfg.difficulty = d;
    const EvalResult r = average_precision_r40(frames, cfg);
    j[to_string(d)] = 100.0 * r.average_precision;
    num_gt[to_string(d)] = r.num_gt;
    if (!o.pr_csv.empty()) {
      for (int k = 1; k <= kRecallPositions; ++k) {
        pr << to_string(d) << ',' << k << ',' << fmt(static_cast<double>(k) / kRecallPositions) << ','
           << fmt(r.curve.sampled[static_cast<std::size_t>(k - 1)]) << '\n';
      }
    }
  }
  j["num_gt"] = num_gt;
  if (!o.pr_csv.empty()) emit(o.pr_csv, pr.str(), out);
  emit(o.out, dump(j), out);
  return kExitOk;
}

void report_error(std::ostream& err, bool json, const std::string& kind, const std::string& message) {
  if (json) {
    err << Json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
  } else {
    err << "error: " << message << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"monogeo: geometric depth, geometry-error and KITTI evaluation toolkit", "monogeo"};
  app.set_version_flag("--version", MONOGEO_VERSION);
  app.require_subcommand(1);
  bool json_errors = false;
  app.add_flag("--json-errors", json_errors, "Print errors as JSON on stderr");

  ValidateOptions vo;
  auto* validate = app.add_subcommand("validate", "Parse and sanity-check a KITTI label/calibration split");
  add_split_options(validate, vo.split);
  validate->add_flag("--pred", vo.predictions, "Inputs are predictions (scores required)");
  validate->add_option("--out", vo.out, "Report path (JSON; default stdout)");

  GeomDepthOptions go;
  auto* geomdepth = app.add_subcommand(
      "geomdepth", "Export one GeometryRecord per non-DontCare object as CSV\n  columns: f,H,h_bbox,h_c,Z_gt,Z_geo,Z_err,H_err,h_err");
  add_split_options(geomdepth, go.split);
  geomdepth->add_option("--class", go.class_name, "Only objects of this class (default: all)");
  geomdepth->add_option("--out", go.out, "CSV path (default stdout)");

  StatsOptions so;
  auto* stats = app.add_subcommand("stats", "Difficulty report (boxplot statistics) over a GeometryRecord CSV");
  stats->add_option("--in", so.in, "GeometryRecord CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", so.out, "Report path (default stdout)");
  stats->add_option("--format", so.format, "json | csv (attribute,raw_median,raw_iqr,std_median,std_iqr,"
                                           "std_whisker_low,std_whisker_high,outliers,skewness) | svg")
      ->check(CLI::IsMember({"json", "csv", "svg"}));
  stats->add_option("--svg-dir", so.svg_dir, "Also write boxplot.svg and hist_<attr>.svg here");
  stats->add_option("--bins", so.bins, "Histogram bins")->check(CLI::PositiveNumber);

  BiasOptions bo;
  auto* bias = app.add_subcommand(
      "bias-sweep", "Sweep the closed-form wheel bias\n  columns: varied_value,regime,l_bias,sigma,Z_geo,Z_err");
  bias->add_option("--preset", bo.preset, "low-ratio (default) | high-ratio")
      ->check(CLI::IsMember({"low-ratio", "high-ratio"}));
  bias->add_option("--config", bo.config, "key = value file (camera_height, object_height, wheel_depth, hood_run, "
                                          "body_front, body_rear)")
      ->check(CLI::ExistingFile);
  bias->add_option("--camera-height", bo.camera_height);
  bias->add_option("--object-height", bo.object_height);
  bias->add_option("--wheel-depth", bo.wheel_depth);
  bias->add_option("--hood-run", bo.hood_run);
  bias->add_option("--body-front", bo.body_front);
  bias->add_option("--body-rear", bo.body_rear);
  bias->add_option("--vary", bo.vary, "wheel_depth | gamma")->check(CLI::IsMember({"wheel_depth", "gamma"}));
  bias->add_option("--from", bo.from);
  bias->add_option("--to", bo.to);
  bias->add_option("--steps", bo.steps)->check(CLI::Range(2, 1000000));
  bias->add_option("--format", bo.format)->check(CLI::IsMember({"csv", "json"}));
  bias->add_option("--out", bo.out);

  SimOptions mo;
  auto* sim = app.add_subcommand(
      "simulate",
      "Brute-force projection of synthetic vehicles\n  sweep columns: yaw,center_depth,lateral_x,left,top,right,bottom,"
      "h_bbox,Z_center,Z_geo,Z_err,nearest_vertex_depth\n  fleet columns: f,H,h_bbox,h_c,Z_gt,Z_geo,Z_err,H_err,h_err");
  sim->add_option("--config", mo.config, "key = value file; flags override it")->check(CLI::ExistingFile);
  sim->add_flag("--depth-sweep", mo.depth_sweep, "Sweep center depth over [z-min, z-max]");
  sim->add_flag("--orientation-sweep", mo.orientation_sweep, "Sweep yaw over [0, 2pi)");
  sim->add_option("--fleet", mo.fleet, "Sample N random vehicles and emit GeometryRecords")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--profile", mo.profile, "cuboid | trapezoid");
  sim->add_option("--gamma", mo.gamma, "Camera height / object height (0: use --camera-height)");
  sim->add_option("--camera-height", mo.camera_height);
  sim->add_option("--focal", mo.focal);
  sim->add_option("--cu", mo.c_u);
  sim->add_option("--cv", mo.c_v);
  sim->add_option("--height", mo.height);
  sim->add_option("--width", mo.width);
  sim->add_option("--length", mo.length);
  sim->add_option("--hood-run", mo.hood_run);
  sim->add_option("--hood-drop", mo.hood_drop);
  sim->add_option("--yaw", mo.yaw);
  sim->add_option("--depth", mo.depth, "Center depth for single/orientation runs");
  sim->add_option("--lateral-x", mo.lateral_x);
  sim->add_option("--z-min", mo.z_min);
  sim->add_option("--z-max", mo.z_max);
  sim->add_option("--steps", mo.steps);
  sim->add_option("--seed", mo.seed, "Fleet RNG seed (default 0)");
  sim->add_option("--tolerance", mo.tolerance, "Invariance tolerance in meters (default 1e-9)");
  sim->add_option("--format", mo.format)->check(CLI::IsMember({"csv", "json"}));
  sim->add_option("--out", mo.out);

  EvalOptions eo;
  auto* ev = app.add_subcommand("eval", "KITTI R40 average precision (JSON report, AP in percent)");
  ev->add_option("--gt", eo.gt, "Ground-truth label directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--pred", eo.pred, "Prediction directory (missing files = no detections)")
      ->required()
      ->check(CLI::ExistingDirectory);
  ev->add_option("--class", eo.class_name, "Class name (case-sensitive)");
  ev->add_option("--iou", eo.iou, "IoU threshold (default 0.7 for Car, 0.5 otherwise)");
  ev->add_option("--metric", eo.metric, "3d | bev")->check(CLI::IsMember({"3d", "bev"}));
  ev->add_option("--ids", eo.ids)->check(CLI::ExistingFile);
  ev->add_option("--pr-csv", eo.pr_csv, "Write the 40 interpolated precisions per difficulty");
  ev->add_option("--out", eo.out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  const bool wants_json = std::find(args.begin(), args.end(), "--json-errors") != args.end();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << MONOGEO_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, wants_json, "usage", e.what());
    if (!wants_json) err << app.help();
    return kExitUsage;
  }

  try {
    if (*validate) return run_validate(vo, out);
    if (*geomdepth) return run_geomdepth(go, out);
    if (*stats) return run_stats(so, out);
    if (*bias) return run_bias(bo, out);
    if (*sim) return run_simulate(mo, out);
    if (*ev) return run_eval(eo, out);
  } catch (const UsageError& e) {
    report_error(err, json_errors, "usage", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    report_error(err, json_errors, e.kind(), e.what());
    return kExitDomainError;
  } catch (const std::exception& e) {
    report_error(err, json_errors, "internal", e.what());
    return kExitDomainError;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace monogeo::cli

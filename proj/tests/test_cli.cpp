#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "monogeo/cli.hpp"
#include "monogeo/kitti_io.hpp"
#include "monogeo/records_io.hpp"
#include "text_util.hpp"

using namespace monogeo;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const char* kCalib =
    "P2: 7.215377e+02 0 6.095593e+02 4.485728e+01 0 7.215377e+02 1.728540e+02 2.163791e-01 0 0 1 2.745884e-03\n";

const char* kFrame0 =
    "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n"
    "Car 0.00 0 1.85 387.63 181.54 423.81 203.12 1.67 1.87 3.69 -16.53 2.39 58.49 1.57\n"
    "DontCare -1 -1 -10 503.89 169.71 590.61 190.13 -1 -1 -1 -1000 -1000 -1000 -10\n";
const char* kFrame1 =
    "Pedestrian 0.00 0 -0.20 712.40 143.00 810.73 307.92 1.89 0.48 1.20 1.84 1.47 8.41 0.01\n"
    "Car 0.00 1 2.04 665.45 166.37 718.39 197.02 1.48 1.60 3.56 3.14 1.71 34.60 2.12\n";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("monogeo_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const fs::path& rel, const std::string& text) const {
    fs::create_directories((path / rel).parent_path());
    std::ofstream(path / rel, std::ios::binary) << text;
    return path / rel;
  }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

TempDir kitti_split() {
  TempDir d;
  d.write("training/label_2/000000.txt", kFrame0);
  d.write("training/label_2/000001.txt", kFrame1);
  d.write("training/calib/000000.txt", kCalib);
  d.write("training/calib/000001.txt", kCalib);
  return d;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  for (const auto& line : text_util::split_lines(csv)) {
    if (!line.empty() && line.front() != '#') rows.emplace_back(line);
  }
  return rows;
}

}  // namespace

TEST_CASE("usage errors exit with 2 and print help") {
  auto r = run({});
  CHECK(r.code == cli::kExitUsage);
  r = run({"bias-sweep", "--no-such-flag"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("Usage") != std::string::npos);
  r = run({"frobnicate"});
  CHECK(r.code == cli::kExitUsage);
  r = run({"bias-sweep", "--format", "xml"});
  CHECK(r.code == cli::kExitUsage);

  r = run({"--json-errors", "bias-sweep", "--no-such-flag"});
  CHECK(r.code == cli::kExitUsage);
  const auto j = Json::parse(r.err);
  CHECK(j["error"]["kind"] == "usage");

  r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("geomdepth") != std::string::npos);
  CHECK(run({"--version"}).out == "1.0.0\n");
}

TEST_CASE("domain errors exit with 1") {
  auto r = run({"bias-sweep", "--wheel-depth", "-1"});
  CHECK(r.code == cli::kExitDomainError);
  CHECK(r.err.find("wheel_depth") != std::string::npos);

  r = run({"--json-errors", "bias-sweep", "--hood-run", "0"});
  CHECK(r.code == cli::kExitDomainError);
  const auto j = Json::parse(r.err);
  CHECK(j["error"]["kind"] == "contract");
  CHECK(j["error"]["message"].get<std::string>().find("hood_run") != std::string::npos);
}

TEST_CASE("bias-sweep reproduces the low-ratio worked case") {
  const auto r = run({"bias-sweep"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# monogeo 1.0.0 bias-sweep\n", 0) == 0);
  const auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 11);
  CHECK(rows[0] == "varied_value,regime,l_bias,sigma,Z_geo,Z_err");
  bool found = false;
  for (const auto& row : rows) {
    const auto f = text_util::split_char(row, ',');
    if (f[0] != "50") continue;
    found = true;
    CHECK(f[1] == "low");
    CHECK(std::abs(*text_util::parse_double(f[3]) - 0.84) <= 0.005);
    CHECK(std::abs(*text_util::parse_double(f[2]) - 0.16) <= 0.005);
  }
  CHECK(found);

  const auto high = run({"bias-sweep", "--preset", "high-ratio", "--format", "json", "--from", "50", "--to", "60",
                         "--steps", "2"});
  REQUIRE(high.code == 0);
  const auto j = Json::parse(high.out);
  CHECK(j["series"][0]["regime"] == "high");
  CHECK(std::abs(j["series"][0]["sigma"].get<double>() - 0.19) <= 0.005);
  CHECK(std::abs(j["series"][0]["l_bias"].get<double>() - 0.38) <= 0.005);
}

TEST_CASE("bias-sweep config files and overrides") {
  TempDir d;
  const auto cfg = d.write("s.cfg", "camera_height = 1.5\nobject_height = 1.8  # gamma 5/6\n");
  auto r = run({"bias-sweep", "--config", cfg.string(), "--vary", "gamma", "--from", "0.5", "--to", "1.5", "--steps",
                "3", "--hood-run", "0.8"});
  REQUIRE(r.code == 0);
  const auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[2].rfind("1,unity,0,", 0) == 0);
  CHECK(r.out.find("hood_run=0.8") != std::string::npos);

  const auto bad = d.write("bad.cfg", "camera_hieght = 1.5\n");
  r = run({"bias-sweep", "--config", bad.string()});
  CHECK(r.code == cli::kExitDomainError);
  CHECK(r.err.find("camera_hieght") != std::string::npos);
}

TEST_CASE("simulate depth sweep reports perspective invariance") {
  const auto r = run({"simulate", "--depth-sweep", "--gamma", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("perspective_invariant=true") != std::string::npos);
  const auto json = run({"simulate", "--depth-sweep", "--gamma", "1", "--format", "json"});
  const auto j = Json::parse(json.out);
  CHECK(j["report"]["z_err_spread"].get<double>() < 1e-9);
  CHECK(j["report"]["perspective_invariant"] == true);
  CHECK(j["series"].size() == 200);

  const auto low = run({"simulate", "--depth-sweep", "--gamma", "0.8333333333333334", "--profile", "trapezoid",
                        "--height", "1.8", "--hood-run", "1", "--hood-drop", "0.6", "--format", "json"});
  REQUIRE(low.code == 0);
  const auto jl = Json::parse(low.out);
  CHECK(jl["report"]["perspective_invariant"] == false);
  CHECK(jl["report"]["max_abs_deviation_from_bias_model"].get<double>() < 1e-9);
}

TEST_CASE("simulate orientation sweep and single observation") {
  auto r = run({"simulate", "--orientation-sweep", "--steps", "72", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["series"].size() == 72);
  CHECK(j["report"]["matches_nearest_face"] == true);

  r = run({"simulate", "--width", "1.6", "--depth", "35", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto s = Json::parse(r.out);
  CHECK(std::abs(s["series"][0]["Z_err"].get<double>() - 0.8) < 1e-9);

  CHECK(run({"simulate", "--depth-sweep", "--orientation-sweep"}).code == cli::kExitUsage);
  CHECK(run({"simulate", "--depth", "-5"}).code == cli::kExitDomainError);
}

TEST_CASE("fleet output is deterministic and feeds stats") {
  TempDir d;
  const auto a = run({"simulate", "--fleet", "500", "--seed", "42"});
  const auto b = run({"simulate", "--fleet", "500", "--seed", "42"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != run({"simulate", "--fleet", "500", "--seed", "43"}).out);
  const auto records = read_geometry_csv(a.out);
  CHECK(records.size() == 500);

  const auto csv = d.write("fleet.csv", a.out);
  const auto svg_dir = d.path / "svg";
  const auto s1 = run({"stats", "--in", csv.string(), "--svg-dir", svg_dir.string()});
  const auto s2 = run({"stats", "--in", csv.string()});
  REQUIRE(s1.code == 0);
  CHECK(s1.out == s2.out);
  const auto j = Json::parse(s1.out);
  CHECK(j["records"] == 500);
  CHECK(j["ranking"].size() == 6);
  CHECK(j["meta"]["config"]["quantiles"] == "type-7 linear interpolation");
  CHECK(fs::exists(svg_dir / "boxplot.svg"));
  CHECK(fs::exists(svg_dir / "hist_H_err.svg"));
  CHECK(read_text_file(svg_dir / "boxplot.svg").find("<svg") != std::string::npos);

  const auto table = run({"stats", "--in", csv.string(), "--format", "csv"});
  REQUIRE(table.code == 0);
  CHECK(data_rows(table.out).size() == 7);
  const auto svg = run({"stats", "--in", csv.string(), "--format", "svg"});
  CHECK(svg.out.rfind("<svg", 0) == 0);

  const auto few = d.write("few.csv", run({"simulate", "--fleet", "50"}).out);
  CHECK(run({"stats", "--in", few.string()}).code == cli::kExitDomainError);
}

TEST_CASE("geomdepth emits one row per non-DontCare object") {
  const auto d = kitti_split();
  const auto labels = (d.path / "training/label_2").string();
  const auto calib = (d.path / "training/calib").string();
  const auto out = d.path / "g.csv";
  const auto before = read_text_file(d.path / "training/label_2/000000.txt");
  auto r = run({"geomdepth", "--labels", labels, "--calib", calib, "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(read_text_file(d.path / "training/label_2/000000.txt") == before);
  const auto text = read_text_file(out);
  const auto rows = data_rows(text);
  REQUIRE(rows.size() == 5);  // header + 4 objects
  CHECK(rows[0] == kGeometryRecordColumns);
  const auto recs = read_geometry_csv(text);
  CHECK(recs[0].f == 721.5377);
  CHECK(recs[0].Z_gt == 46.70);
  CHECK(recs[0].h_bbox == doctest::Approx(200.12 - 173.33));
  CHECK(recs[0].Z_geo == doctest::Approx(721.5377 * 1.65 / (200.12 - 173.33)));

  r = run({"geomdepth", "--labels", labels, "--calib", calib, "--class", "Car"});
  CHECK(data_rows(r.out).size() == 4);

  // Single-file form.
  r = run({"geomdepth", "--labels", labels + "/000001.txt", "--calib", calib + "/000001.txt"});
  REQUIRE(r.code == 0);
  CHECK(data_rows(r.out).size() == 3);
}

TEST_CASE("dataset root from the environment") {
  const auto d = kitti_split();
  ::setenv(cli::kKittiRootEnv, (d.path / "training").c_str(), 1);
  const auto r = run({"validate"});
  ::unsetenv(cli::kKittiRootEnv);
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["ok"] == true);
  CHECK(j["frames"] == 2);
  CHECK(j["objects"] == 5);
  CHECK(j["dont_care"] == 1);
  CHECK(run({"validate"}).code == cli::kExitUsage);
}

TEST_CASE("validate reports load problems") {
  const auto d = kitti_split();
  d.write("training/label_2/000001.txt", std::string(kFrame1) + "Car 1 2 3\n");
  fs::remove(d.path / "training/calib/000000.txt");
  const auto r = run({"validate", "--labels", (d.path / "training/label_2").string(), "--calib",
                      (d.path / "training/calib").string()});
  CHECK(r.code == cli::kExitDomainError);
  const auto j = Json::parse(r.out);
  CHECK(j["ok"] == false);
  REQUIRE(j["issues"].size() == 2);
  CHECK(j["issues"][1]["line"] == 3);

  const auto p = run({"validate", "--pred", "--labels", (d.path / "training/label_2/000000.txt").string(), "--calib",
                      (d.path / "training/calib/000001.txt").string()});
  CHECK(p.code == cli::kExitDomainError);  // ground truth has no scores
}

TEST_CASE("eval against a perfect prediction set") {
  const auto d = kitti_split();
  std::string preds;
  for (const auto& l : parse_label_file(kFrame0)) {
    if (l.is_dont_care()) continue;
    auto s = l;
    s.score = 0.9;
    preds += serialize_prediction(s) + "\n";
  }
  d.write("pred/000000.txt", preds);  // 000001 has no prediction file
  const auto gt = (d.path / "training/label_2").string();
  const auto pred = (d.path / "pred").string();
  const auto pr = d.path / "pr.csv";
  auto r = run({"eval", "--gt", gt, "--pred", pred, "--pr-csv", pr.string()});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["iou_threshold"] == 0.7);
  // Easy needs 40 px; the 21.6 px car is below every height cut.
  CHECK(j["num_gt"]["easy"] == 0);
  CHECK(j["num_gt"]["moderate"] == 2);
  CHECK(j["num_gt"]["hard"] == 2);
  CHECK(j["moderate"].get<double>() < 100.0);
  CHECK(data_rows(read_text_file(pr)).size() == 1 + 3 * 40);

  d.write("ids.txt", "000000\n");
  r = run({"eval", "--gt", gt, "--pred", pred, "--ids", (d.path / "ids.txt").string(), "--metric", "bev"});
  const auto k = Json::parse(r.out);
  CHECK(k["metric"] == "APBEV");
  CHECK(k["moderate"].get<double>() == doctest::Approx(100.0));
  CHECK(k["hard"].get<double>() == doctest::Approx(100.0));

  r = run({"eval", "--gt", gt, "--pred", gt});
  CHECK(r.code == cli::kExitDomainError);
  r = run({"eval", "--gt", gt, "--pred", pred, "--class", "Pedestrian"});
  CHECK(Json::parse(r.out)["iou_threshold"] == 0.5);
}

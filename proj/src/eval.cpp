#include "monogeo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace monogeo {

const char* to_string(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return "easy";
    case Difficulty::moderate: return "moderate";
    case Difficulty::hard: return "hard";
    case Difficulty::ignored: return "ignored";
  }
  return "?";
}

const char* to_string(Metric m) { return m == Metric::ap3d ? "AP3D" : "APBEV"; }

void EvalConfig::validate() const {
  detail::require(iou_threshold > 0 && iou_threshold <= 1, "EvalConfig: iou_threshold must be in (0,1]");
  detail::require(difficulty != Difficulty::ignored, "EvalConfig: difficulty must be easy, moderate or hard");
}

namespace {

using Polygon = std::vector<Vector2>;

double signed_area(const Polygon& p) {
  double a = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % p.size()];
    a += u.x() * v.y() - v.x() * u.y();
  }
  return a / 2;
}

// Counter-clockwise footprint in (x, z).
Polygon footprint(const Box3D& b) {
  detail::require(b.width > 0 && b.length > 0, "bev: degenerate (zero-area) footprint");
  const auto c = box_corners(b);
  Polygon p{{c(0, 0), c(2, 0)}, {c(0, 1), c(2, 1)}, {c(0, 2), c(2, 2)}, {c(0, 3), c(2, 3)}};
  if (signed_area(p) < 0) std::reverse(p.begin(), p.end());
  return p;
}

double cross(const Vector2& a, const Vector2& b, const Vector2& p) {
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

// Sutherland-Hodgman: clip `subject` by the convex CCW polygon `clip`.
Polygon clip_convex(Polygon subject, const Polygon& clip) {
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    const Vector2& a = clip[e];
    const Vector2& b = clip[(e + 1) % clip.size()];
    Polygon out;
    out.reserve(subject.size() + 2);
    for (std::size_t i = 0; i < subject.size(); ++i) {
      const Vector2& p = subject[i];
      const Vector2& q = subject[(i + 1) % subject.size()];
      const double dp = cross(a, b, p);
      const double dq = cross(a, b, q);
      if (dp >= 0) out.push_back(p);
      if ((dp >= 0) != (dq >= 0)) {
        const double t = dp / (dp - dq);
        out.push_back(p + t * (q - p));
      }
    }
    subject = std::move(out);
  }
  return subject;
}

double vertical_overlap(const Box3D& a, const Box3D& b) {
  return std::max(0.0, std::min(a.bottom_y(), b.bottom_y()) - std::max(a.top_y(), b.top_y()));
}

constexpr std::array<double, 3> kMinHeight{40, 25, 25};
constexpr std::array<int, 3> kMaxOcclusion{0, 1, 2};
constexpr std::array<double, 3> kMaxTruncation{0.15, 0.30, 0.50};

bool is_neighbor_class(const std::string& gt, const std::string& target) {
  return (target == "Car" && gt == "Van") || (target == "Pedestrian" && gt == "Person_sitting");
}

enum class GtRole { valid, ignore, other };

}  // namespace

double bev_intersection_area(const Box3D& a, const Box3D& b) {
  const Polygon inter = clip_convex(footprint(a), footprint(b));
  return inter.size() < 3 ? 0.0 : std::abs(signed_area(inter));
}

double bev_iou(const Box3D& a, const Box3D& b) {
  const double inter = bev_intersection_area(a, b);
  const double uni = a.width * a.length + b.width * b.length - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d(const Box3D& a, const Box3D& b) {
  detail::require(a.height > 0 && b.height > 0, "iou_3d: degenerate (zero-volume) box");
  const double inter = bev_intersection_area(a, b) * vertical_overlap(a, b);
  const double uni = a.volume() + b.volume() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double box_overlap_2d(const BBox2D& pred, const BBox2D& region) {
  const double w = std::min(pred.right, region.right) - std::max(pred.left, region.left);
  const double h = std::min(pred.bottom, region.bottom) - std::max(pred.top, region.top);
  if (w <= 0 || h <= 0 || pred.area() <= 0) return 0;
  return w * h / pred.area();
}

Difficulty assign_difficulty(const ObjectLabel& label) {
  const double h = label.bbox.height();
  for (int lvl = 0; lvl < 3; ++lvl) {
    if (h >= kMinHeight[lvl] && label.occlusion <= kMaxOcclusion[lvl] && label.truncation <= kMaxTruncation[lvl]) {
      return static_cast<Difficulty>(lvl);
    }
  }
  return Difficulty::ignored;
}

EvalResult average_precision_r40(const std::vector<EvalFrame>& frames, const EvalConfig& config) {
  config.validate();
  const int level = static_cast<int>(config.difficulty);
  auto overlap = [&config](const Box3D& p, const Box3D& g) {
    return config.metric == Metric::ap3d ? iou_3d(p, g) : bev_iou(p, g);
  };

  struct Scored {
    double score;
    bool tp;
  };
  std::vector<Scored> scored;
  int num_gt = 0;

  for (const auto& fr : frames) {
    std::vector<GtRole> role(fr.gts.size(), GtRole::other);
    for (std::size_t i = 0; i < fr.gts.size(); ++i) {
      const auto& g = fr.gts[i];
      if (g.class_name == config.class_name) {
        const Difficulty d = assign_difficulty(g);
        role[i] = d != Difficulty::ignored && static_cast<int>(d) <= level ? GtRole::valid : GtRole::ignore;
      } else if (is_neighbor_class(g.class_name, config.class_name)) {
        role[i] = GtRole::ignore;
      }
      if (role[i] == GtRole::valid) ++num_gt;
    }

    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < fr.preds.size(); ++j) {
      const auto& p = fr.preds[j];
      if (!p.score) throw ContractError("average_precision_r40: prediction without score");
      if (p.class_name == config.class_name) order.push_back(j);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&fr](std::size_t a, std::size_t b) { return *fr.preds[a].score > *fr.preds[b].score; });

    std::vector<bool> taken(fr.gts.size(), false);
    for (std::size_t j : order) {
      const auto& p = fr.preds[j];
      if (p.bbox.height() < kMinHeight[static_cast<std::size_t>(level)]) continue;
      const Box3D pb = p.box();

      auto best_match = [&](GtRole want) -> std::ptrdiff_t {
        std::ptrdiff_t best = -1;
        double best_iou = 0;
        for (std::size_t i = 0; i < fr.gts.size(); ++i) {
          if (taken[i] || role[i] != want) continue;
          const double o = overlap(pb, fr.gts[i].box());
          if (o >= config.iou_threshold && o > best_iou) {
            best_iou = o;
            best = static_cast<std::ptrdiff_t>(i);
          }
        }
        return best;
      };

      if (const auto i = best_match(GtRole::valid); i >= 0) {
        taken[static_cast<std::size_t>(i)] = true;
        scored.push_back({*p.score, true});
        continue;
      }
      if (const auto i = best_match(GtRole::ignore); i >= 0) {
        taken[static_cast<std::size_t>(i)] = true;
        continue;
      }
      const bool in_dont_care = std::any_of(fr.gts.begin(), fr.gts.end(), [&p](const ObjectLabel& g) {
        return g.is_dont_care() && box_overlap_2d(p.bbox, g.bbox) >= kDontCareOverlap;
      });
      if (!in_dont_care) scored.push_back({*p.score, false});
    }
  }

  EvalResult res;
  res.num_gt = num_gt;
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });

  int tp = 0;
  int fp = 0;
  std::vector<int> tp_at;  // true positives at each operating point
  for (std::size_t i = 0; i < scored.size();) {
    const double s = scored[i].score;
    while (i < scored.size() && scored[i].score == s) {
      (scored[i].tp ? tp : fp) += 1;
      ++i;
    }
    const double recall = num_gt > 0 ? static_cast<double>(tp) / num_gt : 0.0;
    res.curve.points.push_back({recall, static_cast<double>(tp) / (tp + fp), s});
    tp_at.push_back(tp);
  }
  res.true_positives = tp;
  res.false_positives = fp;
  if (num_gt == 0) return res;

  for (int k = 1; k <= kRecallPositions; ++k) {
    double best = 0;
    for (std::size_t i = 0; i < res.curve.points.size(); ++i) {
      // recall >= k/40, compared exactly in integers
      if (static_cast<long long>(tp_at[i]) * kRecallPositions >= static_cast<long long>(k) * num_gt) {
        best = std::max(best, res.curve.points[i].precision);
      }
    }
    res.curve.sampled[static_cast<std::size_t>(k - 1)] = best;
  }
  res.average_precision =
      std::accumulate(res.curve.sampled.begin(), res.curve.sampled.end(), 0.0) / kRecallPositions;
  return res;
}

}  // namespace monogeo

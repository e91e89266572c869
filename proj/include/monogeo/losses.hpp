#pragma once

// Training-loss math as pure functions: region Dice loss, Laplacian
// uncertainty depth loss with its analytic gradients, and the weighted sum.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "monogeo/camera.hpp"
#include "monogeo/error.hpp"

namespace monogeo {

/// Per-cell region probabilities; rows index image rows (height).
template <typename Scalar>
using MaskGridT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using MaskGrid = MaskGridT<double>;

/// Binary mask on a `grid_width` x `grid_height` grid whose cells are
/// `stride` pixels wide. A cell is 1 iff its center lies in some box
/// (left/top inclusive, right/bottom exclusive).
template <typename Scalar>
MaskGridT<Scalar> region_mask(std::span<const BBox2DT<Scalar>> boxes, int grid_width, int grid_height, int stride) {
  detail::require(stride >= 1, "region_mask: stride must be >= 1");
  detail::require(grid_width > 0 && grid_height > 0, "region_mask: grid must be positive");
  MaskGridT<Scalar> m = MaskGridT<Scalar>::Zero(grid_height, grid_width);
  for (const auto& b : boxes) {
    for (int i = 0; i < grid_height; ++i) {
      const Scalar cy = (Scalar(i) + Scalar(0.5)) * Scalar(stride);
      if (cy < b.top || cy >= b.bottom) continue;
      for (int j = 0; j < grid_width; ++j) {
        const Scalar cx = (Scalar(j) + Scalar(0.5)) * Scalar(stride);
        if (cx >= b.left && cx < b.right) m(i, j) = 1;
      }
    }
  }
  return m;
}

inline constexpr double kDiceEpsilon = 1e-6;

template <typename Scalar>
Scalar dice_loss(const MaskGridT<Scalar>& p, const MaskGridT<Scalar>& g, Scalar eps = Scalar(kDiceEpsilon)) {
  if (p.rows() != g.rows() || p.cols() != g.cols()) {
    throw ContractError("dice_loss: dimension mismatch " + std::to_string(p.rows()) + "x" +
                        std::to_string(p.cols()) + " vs " + std::to_string(g.rows()) + "x" +
                        std::to_string(g.cols()));
  }
  detail::require(p.size() > 0, "dice_loss: empty grid");
  detail::require((p >= 0).all() && (p <= 1).all(), "dice_loss: predictions outside [0,1]");
  detail::require((g >= 0).all() && (g <= 1).all(), "dice_loss: targets outside [0,1]");
  const Scalar inter = (p * g).sum();
  return 1 - 2 * inter / (p.sum() + g.sum() + eps);
}

template <typename Scalar>
Scalar laplacian_depth_loss(Scalar Z_geo, Scalar Z_err, Scalar Z_gt, Scalar sigma_d) {
  using std::abs;
  using std::log;
  detail::require(sigma_d > 0, "laplacian_depth_loss: sigma_d must be positive");
  return std::numbers::sqrt2_v<Scalar> / sigma_d * abs(Z_geo + Z_err - Z_gt) + log(sigma_d);
}

/// Which geometry error parameterizes the predicted depth.
enum class ErrorMode { depth_error, dim_height_error, bbox_height_error };

template <typename Scalar>
struct DepthLossPointT {
  Scalar f = 0;
  Scalar H = 0;
  Scalar h_bbox = 0;
  Scalar error = 0;  // Z_err, H_err or h_err depending on the mode
  Scalar Z_gt = 0;
  Scalar sigma_d = 1;
};
using DepthLossPoint = DepthLossPointT<double>;

template <typename Scalar>
struct DepthLossGradientT {
  Scalar d_depth = 0;  // dL/dZ
  Scalar d_error = 0;  // dL/d(error in the chosen mode)
  Scalar d_sigma = 0;
};
using DepthLossGradient = DepthLossGradientT<double>;

template <typename Scalar>
Scalar predicted_depth(const DepthLossPointT<Scalar>& x, ErrorMode mode) {
  switch (mode) {
    case ErrorMode::depth_error:
      return x.f * x.H / x.h_bbox + x.error;
    case ErrorMode::dim_height_error:
      return x.f * (x.H + x.error) / x.h_bbox;
    case ErrorMode::bbox_height_error: {
      const Scalar gap = x.h_bbox - x.error;
      if (!(gap > 0)) throw SingularityError("predicted_depth: h_bbox - h_err <= 0");
      return x.f * x.H / gap;
    }
  }
  throw ContractError("predicted_depth: unknown mode");
}

template <typename Scalar>
Scalar depth_loss(const DepthLossPointT<Scalar>& x, ErrorMode mode) {
  using std::abs;
  using std::log;
  detail::require(x.sigma_d > 0, "depth_loss: sigma_d must be positive");
  return std::numbers::sqrt2_v<Scalar> / x.sigma_d * abs(predicted_depth(x, mode) - x.Z_gt) + log(x.sigma_d);
}

/// Analytic partials of the Laplacian depth loss. The h_err chain factor is
/// f H / (h_bbox - h_err)^2, which diverges as h_err approaches h_bbox.
template <typename Scalar>
DepthLossGradientT<Scalar> depth_loss_gradients(const DepthLossPointT<Scalar>& x, ErrorMode mode) {
  using std::abs;
  detail::require(x.sigma_d > 0, "depth_loss_gradients: sigma_d must be positive");
  detail::require(x.f > 0 && x.h_bbox > 0, "depth_loss_gradients: f and h_bbox must be positive");
  if (mode == ErrorMode::bbox_height_error && !(x.h_bbox - x.error > 0)) {
    throw SingularityError("depth_loss_gradients: h_bbox - h_err <= 0");
  }
  const Scalar residual = predicted_depth(x, mode) - x.Z_gt;
  if (residual == 0) throw NondifferentiableError("depth_loss_gradients: zero residual (L1 kink)");

  constexpr Scalar rt2 = std::numbers::sqrt2_v<Scalar>;
  DepthLossGradientT<Scalar> g;
  g.d_depth = rt2 / x.sigma_d * (residual > 0 ? Scalar(1) : Scalar(-1));
  g.d_sigma = -rt2 / (x.sigma_d * x.sigma_d) * abs(residual) + 1 / x.sigma_d;
  switch (mode) {
    case ErrorMode::depth_error:
      g.d_error = g.d_depth;
      break;
    case ErrorMode::dim_height_error:
      g.d_error = g.d_depth * x.f / x.h_bbox;
      break;
    case ErrorMode::bbox_height_error: {
      const Scalar gap = x.h_bbox - x.error;
      g.d_error = g.d_depth * x.f * x.H / (gap * gap);
      break;
    }
  }
  return g;
}

/// Loss weights lambda_1..lambda_9 in the order cls, 2dsize, xy, giou,
/// 3dsize, angle, depth, dmap, region.
template <typename Scalar>
struct LossWeightsT {
  std::array<Scalar, 9> lambda{2, 5, 2, 10, 1, 1, 1, 1, 1};

  void validate() const {
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      detail::require(lambda[i] >= 0, "LossWeights: lambda_" + std::to_string(i + 1) + " is negative");
    }
  }
};
using LossWeights = LossWeightsT<double>;

template <typename Scalar>
struct LossComponentsT {
  Scalar cls = 0;
  Scalar size2d = 0;
  Scalar xy = 0;
  Scalar giou = 0;
  Scalar size3d = 0;
  Scalar angle = 0;
  Scalar depth = 0;
  Scalar dmap = 0;
  Scalar region_sum = 0;  // sum of the per-scale Dice losses

  std::array<Scalar, 9> as_array() const { return {cls, size2d, xy, giou, size3d, angle, depth, dmap, region_sum}; }
};
using LossComponents = LossComponentsT<double>;

inline constexpr std::array<const char*, 9> kLossComponentNames{"cls",    "2dsize", "xy",   "giou",      "3dsize",
                                                                "angle",  "depth",  "dmap", "region_sum"};

template <typename Scalar>
Scalar region_loss_sum(std::span<const Scalar> per_scale) {
  Scalar s = 0;
  for (Scalar v : per_scale) s += v;
  return s;
}

template <typename Scalar>
Scalar overall_loss(const LossComponentsT<Scalar>& c, const LossWeightsT<Scalar>& w) {
  using std::isfinite;
  w.validate();
  const auto v = c.as_array();
  Scalar total = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    detail::require(isfinite(v[i]), std::string("overall_loss: component ") + kLossComponentNames[i] + " not finite");
    detail::require(v[i] >= 0, std::string("overall_loss: component ") + kLossComponentNames[i] + " is negative");
    total += w.lambda[i] * v[i];
  }
  return total;
}

}  // namespace monogeo

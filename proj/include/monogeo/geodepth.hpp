#pragma once

// Geometric depth from the projection ratio and the three geometry-error
// corrections that make it exact.

#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "monogeo/error.hpp"

namespace monogeo {

/// Per-object derived quantities. Field order is also the CSV column order.
template <typename Scalar>
struct GeometryRecordT {
  Scalar f = 0;       // vertical focal length, px
  Scalar H = 0;       // 3D height, m
  Scalar h_bbox = 0;  // 2D box height, px
  Scalar h_c = 0;     // projected central height, px
  Scalar Z_gt = 0;    // center depth, m
  Scalar Z_geo = 0;
  Scalar Z_err = 0;
  Scalar H_err = 0;
  Scalar h_err = 0;
};
using GeometryRecord = GeometryRecordT<double>;

inline constexpr const char* kGeometryRecordColumns = "f,H,h_bbox,h_c,Z_gt,Z_geo,Z_err,H_err,h_err";

template <typename Scalar>
Scalar geometric_depth(Scalar f, Scalar H, Scalar h) {
  detail::require(f > 0, "geometric_depth: f must be positive");
  detail::require(H > 0, "geometric_depth: H must be positive");
  if (!(h > 0)) throw DegenerateError("geometric_depth: image height must be positive");
  return f * H / h;
}

template <typename Scalar>
Scalar depth_error(Scalar Z_gt, Scalar Z_geo) {
  return Z_gt - Z_geo;
}

// H_err such that f (H + H_err) / h_bbox reproduces the corrected depth.
template <typename Scalar>
Scalar dim_height_error(Scalar Z_err, Scalar h_bbox, Scalar f) {
  detail::require(f > 0, "dim_height_error: f must be positive");
  return Z_err * h_bbox / f;
}

// h_err such that f H / (h_bbox - h_err) = Z_gt. May be negative.
template <typename Scalar>
Scalar bbox_height_error(Scalar f, Scalar H, Scalar h_bbox, Scalar Z_gt) {
  detail::require(Z_gt > 0, "bbox_height_error: Z_gt must be positive");
  return h_bbox - f * H / Z_gt;
}

/// Fills every derived field from the four measured ones. Z_err keeps its
/// sign; noisy labels can make it negative.
template <typename Scalar>
GeometryRecordT<Scalar> make_geometry_record(Scalar f, Scalar H, Scalar h_bbox, Scalar Z_gt) {
  detail::require(Z_gt > 0, "make_geometry_record: Z_gt must be positive");
  GeometryRecordT<Scalar> r;
  r.f = f;
  r.H = H;
  r.h_bbox = h_bbox;
  r.Z_gt = Z_gt;
  r.h_c = f * H / Z_gt;
  r.Z_geo = geometric_depth(f, H, h_bbox);
  r.Z_err = depth_error(Z_gt, r.Z_geo);
  r.H_err = dim_height_error(r.Z_err, h_bbox, f);
  r.h_err = bbox_height_error(f, H, h_bbox, Z_gt);
  return r;
}

enum class DepthMode { direct, geometric_hbbox, geometric_hc, gd_plus_Zerr, gd_plus_Herr, gd_minus_herr };

inline const char* to_string(DepthMode m) {
  switch (m) {
    case DepthMode::direct: return "direct";
    case DepthMode::geometric_hbbox: return "geometric_hbbox";
    case DepthMode::geometric_hc: return "geometric_hc";
    case DepthMode::gd_plus_Zerr: return "gd_plus_Zerr";
    case DepthMode::gd_plus_Herr: return "gd_plus_Herr";
    case DepthMode::gd_minus_herr: return "gd_minus_herr";
  }
  return "?";
}

/// Inputs for depth_from_mode; each mode reads only what it needs.
template <typename Scalar>
struct DepthInputsT {
  std::optional<Scalar> f, H, h_bbox, h_c, Z_err, H_err, h_err;
  std::optional<Scalar> direct_depth;

  static DepthInputsT from_record(const GeometryRecordT<Scalar>& r) {
    DepthInputsT in;
    in.f = r.f;
    in.H = r.H;
    in.h_bbox = r.h_bbox;
    in.h_c = r.h_c;
    in.Z_err = r.Z_err;
    in.H_err = r.H_err;
    in.h_err = r.h_err;
    return in;
  }
};
using DepthInputs = DepthInputsT<double>;

namespace detail {
template <typename Scalar>
Scalar need(const std::optional<Scalar>& v, const char* name, DepthMode m) {
  if (!v) throw ContractError(std::string("depth_from_mode(") + to_string(m) + "): missing field " + name);
  return *v;
}
}  // namespace detail

template <typename Scalar>
Scalar depth_from_mode(DepthMode mode, const DepthInputsT<Scalar>& in) {
  using detail::need;
  switch (mode) {
    case DepthMode::direct:
      return need(in.direct_depth, "direct_depth", mode);
    case DepthMode::geometric_hbbox:
      return geometric_depth(need(in.f, "f", mode), need(in.H, "H", mode), need(in.h_bbox, "h_bbox", mode));
    case DepthMode::geometric_hc:
      return geometric_depth(need(in.f, "f", mode), need(in.H, "H", mode), need(in.h_c, "h_c", mode));
    case DepthMode::gd_plus_Zerr: {
      const Scalar z_geo =
          geometric_depth(need(in.f, "f", mode), need(in.H, "H", mode), need(in.h_bbox, "h_bbox", mode));
      return z_geo + need(in.Z_err, "Z_err", mode);
    }
    case DepthMode::gd_plus_Herr: {
      const Scalar f = need(in.f, "f", mode);
      const Scalar h = need(in.h_bbox, "h_bbox", mode);
      detail::require(f > 0, "depth_from_mode: f must be positive");
      if (!(h > 0)) throw DegenerateError("depth_from_mode: h_bbox must be positive");
      return f * (need(in.H, "H", mode) + need(in.H_err, "H_err", mode)) / h;
    }
    case DepthMode::gd_minus_herr: {
      const Scalar f = need(in.f, "f", mode);
      const Scalar H = need(in.H, "H", mode);
      const Scalar denom = need(in.h_bbox, "h_bbox", mode) - need(in.h_err, "h_err", mode);
      if (!(denom > 0)) throw SingularityError("depth_from_mode(gd_minus_herr): h_bbox - h_err <= 0");
      return f * H / denom;
    }
  }
  throw ContractError("depth_from_mode: unknown mode");
}

template <typename Scalar>
struct DepthEstimateT {
  Scalar depth = 0;
  Scalar sigma = 1;
};
using DepthEstimate = DepthEstimateT<double>;

/// Inverse-sigma weighted mean of depth estimates (sigma is a Laplace scale).
template <typename Scalar>
Scalar weighted_depth_fusion(std::span<const DepthEstimateT<Scalar>> estimates) {
  detail::require(!estimates.empty(), "weighted_depth_fusion: no estimates");
  Scalar num = 0;
  Scalar den = 0;
  for (const auto& e : estimates) {
    detail::require(e.sigma > 0, "weighted_depth_fusion: sigma must be positive");
    num += e.depth / e.sigma;
    den += 1 / e.sigma;
  }
  return num / den;
}

}  // namespace monogeo

#pragma once

// Closed-form wheel-depth bias of a trapezoid side-view vehicle when the
// camera height differs from the object height.
//
// Side view, vehicle pointing at the camera: the closest wheel sits at depth
// Z_w, the hood rises over a run l_a to the full height H, and the body
// continues l_b1 to the center and l_b2 beyond it. The 2D box bottom is the
// closest wheel; its top is the hood end (camera below the roof) or the rear
// roof edge (camera above the roof).

#include <cmath>
#include <string>
#include <vector>

#include "monogeo/error.hpp"

namespace monogeo {

template <typename Scalar>
struct BiasScenarioT {
  Scalar camera_height = 0;  // H_cam
  Scalar object_height = 0;  // H
  Scalar wheel_depth = 0;    // Z_w
  Scalar hood_run = 0;       // l_a
  Scalar body_front = 0;     // l_b1, hood end to center
  Scalar body_rear = 0;      // l_b2

  Scalar gamma() const { return camera_height / object_height; }
  Scalar total_length() const { return hood_run + body_front + body_rear; }

  void validate() const {
    detail::require(camera_height > 0, "BiasScenario: camera_height must be positive");
    detail::require(object_height > 0, "BiasScenario: object_height must be positive");
    detail::require(wheel_depth > 0, "BiasScenario: wheel_depth must be positive");
    detail::require(hood_run > 0, "BiasScenario: hood_run must be positive");
    detail::require(body_front >= 0, "BiasScenario: body_front must be nonnegative");
    detail::require(body_rear >= 0, "BiasScenario: body_rear must be nonnegative");
  }
};
using BiasScenario = BiasScenarioT<double>;

enum class BiasRegime { low, unity, high };

inline const char* to_string(BiasRegime r) {
  switch (r) {
    case BiasRegime::low: return "low";
    case BiasRegime::unity: return "unity";
    case BiasRegime::high: return "high";
  }
  return "?";
}

template <typename Scalar>
struct BiasResultT {
  BiasRegime regime = BiasRegime::unity;
  Scalar l_bias = 0;
  Scalar sigma = 1;  // sigma_1 (low/unity) or sigma_2 (high)
  Scalar Z_geo = 0;
  Scalar Z_err = 0;
};
using BiasResult = BiasResultT<double>;

/// Intermediate quantities for debugging: wheel-plane height and slope of
/// the ray through the top-defining vertex.
template <typename Scalar>
struct BiasTraceT {
  Scalar wheel_plane_height = 0;  // H_w
  Scalar ray_slope = 0;           // tan(alpha) or tan(beta)
};
using BiasTrace = BiasTraceT<double>;

inline constexpr double kUnityGammaTolerance = 1e-12;

template <typename Scalar>
BiasRegime classify_regime(Scalar gamma) {
  using std::abs;
  if (abs(gamma - 1) <= Scalar(kUnityGammaTolerance)) return BiasRegime::unity;
  return gamma < 1 ? BiasRegime::low : BiasRegime::high;
}

template <typename Scalar>
BiasResultT<Scalar> analyze_bias(const BiasScenarioT<Scalar>& s, BiasTraceT<Scalar>* trace = nullptr) {
  s.validate();
  const Scalar g = s.gamma();
  const Scalar H = s.object_height;
  const Scalar Hc = s.camera_height;
  const Scalar zw = s.wheel_depth;
  const Scalar la = s.hood_run;
  const Scalar L = s.total_length();

  BiasResultT<Scalar> r;
  r.regime = classify_regime(g);
  switch (r.regime) {
    case BiasRegime::low:
      r.l_bias = (1 - g) * zw * la / (zw + g * la);
      r.sigma = g / (1 - (1 - g) * la / (zw + la));
      r.Z_geo = zw + r.l_bias;
      r.Z_err = s.body_front + r.sigma * la;
      if (trace) {
        trace->ray_slope = (H - Hc) / (zw + la);
        trace->wheel_plane_height = H - (H - Hc) * la / (zw + la);
      }
      break;
    case BiasRegime::high:
      r.l_bias = (g - 1) * zw * L / (zw + g * L);
      r.sigma = (g - 1) / (1 + g * L / zw);
      r.Z_geo = zw - r.l_bias;
      r.Z_err = s.body_front + la + r.sigma * L;
      if (trace) {
        trace->ray_slope = (Hc - H) / (zw + L);
        trace->wheel_plane_height = (H * zw + Hc * L) / (zw + L);
      }
      break;
    case BiasRegime::unity:
      r.l_bias = 0;
      r.sigma = 1;
      r.Z_geo = zw;
      r.Z_err = s.body_front + la;
      if (trace) {
        trace->ray_slope = 0;
        trace->wheel_plane_height = H;
      }
      break;
  }
  return r;
}

enum class BiasSweepVariable { wheel_depth, gamma };

template <typename Scalar>
struct BiasSweepPointT {
  Scalar value = 0;
  BiasResultT<Scalar> result;
};
using BiasSweepPoint = BiasSweepPointT<double>;

/// Evaluates analyze_bias on an evenly spaced grid of `steps` values in
/// [lo, hi]. Varying gamma changes the camera height at fixed object height.
/// A gamma range that crosses 1 gets the boundary gamma = 1 inserted as its
/// own sample so that no point straddles both regimes.
template <typename Scalar>
std::vector<BiasSweepPointT<Scalar>> bias_sweep(const BiasScenarioT<Scalar>& base, BiasSweepVariable vary,
                                                Scalar lo, Scalar hi, int steps) {
  detail::require(steps >= 2, "bias_sweep: steps must be >= 2");
  detail::require(lo < hi, "bias_sweep: range must be increasing");
  detail::require(lo > 0, "bias_sweep: range must be positive");
  base.validate();

  std::vector<Scalar> values;
  values.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i < steps; ++i) {
    values.push_back(i == steps - 1 ? hi : lo + (hi - lo) * Scalar(i) / Scalar(steps - 1));
  }
  if (vary == BiasSweepVariable::gamma && lo < 1 && hi > 1) {
    auto it = values.begin();
    while (it != values.end() && *it < 1) ++it;
    if (it == values.end() || classify_regime(*it) != BiasRegime::unity) values.insert(it, Scalar(1));
  }

  std::vector<BiasSweepPointT<Scalar>> out;
  out.reserve(values.size());
  for (Scalar v : values) {
    BiasScenarioT<Scalar> s = base;
    if (vary == BiasSweepVariable::wheel_depth) {
      s.wheel_depth = v;
    } else {
      s.camera_height = v * s.object_height;
    }
    out.push_back({v, analyze_bias(s)});
  }
  return out;
}

}  // namespace monogeo

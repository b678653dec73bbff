#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "nsim/dataset.hpp"
#include "nsim/linalg.hpp"

namespace nsim {

enum class CurveKind { line, s_curve, helix };

std::string_view to_string(CurveKind kind);
CurveKind parse_curve_kind(std::string_view name);

// Unit-speed test curves in their natural coordinates:
//   line     t * (1,1,1)/sqrt(3),                          t in [0, sqrt(3)]
//   s_curve  (cos t, sin t) for t <= 0, (2 - cos t, sin t) for t > 0, t in [-pi/2, pi/2]
//   helix    (cos(t/sqrt2), sin(t/sqrt2), t/sqrt2),        t in [0, 2 pi]
struct ParametricCurve {
  CurveKind kind = CurveKind::line;

  static ParametricCurve of(CurveKind kind) { return ParametricCurve{kind}; }

  std::size_t embed_dim() const;
  double t_min() const;
  double t_max() const;
  double length() const { return t_max() - t_min(); }
};

Vector curve_point(const ParametricCurve& curve, double t);
Vector curve_tangent(const ParametricCurve& curve, double t);
double geodesic_distance(const ParametricCurve& curve, double t1, double t2);

/// Monotone piecewise-quadratic link on [0, L]: with s = t/L,
/// 2 s^2 for s <= 1/2 and 1 - 2 (1 - s)^2 above.
double link_function(double t, double interval_length);

/// Orthonormal basis (as columns) of the orthogonal complement of a unit
/// vector, built by Gram-Schmidt over the coordinate axes.
Matrix normal_basis(const Vector& unit_tangent);

struct SynthConfig {
  CurveKind curve = CurveKind::line;
  std::size_t ambient_dim = 4;
  double tube_radius = 0.25;
  double noise_factor = 0.0;
  std::size_t n_samples = 100;
  std::uint64_t seed = 0;
};

struct SynthSample {
  Vector x;
  double y = 0.0;
  double f = 0.0;       // noise-free response g(t)
  double t_true = 0.0;  // arc-length parameter of the projection onto the curve
  Vector v_true;
  Vector a_true;
};

struct SynthData {
  Dataset data;
  std::vector<SynthSample> samples;
  double noise_level = 0.0;  // sigma_eps = c * delta_f
};

/// X = V + F(V) U with V uniform on the curve (zero-padded to D), F(V) an
/// orthonormal basis of the normal space and U uniform in the (D-1)-ball of
/// radius tube_radius; Y = g(t) + uniform noise of half-width c * delta_f.
SynthData generate(const SynthConfig& config);

/// Embeds a curve-coordinate vector into R^D by zero padding.
Vector embed(const Vector& v, std::size_t ambient_dim);

}  // namespace nsim

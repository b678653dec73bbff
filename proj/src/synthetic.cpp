#include "nsim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "nsim/error.hpp"

namespace nsim {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt3 = std::numbers::sqrt3;
constexpr double kPi = std::numbers::pi;

void require_in_range(const ParametricCurve& curve, double t) {
  // Allow a few ulps so that endpoints computed by arithmetic stay valid.
  const double slack = 1e-12 * std::max(1.0, curve.length());
  if (!(t >= curve.t_min() - slack && t <= curve.t_max() + slack)) {
    fail(ErrorKind::usage, "out_of_range",
         "curve parameter " + std::to_string(t) + " outside [" + std::to_string(curve.t_min()) +
             ", " + std::to_string(curve.t_max()) + "]");
  }
}

}  // namespace

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::line: return "line";
    case CurveKind::s_curve: return "s_curve";
    case CurveKind::helix: return "helix";
  }
  return "line";
}

CurveKind parse_curve_kind(std::string_view name) {
  if (name == "line") return CurveKind::line;
  if (name == "s_curve" || name == "s-curve" || name == "scurve") return CurveKind::s_curve;
  if (name == "helix") return CurveKind::helix;
  fail(ErrorKind::usage, "invalid_argument",
       "unknown curve '" + std::string(name) + "' (expected line, s_curve or helix)");
}

std::size_t ParametricCurve::embed_dim() const { return kind == CurveKind::s_curve ? 2 : 3; }

double ParametricCurve::t_min() const { return kind == CurveKind::s_curve ? -kPi / 2 : 0.0; }

double ParametricCurve::t_max() const {
  switch (kind) {
    case CurveKind::line: return kSqrt3;
    case CurveKind::s_curve: return kPi / 2;
    case CurveKind::helix: return 2 * kPi;
  }
  return 0.0;
}

Vector curve_point(const ParametricCurve& curve, double t) {
  require_in_range(curve, t);
  switch (curve.kind) {
    case CurveKind::line: {
      const double c = t / kSqrt3;
      return Vector::Constant(3, c);
    }
    case CurveKind::s_curve: {
      Vector p(2);
      if (t <= 0.0) {
        p << std::cos(t), std::sin(t);
      } else {
        p << 2.0 - std::cos(t), std::sin(t);
      }
      return p;
    }
    case CurveKind::helix: {
      Vector p(3);
      p << std::cos(t / kSqrt2), std::sin(t / kSqrt2), t / kSqrt2;
      return p;
    }
  }
  return {};
}

Vector curve_tangent(const ParametricCurve& curve, double t) {
  require_in_range(curve, t);
  switch (curve.kind) {
    case CurveKind::line:
      return Vector::Constant(3, 1.0 / kSqrt3);
    case CurveKind::s_curve: {
      Vector a(2);
      if (t <= 0.0) {
        a << -std::sin(t), std::cos(t);
      } else {
        a << std::sin(t), std::cos(t);
      }
      return a;
    }
    case CurveKind::helix: {
      Vector a(3);
      a << -std::sin(t / kSqrt2) / kSqrt2, std::cos(t / kSqrt2) / kSqrt2, 1.0 / kSqrt2;
      return a;
    }
  }
  return {};
}

double geodesic_distance(const ParametricCurve& /*curve*/, double t1, double t2) {
  return std::abs(t1 - t2);
}

double link_function(double t, double interval_length) {
  const double s = std::clamp(t / interval_length, 0.0, 1.0);
  if (s <= 0.5) return 2.0 * s * s;
  const double r = 1.0 - s;
  return 1.0 - 2.0 * r * r;
}

Vector embed(const Vector& v, std::size_t ambient_dim) {
  Vector out = Vector::Zero(static_cast<Index>(ambient_dim));
  out.head(v.size()) = v;
  return out;
}

Matrix normal_basis(const Vector& unit_tangent) {
  const Index D = unit_tangent.size();
  // Axes least aligned with the tangent go first; stable on ties.
  std::vector<Index> axes(static_cast<std::size_t>(D));
  std::iota(axes.begin(), axes.end(), Index{0});
  std::stable_sort(axes.begin(), axes.end(), [&](Index a, Index b) {
    return std::abs(unit_tangent[a]) < std::abs(unit_tangent[b]);
  });

  Matrix q(D, D);
  q.col(0) = unit_tangent;
  Index filled = 1;
  for (Index axis : axes) {
    if (filled == D) break;
    Vector v = Vector::Unit(D, axis);
    // Two Gram-Schmidt passes.
    for (int pass = 0; pass < 2; ++pass) {
      for (Index c = 0; c < filled; ++c) v -= q.col(c).dot(v) * q.col(c);
    }
    const double norm = v.norm();
    if (norm > 1e-6) q.col(filled++) = v / norm;
  }
  return q.rightCols(D - 1);
}

SynthData generate(const SynthConfig& config) {
  const auto curve = ParametricCurve::of(config.curve);
  if (config.ambient_dim <= curve.embed_dim()) {
    fail(ErrorKind::usage, "invalid_argument",
         "ambient dimension must exceed the curve dimension " + std::to_string(curve.embed_dim()));
  }
  if (!(config.tube_radius >= 0.0) || !(config.noise_factor >= 0.0)) {
    fail(ErrorKind::usage, "invalid_argument", "tube radius and noise factor must be non-negative");
  }
  if (config.n_samples < 1) fail(ErrorKind::usage, "invalid_argument", "n_samples must be >= 1");

  const auto D = static_cast<Index>(config.ambient_dim);
  const auto n = static_cast<Index>(config.n_samples);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> t_dist(curve.t_min(), curve.t_max());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SynthData out;
  out.samples.resize(static_cast<std::size_t>(n));
  out.data.features.resize(n, D);
  out.data.responses.resize(n);

  const double normal_dim = static_cast<double>(D - 1);
  for (Index i = 0; i < n; ++i) {
    auto& s = out.samples[static_cast<std::size_t>(i)];
    s.t_true = t_dist(rng);
    s.v_true = embed(curve_point(curve, s.t_true), config.ambient_dim);
    s.a_true = embed(curve_tangent(curve, s.t_true), config.ambient_dim);

    Vector direction(D - 1);
    for (Index d = 0; d < D - 1; ++d) direction[d] = gauss(rng);
    const double radius = config.tube_radius * std::pow(unit(rng), 1.0 / normal_dim);
    const double dn = direction.norm();
    Vector u = dn > 0.0 ? Vector(direction * (radius / dn)) : Vector(Vector::Zero(D - 1));

    s.x = config.tube_radius > 0.0 ? Vector(s.v_true + normal_basis(s.a_true) * u) : s.v_true;
    s.f = link_function(s.t_true - curve.t_min(), curve.length());
  }

  double f_min = out.samples.front().f;
  double f_max = f_min;
  for (const auto& s : out.samples) {
    f_min = std::min(f_min, s.f);
    f_max = std::max(f_max, s.f);
  }
  const double delta_f = (f_max - f_min) / curve.length();
  out.noise_level = config.noise_factor * delta_f;

  std::uniform_real_distribution<double> noise(-out.noise_level, out.noise_level);
  for (Index i = 0; i < n; ++i) {
    auto& s = out.samples[static_cast<std::size_t>(i)];
    s.y = out.noise_level > 0.0 ? s.f + noise(rng) : s.f;
    out.data.features.row(i) = s.x.transpose();
    out.data.responses[i] = s.y;
  }
  return out;
}

}  // namespace nsim

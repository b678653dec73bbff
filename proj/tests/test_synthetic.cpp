#include <cmath>
#include <numbers>

#include "nsim/synthetic.hpp"
#include "support.hpp"

using namespace nsim;
using testing::max_abs;
using testing::vec;

namespace {

constexpr CurveKind kCurves[] = {CurveKind::line, CurveKind::s_curve, CurveKind::helix};

SynthConfig config(CurveKind curve, std::size_t D, std::size_t n, std::uint64_t seed, double c = 0.0,
                   double tube = 0.25) {
  SynthConfig cfg;
  cfg.curve = curve;
  cfg.ambient_dim = D;
  cfg.n_samples = n;
  cfg.seed = seed;
  cfg.noise_factor = c;
  cfg.tube_radius = tube;
  return cfg;
}

}  // namespace

TEST_CASE("curve_point") {
  const auto line = ParametricCurve::of(CurveKind::line);
  const auto scurve = ParametricCurve::of(CurveKind::s_curve);
  const auto helix = ParametricCurve::of(CurveKind::helix);
  CHECK(max_abs(curve_point(line, 0.0)) == 0.0);
  CHECK(max_abs(curve_point(scurve, 0.0) - vec({1, 0})) <= 1e-15);
  CHECK(max_abs(curve_point(helix, 0.0) - vec({1, 0, 0})) <= 1e-15);
  CHECK(line.embed_dim() == 3);
  CHECK(scurve.embed_dim() == 2);
  CHECK(helix.embed_dim() == 3);
  CHECK(line.length() == doctest::Approx(std::sqrt(3.0)));
  CHECK(scurve.length() == doctest::Approx(std::numbers::pi));
  CHECK(helix.length() == doctest::Approx(2 * std::numbers::pi));
  CHECK(max_abs(curve_point(scurve, std::numbers::pi / 2) - vec({2, 1})) <= 1e-15);
  CHECK_NSIM_ERROR(curve_point(line, 2.0), "out_of_range");
  CHECK_NSIM_ERROR(curve_point(helix, -0.1), "out_of_range");
}

TEST_CASE("curve_tangent") {
  const auto line = ParametricCurve::of(CurveKind::line);
  for (double t : {0.0, 0.4, 1.7}) CHECK(max_abs(curve_tangent(line, t) - Vector::Constant(3, 1 / std::sqrt(3.0))) <= 1e-15);

  const auto helix = ParametricCurve::of(CurveKind::helix);
  for (double t = 0.0; t <= 2 * std::numbers::pi; t += 0.1) {
    const Vector a = curve_tangent(helix, t);
    CHECK(std::abs(a.norm() - 1.0) <= 1e-12);
    const double s = t / std::sqrt(2.0);
    CHECK(max_abs(a - vec({-std::sin(s), std::cos(s), 1.0}) / std::sqrt(2.0)) <= 1e-15);
  }

  const auto scurve = ParametricCurve::of(CurveKind::s_curve);
  const Vector below = curve_tangent(scurve, -1e-9);
  const Vector above = curve_tangent(scurve, 1e-9);
  CHECK((below - above).norm() <= 1e-8);
  // One-sided difference quotients at the junction.
  const double h = 1e-6;
  const Vector left = (curve_point(scurve, 0.0) - curve_point(scurve, -h)) / h;
  const Vector right = (curve_point(scurve, h) - curve_point(scurve, 0.0)) / h;
  CHECK((left - right).norm() <= 1e-5);
  CHECK(max_abs(curve_tangent(scurve, 0.0) - vec({0, 1})) <= 1e-15);
}

TEST_CASE("geodesic_distance") {
  const auto line = ParametricCurve::of(CurveKind::line);
  const auto scurve = ParametricCurve::of(CurveKind::s_curve);
  CHECK(geodesic_distance(scurve, 0.3, 0.3) == 0.0);
  CHECK(geodesic_distance(line, 0.0, 1.0) == 1.0);
  CHECK(geodesic_distance(line, 0.0, 1.0) == doctest::Approx((curve_point(line, 1.0) - curve_point(line, 0.0)).norm()));
  const double pi = std::numbers::pi;
  const double geo = geodesic_distance(scurve, -pi / 2, pi / 2);
  CHECK(geo == doctest::Approx(pi));
  CHECK(geo > (curve_point(scurve, pi / 2) - curve_point(scurve, -pi / 2)).norm());
}

TEST_CASE("link_function") {
  CHECK(link_function(0.0, 3.0) == 0.0);
  CHECK(link_function(3.0, 3.0) == 1.0);
  CHECK(link_function(1.5, 3.0) == 0.5);
  CHECK(link_function(0.5, 2.0) == doctest::Approx(2 * 0.25 * 0.25));
  CHECK(link_function(1.5, 2.0) == doctest::Approx(1 - 2 * 0.25 * 0.25));

  const Vector s1 = testing::uniform_vector(1000, 0.0, 1.0, 31);
  const Vector s2 = testing::uniform_vector(1000, 0.0, 1.0, 32);
  for (Index i = 0; i < 1000; ++i) {
    const double lo = std::min(s1[i], s2[i]);
    const double hi = std::max(s1[i], s2[i]);
    if (lo == hi) continue;
    CHECK(link_function(lo, 1.0) < link_function(hi, 1.0));
  }
  // C1 at the junction: matching one-sided slopes.
  const double h = 1e-7;
  const double left = (link_function(0.5, 1.0) - link_function(0.5 - h, 1.0)) / h;
  const double right = (link_function(0.5 + h, 1.0) - link_function(0.5, 1.0)) / h;
  CHECK(left == doctest::Approx(right).epsilon(1e-5));
}

TEST_CASE("normal_basis") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Vector a = testing::gaussian_vector(6, 40 + seed).normalized();
    const Matrix f = normal_basis(a);
    REQUIRE(f.rows() == 6);
    REQUIRE(f.cols() == 5);
    CHECK(max_abs(f.transpose() * f - Matrix::Identity(5, 5)) <= 1e-12);
    CHECK(max_abs(f.transpose() * a) <= 1e-12);
  }
  CHECK(max_abs(normal_basis(vec({0, 0, 1})).transpose() * vec({0, 0, 1})) == 0.0);
}

TEST_CASE("generate") {
  const auto clean = generate(config(CurveKind::s_curve, 5, 200, 50));
  for (const auto& s : clean.samples) {
    CHECK(s.y == s.f);
    CHECK(s.f == link_function(s.t_true - ParametricCurve::of(CurveKind::s_curve).t_min(), std::numbers::pi));
  }
  CHECK(clean.noise_level == 0.0);

  const auto flat = generate(config(CurveKind::helix, 5, 100, 51, 0.0, 0.0));
  for (std::size_t i = 0; i < flat.samples.size(); ++i) {
    CHECK(max_abs(flat.samples[i].x - flat.samples[i].v_true) == 0.0);
    CHECK(max_abs(flat.samples[i].v_true - embed(curve_point(ParametricCurve::of(CurveKind::helix), flat.samples[i].t_true), 5)) == 0.0);
  }

  const auto noisy = generate(config(CurveKind::line, 6, 500, 52, 0.1));
  double fmin = 1e300;
  double fmax = -1e300;
  for (const auto& s : noisy.samples) {
    fmin = std::min(fmin, s.f);
    fmax = std::max(fmax, s.f);
  }
  const double sigma = 0.1 * (fmax - fmin) / std::sqrt(3.0);
  CHECK(noisy.noise_level == doctest::Approx(sigma).epsilon(1e-14));
  bool any_noise = false;
  for (const auto& s : noisy.samples) {
    CHECK(std::abs(s.y - s.f) <= sigma);
    any_noise = any_noise || s.y != s.f;
  }
  CHECK(any_noise);
  CHECK(noisy.data.size() == 500);
  CHECK(noisy.data.dim() == 6);
  for (std::size_t i = 0; i < 500; ++i) {
    CHECK(noisy.data.responses[static_cast<Index>(i)] == noisy.samples[i].y);
    CHECK(max_abs(noisy.data.features.row(static_cast<Index>(i)).transpose() - noisy.samples[i].x) == 0.0);
  }

  CHECK_NSIM_ERROR(generate(config(CurveKind::line, 3, 10, 1)), "invalid_argument");
  CHECK_NSIM_ERROR(generate(config(CurveKind::line, 4, 10, 1, -0.5)), "invalid_argument");
}

TEST_CASE("curve kind names") {
  CHECK(parse_curve_kind("helix") == CurveKind::helix);
  CHECK(parse_curve_kind("s-curve") == CurveKind::s_curve);
  CHECK(to_string(CurveKind::s_curve) == "s_curve");
  CHECK_NSIM_ERROR(parse_curve_kind("spiral"), "invalid_argument");
}

TEST_SUITE("properties") {
  TEST_CASE("curves are unit speed") {
    for (auto kind : kCurves) {
      const auto c = ParametricCurve::of(kind);
      const Vector t = testing::uniform_vector(1000, c.t_min() + 1e-4, c.t_max() - 1e-4, 60);
      const double h = 1e-6;
      for (Index i = 0; i < t.size(); ++i) {
        const Vector d = (curve_point(c, t[i] + h) - curve_point(c, t[i] - h)) / (2 * h);
        CHECK(std::abs(d.norm() - 1.0) <= 1e-6);
        CHECK(std::abs(curve_tangent(c, t[i]).norm() - 1.0) <= 1e-9);
      }
    }
  }

  TEST_CASE("generated samples lie in the normal tube") {
    for (auto kind : kCurves) {
      for (std::size_t D : {4u, 8u, 12u}) {
        const auto g = generate(config(kind, D, 400, 70 + D, 0.01));
        for (const auto& s : g.samples) {
          CHECK(std::abs(s.a_true.norm() - 1.0) <= 1e-9);
          CHECK((s.x - s.v_true).norm() <= 0.25 + 1e-9);
          CHECK(std::abs((s.x - s.v_true).dot(s.a_true)) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("the curve point nearest a sample is its generating point") {
    // Holds for tube radii below the reach (1 for the circular arcs).
    for (auto kind : kCurves) {
      const auto c = ParametricCurve::of(kind);
      const auto g = generate(config(kind, 5, 100, 80));
      const std::size_t grid = 20000;
      const double step = c.length() / static_cast<double>(grid);
      for (const auto& s : g.samples) {
        double best_t = c.t_min();
        double best = 1e300;
        for (std::size_t m = 0; m <= grid; ++m) {
          const double t = std::min(c.t_max(), c.t_min() + step * static_cast<double>(m));
          const double dist = (s.x - embed(curve_point(c, t), 5)).squaredNorm();
          if (dist < best) {
            best = dist;
            best_t = t;
          }
        }
        CHECK(std::abs(best_t - s.t_true) <= 2 * step);
      }
    }
  }

  TEST_CASE("generation is deterministic in the seed") {
    for (auto kind : kCurves) {
      const auto a = generate(config(kind, 7, 300, 90, 0.1));
      const auto b = generate(config(kind, 7, 300, 90, 0.1));
      const auto c = generate(config(kind, 7, 300, 91, 0.1));
      CHECK(a.data.features == b.data.features);
      CHECK(a.data.responses == b.data.responses);
      CHECK(a.data.features != c.data.features);
    }
  }
}

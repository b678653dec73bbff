#include <Eigen/Dense>

#include "nsim/tangent_field.hpp"
#include "support.hpp"

using namespace nsim;
using testing::max_abs;

namespace {

const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

// Points t * (1,1,1)/sqrt(3) with a strictly increasing response.
Dataset exact_line(Index n, std::uint64_t seed) {
  const Vector t = testing::uniform_vector(n, 0.0, std::sqrt(3.0), seed);
  Dataset d;
  d.features.resize(n, 3);
  d.responses.resize(n);
  for (Index i = 0; i < n; ++i) {
    d.features.row(i).setConstant(t[i] * kInvSqrt3);
    d.responses[i] = t[i] + 0.3 * t[i] * t[i];
  }
  return d;
}

// Least squares on centered level-set data, solved by column-pivoting QR.
Vector normal_equations_oracle(const Matrix& x, const Vector& y) {
  const Matrix xc = x.rowwise() - x.colwise().mean();
  const Vector yc = y.array() - y.mean();
  return xc.colPivHouseholderQr().solve(yc);
}

Dataset group_data(const Dataset& data, const std::vector<Index>& group) { return data.subset(group); }

}  // namespace

TEST_CASE("fit_tangents on an exact line") {
  const Dataset d = exact_line(40, 1);
  const auto p = dyadic_partition(d.responses, 1);
  const auto field = fit_tangents(d, p);
  REQUIRE(field.num_level_sets() == 1);
  CHECK(max_abs(field.vectors[0] - Vector::Constant(3, kInvSqrt3)) <= 1e-6);
  CHECK(field.counts[0] == 40);
}

TEST_CASE("fit_tangents rejects a vanishing regression vector") {
  Dataset d;
  d.features.resize(8, 2);
  d.features << 1, 1, 1, -1, -1, 1, -1, -1, 1, 1, 1, -1, -1, 1, -1, -1;
  d.responses.resize(8);
  for (Index i = 0; i < 8; ++i) d.responses[i] = d.features(i, 0) * d.features(i, 1);
  CHECK_NSIM_ERROR(fit_tangents(d, dyadic_partition(d.responses, 1)), "degenerate_direction");
}

TEST_CASE("fit_tangents rejects undersized level sets") {
  const Dataset d = testing::random_sim_dataset(12, 3, 2);
  CHECK_NSIM_ERROR(fit_tangents(d, equiblock_partition(d.responses, 4)), "level_set_too_small");
  try {
    fit_tangents(d, equiblock_partition(d.responses, 4));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("level set 0 too small (need >= 4") != std::string::npos);
    CHECK(e.kind() == ErrorKind::infeasible);
  }
  CHECK_NSIM_ERROR(fit_tangents(d, dyadic_partition(Vector::LinSpaced(11, 0, 1), 1)), "length_mismatch");
}

TEST_CASE("fit_tangents matches a normal-equations oracle") {
  const Dataset d = testing::random_sim_dataset(200, 3, 7);
  const auto p = dyadic_partition(d.responses, 2);
  const auto field = fit_tangents(d, p);
  for (std::size_t j = 0; j < 2; ++j) {
    const Dataset g = group_data(d, p.groups[j]);
    const Vector oracle = normal_equations_oracle(g.features, g.responses);
    CHECK((field.regression_vectors[j] - oracle).norm() <= 1e-8 * oracle.norm());
    CHECK(field.level_means_y[j] == doctest::Approx(g.responses.mean()).epsilon(1e-12));
  }
}

TEST_CASE("grammian") {
  const Dataset d = testing::random_sim_dataset(30, 3, 3);
  const auto one = fit_tangents(d, dyadic_partition(d.responses, 1));
  const Matrix g1 = grammian(one);
  REQUIRE(g1.rows() == 1);
  CHECK(g1(0, 0) == 1.0);

  TangentField same;
  same.vectors = {testing::vec({0.6, 0.8}), testing::vec({0.6, 0.8})};
  CHECK(max_abs(grammian(same) - Matrix::Ones(2, 2)) <= 1e-15);

  TangentField axes;
  axes.vectors = {testing::vec({1, 0}), testing::vec({0, 1})};
  CHECK(max_abs(grammian(axes) - Matrix::Identity(2, 2)) == 0.0);
}

TEST_CASE("assign_tangent") {
  const Dataset d = testing::random_sim_dataset(60, 2, 4);
  const auto p = equiblock_partition(d.responses, 3);
  const auto field = fit_tangents(d, p);
  const Index first = p.groups[0][0];
  CHECK(&assign_tangent(field, p, static_cast<std::size_t>(first)) == &field.vectors[0]);
  for (std::size_t j = 0; j < 3; ++j) {
    for (Index i : p.groups[j]) CHECK(&assign_tangent(field, p, static_cast<std::size_t>(i)) == &field.vectors[j]);
  }
  const auto single_p = dyadic_partition(d.responses, 1);
  const auto single = fit_tangents(d, single_p);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(&assign_tangent(single, single_p, i) == &single.vectors[0]);
  CHECK_NSIM_ERROR(assign_tangent(field, p, 60), "out_of_range");
}

TEST_SUITE("properties") {
  TEST_CASE("tangent field invariants") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Index n = 80 + static_cast<Index>(seed * 13 % 120);
      const Index dim = 2 + static_cast<Index>(seed % 4);
      const Dataset d = testing::random_sim_dataset(n, dim, 800 + seed);
      for (std::size_t J : {1u, 2u, 4u}) {
        const auto p = equiblock_partition(d.responses, J);
        const auto field = fit_tangents(d, p);
        std::size_t total = 0;
        for (std::size_t j = 0; j < J; ++j) {
          CHECK(std::abs(field.vectors[j].norm() - 1.0) <= 1e-9);
          CHECK(field.counts[j] >= static_cast<std::size_t>(dim) + 1);
          total += field.counts[j];

          // Sigma_j b_j equals r_j projected onto range(Sigma_j).
          const Dataset g = d.subset(p.groups[j]);
          const Matrix cov = linalg::sample_covariance(g.features);
          const Vector r = linalg::cross_covariance(g.features, g.responses);
          const Matrix proj = cov * linalg::pseudo_inverse(cov);
          CHECK((cov * field.regression_vectors[j] - proj * r).norm() <= 1e-8 * std::max(1.0, r.norm()));
        }
        CHECK(total == static_cast<std::size_t>(n));

        const Matrix gm = grammian(field);
        CHECK(max_abs(gm - gm.transpose()) <= 1e-9);
        CHECK(max_abs(gm.diagonal() - Vector::Ones(static_cast<Index>(J))) <= 1e-9);
      }
    }
  }

  TEST_CASE("index vectors are invariant to response scaling and feature translation") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const Dataset d = testing::random_sim_dataset(150, 4, 900 + seed);
      const auto p = equiblock_partition(d.responses, 3);
      const auto base = fit_tangents(d, p);

      Dataset scaled = d;
      scaled.responses *= 3.7;
      const auto fs = fit_tangents(scaled, equiblock_partition(scaled.responses, 3));

      Dataset shifted = d;
      shifted.features.rowwise() += testing::vec({5, -2, 0.5, 11}).transpose();
      const auto ft = fit_tangents(shifted, p);

      for (std::size_t j = 0; j < 3; ++j) {
        CHECK((fs.vectors[j] - base.vectors[j]).norm() <= 1e-9);
        CHECK((ft.vectors[j] - base.vectors[j]).norm() <= 1e-9);
      }
    }
  }

  TEST_CASE("exact-line data gives collinear index vectors") {
    const Vector truth = Vector::Constant(3, kInvSqrt3);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Dataset d = exact_line(120, 1000 + seed);
      for (std::size_t J : {1u, 2u, 4u, 8u}) {
        for (auto kind : {PartitionKind::dyadic, PartitionKind::equiblock}) {
          const auto p = make_partition(kind, d.responses, J);
          bool feasible = true;
          for (const auto& g : p.groups) feasible = feasible && g.size() >= 4;
          if (!feasible) continue;
          const auto field = fit_tangents(d, p);
          for (const auto& a : field.vectors) CHECK(std::abs(a.dot(truth)) >= 1.0 - 1e-6);
        }
      }
    }
  }
}

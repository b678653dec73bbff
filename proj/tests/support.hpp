#pragma once

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "nsim/dataset.hpp"
#include "nsim/error.hpp"
#include "nsim/linalg.hpp"

namespace testing {

using nsim::Index;
using nsim::Matrix;
using nsim::Vector;

inline Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = n01(rng);
  }
  return m;
}

inline Vector gaussian_vector(Index n, std::uint64_t seed) { return gaussian_matrix(n, 1, seed).col(0); }

inline Vector uniform_vector(Index n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Smooth nonlinear response of a random index direction plus small noise.
inline nsim::Dataset random_sim_dataset(Index n, Index d, std::uint64_t seed) {
  nsim::Dataset data;
  data.features = gaussian_matrix(n, d, seed);
  Vector a = gaussian_vector(d, seed + 1000).normalized();
  const Vector noise = gaussian_vector(n, seed + 2000);
  data.responses.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double s = a.dot(data.features.row(i).transpose());
    data.responses[i] = std::tanh(s) + 0.3 * s + 0.05 * noise[i];
  }
  return data;
}

}  // namespace testing

// Checks that `expr` throws nsim::Error with the given code.
#define CHECK_NSIM_ERROR(expr, expected_code)                        \
  do {                                                               \
    std::string nsim_test_code_;                                     \
    try {                                                            \
      (void)(expr);                                                  \
    } catch (const nsim::Error& e) {                                 \
      nsim_test_code_ = e.code();                                    \
    }                                                                \
    CHECK_MESSAGE(nsim_test_code_ == (expected_code), #expr " -> '", \
                  nsim_test_code_, "'");                             \
  } while (0)

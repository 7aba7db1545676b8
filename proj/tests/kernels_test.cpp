#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rieszlab/kernels.hpp"

using namespace rieszlab;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = cplx(g(rng), g(rng));
  return m;
}

HermitianMatrix random_pd(std::mt19937_64& rng, std::size_t n, double eps = 1e-3) {
  const Matrix a = random_matrix(rng, n, n);
  Matrix g = a * a.adjoint();
  for (std::size_t i = 0; i < n; ++i) g(i, i) += eps;
  return HermitianMatrix(g);
}

// Brute force sup ||Dx||_G / ||x||_G over x = (cos t, e^{i psi} sin t).
double rayleigh_sweep_2x2(const Matrix& g, cplx d0, cplx d1) {
  auto quad = [&](cplx x0, cplx x1) {
    return (std::conj(x0) * (g(0, 0) * x0 + g(0, 1) * x1) + std::conj(x1) * (g(1, 0) * x0 + g(1, 1) * x1)).real();
  };
  double best = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = std::numbers::pi * i / 100.0;
    for (int j = 0; j < 100; ++j) {
      const double psi = 2.0 * std::numbers::pi * j / 100.0;
      const cplx x0 = std::cos(t), x1 = std::polar(std::sin(t), psi);
      best = std::max(best, std::sqrt(quad(d0 * x0, d1 * x1) / quad(x0, x1)));
    }
  }
  return best;
}

}  // namespace

TEST(Cholesky, IdentityIsItsOwnFactor) {
  const CholeskyFactor f = cholesky(HermitianMatrix(Matrix::identity(3)));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(f.lower()(i, j), cplx(i == j ? 1.0 : 0.0));
  EXPECT_EQ(f.pivot_floor(), 1.0);
}

TEST(Cholesky, TwoByTwoByHand) {
  const HermitianMatrix m(Matrix::from_rows({{2.0, 1.0}, {1.0, 2.0}}));
  const CholeskyFactor f = cholesky(m);
  EXPECT_NEAR(f.lower()(0, 0).real(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(f.lower()(1, 0).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(f.lower()(1, 1).real(), std::sqrt(1.5), 1e-15);
  EXPECT_EQ(f.lower()(0, 1), cplx(0.0));
  const Matrix back = f.lower() * f.lower().adjoint();
  EXPECT_LT((back - m.matrix()).max_abs(), 1e-15);
  EXPECT_NEAR(f.pivot_floor(), 1.5, 1e-15);
  EXPECT_NEAR(f.cond_estimate(), 2.0 / 1.5, 1e-15);
}

TEST(Cholesky, RankDeficientIsRejected) {
  const HermitianMatrix m(Matrix::from_rows({{1.0, 1.0}, {1.0, 1.0}}));
  EXPECT_THROW(cholesky(m, 1e-12), NotPositiveDefinite);
}

TEST(Cholesky, NonHermitianInputIsRejected) {
  EXPECT_THROW(HermitianMatrix(Matrix::from_rows({{1.0, 2.0}, {0.0, 1.0}})), DomainError);
  EXPECT_THROW(HermitianMatrix(Matrix::from_rows({{cplx(1.0, 1.0)}})), DomainError);
}

TEST(Cholesky, ReconstructsRandomPositiveDefinite) {
  std::mt19937_64 rng(7);
  const double rel_tol = 1e-13;
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianMatrix m = random_pd(rng, 3 + trial);
    const CholeskyFactor f = cholesky(m, rel_tol);
    const Matrix back = f.lower() * f.lower().adjoint();
    EXPECT_LE((back - m.matrix()).max_abs(), 10.0 * rel_tol * m.matrix().max_abs()) << "dim " << m.dim();
    for (std::size_t i = 0; i < f.dim(); ++i) EXPECT_GT(f.lower()(i, i).real(), 0.0);
  }
}

TEST(Cholesky, TriangularSolvesInvertMultiplies) {
  std::mt19937_64 rng(11);
  const CholeskyFactor f = cholesky(random_pd(rng, 9, 1.0));
  CVector v(9);
  for (std::size_t i = 0; i < 9; ++i) v[i] = cplx(std::sin(1.0 + i), std::cos(2.0 * i));
  const CVector a = f.solve_lower(f.multiply_lower(v));
  const CVector b = f.solve_adjoint(f.multiply_adjoint(v));
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_LT(std::abs(a[i] - v[i]), 1e-12);
    EXPECT_LT(std::abs(b[i] - v[i]), 1e-12);
  }
}

TEST(LargestSingularValue, Diagonal) {
  const cplx d[] = {3.0, 1.0, 2.0};
  EXPECT_NEAR(largest_singular_value(Matrix::diagonal(d)), 3.0, 3e-10);
}

TEST(LargestSingularValue, NilpotentShiftBlock) {
  EXPECT_NEAR(largest_singular_value(Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}})), 1.0, 1e-10);
}

TEST(LargestSingularValue, AllOnes) {
  // m* m has eigenvalues {0, 4}.
  EXPECT_NEAR(largest_singular_value(Matrix::from_rows({{1.0, 1.0}, {1.0, 1.0}})), 2.0, 2e-10);
}

TEST(LargestSingularValue, AntisymmetricTopVectorIsFound) {
  // Top right singular vector (1,-1)/sqrt2 is orthogonal to the all-ones vector.
  EXPECT_NEAR(largest_singular_value(Matrix::from_rows({{1.0, -1.0}, {-1.0, 1.0}})), 2.0, 2e-10);
}

TEST(LargestSingularValue, ZeroMatrix) { EXPECT_EQ(largest_singular_value(Matrix(3, 2)), 0.0); }

TEST(LargestSingularValue, ReportsNoConvergence) {
  // Two equal-magnitude top singular values with opposite signs in m*m would
  // converge; a tiny iteration budget cannot.
  std::mt19937_64 rng(3);
  const Matrix m = random_matrix(rng, 30, 30);
  EXPECT_THROW(largest_singular_value(m, {.tol = 1e-14, .max_iter = 2}), NoConvergence);
}

TEST(LargestSingularValue, AdjointHasSameNorm) {
  std::mt19937_64 rng(2024);
  const double tol = 1e-10;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 2 + trial % 7, c = 2 + (trial * 3) % 5;
    const Matrix m = random_matrix(rng, r, c);
    const double a = largest_singular_value(m, {.tol = tol});
    const double b = largest_singular_value(m.adjoint(), {.tol = tol});
    EXPECT_LE(std::abs(a - b), 10 * tol * a) << "trial " << trial;
  }
}

TEST(WhitenedNorm, IdentityMultiplierHasNormOne) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const HermitianMatrix g = random_pd(rng, 4 + trial, 0.5);
    const CVector ones(g.dim(), 1.0);
    EXPECT_NEAR(whitened_norm(ones, g), 1.0, 1e-10);
  }
}

TEST(WhitenedNorm, UnweightedCaseIsMaxModulus) {
  const HermitianMatrix g(Matrix::identity(4));
  const cplx d[] = {0.5, cplx(0.0, -2.5), 1.0, -2.0};
  EXPECT_NEAR(whitened_norm(d, g), 2.5, 1e-9);
}

TEST(WhitenedNorm, MatchesRayleighSweep) {
  const Matrix gm = Matrix::from_rows({{2.0, 1.0}, {1.0, 2.0}});
  const cplx d[] = {1.0, 0.0};
  const double value = whitened_norm(d, HermitianMatrix(gm));
  const double sweep = rayleigh_sweep_2x2(gm, 1.0, 0.0);
  EXPECT_GT(value, 1.0);
  EXPECT_LE(value, 2.0);
  // The sweep under-samples the supremum; its grid spacing bounds the gap.
  EXPECT_GE(value, sweep - 1e-12);
  EXPECT_NEAR(value, sweep, 1e-3);
}

TEST(WhitenedNorm, ScalesWithModulusOfScalar) {
  std::mt19937_64 rng(9);
  const HermitianMatrix g = random_pd(rng, 8, 0.5);
  CVector d(8);
  for (std::size_t k = 0; k < 8; ++k) d[k] = static_cast<double>(k) / 8.0;
  const double base = whitened_norm(d, g);
  const cplx c(0.6, -1.7);
  CVector scaled(d);
  for (cplx& v : scaled) v *= c;
  EXPECT_NEAR(whitened_norm(scaled, g), std::abs(c) * base, 1e-9 * std::abs(c) * base);
}

TEST(WhitenedNorm, DenseAgreesWithPowerIteration) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const CholeskyFactor f = cholesky(random_pd(rng, 6 + trial, 0.5));
    CVector d(f.dim());
    for (cplx& v : d) v = cplx(u(rng), u(rng));
    const double dense = whitened_norm(d, f);
    EXPECT_NEAR(dense, whitened_norm_iterative(d, f), 1e-8 * dense) << "trial " << trial;
  }
}

TEST(WhitenedNorm, ClusteredTopIsExact) {
  // Entries within 1e-9 of 1: power iteration would crawl, the value is max |d|.
  const HermitianMatrix g(Matrix::identity(40));
  CVector d(40);
  for (std::size_t k = 0; k < 40; ++k) d[k] = 1.0 - 1e-9 * static_cast<double>(k);
  EXPECT_NEAR(whitened_norm(d, g), 1.0, 1e-14);
}

#include "trinecap/ensembles.hpp"
#include "trinecap/linalg.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace trinecap;

namespace {

// Trigonometric solution of the characteristic cubic of a real symmetric 3x3
// matrix; independent of the Eigen-backed implementation.
std::array<double, 3> cubic_eigenvalues(const Mat& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  const double p2 = std::pow(a(0, 0) - q, 2) + std::pow(a(1, 1) - q, 2) + std::pow(a(2, 2) - q, 2) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) return {q, q, q};
  const Mat b = (a - q * Mat::Identity(3, 3)) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  std::array<double, 3> ev{e3, 3.0 * q - e1 - e3, e1};
  std::sort(ev.begin(), ev.end());
  return ev;
}

SymMatrix random_sym(std::mt19937_64& g, int d) {
  std::normal_distribution<double> n;
  Mat m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) m(i, j) = m(j, i) = n(g);
  }
  return SymMatrix(m);
}

}  // namespace

TEST(Entropy, BinaryExamples) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.5 - std::sqrt(3.0) / 4.0), 0.35458, 1e-5);
  EXPECT_THROW(binary_entropy(1.5), DomainError);
}

TEST(Entropy, BinarySymmetry) {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(g);
    EXPECT_NEAR(binary_entropy(x), binary_entropy(1.0 - x), 1e-14);
  }
}

TEST(Entropy, ShannonBounds) {
  EXPECT_NEAR(shannon_entropy(ProbDist::uniform(3)), kLog2_3, 1e-15);
  EXPECT_EQ(shannon_entropy(ProbDist({1.0, 0.0, 0.0})), 0.0);
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 5);
    std::vector<double> w(n);
    for (auto& x : w) x = u(g) * u(g);
    const ProbDist d = ProbDist::from_weights(w);
    const double h = shannon_entropy(d);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log2(static_cast<double>(n)) + 1e-12);
  }
}

TEST(StateVectorTest, RejectsBadInput) {
  EXPECT_THROW(StateVector({1.0, 1.0}), DomainError);
  EXPECT_THROW(StateVector({1.0}), DimensionError);
  EXPECT_THROW(StateVector({1.0, 0.0, 0.0, 0.0}), DimensionError);
  EXPECT_THROW(StateVector::normalized(Vec::Zero(3)), DomainError);
  EXPECT_NO_THROW(StateVector({0.6, 0.8}));
}

TEST(SymMatrixTest, SymmetryIsExact) {
  Mat m = Mat::Identity(3, 3);
  m(0, 1) = 1e-15;
  EXPECT_THROW(SymMatrix{m}, DomainError);
  m(1, 0) = 1e-15;
  EXPECT_NO_THROW(SymMatrix{m});
}

TEST(SymMatrixTest, SqrtSquaresBack) {
  std::mt19937_64 g(3);
  for (int k = 0; k < 50; ++k) {
    const SymMatrix a = random_sym(g, 3);
    const SymMatrix psd = SymMatrix::symmetrized(a.matrix() * a.matrix());
    const SymMatrix r = psd.sqrt();
    EXPECT_LT(SymMatrix::symmetrized(r.matrix() * r.matrix()).max_abs_diff(psd), 1e-10);
  }
}

TEST(ProbDistTest, Validation) {
  EXPECT_THROW(ProbDist({0.5, 0.6}), DomainError);
  EXPECT_THROW(ProbDist({-0.1, 1.1}), DomainError);
  EXPECT_THROW(ProbDist(std::vector<double>{}), DomainError);
  EXPECT_NO_THROW(ProbDist({0.5, 0.5 + 5e-10}));
  const ProbDist d = ProbDist::from_weights({2.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(d[0], 0.5);
  EXPECT_THROW(ProbDist::from_weights({0.0, 0.0}), DomainError);
}

TEST(Eigen, IdentityAndTwoByTwo) {
  const auto ev = sym_eigenvalues(SymMatrix::identity(3));
  for (double x : ev) EXPECT_NEAR(x, 1.0, 1e-15);
  std::mt19937_64 g(5);
  for (int k = 0; k < 100; ++k) {
    const SymMatrix a = random_sym(g, 2);
    Eigen::SelfAdjointEigenSolver<Mat> es(a.matrix());
    const auto got = sym_eigenvalues(a);
    EXPECT_NEAR(got[0], es.eigenvalues()[0], 1e-12);
    EXPECT_NEAR(got[1], es.eigenvalues()[1], 1e-12);
  }
}

TEST(Eigen, MatchesTrigonometricCubic) {
  std::mt19937_64 g(9);
  for (int k = 0; k < 500; ++k) {
    const SymMatrix a = random_sym(g, 3);
    const auto want = cubic_eigenvalues(a.matrix());
    const auto got = sym_eigenvalues(a);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[static_cast<std::size_t>(i)], want[static_cast<std::size_t>(i)], 1e-10);
  }
}

TEST(Eigen, LiftedTrineDensityMatrix) {
  for (double a : {0.0, 0.03, 0.2, 1.0 / 3.0, 0.7}) {
    const auto ev = sym_eigenvalues(lifted_trines(a).density_matrix());
    std::vector<double> want{0.5 * (1.0 - a), 0.5 * (1.0 - a), a};
    std::sort(want.begin(), want.end());
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(ev[static_cast<std::size_t>(i)], want[static_cast<std::size_t>(i)], 1e-12);
    // Unnormalized sum over the three states: 3 rho.
    const SymMatrix s = lifted_trines(a).density_matrix() * 3.0;
    EXPECT_NEAR(min_eigenvalue(s), std::min(3.0 * a, 1.5 * (1.0 - a)), 1e-12);
  }
}

TEST(Eigen, PositiveCombinationsArePsd) {
  std::mt19937_64 g(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n;
  for (int k = 0; k < 200; ++k) {
    SymMatrix s = SymMatrix::zero(3);
    for (int j = 0; j < 5; ++j) s += SymMatrix::outer(StateVector::normalized(Vec{{n(g), n(g), n(g)}}), u(g));
    EXPECT_GE(min_eigenvalue(s), -1e-10);
  }
}

#include "trinecap/info.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace trinecap;

namespace {

// I(X;Y) from the joint distribution, computed without TransitionMatrix.
double joint_mi(const Ensemble& e, const Povm& m) {
  const std::size_t n = e.size(), k = m.size();
  std::vector<std::vector<double>> joint(n, std::vector<double>(k));
  std::vector<double> py(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      joint[i][j] = e.priors()[i] * m[j].weight * std::pow(m[j].vector.dot(e.state(i)), 2);
      py[j] += joint[i][j];
    }
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (joint[i][j] > 0.0) mi += joint[i][j] * std::log2(joint[i][j] / (e.priors()[i] * py[j]));
    }
  }
  return mi;
}

Povm random_basis(std::mt19937_64& g, int d) {
  std::normal_distribution<double> n;
  Mat a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = n(g);
  }
  Eigen::HouseholderQR<Mat> qr(a);
  const Mat q = qr.householderQ();
  std::vector<PovmElement> e;
  for (int j = 0; j < d; ++j) e.push_back({1.0, StateVector::normalized(q.col(j))});
  return Povm(e);
}

Ensemble random_trines(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return lifted_trines(0.5 * u(g), ProbDist::from_weights({u(g) + 0.01, u(g) + 0.01, u(g) + 0.01}));
}

// Best two-outcome projective measurement for two real states, by scanning
// the measurement angle and polishing with ternary search.
double brute_two_state(double kappa, double p) {
  const double t = std::acos(std::sqrt(kappa));
  const Ensemble e({StateVector{1.0, 0.0}, StateVector{std::cos(t), std::sin(t)}}, ProbDist({p, 1.0 - p}));
  auto f = [&](double th) {
    return joint_mi(e, Povm({{1.0, StateVector{std::cos(th), std::sin(th)}},
                             {1.0, StateVector{-std::sin(th), std::cos(th)}}}));
  };
  double best = -1.0, arg = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double th = kPi * k / 2000.0;
    if (f(th) > best) {
      best = f(th);
      arg = th;
    }
  }
  double lo = arg - kPi / 2000.0, hi = arg + kPi / 2000.0;
  for (int it = 0; it < 100; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return f(0.5 * (lo + hi));
}

}  // namespace

TEST(TransitionMatrixTest, Validation) {
  EXPECT_THROW(TransitionMatrix({{0.5, 0.4}}), DomainError);
  EXPECT_THROW(TransitionMatrix({{0.5, 0.5}, {1.0}}), DimensionError);
  const TransitionMatrix t({{0.2, 0.3, 0.5}});
  const TransitionMatrix m = t.merge_outputs(0, 2);
  EXPECT_EQ(m.outputs(), 2u);
  EXPECT_DOUBLE_EQ(m(0, 0), 0.7);
}

TEST(InducedChannel, Examples) {
  // Orthogonal states with the matching basis: identity channel.
  const Ensemble e({StateVector{1.0, 0.0}, StateVector{0.0, 1.0}}, ProbDist::uniform(2));
  const TransitionMatrix t = induced_channel(e, Povm({{1.0, StateVector{1.0, 0.0}}, {1.0, StateVector{0.0, 1.0}}}));
  EXPECT_DOUBLE_EQ(t(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(t(1, 0), 0.0);

  // T_1, T_2 measured in the pi/4, 3pi/4 basis: binary symmetric channel.
  const Ensemble pair({planar_trines().state(1), planar_trines().state(2)}, ProbDist::uniform(2));
  const double c = std::cos(kPi / 4.0);
  const TransitionMatrix b = induced_channel(pair, Povm({{1.0, StateVector{c, c}}, {1.0, StateVector{-c, c}}}));
  const double err = 0.5 - std::sqrt(3.0) / 4.0;
  EXPECT_NEAR(std::min(b(0, 0), b(0, 1)), err, 1e-12);
  EXPECT_NEAR(b(0, 0), b(1, 1), 1e-12);

  // Q(beta) at the two-trine angle: T_1 never lands on Q_0.
  for (double a : {0.01, 0.05, 0.2}) {
    EXPECT_NEAR(induced_channel(lifted_trines(a), q_measurement(two_trine_beta(a)))(1, 0), 0.0, 1e-12);
  }
}

TEST(MutualInformation, KnownValues) {
  EXPECT_NEAR(mutual_information(planar_trines(), planar_antitrine_povm(2)), kLog2_3 - 1.0, 1e-9);
  const double c = std::cos(kPi / 4.0);
  const Povm diag({{1.0, StateVector{c, c}}, {1.0, StateVector{-c, c}}});
  EXPECT_NEAR(mutual_information(planar_trines(ProbDist({0.0, 0.5, 0.5})), diag), 0.64542, 1e-5);
}

TEST(MutualInformation, DeterministicChannel) {
  for (std::size_t k : {2u, 3u, 5u}) {
    std::vector<std::vector<double>> rows(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) rows[i][(i + 1) % k] = 1.0;
    EXPECT_NEAR(mutual_information(ProbDist::uniform(k), TransitionMatrix(rows)), std::log2(double(k)), 1e-12);
  }
}

TEST(MutualInformation, MatchesJointOracleAndBounds) {
  std::mt19937_64 g(31);
  for (int k = 0; k < 200; ++k) {
    const Ensemble e = random_trines(g);
    const Povm m = random_basis(g, 3);
    const double mi = mutual_information(e, m);
    EXPECT_NEAR(mi, joint_mi(e, m), 1e-12);
    EXPECT_GE(mi, -1e-15);
    EXPECT_LE(mi, std::min(shannon_entropy(e.priors()), std::log2(3.0)) + 1e-12);
  }
}

TEST(MutualInformation, MergingOutputsNeverHelps) {
  std::mt19937_64 g(37);
  for (int k = 0; k < 100; ++k) {
    const Ensemble e = random_trines(g);
    const TransitionMatrix t = induced_channel(e, random_basis(g, 3));
    const std::size_t a = static_cast<std::size_t>(k % 3), b = static_cast<std::size_t>((k + 1) % 3);
    EXPECT_LE(mutual_information(e.priors(), t.merge_outputs(a, b)), mutual_information(e.priors(), t) + 1e-12);
  }
}

TEST(BlahutArimoto, ClosedForms) {
  const double eps = 0.11;
  const auto bsc = blahut_arimoto(TransitionMatrix({{1 - eps, eps}, {eps, 1 - eps}}));
  EXPECT_NEAR(bsc.capacity, 1.0 - binary_entropy(eps), 1e-9);
  EXPECT_NEAR(bsc.optimal_priors[0], 0.5, 1e-6);

  const auto id = blahut_arimoto(TransitionMatrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  EXPECT_NEAR(id.capacity, kLog2_3, 1e-9);
  for (double p : id.optimal_priors) EXPECT_NEAR(p, 1.0 / 3.0, 1e-6);

  // Z channel: input 1 flips to 0 with probability s.
  const double s = 0.3;
  const auto z = blahut_arimoto(TransitionMatrix({{1, 0}, {s, 1 - s}}));
  EXPECT_NEAR(z.capacity, std::log2(1.0 + (1.0 - s) * std::pow(s, s / (1.0 - s))), 1e-9);

  const double er = 0.25;
  EXPECT_NEAR(blahut_arimoto(TransitionMatrix({{1 - er, 0, er}, {0, 1 - er, er}})).capacity, 1.0 - er, 1e-9);
}

TEST(BlahutArimoto, DominatesAnyPrior) {
  std::mt19937_64 g(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const TransitionMatrix t = induced_channel(random_trines(g), random_basis(g, 3));
    const double cap = blahut_arimoto(t).capacity;
    const ProbDist p = ProbDist::from_weights({u(g), u(g), u(g)});
    EXPECT_GE(cap, mutual_information(p, t) - 1e-9);
    EXPECT_LE(cap, std::log2(3.0) + 1e-12);
  }
}

TEST(TwoStateAccessibleInfo, Examples) {
  EXPECT_NEAR(two_state_accessible_info(0.25, 0.5), 0.64542, 1e-5);
  EXPECT_NEAR(two_state_accessible_info(0.0, 0.5), 1.0, 1e-12);
  EXPECT_EQ(two_state_accessible_info(0.3, 0.0), 0.0);
  EXPECT_THROW(two_state_accessible_info(1.2, 0.5), DomainError);
}

TEST(TwoStateAccessibleInfo, MatchesBruteForceMeasurement) {
  std::mt19937_64 g(43);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int k = 0; k < 30; ++k) {
    const double kappa = u(g), p = u(g);
    EXPECT_NEAR(two_state_accessible_info(kappa, p), brute_two_state(kappa, p), 1e-9) << kappa << ' ' << p;
  }
}

TEST(HolevoChi, Examples) {
  EXPECT_NEAR(holevo_chi(lifted_trines(1.0 / 3.0)), kLog2_3, 1e-12);
  EXPECT_NEAR(holevo_chi(lifted_trines(0.0)), 1.0, 1e-12);
  EXPECT_NEAR(holevo_chi(planar_trines()), 1.0, 1e-12);
  for (double a : {0.01, 0.1, 0.5}) {
    EXPECT_NEAR(holevo_chi(lifted_trines(a)), entropy_bits({0.5 * (1 - a), 0.5 * (1 - a), a}), 1e-12);
  }
}

TEST(HolevoChi, BoundsEveryMeasurement) {
  std::mt19937_64 g(47);
  for (int k = 0; k < 100; ++k) {
    const Ensemble e = random_trines(g);
    EXPECT_GE(holevo_chi(e), mutual_information(e, random_basis(g, 3)) - 1e-12);
  }
}

TEST(PriorDerivative, KnownExamples) {
  const Ensemble e = planar_trines(ProbDist({0.0, 0.5, 0.5}));
  auto at = [&](double th) {
    return projector_prior_derivative(e, Vec{{std::cos(th), std::sin(th)}}, kCanonicalPriorDirection);
  };
  EXPECT_NEAR(at(kPi / 4.0), -0.3227, 1e-3);
  EXPECT_GT(at(1e-6), 1.9);
  EXPECT_LT(at(1e-6), 2.0 + 1e-3);
}

TEST(PriorDerivative, MatchesCentralDifference) {
  std::mt19937_64 g(53);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Ensemble e = random_trines(g);
    const Povm m = random_basis(g, 3);
    std::vector<double> dir{u(g) - 0.5, u(g) - 0.5, 0.0};
    dir[2] = -dir[0] - dir[1];
    const double h = 1e-5;
    auto shifted = [&](double t) {
      std::vector<double> p(3);
      for (int i = 0; i < 3; ++i) p[static_cast<std::size_t>(i)] = e.priors()[static_cast<std::size_t>(i)] + t * dir[static_cast<std::size_t>(i)];
      return mutual_information(e.with_priors(ProbDist(p)), m);
    };
    const double fd = (shifted(h) - shifted(-h)) / (2.0 * h);
    EXPECT_NEAR(prior_derivative(e, m, dir), fd, 1e-6);
  }
  EXPECT_THROW(prior_derivative(planar_trines(), planar_antitrine_povm(2), {1.0, 0.0, 0.0}), DomainError);
}

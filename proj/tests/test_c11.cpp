#include "trinecap/c11.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

using namespace trinecap;

namespace {

// Capacity of a symmetric-prior channel by brute force over p0, on a linear
// grid plus a log grid (the optimum can sit far below the linear step).
double brute_symmetric(const TransitionMatrix& t, double* arg = nullptr) {
  double best = 0.0, at = 0.0;
  auto try_p = [&](double p) {
    const double v = mutual_information(third_prior_dist(p), t);
    if (v > best) best = v, at = p;
  };
  for (int k = 0; k <= 20000; ++k) try_p(k / 20000.0);
  for (int k = 0; k <= 30000; ++k) try_p(std::pow(10.0, -k / 1000.0));
  if (arg) *arg = at;
  return best;
}

TransitionMatrix q_like(double q, double delta, double eps) {
  return TransitionMatrix({{delta, 0.5 * (1.0 - delta), 0.5 * (1.0 - delta)},
                           {eps, 1.0 - q - eps, q},
                           {eps, q, 1.0 - q - eps}});
}

}  // namespace

TEST(TwoTrine, Examples) {
  EXPECT_NEAR(two_trine_capacity(0.0), 0.64542, 1e-5);
  EXPECT_NEAR(two_trine_capacity(1.0 / 3.0), 1.0, 1e-12);
  // The pair states become orthogonal at 1/3; in between the capacity rises.
  double prev = two_trine_capacity(0.0);
  for (int k = 1; k <= 30; ++k) {
    const double v = two_trine_capacity(k / 90.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_THROW(two_trine_capacity(0.4), DomainError);
}

TEST(TwoTrine, MatchesTwoStateFormula) {
  for (double a : {0.0, 0.05, 0.2}) {
    const double ip = 0.5 * (3.0 * a - 1.0);
    EXPECT_NEAR(two_trine_capacity(a), two_state_accessible_info(ip * ip, 0.5), 1e-12) << a;
  }
}

TEST(OptimalThirdPrior, MatchesBlahutArimoto) {
  for (double a : {0.005, 0.02, 0.05, 0.1}) {
    for (double beta : {0.3, 2.0 / 3.0, two_trine_beta(a)}) {
      const QChannel ch = q_channel(a, beta);
      const C11Point p = q_channel_capacity(a, beta, C11Method::opt_measurement_opt_prior);
      BlahutArimotoOptions opt;
      opt.tolerance = 1e-12;
      const ChannelResult ba = blahut_arimoto(ch.matrix, opt);
      EXPECT_NEAR(p.value, ba.capacity, 1e-8) << a << ' ' << beta;
      EXPECT_NEAR(p.value, brute_symmetric(ch.matrix), 1e-8);
    }
  }
}

TEST(OptimalThirdPrior, SingularAndExtremeChannels) {
  EXPECT_THROW(optimal_third_prior(0.1, 0.2, 0.2), DomainError);
  // Nearly perfect pair with a weak third input: the prior is tiny but finite.
  for (auto [q, d, e] : std::vector<std::array<double, 3>>{{1e-6, 0.05, 0.0}, {0.01, 0.3, 0.01}, {0.2, 0.9, 0.05}}) {
    const double p = optimal_third_prior(q, d, e);
    double arg = 0.0;
    const double best = brute_symmetric(q_like(q, d, e), &arg);
    EXPECT_NEAR(mutual_information(third_prior_dist(p), q_like(q, d, e)), best, 1e-9) << q;
    EXPECT_NEAR(std::log10(p), std::log10(arg), 0.01) << q;
  }
  EXPECT_LT(optimal_third_prior(1e-6, 0.05, 0.0), 1e-6);
}

TEST(QChannel, RowsAreDistributions) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const QChannel ch = q_channel(u(g) * 0.3, u(g));
    EXPECT_NEAR(ch.q + ch.epsilon + ch.matrix(1, 1), 1.0, 1e-12);
    EXPECT_NEAR(ch.matrix(0, 1), ch.matrix(0, 2), 1e-12);
  }
}

TEST(FixedMeasurement, CloseToTwoTrineAtSmallAlpha) {
  for (double a : {0.0, 0.0005, 0.001}) {
    EXPECT_NEAR(c11_fixed_measurement(a).value, two_trine_capacity(a), 1e-3 * std::max(a, 1e-4)) << a;
    EXPECT_GE(c11_fixed_measurement(a).value, two_trine_capacity(a) - 1e-12);
  }
}

TEST(C11Curve, DominanceChain) {
  for (double a : {0.01, 0.03, 0.05, 0.08, 0.15, 0.3}) {
    const C11Row r = c11_curve({a}).front();
    EXPECT_GE(r.fixed, r.two_trine - 1e-12) << a;
    EXPECT_GE(r.best_q, r.fixed - 1e-9) << a;
    EXPECT_GE(r.best.value, std::max({r.best_q, r.two_trine, r.equal_prior}) - 1e-15);
    EXPECT_LE(r.best.value, entropy_bits({0.5 * (1.0 - a), 0.5 * (1.0 - a), a}) + 1e-12);
  }
}

TEST(BestQ, BetaSettlesAtTwoThirds) {
  for (double a : {0.045, 0.06, 0.087247, 0.15}) {
    EXPECT_NEAR(c11_best_q_measurement(a).beta, 2.0 / 3.0, 1e-4) << a;
  }
  EXPECT_NEAR(c11_best_q_measurement(0.087247).value, 1.03126, 1e-5);
  EXPECT_NEAR(c11_best_q_measurement(0.0).value, two_trine_capacity(0.0), 1e-8);
  EXPECT_LT(c11_best_q_measurement(0.01).beta, 0.6);
}

TEST(TrineVn, Examples) {
  EXPECT_NEAR(trine_vn_info(1.0 / 3.0, 0.0), kLog2_3, 1e-12);
  EXPECT_NEAR(trine_vn_info(0.0, kPi / 6.0), std::log2(1.5), 1e-12);
  for (double a : {0.0, 0.1, 0.5}) {
    EXPECT_NEAR(trine_vn_info(a, 0.3), trine_vn_info(a, -0.3), 1e-12);
    EXPECT_NEAR(trine_vn_info(a, 0.3), trine_vn_info(a, 0.3 + 2.0 * kPi / 3.0), 1e-12);
  }
}

TEST(TrineVn, OptimalThetaShrinksToZero) {
  EXPECT_NEAR(opt_theta(0.0), kPi / 6.0, 1e-6);
  double prev = opt_theta(0.0);
  for (int k = 1; k <= 12; ++k) {
    const double t = opt_theta(0.005 * k);
    EXPECT_LE(t, prev + 1e-9);
    prev = t;
  }
  EXPECT_NEAR(opt_theta(0.06), 0.0, 1e-6);
  EXPECT_NEAR(opt_theta_vanishing_alpha(), 0.056651, 5e-4);
  for (double a : {0.001, 0.03, 0.2}) {
    const double t = opt_theta(a);
    for (int k = 0; k <= 60; ++k) EXPECT_GE(trine_vn_info(a, t) + 1e-12, trine_vn_info(a, kPi / 3.0 * k / 60.0));
  }
}

TEST(Gamma1, KnownValueAndTangency) {
  const double g1 = find_gamma1();
  EXPECT_NEAR(g1, 0.061367, 5e-4);
  EXPECT_NEAR(std::asin(std::sqrt(g1)), 0.25033, 1e-3);
  // The line through alpha = 0 and gamma_1 is tangent to the envelope.
  const double g0 = max_trine_vn_info(0.0), top = max_trine_vn_info(g1);
  for (int k = 1; k < 40; ++k) {
    const double a = g1 * k / 40.0;
    EXPECT_GE(g0 + (top - g0) * a / g1, max_trine_vn_info(a) - 1e-9) << a;
  }
  // Past gamma_1 the envelope is concave, so the tangent line stays above it.
  for (double a : {0.07, 0.1, 0.2}) EXPECT_GE(g0 + (top - g0) * a / g1, max_trine_vn_info(a) - 1e-9) << a;
}

TEST(EqualPrior, LinearBelowGamma1AndRealized) {
  const double g1 = gamma1();
  const double v0 = equal_prior_accessible_info(0.0).value, v1 = equal_prior_accessible_info(g1).value;
  for (int k = 0; k <= 10; ++k) {
    const double a = g1 * k / 10.0;
    const auto r = equal_prior_accessible_info(a);
    EXPECT_NEAR(r.value, v0 + (v1 - v0) * k / 10.0, 1e-10);
    EXPECT_NEAR(mutual_information(lifted_trines(a), r.povm), r.value, 1e-9) << a;
    EXPECT_LE(r.povm.completeness_residual(), 1e-9);
  }
  EXPECT_NEAR(equal_prior_accessible_info(0.024831).value - max_trine_vn_info(0.024831), 0.0038282, 1e-4);
}

TEST(C11Curve, NotConcave) {
  // The chord from 0 to gamma_2 passes above the curve in between.
  const double g2 = 0.087247;
  const double c0 = c11_value(0.0), c2 = c11_value(g2);
  double worst = 0.0;
  for (int k = 1; k < 20; ++k) {
    const double a = g2 * k / 20.0;
    worst = std::max(worst, c0 + (c2 - c0) * a / g2 - c11_value(a));
  }
  EXPECT_GE(worst, 1e-3);
}

TEST(PriorDecay, PositiveAndGrowingWithAlpha) {
  const auto rows = p0_decay_scan({0.002, 0.006, 0.01, 0.014, 0.017});
  for (const auto& r : rows) EXPECT_GT(r.p0, 0.0) << r.alpha;
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(rows[i].p0, rows[i - 1].p0) << rows[i].alpha;
}

TEST(QChannel, RoundingAtTheBoundary) {
  // Some beta in the search gives entries a few ulps above 1 here.
  EXPECT_NO_THROW(c11_best_q_measurement(0.085));
  for (int k = 0; k <= 100; ++k) EXPECT_NO_THROW(c11_curve({0.001 * k})) << k;
}

#pragma once

// One-shot capacity estimates for the lifted trines: the two-trine
// capacity, the Q(beta) channel family with optimized priors, and the
// equal-prior accessible information built from symmetric triple POVMs.

#include "trinecap/ensembles.hpp"
#include "trinecap/info.hpp"
#include "trinecap/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace trinecap {

enum class C11Method { two_trine, fixed_measurement_opt_prior, opt_measurement_opt_prior, symmetric_povm };

inline const char* to_string(C11Method m) {
  switch (m) {
    case C11Method::two_trine: return "two_trine";
    case C11Method::fixed_measurement_opt_prior: return "fixed_measurement_opt_prior";
    case C11Method::opt_measurement_opt_prior: return "opt_measurement_opt_prior";
    case C11Method::symmetric_povm: return "symmetric_povm";
  }
  return "unknown";
}

struct C11Point {
  double alpha;
  double value;  // bits
  double beta;   // NaN when the method has no Q(beta) parameter
  ProbDist priors;
  C11Method method;
};

/// Binary crossover of the best measurement for {T_1(alpha), T_2(alpha)}.
inline double two_trine_crossover(double alpha) {
  return 0.5 - 0.25 * std::sqrt(std::max(0.0, 3.0 * (1.0 - alpha) * (1.0 + 3.0 * alpha)));
}

/// Capacity using only T_1 and T_2: 1 - H(crossover).
inline double two_trine_capacity(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0 / 3.0)) throw DomainError("two_trine_capacity: alpha outside [0,1/3]");
  return 1.0 - binary_entropy(std::clamp(two_trine_crossover(alpha), 0.0, 1.0));
}

// ---------------------------------------------------------------------------
// Q(beta) channels

/// Channel parameters for lifted trines measured with Q(beta):
/// T_1 -> (Q_1, Q_2, Q_0) with (1-q-eps, q, eps), T_0 -> Q_0 with delta.
struct QChannel {
  double q, delta, epsilon;
  TransitionMatrix matrix;  // rows T_0, T_1, T_2; columns Q_0, Q_1, Q_2
};

inline QChannel q_channel(double alpha, double beta) {
  TransitionMatrix t = induced_channel(lifted_trines(alpha), q_measurement(beta));
  // Entries can round a few ulps past [0, 1].
  auto unit = [](double x) { return std::clamp(x, 0.0, 1.0); };
  return {unit(t(1, 2)), unit(t(0, 0)), unit(t(1, 0)), std::move(t)};
}

/// Optimal prior on T_0 when T_1 and T_2 share the rest equally.
inline double optimal_third_prior(double q, double delta, double epsilon) {
  const double gap = delta - epsilon;
  if (std::abs(gap) < 1e-15) throw DomainError("optimal_third_prior: singular channel (delta == epsilon)");
  const double z = (1.0 - epsilon - entropy_bits({q, epsilon, 1.0 - q - epsilon}) + binary_entropy(delta)) / gap;
  double p;
  if (z > 0.0) {
    const double e = std::exp2(-z);  // avoids overflow of 2^z
    p = ((1.0 - epsilon) * e - epsilon) / (gap * (e + 1.0));
  } else {
    const double e = std::exp2(z);
    p = (1.0 - epsilon - epsilon * e) / (gap * (1.0 + e));
  }
  return std::clamp(p, 0.0, 1.0);
}

inline ProbDist third_prior_dist(double p0) { return ProbDist({p0, 0.5 * (1.0 - p0), 0.5 * (1.0 - p0)}); }

/// Capacity of the Q(beta) channel with symmetric priors optimized over p_0.
inline C11Point q_channel_capacity(double alpha, double beta, C11Method method) {
  const QChannel ch = q_channel(alpha, beta);
  double p0;
  if (std::abs(ch.delta - ch.epsilon) >= 1e-12) {
    p0 = optimal_third_prior(ch.q, ch.delta, ch.epsilon);
  } else {
    p0 = maximize_1d([&](double p) { return mutual_information(third_prior_dist(p), ch.matrix); }, 0.0, 1.0).arg;
  }
  ProbDist pri = third_prior_dist(p0);
  const double v = mutual_information(pri, ch.matrix);
  return {alpha, v, beta, std::move(pri), method};
}

/// Q(4 alpha / (3 alpha + 1)) with optimized priors.
inline C11Point c11_fixed_measurement(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0 / 3.0)) throw DomainError("c11_fixed_measurement: alpha outside [0,1/3)");
  return q_channel_capacity(alpha, two_trine_beta(alpha), C11Method::fixed_measurement_opt_prior);
}

/// Q(beta) and priors both optimized.
inline C11Point c11_best_q_measurement(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("c11_best_q_measurement: alpha outside [0,1)");
  const auto best = maximize_1d(
      [&](double b) { return q_channel_capacity(alpha, b, C11Method::opt_measurement_opt_prior).value; }, 0.0, 1.0,
      200);
  return q_channel_capacity(alpha, best.arg, C11Method::opt_measurement_opt_prior);
}

// ---------------------------------------------------------------------------
// Symmetric triple POVMs

/// Mutual information of the lifted trines (uniform priors) measured in the
/// basis V(theta).
inline double trine_vn_info(double alpha, double theta) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("trine_vn_info: alpha outside [0,1]");
  const double amp = std::sqrt(2.0 * (1.0 - alpha) / 3.0), lift = std::sqrt(alpha / 3.0);
  double s = kLog2_3;
  for (int b = 0; b < 3; ++b) {
    const double a = amp * std::cos(theta - 2.0 * kPi * b / 3.0) + lift;
    s += xlog2x(a * a);
  }
  return s;
}

/// argmax over theta of trine_vn_info. The function has period 2 pi/3 and is
/// even, so [0, pi/3] covers every basis.
inline double opt_theta(double alpha) {
  return maximize_1d([alpha](double t) { return trine_vn_info(alpha, t); }, 0.0, kPi / 3.0, 240).arg;
}

inline double max_trine_vn_info(double alpha) { return trine_vn_info(alpha, opt_theta(alpha)); }

/// Second theta-derivative of trine_vn_info at theta = 0.
inline double trine_vn_curvature_at_zero(double alpha) {
  const double amp = std::sqrt(2.0 * (1.0 - alpha) / 3.0), lift = std::sqrt(alpha / 3.0);
  double s = 0.0;
  for (int b = 0; b < 3; ++b) {
    const double ang = -2.0 * kPi * b / 3.0;
    const double a = amp * std::cos(ang) + lift;
    const double da = -amp * std::sin(ang), dda = -amp * std::cos(ang);
    const double l = std::log(a * a);
    s += (2.0 * l + 6.0) * da * da + (2.0 * a * l + 2.0 * a) * dda;
  }
  return s / std::log(2.0);
}

/// Smallest alpha at which theta = 0 becomes a local maximum of
/// trine_vn_info, i.e. where opt_theta reaches 0.
inline double opt_theta_vanishing_alpha() {
  return bisect_root(trine_vn_curvature_at_zero, 0.01, 0.1, 1e-12);
}

namespace detail {

/// Slope of alpha -> max_theta trine_vn_info (envelope theorem: partial in
/// alpha at the optimal theta).
inline double vn_envelope_slope(double alpha) {
  const double t = opt_theta(alpha), h = 1e-6;
  return (trine_vn_info(alpha + h, t) - trine_vn_info(alpha - h, t)) / (2.0 * h);
}

}  // namespace detail

/// Point where the chord from (0, max_theta I(0, theta)) touches the curve
/// alpha -> max_theta trine_vn_info(alpha, theta).
inline double find_gamma1() {
  const double g0 = max_trine_vn_info(0.0);
  auto excess = [g0](double a) { return detail::vn_envelope_slope(a) * a - (max_trine_vn_info(a) - g0); };
  return bisect_root(excess, 0.03, 0.2, 1e-9);
}

/// find_gamma1, computed once per process.
inline double gamma1() {
  static const double g = find_gamma1();
  return g;
}

/// sin^2 phi such that M(phi) maps T(alpha) to T(target).
inline double lift_sin2(double alpha, double target) {
  return (1.0 - alpha) / (1.0 + alpha * (2.0 - 3.0 * target) / target);
}

struct EqualPriorResult {
  double value;  // bits
  Povm povm;
};

/// Accessible information of the lifted trines at equal priors over symmetric
/// triple POVMs. Below gamma_1 the optimum mixes the planar-optimal triple
/// with V(0) applied after lifting to gamma_1.
inline EqualPriorResult equal_prior_accessible_info(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("equal_prior_accessible_info: alpha outside [0,1]");
  const double g1 = gamma1();
  if (alpha >= g1) {
    const double t = opt_theta(alpha);
    return {trine_vn_info(alpha, t), vn_basis(t)};
  }
  const double w = alpha / g1;
  const double value = (1.0 - w) * trine_vn_info(0.0, kPi / 6.0) + w * trine_vn_info(g1, 0.0);
  const double s2 = lift_sin2(alpha, g1);
  const double p2 = 1.0 / (3.0 * s2);
  return {value, triple_povm({{1.0 - p2, 0.0, kPi / 6.0}, {p2, std::asin(std::sqrt(s2)), 0.0}})};
}

// ---------------------------------------------------------------------------
// Curves

struct C11Row {
  double alpha;
  double two_trine;    // NaN above alpha = 1/3
  double fixed;        // NaN at alpha >= 1/3
  double best_q;
  double equal_prior;  // equal_prior_accessible_info
  C11Point best;
};

/// Pointwise maximum of the four lower bounds, labelled by the winner.
inline std::vector<C11Row> c11_curve(const std::vector<double>& alphas) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<C11Row> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    const double tt = a <= 1.0 / 3.0 ? two_trine_capacity(a) : nan;
    std::optional<C11Point> fixed;
    if (a < 1.0 / 3.0) fixed = c11_fixed_measurement(a);
    C11Point bq = c11_best_q_measurement(a);
    const double ep = equal_prior_accessible_info(a).value;

    C11Point best = bq;
    if (fixed && fixed->value > best.value) best = *fixed;
    if (!std::isnan(tt) && tt > best.value) {
      best = {a, tt, two_trine_beta(a), ProbDist({0.0, 0.5, 0.5}), C11Method::two_trine};
    }
    if (ep > best.value) best = {a, ep, nan, ProbDist::uniform(3), C11Method::symmetric_povm};
    out.push_back({a, tt, fixed ? fixed->value : nan, bq.value, ep, best});
  }
  return out;
}

inline double c11_value(double alpha) { return c11_curve({alpha}).front().best.value; }

struct DecayRow {
  double alpha;
  double p0;
  double beta;
};

/// Optimal T_0 prior of c11_best_q_measurement for each alpha.
inline std::vector<DecayRow> p0_decay_scan(const std::vector<double>& alphas) {
  std::vector<DecayRow> out;
  for (double a : alphas) {
    const C11Point p = c11_best_q_measurement(a);
    out.push_back({a, p.priors[0], p.beta});
  }
  return out;
}

}  // namespace trinecap

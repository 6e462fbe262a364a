#pragma once

// Adaptive (LOCC) protocols for the lifted trines: lift-or-project followed by
// either the planar pair measurement or V(0), their stage rates, the simple
// first protocol's stage channels, and a seeded Monte Carlo of one signal's
// measurement cascade.

#include "trinecap/c11.hpp"
#include "trinecap/ensembles.hpp"
#include "trinecap/info.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace trinecap {

/// Default lift target: where the chord from the planar two-trine capacity
/// touches the C11 curve (also recomputable with find_gamma2).
inline constexpr double kGamma2 = 0.087247;

struct AdaptiveRates {
  double alpha;
  double gamma;
  double tau1;   // bits, first stage
  double tau2;   // bits, second stage
  double total;  // tau1 + tau2
};

/// <V_b(0)|T_b(gamma)>^2
inline double v_overlap(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("v_overlap: gamma outside [0,1]");
  const double a = std::sqrt(2.0 * (1.0 - gamma) / 3.0) + std::sqrt(gamma / 3.0);
  return a * a;
}

namespace detail {

inline double checked_overlap(double gamma) {
  if (!(gamma > 0.0 && gamma < 8.0 / 9.0)) throw DomainError("stage rate: gamma outside (0, 8/9)");
  return v_overlap(gamma);
}

}  // namespace detail

/// Rate from learning only which pair {a, a+1} the letter lies in, from
/// V(0) outcomes on T(gamma): log2 3 - H((1+p)/4, (1+p)/4, (1-p)/2).
inline double stage1_rate_from_overlap(double p) {
  return kLog2_3 - entropy_bits({0.25 * (1.0 + p), 0.25 * (1.0 + p), 0.5 * (1.0 - p)});
}

/// Remaining rate once the pair is known: (1+p)/2 (1 - H(2p/(1+p))).
inline double stage2_rate_from_overlap(double p) {
  return 0.5 * (1.0 + p) * (1.0 - binary_entropy(std::min(1.0, 2.0 * p / (1.0 + p))));
}

inline double stage1_rate(double gamma) { return stage1_rate_from_overlap(detail::checked_overlap(gamma)); }
inline double stage2_rate(double gamma) { return stage2_rate_from_overlap(detail::checked_overlap(gamma)); }

/// First protocol: lift to gamma = 1/3 (orthogonal states) with probability
/// 3 alpha, otherwise project to the plane.
inline AdaptiveRates simple_protocol_rate(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0 / 3.0)) throw DomainError("simple_protocol_rate: alpha outside [0,1/3]");
  const double c0 = two_trine_capacity(0.0);
  const double tau1 = 3.0 * alpha * (kLog2_3 - 1.0);
  const double tau2 = c0 * (1.0 - 3.0 * alpha) + 3.0 * alpha;
  return {alpha, 1.0 / 3.0, tau1, tau2, tau1 + tau2};
}

/// Lift to gamma with probability alpha/gamma, else project to the plane;
/// the planar branch runs at the two-trine capacity, the lifted branch at
/// the C11 value of T(gamma).
inline AdaptiveRates best_protocol_rate(double alpha, double gamma = kGamma2) {
  if (!(gamma > 0.0 && gamma < 8.0 / 9.0)) throw DomainError("best_protocol_rate: gamma outside (0, 8/9)");
  if (!(alpha >= 0.0)) throw DomainError("best_protocol_rate: alpha negative");
  if (alpha > gamma) throw DomainError("best_protocol_rate: alpha exceeds gamma");
  const double w = alpha / gamma;
  const double c0 = two_trine_capacity(0.0);
  const double s1 = stage1_rate(gamma), s2 = stage2_rate(gamma);
  const double tau1 = s1 * w;
  const double tau2 = c0 * (1.0 - w) + s2 * w;
  return {alpha, gamma, tau1, tau2, tau1 + tau2};
}

/// Holevo capacity of the lifted trines (uniform priors are optimal by symmetry).
inline double holevo_capacity(double alpha) {
  return entropy_bits({0.5 * (1.0 - alpha), 0.5 * (1.0 - alpha), alpha});
}

/// gamma at which the chord from (0, two-trine capacity) is tangent to the
/// C11 curve. `c11` defaults to c11_value; tests may pass a cheaper curve.
template <class F>
double find_gamma2(F&& c11, double lo = 0.05, double hi = 0.2, double tol = 1e-5) {
  const double c0 = two_trine_capacity(0.0);
  auto slope = [&](double g) { return (c11(g) - c0) / g; };
  // Tangency maximizes the chord slope; golden-section on the unimodal slope.
  const double r = 0.5 * (3.0 - std::sqrt(5.0));
  double a = lo, b = hi, x1 = a + r * (b - a), x2 = b - r * (b - a);
  double f1 = slope(x1), f2 = slope(x2);
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + r * (b - a);
      f1 = slope(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = b - r * (b - a);
      f2 = slope(x2);
    }
  }
  return 0.5 * (a + b);
}

inline double find_gamma2() {
  return find_gamma2([](double g) { return c11_value(g); });
}

// ---------------------------------------------------------------------------
// First-protocol stage channels

struct StageChannels {
  TransitionMatrix stage1;  // inputs T_0..T_2; outputs D_0, D_1, D_2, planar
  TransitionMatrix stage2;
};

/// Stage channels of the simple protocol under the pair code used by the
/// adaptive scheme (letter b = a + s, a uniform, s a bit).
///
/// Stage 1 input is the pair label a; the outputs are D_a, D_{a+1} (the
/// letter was lifted and identified) or the planar outcome. Stage 2 input is
/// the bit s; outputs are: planar decision correct, planar decision wrong,
/// planar decision discarded (the unused fraction of the planar capacity),
/// lifted and identified as s, lifted and identified as 1-s (never occurs).
inline StageChannels first_protocol_channels(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0 / 3.0)) throw DomainError("first_protocol_channels: alpha outside (0,1/3]");
  const double lift = 3.0 * alpha, flat = 1.0 - lift;
  std::vector<std::vector<double>> s1;
  for (int a = 0; a < 3; ++a) {
    std::vector<double> row(4, 0.0);
    row[static_cast<std::size_t>(a)] += 0.5 * lift;
    row[static_cast<std::size_t>((a + 1) % 3)] += 0.5 * lift;
    row[3] = flat;
    s1.push_back(row);
  }
  const double c0 = two_trine_capacity(0.0);
  std::vector<std::vector<double>> s2{{c0 * flat, 0.0, (1.0 - c0) * flat, lift, 0.0},
                                      {0.0, c0 * flat, (1.0 - c0) * flat, 0.0, lift}};
  return {TransitionMatrix(std::move(s1)), TransitionMatrix(std::move(s2))};
}

// ---------------------------------------------------------------------------
// Monte Carlo of one signal's measurement cascade

/// splitmix64 step; used to derive independent batch seeds from a root seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct SimCell {
  std::string branch;   // "lifted" or "planar"
  std::string outcome;  // relative outcome label
  std::uint64_t count;
  double expected_prob;  // conditional on the branch
};

struct SimReport {
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0, gamma = 0.0;
  std::uint64_t lifted = 0;
  double empirical_lift_rate = 0.0;
  double expected_lift_rate = 0.0;
  std::vector<SimCell> cells;
  double max_abs_deviation = 0.0;  // largest |frequency - expected| over cells and the lift rate
  double max_sigma = 0.0;          // the same, in binomial standard deviations

  bool within_sigma(double k) const { return max_sigma <= k; }
};

struct SimOptions {
  std::uint64_t batch_size = 1u << 16;
  unsigned jobs = 1;
};

namespace detail {

inline double unit_double(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

/// Counts: lifted outcomes relative to the pair label a (a, a+1, a+2), then
/// planar pair decision correct, wrong.
using SimCounts = std::array<std::uint64_t, 5>;

/// Outcome probabilities for each codeword (a, s), taken from the Kraus
/// operators and measurement vectors applied to the states.
struct CascadeModel {
  struct Letter {
    double lift;                  // P(lift outcome)
    std::array<double, 3> v_cdf;  // cumulative V_j(0) probabilities, j = a, a+1, a+2, on the lifted state
    double planar_correct;        // P(pair measurement returns s) on the projected state
  };
  std::array<std::array<Letter, 2>, 3> letters;
};

inline CascadeModel make_model(double alpha, double gamma) {
  const KrausSet lp = lift_or_project(alpha, gamma);
  const Povm v = vn_basis(0.0);
  CascadeModel m{};
  for (int a = 0; a < 3; ++a) {
    const auto pair = planar_pair_basis(a, 3);
    for (int s = 0; s < 2; ++s) {
      const StateVector t = lifted_trine(a + s, alpha);
      auto& l = m.letters[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)];
      const KrausOutcome up = lp.apply(kLiftOutcome, t);
      const KrausOutcome down = lp.apply(kProjectOutcome, t);
      l.lift = up.probability;
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) {
        if (up.post_state) acc += v[static_cast<std::size_t>((a + k) % 3)].vector.overlap(*up.post_state);
        l.v_cdf[static_cast<std::size_t>(k)] = acc;
      }
      l.planar_correct = down.post_state ? pair[static_cast<std::size_t>(s)].overlap(*down.post_state) : 1.0;
    }
  }
  return m;
}

/// One batch: codeword letter b = a + s with a uniform in {0,1,2} and s a
/// fair bit, then lift-or-project and the branch measurement.
inline SimCounts run_batch(const CascadeModel& m, std::uint64_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_int_distribution<int> pick_a(0, 2), pick_s(0, 1);
  SimCounts c{};
  for (std::uint64_t i = 0; i < n; ++i) {
    const int a = pick_a(g), s = pick_s(g);
    const auto& l = m.letters[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)];
    if (unit_double(g) < l.lift) {
      const double u = unit_double(g);
      const std::size_t k = u < l.v_cdf[0] ? 0 : (u < l.v_cdf[1] ? 1 : 2);
      ++c[k];
    } else {
      ++c[unit_double(g) < l.planar_correct ? 3 : 4];
    }
  }
  return c;
}

}  // namespace detail

/// Samples n signals through lift-or-project and the branch measurements.
/// Batch k (of opt.batch_size signals) is seeded with the k-th splitmix64
/// output of the root seed; counts are summed, so results do not depend on
/// `jobs`.
inline SimReport simulate_cascade(double alpha, double gamma, std::uint64_t n, std::uint64_t seed,
                                  const SimOptions& opt = {}) {
  if (n < 1) throw DomainError("simulate_cascade: n must be >= 1");
  const auto model = detail::make_model(alpha, gamma);
  const std::uint64_t batch = std::max<std::uint64_t>(1, opt.batch_size);
  const std::uint64_t nb = (n + batch - 1) / batch;
  std::vector<std::uint64_t> seeds(nb);
  std::uint64_t st = seed;
  for (auto& s : seeds) s = splitmix64(st);
  std::vector<detail::SimCounts> parts(nb);
  auto work = [&](std::uint64_t k) { parts[k] = detail::run_batch(model, std::min(batch, n - k * batch), seeds[k]); };
  const unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1) {
    for (std::uint64_t k = 0; k < nb; ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
      pool.emplace_back([&, t] {
        for (std::uint64_t k = t; k < nb; k += jobs) work(k);
      });
    }
    for (auto& th : pool) th.join();
  }
  detail::SimCounts total{};
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += p[i];
  }

  SimReport r;
  r.samples = n;
  r.seed = seed;
  r.alpha = alpha;
  r.gamma = gamma;
  r.lifted = total[0] + total[1] + total[2];
  r.empirical_lift_rate = static_cast<double>(r.lifted) / static_cast<double>(n);
  r.expected_lift_rate = alpha / gamma;

  auto track = [&r](std::uint64_t k, std::uint64_t m, double p) {
    if (m == 0) return;
    const double dev = std::abs(static_cast<double>(k) / static_cast<double>(m) - p);
    r.max_abs_deviation = std::max(r.max_abs_deviation, dev);
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(m));
    if (sigma > 0.0) {
      r.max_sigma = std::max(r.max_sigma, dev / sigma);
    } else if (dev > 0.0) {
      r.max_sigma = std::numeric_limits<double>::infinity();
    }
  };
  track(r.lifted, n, r.expected_lift_rate);

  const double p = v_overlap(gamma);
  const std::array<double, 3> lifted_probs{0.25 * (1.0 + p), 0.25 * (1.0 + p), 0.5 * (1.0 - p)};
  static constexpr const char* kRel[3] = {"pair_first", "pair_second", "outside_pair"};
  for (std::size_t k = 0; k < 3; ++k) {
    r.cells.push_back({"lifted", kRel[k], total[k], lifted_probs[k]});
    track(total[k], r.lifted, lifted_probs[k]);
  }
  const double err = two_trine_crossover(0.0);
  const std::uint64_t planar = total[3] + total[4];
  r.cells.push_back({"planar", "correct", total[3], 1.0 - err});
  r.cells.push_back({"planar", "wrong", total[4], err});
  track(total[3], planar, 1.0 - err);
  track(total[4], planar, err);
  return r;
}

}  // namespace trinecap

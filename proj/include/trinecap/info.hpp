#pragma once

// Classical channels induced by measurements, mutual information, channel
// capacity (Blahut-Arimoto), Holevo chi, and derivatives of the information
// with respect to the prior.

#include "trinecap/ensembles.hpp"
#include "trinecap/linalg.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace trinecap {

/// Row-stochastic matrix q_ij = P(output j | input i).
class TransitionMatrix {
 public:
  static constexpr double kRowTolerance = 1e-9;

  explicit TransitionMatrix(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
    if (rows_.empty() || rows_.front().empty()) throw DomainError("empty transition matrix");
    for (const auto& r : rows_) {
      if (r.size() != rows_.front().size()) throw DimensionError("ragged transition matrix");
      double s = 0.0;
      for (double x : r) {
        if (!(x >= 0.0 && x <= 1.0 + kRowTolerance)) throw DomainError("transition probability outside [0,1]");
        s += x;
      }
      if (std::abs(s - 1.0) > kRowTolerance) {
        throw DomainError("transition row sums to " + std::to_string(s));
      }
    }
  }

  std::size_t inputs() const { return rows_.size(); }
  std::size_t outputs() const { return rows_.front().size(); }
  double operator()(std::size_t i, std::size_t j) const { return rows_[i][j]; }
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

  /// Channel with outputs j1 and j2 merged into a single output (placed at j1).
  TransitionMatrix merge_outputs(std::size_t j1, std::size_t j2) const {
    if (j1 == j2 || j1 >= outputs() || j2 >= outputs()) throw DomainError("merge_outputs: bad indices");
    auto rows = rows_;
    for (auto& r : rows) {
      r[j1] += r[j2];
      r.erase(r.begin() + static_cast<long>(j2));
    }
    return TransitionMatrix(std::move(rows));
  }

 private:
  std::vector<std::vector<double>> rows_;
};

struct ChannelResult {
  double capacity;  // bits
  ProbDist optimal_priors;
  long iterations;
};

/// Thrown when an iterative method exhausts its iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// q_ij = r_j <v_j|state_i>^2
inline TransitionMatrix induced_channel(const Ensemble& e, const Povm& m) {
  if (e.dim() != m.dim()) throw DimensionError("induced_channel: ensemble and POVM dimensions differ");
  std::vector<std::vector<double>> rows(e.size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) rows[i][j] = m[j].weight * m[j].vector.overlap(e.state(i));
  }
  return TransitionMatrix(std::move(rows));
}

/// Output entropy less the conditional output entropy, in bits.
inline double mutual_information(const ProbDist& priors, const TransitionMatrix& t) {
  if (priors.size() != t.inputs()) throw DimensionError("mutual_information: prior length mismatch");
  double info = 0.0;
  for (std::size_t j = 0; j < t.outputs(); ++j) {
    double out = 0.0;
    for (std::size_t i = 0; i < t.inputs(); ++i) {
      out += priors[i] * t(i, j);
      info += priors[i] * xlog2x(t(i, j));
    }
    info -= xlog2x(out);
  }
  return std::max(0.0, info);
}

inline double mutual_information(const Ensemble& e, const Povm& m) {
  return mutual_information(e.priors(), induced_channel(e, m));
}

struct BlahutArimotoOptions {
  double tolerance = 1e-10;  // bits, on max_i D(W_i || q) - I
  long max_iterations = 100000;
};

/// Channel capacity by alternating maximization. Stops once the upper and
/// lower capacity bounds agree within `tolerance` bits.
inline ChannelResult blahut_arimoto(const TransitionMatrix& t, BlahutArimotoOptions opt = {}) {
  const std::size_t n = t.inputs(), m = t.outputs();
  std::vector<double> p(n, 1.0 / static_cast<double>(n)), q(m), d(n);
  const double tol_nats = opt.tolerance * std::log(2.0);
  for (long it = 1; it <= opt.max_iterations; ++it) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) q[j] += p[i] * t(i, j);
    }
    double upper = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
      double di = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double w = t(i, j);
        if (w > 0.0) di += w * std::log(w / q[j]);
      }
      d[i] = di;
      upper = std::max(upper, di);
    }
    // Normalize by the largest exponent so exp() cannot overflow.
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += p[i] * std::exp(d[i] - upper);
    const double lower = upper + std::log(z);
    for (std::size_t i = 0; i < n; ++i) p[i] = p[i] * std::exp(d[i] - upper) / z;
    if (upper - lower < tol_nats) {
      ProbDist pd = ProbDist::from_weights(p);
      return {mutual_information(pd, t), std::move(pd), it};
    }
  }
  throw ConvergenceError("blahut_arimoto: no convergence after " + std::to_string(opt.max_iterations) +
                         " iterations");
}

/// Accessible information of {p: v1, 1-p: v2} with kappa = |<v1|v2>|^2, in bits.
inline double two_state_accessible_info(double kappa, double p) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("two_state_accessible_info: kappa outside [0,1]");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("two_state_accessible_info: p outside [0,1]");
  const double r = std::sqrt(std::max(0.0, 1.0 - 4.0 * kappa * p * (1.0 - p)));
  return std::max(0.0, binary_entropy(p) - binary_entropy(std::min(1.0, 0.5 + 0.5 * r)));
}

/// Holevo chi of a pure-state ensemble: the von Neumann entropy of the
/// average state, in bits.
inline double holevo_chi(const Ensemble& e) {
  auto ev = sym_eigenvalues(e.density_matrix());
  double s = 0.0;
  for (double x : ev) s -= xlog2x(std::max(0.0, x));
  return s;
}

/// The direction (1, -1/2, -1/2): mass moves onto the first state, evenly
/// from the other two.
inline const std::vector<double> kCanonicalPriorDirection{1.0, -0.5, -0.5};

namespace detail {

inline void check_direction(const std::vector<double>& dir, std::size_t n) {
  if (dir.size() != n) throw DimensionError("prior direction length mismatch");
  const double s = std::accumulate(dir.begin(), dir.end(), 0.0);
  if (std::abs(s) > 1e-12) throw DomainError("prior direction must sum to zero, got " + std::to_string(s));
}

}  // namespace detail

/// d/dt of the single-projector information term at priors + t * direction,
/// for the unit vector v (weight factored out).
inline double projector_prior_derivative(const Ensemble& e, const Vec& v, const std::vector<double>& direction) {
  detail::check_direction(direction, e.size());
  double out = 0.0, dout = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double qi = std::pow(e.state(i).dot(v), 2);
    out += e.priors()[i] * qi;
    dout += direction[i] * qi;
    tail += direction[i] * xlog2x(qi);
  }
  // The derivative of -x log2 x also carries -x'/ln 2; summed over a complete
  // POVM it vanishes because the direction sums to zero, so it is left out
  // here as well.
  return (out > 0.0 ? -dout * std::log2(out) : 0.0) + tail;
}

/// Derivative of the mutual information along `direction` in prior space
/// with the measurement held fixed.
inline double prior_derivative(const Ensemble& e, const Povm& m, const std::vector<double>& direction) {
  if (e.dim() != m.dim()) throw DimensionError("prior_derivative: dimension mismatch");
  double total = 0.0;
  for (const auto& el : m) total += el.weight * projector_prior_derivative(e, el.vector.coords(), direction);
  return total;
}

}  // namespace trinecap

#pragma once

// Small dense real linear algebra and entropy primitives.
//
// Everything in this library lives in dimension 2 or 3, so vectors and
// matrices are thin wrappers over dynamically sized Eigen objects with the
// dimension checked at construction.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trinecap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kLog2_3 = 1.5849625007211562;  // log2(3)
inline constexpr double kPi = std::numbers::pi;

/// Thrown when an argument lies outside the mathematical domain of an
/// operation (probabilities outside [0,1], alpha > gamma, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when inputs are dimensionally incompatible.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require_dim(long d) {
  if (d != 2 && d != 3) {
    throw DimensionError("dimension must be 2 or 3, got " + std::to_string(d));
  }
}

}  // namespace detail

/// A pure state: a real unit vector in dimension 2 or 3.
class StateVector {
 public:
  static constexpr double kNormTolerance = 1e-12;

  StateVector(std::initializer_list<double> coords)
      : StateVector(Vec(Eigen::Map<const Vec>(coords.begin(), static_cast<long>(coords.size())))) {}

  explicit StateVector(Vec coords) : coords_(std::move(coords)) {
    detail::require_dim(coords_.size());
    if (std::abs(coords_.norm() - 1.0) > kNormTolerance) {
      throw DomainError("state vector is not normalized (norm " + std::to_string(coords_.norm()) + ")");
    }
  }

  /// Rescales `v` to unit length; throws on the zero vector.
  static StateVector normalized(const Vec& v) {
    const double n = v.norm();
    if (n == 0.0) throw DomainError("cannot normalize the zero vector");
    return StateVector(Vec(v / n));
  }

  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[i]; }
  const Vec& coords() const { return coords_; }

  double dot(const StateVector& o) const { return coords_.dot(o.coords_); }
  double dot(const Vec& o) const { return coords_.dot(o); }
  /// |<this|o>|^2
  double overlap(const StateVector& o) const {
    const double d = dot(o);
    return d * d;
  }

  StateVector operator-() const { return StateVector(Vec(-coords_)); }

 private:
  Vec coords_;
};

/// Real symmetric 2x2 or 3x3 matrix. Symmetry is checked exactly.
class SymMatrix {
 public:
  explicit SymMatrix(Mat m) : m_(std::move(m)) {
    detail::require_dim(m_.rows());
    if (m_.rows() != m_.cols()) throw DimensionError("matrix is not square");
    for (long i = 0; i < m_.rows(); ++i) {
      for (long j = i + 1; j < m_.cols(); ++j) {
        if (m_(i, j) != m_(j, i)) throw DomainError("matrix is not symmetric");
      }
    }
  }

  static SymMatrix identity(int d) { return SymMatrix(Mat::Identity(d, d)); }
  static SymMatrix zero(int d) { return SymMatrix(Mat::Zero(d, d)); }
  static SymMatrix diagonal(std::initializer_list<double> d) {
    Vec v = Eigen::Map<const Vec>(d.begin(), static_cast<long>(d.size()));
    return SymMatrix(Mat(v.asDiagonal()));
  }
  /// weight * |v><v|
  static SymMatrix outer(const StateVector& v, double weight = 1.0) { return outer(v.coords(), weight); }
  static SymMatrix outer(const Vec& v, double weight = 1.0) {
    Mat m(v.size(), v.size());
    for (long i = 0; i < v.size(); ++i) {
      for (long j = i; j < v.size(); ++j) {
        m(i, j) = m(j, i) = weight * v[i] * v[j];
      }
    }
    return SymMatrix(std::move(m));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Mat& matrix() const { return m_; }

  double trace() const { return m_.trace(); }
  /// <v|M|v>
  double expectation(const Vec& v) const { return v.dot(m_ * v); }
  double expectation(const StateVector& v) const { return expectation(v.coords()); }

  SymMatrix operator+(const SymMatrix& o) const { return symmetrized(m_ + o.m_); }
  SymMatrix operator-(const SymMatrix& o) const { return symmetrized(m_ - o.m_); }
  SymMatrix operator*(double s) const { return SymMatrix(Mat(m_ * s)); }
  SymMatrix& operator+=(const SymMatrix& o) { return *this = *this + o; }

  /// Largest absolute entry of (this - o).
  double max_abs_diff(const SymMatrix& o) const { return (m_ - o.m_).cwiseAbs().maxCoeff(); }

  /// Principal square root; negative eigenvalues within roundoff are clamped to 0.
  SymMatrix sqrt() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(m_);
    Vec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return symmetrized(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
  }

  /// A B A for symmetric A (this) and B; the result is re-symmetrized.
  SymMatrix sandwich(const SymMatrix& b) const { return symmetrized(m_ * b.m_ * m_); }

  /// Averages the matrix with its transpose so roundoff cannot break symmetry.
  static SymMatrix symmetrized(const Mat& m) { return SymMatrix(Mat(0.5 * (m + m.transpose()))); }

 private:
  Mat m_;
};

/// Probability distribution: weights in [0,1] summing to 1 within 1e-9.
class ProbDist {
 public:
  static constexpr double kSumTolerance = 1e-9;

  ProbDist(std::initializer_list<double> w) : ProbDist(std::vector<double>(w)) {}
  explicit ProbDist(std::vector<double> w) : w_(std::move(w)) {
    if (w_.empty()) throw DomainError("empty probability distribution");
    double s = 0.0;
    for (double x : w_) {
      if (!(x >= 0.0 && x <= 1.0)) throw DomainError("probability outside [0,1]: " + std::to_string(x));
      s += x;
    }
    if (std::abs(s - 1.0) > kSumTolerance) {
      throw DomainError("probabilities sum to " + std::to_string(s) + ", expected 1");
    }
  }

  static ProbDist uniform(std::size_t n) { return ProbDist(std::vector<double>(n, 1.0 / static_cast<double>(n))); }

  /// Normalizes nonnegative weights; clamps roundoff-level negatives to 0.
  static ProbDist from_weights(std::vector<double> w) {
    double s = 0.0;
    for (double& x : w) {
      if (x < 0.0) {
        if (x < -1e-12) throw DomainError("negative weight " + std::to_string(x));
        x = 0.0;
      }
      s += x;
    }
    if (s <= 0.0) throw DomainError("weights sum to zero");
    for (double& x : w) x = std::min(1.0, x / s);
    return ProbDist(std::move(w));
  }

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const { return w_; }
  auto begin() const { return w_.begin(); }
  auto end() const { return w_.end(); }

 private:
  std::vector<double> w_;
};

/// x log2 x with 0 log2 0 = 0.
inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

/// Entropy in bits of raw weights, no validation; 0 log 0 = 0.
inline double entropy_bits(std::span<const double> w) {
  double h = 0.0;
  for (double x : w) h -= xlog2x(x);
  return h;
}
inline double entropy_bits(std::initializer_list<double> w) {
  return entropy_bits(std::span<const double>(w.begin(), w.size()));
}

inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary_entropy: argument outside [0,1]");
  return -xlog2x(x) - xlog2x(1.0 - x);
}

inline double shannon_entropy(const ProbDist& d) { return entropy_bits(d.weights()); }

/// Eigenvalues in ascending order. Closed form for 2x2.
inline std::vector<double> sym_eigenvalues(const SymMatrix& m) {
  if (m.dim() == 2) {
    const double a = m(0, 0), b = m(0, 1), d = m(1, 1);
    const double mean = 0.5 * (a + d);
    const double r = std::hypot(0.5 * (a - d), b);
    return {mean - r, mean + r};
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(m.matrix(), Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

inline double min_eigenvalue(const SymMatrix& m) { return sym_eigenvalues(m).front(); }

}  // namespace trinecap

#pragma once

// State families (lifted trines) and the measurement families built on them:
// symmetric triple POVMs, the diagonal partial measurements M(phi), the Q(beta)
// von Neumann bases, lift-or-project operators and the D-vectors.

#include "trinecap/linalg.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace trinecap {

/// Prior-weighted list of pure states sharing one dimension.
class Ensemble {
 public:
  Ensemble(std::vector<StateVector> states, ProbDist priors)
      : states_(std::move(states)), priors_(std::move(priors)) {
    if (states_.empty()) throw DomainError("ensemble has no states");
    if (states_.size() != priors_.size()) throw DimensionError("ensemble: states and priors differ in length");
    for (const auto& s : states_) {
      if (s.dim() != states_.front().dim()) throw DimensionError("ensemble states differ in dimension");
    }
  }

  int dim() const { return states_.front().dim(); }
  std::size_t size() const { return states_.size(); }
  const StateVector& state(std::size_t i) const { return states_[i]; }
  const std::vector<StateVector>& states() const { return states_; }
  const ProbDist& priors() const { return priors_; }

  Ensemble with_priors(ProbDist p) const { return Ensemble(states_, std::move(p)); }

  /// sum_i p_i |v_i><v_i|
  SymMatrix density_matrix() const {
    SymMatrix rho = SymMatrix::zero(dim());
    for (std::size_t i = 0; i < size(); ++i) rho += SymMatrix::outer(states_[i], priors_[i]);
    return rho;
  }

 private:
  std::vector<StateVector> states_;
  ProbDist priors_;
};

struct PovmElement {
  double weight;
  StateVector vector;
};

/// Rank-one POVM: elements r_j |v_j><v_j| summing to the identity.
class Povm {
 public:
  static constexpr double kCompletenessTolerance = 1e-9;

  explicit Povm(std::vector<PovmElement> elements, double tolerance = kCompletenessTolerance)
      : elements_(std::move(elements)) {
    if (elements_.empty()) throw DomainError("POVM has no elements");
    for (const auto& e : elements_) {
      if (e.vector.dim() != dim()) throw DimensionError("POVM elements differ in dimension");
      if (!(e.weight >= 0.0)) throw DomainError("negative POVM weight");
    }
    const double r = completeness_residual();
    if (r > tolerance) throw DomainError("POVM completeness violated: residual " + std::to_string(r));
  }

  int dim() const { return elements_.front().vector.dim(); }
  std::size_t size() const { return elements_.size(); }
  const PovmElement& operator[](std::size_t j) const { return elements_[j]; }
  const std::vector<PovmElement>& elements() const { return elements_; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  SymMatrix sum() const {
    SymMatrix s = SymMatrix::zero(dim());
    for (const auto& e : elements_) s += SymMatrix::outer(e.vector, e.weight);
    return s;
  }
  double completeness_residual() const { return sum().max_abs_diff(SymMatrix::identity(dim())); }

 private:
  std::vector<PovmElement> elements_;
};

/// Outcome of applying one Kraus operator to a pure state.
struct KrausOutcome {
  double probability;
  std::optional<StateVector> post_state;  // empty when probability is 0
};

/// Partial measurement {A_i} with sum A_i^T A_i = I.
class KrausSet {
 public:
  static constexpr double kCompletenessTolerance = 1e-9;

  explicit KrausSet(std::vector<Mat> operators) : ops_(std::move(operators)) {
    if (ops_.empty()) throw DomainError("empty Kraus set");
    const long d = ops_.front().rows();
    detail::require_dim(d);
    Mat s = Mat::Zero(d, d);
    for (const auto& a : ops_) {
      if (a.rows() != d || a.cols() != d) throw DimensionError("Kraus operators differ in shape");
      s += a.transpose() * a;
    }
    const double r = (s - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
    if (r > kCompletenessTolerance) {
      throw DomainError("Kraus completeness violated: residual " + std::to_string(r));
    }
  }

  int dim() const { return static_cast<int>(ops_.front().rows()); }
  std::size_t size() const { return ops_.size(); }
  const Mat& operator[](std::size_t i) const { return ops_[i]; }
  const std::vector<Mat>& operators() const { return ops_; }

  /// A_i^T A_i as a symmetric matrix.
  SymMatrix effect(std::size_t i) const { return SymMatrix::symmetrized(ops_[i].transpose() * ops_[i]); }

  KrausOutcome apply(std::size_t i, const StateVector& v) const {
    const Vec out = ops_[i] * v.coords();
    const double prob = out.squaredNorm();
    if (prob <= 0.0) return {0.0, std::nullopt};
    return {prob, StateVector::normalized(out)};
  }

 private:
  std::vector<Mat> ops_;
};

/// Thrown when triple/partial-measurement parameters violate the two linear
/// constraints sum p_i = 1 and sum p_i sin^2(phi_i) = 1/3.
class ConstraintError : public std::invalid_argument {
 public:
  enum class Which { total_probability, vertical_weight };

  ConstraintError(Which which, double value)
      : std::invalid_argument(message(which, value)), which_(which), value_(value) {}

  Which which() const { return which_; }
  double value() const { return value_; }

 private:
  static std::string message(Which w, double v) {
    if (w == Which::total_probability) return "sum of p_i must be 1, got " + std::to_string(v);
    return "sum of p_i sin^2(phi_i) must be 1/3, got " + std::to_string(v);
  }
  Which which_;
  double value_;
};

// ---------------------------------------------------------------------------
// Lifted trines

inline StateVector lifted_trine(int b, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("lifted_trine: alpha outside [0,1]");
  const double r = std::sqrt(1.0 - alpha);
  const double z = std::sqrt(alpha);
  switch (((b % 3) + 3) % 3) {
    case 0: return StateVector{r, 0.0, z};
    case 1: return StateVector{-0.5 * r, 0.5 * std::sqrt(3.0) * r, z};
    default: return StateVector{-0.5 * r, -0.5 * std::sqrt(3.0) * r, z};
  }
}

/// T_0, T_1, T_2 lifted out of the plane by arcsin(sqrt(alpha)).
inline Ensemble lifted_trines(double alpha, std::optional<ProbDist> priors = std::nullopt) {
  std::vector<StateVector> s{lifted_trine(0, alpha), lifted_trine(1, alpha), lifted_trine(2, alpha)};
  return Ensemble(std::move(s), priors ? *priors : ProbDist::uniform(3));
}

/// The planar trines as two-dimensional vectors.
inline Ensemble planar_trines(std::optional<ProbDist> priors = std::nullopt) {
  const double h = 0.5 * std::sqrt(3.0);
  std::vector<StateVector> s{StateVector{1.0, 0.0}, StateVector{-0.5, h}, StateVector{-0.5, -h}};
  return Ensemble(std::move(s), priors ? *priors : ProbDist::uniform(3));
}

// ---------------------------------------------------------------------------
// Triple POVMs and partial measurements

/// P_b(phi, theta) = (cos phi cos(theta + 2 pi b/3), cos phi sin(theta + 2 pi b/3), sin phi)
inline StateVector trine_projector(int b, double phi, double theta) {
  const double a = theta + 2.0 * kPi * b / 3.0;
  return StateVector::normalized(Vec{{std::cos(phi) * std::cos(a), std::cos(phi) * std::sin(a), std::sin(phi)}});
}

/// V_b(theta): the symmetric von Neumann basis rotated by theta.
inline StateVector vn_basis_vector(int b, double theta) {
  const double a = theta + 2.0 * kPi * b / 3.0;
  const double r = std::sqrt(2.0 / 3.0);
  return StateVector::normalized(Vec{{r * std::cos(a), r * std::sin(a), 1.0 / std::sqrt(3.0)}});
}

inline Povm vn_basis(double theta) {
  std::vector<PovmElement> e;
  for (int b = 0; b < 3; ++b) e.push_back({1.0, vn_basis_vector(b, theta)});
  return Povm(std::move(e));
}

struct TripleComponent {
  double p;
  double phi;
  double theta;
};

namespace detail {

inline constexpr double kConstraintTolerance = 1e-9;

template <class Range>
void check_triple_constraints(const Range& comps) {
  double total = 0.0, vertical = 0.0;
  for (const auto& c : comps) {
    if (!(c.p >= 0.0)) throw DomainError("component probability is negative");
    total += c.p;
    vertical += c.p * std::sin(c.phi) * std::sin(c.phi);
  }
  if (std::abs(total - 1.0) > kConstraintTolerance) {
    throw ConstraintError(ConstraintError::Which::total_probability, total);
  }
  if (std::abs(vertical - 1.0 / 3.0) > kConstraintTolerance) {
    throw ConstraintError(ConstraintError::Which::vertical_weight, vertical);
  }
}

}  // namespace detail

/// POVM with elements p_i |P_b(phi_i, theta_i)><P_b(phi_i, theta_i)|, b = 0,1,2.
inline Povm triple_povm(const std::vector<TripleComponent>& comps) {
  detail::check_triple_constraints(comps);
  std::vector<PovmElement> e;
  for (const auto& c : comps) {
    for (int b = 0; b < 3; ++b) e.push_back({c.p, trine_projector(b, c.phi, c.theta)});
  }
  return Povm(std::move(e));
}

/// M(phi) = diag(sqrt(3/2) cos phi, sqrt(3/2) cos phi, sqrt(3) sin phi)
inline Mat partial_measurement_operator(double phi) {
  const double c = std::sqrt(1.5) * std::cos(phi);
  return Vec{{c, c, std::sqrt(3.0) * std::sin(phi)}}.asDiagonal();
}

struct PartialComponent {
  double p;
  double phi;
};

/// Kraus operators sqrt(p_i) M(phi_i).
inline KrausSet partial_measurement(const std::vector<PartialComponent>& comps) {
  detail::check_triple_constraints(comps);
  std::vector<Mat> ops;
  for (const auto& c : comps) ops.push_back(std::sqrt(c.p) * partial_measurement_operator(c.phi));
  return KrausSet(std::move(ops));
}

/// Height alpha' of the trine left behind by M(phi) acting on T_b(alpha).
inline double transformed_alpha(double alpha, double phi) {
  const double s2 = std::sin(phi) * std::sin(phi);
  const double up = alpha * s2;
  const double denom = up + 0.5 * (1.0 - alpha) * (1.0 - s2);
  return denom > 0.0 ? up / denom : 0.0;
}

/// Probability p' of observing outcome sqrt(p) M(phi) on T_b(alpha).
inline double transformed_probability(double alpha, double p, double phi) {
  const double s2 = std::sin(phi) * std::sin(phi);
  return 3.0 * p * (alpha * s2 + 0.5 * (1.0 - alpha) * (1.0 - s2));
}

// ---------------------------------------------------------------------------
// Q(beta) measurements

inline std::array<StateVector, 3> q_basis(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("q_measurement: beta outside [0,1]");
  const double sb = std::sqrt(beta), cb = std::sqrt(1.0 - beta), k = 1.0 / std::sqrt(2.0);
  return {StateVector::normalized(Vec{{sb, 0.0, cb}}),
          StateVector::normalized(Vec{{-k * cb, k, k * sb}}),
          StateVector::normalized(Vec{{-k * cb, -k, k * sb}})};
}

/// Von Neumann measurement with projectors Q_0(beta), Q_1(beta), Q_2(beta).
inline Povm q_measurement(double beta) {
  auto q = q_basis(beta);
  return Povm({{1.0, q[0]}, {1.0, q[1]}, {1.0, q[2]}});
}

/// The beta at which Q_0(beta) is orthogonal to T_1(alpha) and T_2(alpha).
inline double two_trine_beta(double alpha) { return 4.0 * alpha / (3.0 * alpha + 1.0); }

// ---------------------------------------------------------------------------
// Adaptive-protocol operators

/// Index of each outcome in the KrausSet returned by lift_or_project.
inline constexpr std::size_t kProjectOutcome = 0;
inline constexpr std::size_t kLiftOutcome = 1;

/// Two diagonal Kraus operators taking T_b(alpha) to T_b(0) (probability
/// 1 - alpha/gamma) or to T_b(gamma) (probability alpha/gamma).
inline KrausSet lift_or_project(double alpha, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("lift_or_project: gamma outside (0,1)");
  if (!(alpha >= 0.0)) throw DomainError("lift_or_project: alpha negative");
  if (alpha > gamma) throw DomainError("lift_or_project: alpha exceeds gamma");
  const double t2 = alpha * (1.0 - gamma) / (gamma * (1.0 - alpha));
  const double t = std::sqrt(t2), s = std::sqrt(std::max(0.0, 1.0 - t2));
  Mat proj = Vec{{s, s, 0.0}}.asDiagonal();
  Mat lift = Vec{{t, t, 1.0}}.asDiagonal();
  return KrausSet({proj, lift});
}

/// D_b: the unit vector orthogonal to the two trines other than T_b(alpha).
inline std::array<StateVector, 3> discrimination_vectors(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("discrimination_vectors: alpha outside [0,1)");
  const double n = std::sqrt(1.0 + 3.0 * alpha);
  const double a = std::sqrt(alpha) / n, y = std::sqrt(3.0 * alpha) / n, z = std::sqrt(1.0 - alpha) / n;
  return {StateVector::normalized(Vec{{2.0 * a, 0.0, z}}), StateVector::normalized(Vec{{-a, y, z}}),
          StateVector::normalized(Vec{{-a, -y, z}})};
}

/// Four-outcome first measurement of the simple adaptive protocol:
/// A_b proportional to |D_b><D_b| for b = 0,1,2, and A_3 proportional to the
/// projector onto the x-y plane. Requires alpha <= 1/3.
inline KrausSet first_protocol_measurement(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0 / 3.0)) throw DomainError("first_protocol_measurement: alpha outside (0,1/3]");
  const auto d = discrimination_vectors(alpha);
  const double k = std::sqrt(1.0 + 3.0 * alpha) / std::sqrt(3.0 * (1.0 - alpha));
  std::vector<Mat> ops;
  for (const auto& v : d) ops.push_back(k * v.coords() * v.coords().transpose());
  const double kp = std::sqrt(std::max(0.0, 1.0 - 3.0 * alpha)) / std::sqrt(1.0 - alpha);
  ops.push_back(Mat(Vec{{kp, kp, 0.0}}.asDiagonal()));
  return KrausSet(std::move(ops));
}

/// Best two-outcome measurement for the planar pair {T_a(0), T_{a+1}(0)} at
/// equal priors, embedded in dimension `dim` (2 or 3). Returns the two unit
/// vectors: the first is closer to T_a.
inline std::array<StateVector, 2> planar_pair_basis(int a, int dim = 3) {
  // The pair's bisector sits at angle 2 pi a/3 + pi/3; the optimal projectors
  // are the bisector rotated by -/+ pi/4.
  const double mid = 2.0 * kPi * a / 3.0 + kPi / 3.0;
  auto make = [dim](double ang) {
    Vec v = Vec::Zero(dim);
    v[0] = std::cos(ang);
    v[1] = std::sin(ang);
    return StateVector::normalized(v);
  };
  return {make(mid - kPi / 4.0), make(mid + kPi / 4.0)};
}

/// The three-outcome optimal measurement for equiprobable planar trines:
/// sqrt(2/3) times the vectors orthogonal to each trine, plus the z axis
/// when embedded in three dimensions.
inline Povm planar_antitrine_povm(int dim = 2) {
  std::vector<PovmElement> e;
  for (int b = 0; b < 3; ++b) {
    const double ang = 2.0 * kPi * b / 3.0 + kPi / 2.0;
    Vec v = Vec::Zero(dim);
    v[0] = std::cos(ang);
    v[1] = std::sin(ang);
    e.push_back({2.0 / 3.0, StateVector::normalized(v)});
  }
  if (dim == 3) e.push_back({1.0, StateVector{0.0, 0.0, 1.0}});
  return Povm(std::move(e));
}

}  // namespace trinecap

#pragma once

// Accessible information over a discretized set of candidate projectors.
//
// For fixed priors the mutual information of a rank-one POVM {r_j v_j v_j^T}
// is linear in the weights r_j: sum_j r_j I(v_j). Maximizing it under the
// completeness constraint sum_j r_j v_j v_j^T = I is a linear program with
// d(d+1)/2 rows.

#include "trinecap/ensembles.hpp"
#include "trinecap/info.hpp"
#include "trinecap/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <thread>
#include <vector>

namespace trinecap {

/// Candidate projector directions, one representative per line.
struct CandidateSet {
  std::vector<StateVector> vectors;
  int resolution = 0;   // directions per pi radians of angle
  double spacing = 0.0; // typical angular gap between neighbours (radians)

  int dim() const { return vectors.empty() ? 0 : vectors.front().dim(); }
  std::size_t size() const { return vectors.size(); }

  /// Copy with extra directions appended (e.g. the vectors of a known POVM).
  CandidateSet with(const std::vector<StateVector>& extra) const {
    CandidateSet c = *this;
    c.vectors.insert(c.vectors.end(), extra.begin(), extra.end());
    return c;
  }
};

/// theta_k = k pi / n, k = 0..n-1, as planar unit vectors.
inline CandidateSet planar_grid(int n) {
  if (n < 4) throw DomainError("planar_grid: need n >= 4");
  CandidateSet c;
  c.vectors.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double t = kPi * k / n;
    c.vectors.push_back(StateVector::normalized(Vec{{std::cos(t), std::sin(t)}}));
  }
  c.resolution = n;
  c.spacing = kPi / n;
  return c;
}

/// Upper half of a 2n-point Fibonacci spiral on the sphere: n directions
/// covering the hemisphere z > 0, no two antipodal.
inline CandidateSet sphere_grid(int n) {
  if (n < 16) throw DomainError("sphere_grid: need n >= 16");
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  const double total = 2.0 * n;
  CandidateSet c;
  c.vectors.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / total;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * k;
    c.vectors.push_back(StateVector::normalized(Vec{{r * std::cos(phi), r * std::sin(phi), z}}));
  }
  c.spacing = std::sqrt(2.0 * kPi / n);
  c.resolution = static_cast<int>(std::lround(kPi / c.spacing));
  return c;
}

/// Information carried by a unit-weight projector onto v:
///   -Q log2 Q + sum_i p_i q_i log2 q_i,  q_i = <state_i|v>^2, Q = sum_i p_i q_i.
inline double projector_information(const Ensemble& e, const Vec& v) {
  double out = 0.0, cond = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double qi = std::pow(e.state(i).dot(v), 2);
    out += e.priors()[i] * qi;
    cond += e.priors()[i] * xlog2x(qi);
  }
  return cond - xlog2x(out);
}

inline double projector_information(const ProbDist& priors, const Ensemble& e, const StateVector& v) {
  return projector_information(e.with_priors(priors), v.coords());
}

/// Completeness-constraint column of |v><v|: the independent entries of the
/// outer product (diagonal first, then upper triangle).
inline Vec completeness_column(const Vec& v) {
  const long d = v.size();
  Vec col(d * (d + 1) / 2);
  long k = 0;
  for (long i = 0; i < d; ++i) col[k++] = v[i] * v[i];
  for (long i = 0; i < d; ++i) {
    for (long j = i + 1; j < d; ++j) col[k++] = v[i] * v[j];
  }
  return col;
}

inline Vec completeness_rhs(int d) {
  Vec b = Vec::Zero(d * (d + 1) / 2);
  b.head(d).setOnes();
  return b;
}

struct LpWeight {
  std::size_t index;  // into LpSolution::candidates
  double weight;
  StateVector vector;
};

struct LpSolution {
  double value = 0.0;  // bits
  lp::Status status = lp::Status::infeasible;
  std::vector<LpWeight> weights;
  std::vector<StateVector> alternatives;  // nonbasic directions with zero reduced cost
  long iterations = 0;
  std::size_t candidates = 0;  // size of the final candidate set

  double completeness_residual() const {
    if (weights.empty()) return std::numeric_limits<double>::infinity();
    const int d = weights.front().vector.dim();
    SymMatrix s = SymMatrix::zero(d);
    for (const auto& w : weights) s += SymMatrix::outer(w.vector, w.weight);
    return s.max_abs_diff(SymMatrix::identity(d));
  }

  Povm to_povm(double tolerance = 1e-7) const {
    std::vector<PovmElement> e;
    for (const auto& w : weights) e.push_back({w.weight, w.vector});
    return Povm(std::move(e), tolerance);
  }
};

struct AccessibleInfoOptions {
  /// Local refinement passes: each pass adds a patch of directions around
  /// every support vector of the previous solution and re-solves.
  int refine_passes = 0;
  int patch_radius = 3;        // patch is (2k+1)^2 directions (2k+1 in the plane)
  double patch_shrink = 4.0;   // patch step divides by this each pass
  lp::Options lp{};
};

namespace detail {

inline std::vector<StateVector> local_patch(const StateVector& u, double step, int k) {
  std::vector<StateVector> out;
  const Vec& c = u.coords();
  if (u.dim() == 2) {
    const Vec t{{-c[1], c[0]}};
    for (int i = -k; i <= k; ++i) {
      if (i != 0) out.push_back(StateVector::normalized(c + step * i * t));
    }
    return out;
  }
  // Orthonormal tangent frame at u.
  Vec helper = std::abs(c[0]) < 0.9 ? Vec{{1.0, 0.0, 0.0}} : Vec{{0.0, 1.0, 0.0}};
  Vec e1 = (helper - helper.dot(c) * c).normalized();
  Vec e2 = Vec{{c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]}};
  for (int i = -k; i <= k; ++i) {
    for (int j = -k; j <= k; ++j) {
      if (i != 0 || j != 0) out.push_back(StateVector::normalized(c + step * (i * e1 + j * e2)));
    }
  }
  return out;
}

inline LpSolution solve_on(const Ensemble& e, const std::vector<StateVector>& cand, const lp::Options& opt) {
  const long n = static_cast<long>(cand.size());
  const int d = e.dim();
  Mat a(d * (d + 1) / 2, n);
  Vec c(n);
  for (long j = 0; j < n; ++j) {
    const Vec& v = cand[static_cast<std::size_t>(j)].coords();
    a.col(j) = completeness_column(v);
    c[j] = projector_information(e, v);
  }
  const lp::Result r = lp::solve(a, completeness_rhs(d), c, opt);
  LpSolution s;
  s.status = r.status;
  s.iterations = r.iterations;
  s.candidates = cand.size();
  if (r.status != lp::Status::optimal) return s;
  s.value = r.value;
  for (auto [j, w] : r.support(n, 1e-13)) {
    s.weights.push_back({static_cast<std::size_t>(j), w, cand[static_cast<std::size_t>(j)]});
  }
  std::sort(s.weights.begin(), s.weights.end(), [](const auto& x, const auto& y) { return x.index < y.index; });
  for (long j : r.tied_columns) s.alternatives.push_back(cand[static_cast<std::size_t>(j)]);
  return s;
}

}  // namespace detail

/// Maximum mutual information over POVMs built from the candidate directions,
/// at the ensemble's priors.
inline LpSolution max_accessible_info(const Ensemble& e, const CandidateSet& c, const AccessibleInfoOptions& opt = {}) {
  if (c.dim() != e.dim()) throw DimensionError("max_accessible_info: candidate and ensemble dimensions differ");
  LpSolution best = detail::solve_on(e, c.vectors, opt.lp);
  double step = c.spacing / 2.0;
  for (int pass = 0; pass < opt.refine_passes && best.status == lp::Status::optimal; ++pass) {
    std::vector<StateVector> cand = c.vectors;
    for (const auto& w : best.weights) {
      cand.push_back(w.vector);
      auto patch = detail::local_patch(w.vector, step, opt.patch_radius);
      cand.insert(cand.end(), patch.begin(), patch.end());
    }
    LpSolution next = detail::solve_on(e, cand, opt.lp);
    next.iterations += best.iterations;
    if (next.status != lp::Status::optimal) break;
    best = std::move(next);
    step /= opt.patch_shrink;
  }
  return best;
}

inline LpSolution max_accessible_info(const Ensemble& e, const ProbDist& priors, const CandidateSet& c,
                                      const AccessibleInfoOptions& opt = {}) {
  return max_accessible_info(e.with_priors(priors), c, opt);
}

// ---------------------------------------------------------------------------
// Dual certificate for planar ensembles

/// offset + amplitude * sin(2 theta + phase) >= I(theta) for every direction
/// (cos theta, sin theta), touching at the tangency angles.
struct DualCertificate {
  double offset = 0.0;     // bits
  double amplitude = 0.0;  // bits
  double phase = 0.0;      // radians
  std::vector<double> tangencies;  // radians in [0, pi)
  double violation = 0.0;  // max of I(theta) - sine over the verification grid
  bool valid = false;

  double operator()(double theta) const { return offset + amplitude * std::sin(2.0 * theta + phase); }
};

namespace detail {

inline double planar_info(const Ensemble& e, double theta) {
  return projector_information(e, Vec{{std::cos(theta), std::sin(theta)}});
}

/// d/dtheta of planar_info.
inline double planar_info_slope(const Ensemble& e, double theta) {
  const Vec v{{std::cos(theta), std::sin(theta)}};
  const Vec dv{{-std::sin(theta), std::cos(theta)}};
  double out = 0.0, dout = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double a = e.state(i).dot(v), da = e.state(i).dot(dv);
    const double q = a * a, dq = 2.0 * a * da;
    const double p = e.priors()[i];
    out += p * q;
    dout += p * dq;
    if (q > 0.0) tail += p * dq * (std::log2(q) + 1.0 / std::log(2.0));
  }
  const double head = out > 0.0 ? -dout * (std::log2(out) + 1.0 / std::log(2.0)) : 0.0;
  return head + tail;
}

}  // namespace detail

struct CertificateOptions {
  int search_grid = 20000;       // sign-change search for tangency pairs
  int verification_grid = 36000; // dominance check
  double tolerance = 1e-7;       // allowed violation
};

/// Smallest-offset sine certificate touching I(theta) at a pair of angles
/// differing by pi/2. If no such pair dominates, `valid` is false and
/// `violation` reports how far the best candidate falls short.
inline DualCertificate dual_certificate(const Ensemble& e, const CertificateOptions& opt = {}) {
  if (e.dim() != 2) throw DimensionError("dual_certificate: planar ensemble required");
  auto balance = [&](double t) {
    return detail::planar_info_slope(e, t) + detail::planar_info_slope(e, t + kPi / 2.0);
  };
  std::vector<double> roots;
  const int n = opt.search_grid;
  double prev = balance(0.0);
  for (int k = 1; k <= n; ++k) {
    const double lo = kPi / 2.0 * (k - 1) / n, hi = kPi / 2.0 * k / n;
    const double cur = balance(hi);
    if (prev == 0.0) roots.push_back(lo);
    if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) {
      double a = lo, b = hi, fa = prev;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = balance(mid);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev = cur;
  }

  // Precompute I on the verification grid.
  std::vector<double> grid_info(static_cast<std::size_t>(opt.verification_grid));
  for (int k = 0; k < opt.verification_grid; ++k) {
    grid_info[static_cast<std::size_t>(k)] = detail::planar_info(e, kPi * k / opt.verification_grid);
  }

  DualCertificate best;
  best.violation = std::numeric_limits<double>::infinity();
  bool have_valid = false;
  for (double t1 : roots) {
    const double t2 = t1 + kPi / 2.0;
    const double i1 = detail::planar_info(e, t1), i2 = detail::planar_info(e, t2);
    const double s1 = detail::planar_info_slope(e, t1);
    // sine = a + u sin 2t + w cos 2t; g = u sin 2t1 + w cos 2t1, g' = 2(u cos 2t1 - w sin 2t1).
    const double g = 0.5 * (i1 - i2), gp = 0.5 * s1;
    const double sn = std::sin(2.0 * t1), cs = std::cos(2.0 * t1);
    const double u = g * sn + gp * cs;
    const double w = g * cs - gp * sn;
    DualCertificate cert;
    cert.offset = 0.5 * (i1 + i2);
    cert.amplitude = std::hypot(u, w);
    cert.phase = std::atan2(w, u);
    cert.tangencies = {std::fmod(t1, kPi), std::fmod(t2, kPi)};
    double viol = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < opt.verification_grid; ++k) {
      const double t = kPi * k / opt.verification_grid;
      viol = std::max(viol, grid_info[static_cast<std::size_t>(k)] - cert(t));
    }
    cert.violation = viol;
    cert.valid = viol <= opt.tolerance;
    if (cert.valid && (!have_valid || cert.offset < best.offset)) {
      best = cert;
      have_valid = true;
    } else if (!have_valid && viol < best.violation) {
      best = cert;
    }
  }
  std::sort(best.tangencies.begin(), best.tangencies.end());
  return best;
}

// ---------------------------------------------------------------------------
// Scans over the probability simplex

struct ScanRow {
  double alpha;
  double p0, p1, p2;
  double value;  // bits
  int support_size;
  lp::Status status;
};

struct ScanOptions {
  AccessibleInfoOptions lp{};
  unsigned jobs = 1;
};

/// Number of lattice points (a, b, c) with a + b + c = D.
inline std::size_t simplex_lattice_size(int denominator) {
  return static_cast<std::size_t>(denominator + 1) * static_cast<std::size_t>(denominator + 2) / 2;
}

/// Lattice point k (a outer, b inner, c = D - a - b).
inline std::array<int, 3> simplex_lattice_point(int denominator, std::size_t k) {
  for (int a = 0; a <= denominator; ++a) {
    const std::size_t row = static_cast<std::size_t>(denominator - a + 1);
    if (k < row) return {a, static_cast<int>(k), denominator - a - static_cast<int>(k)};
    k -= row;
  }
  throw DomainError("simplex_lattice_point: index out of range");
}

/// Accessible information of the lifted trines at every prior (a, b, c)/D.
/// Points are independent; with jobs > 1 they are evaluated on worker threads
/// and written to fixed slots, so the output order never depends on timing.
inline std::vector<ScanRow> simplex_scan(double alpha, int denominator, const CandidateSet& c,
                                         const ScanOptions& opt = {},
                                         const std::function<void(std::size_t, std::size_t)>& progress = {}) {
  if (denominator < 6) throw DomainError("simplex_scan: denominator must be >= 6");
  const std::size_t n = simplex_lattice_size(denominator);
  std::vector<ScanRow> rows(n);
  const Ensemble base = lifted_trines(alpha);
  const bool planar_candidates = c.dim() == 2;
  auto eval = [&](std::size_t k) {
    const auto [a, b, cc] = simplex_lattice_point(denominator, k);
    const double d = denominator;
    ScanRow row{alpha, a / d, b / d, cc / d, 0.0, 0, lp::Status::infeasible};
    const ProbDist pri = ProbDist::from_weights({a / d, b / d, cc / d});
    const Ensemble e = planar_candidates ? planar_trines(pri) : base.with_priors(pri);
    const LpSolution s = max_accessible_info(e, c, opt.lp);
    row.status = s.status;
    row.value = s.value;
    row.support_size = static_cast<int>(s.weights.size());
    rows[k] = row;
  };
  const unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1) {
    for (std::size_t k = 0; k < n; ++k) {
      eval(k);
      if (progress) progress(k + 1, n);
    }
    return rows;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t k = t; k < n; k += jobs) eval(k);
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

struct LocalMaximum {
  double p0, p1, p2;
  double value;
  std::size_t size;  // lattice points in the plateau
};

/// Discrete local maxima of a scan over the (a, b, c)/D lattice. A point is a
/// candidate if no lattice neighbour exceeds it by more than `tolerance`;
/// adjacent candidates with values within `tolerance` of each other are merged
/// into one plateau, reported at its highest point.
inline std::vector<LocalMaximum> discrete_local_maxima(const std::vector<ScanRow>& rows, int denominator,
                                                       double tolerance = 1e-9) {
  const int dd = denominator;
  auto index = [dd](int a, int b) -> long {
    if (a < 0 || b < 0 || a + b > dd) return -1;
    long k = 0;
    for (int i = 0; i < a; ++i) k += dd - i + 1;
    return k + b;
  };
  static constexpr int kSteps[6][2] = {{1, -1}, {-1, 1}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const std::size_t n = rows.size();
  std::vector<char> cand(n, 0);
  std::vector<std::array<int, 2>> coords(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = simplex_lattice_point(dd, k);
    coords[k] = {p[0], p[1]};
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (rows[k].status != lp::Status::optimal) continue;
    bool is_max = true;
    for (auto [da, db] : kSteps) {
      const long j = index(coords[k][0] + da, coords[k][1] + db);
      if (j >= 0 && rows[static_cast<std::size_t>(j)].value > rows[k].value + tolerance) {
        is_max = false;
        break;
      }
    }
    cand[k] = is_max;
  }
  std::vector<char> seen(n, 0);
  std::vector<LocalMaximum> out;
  for (std::size_t k = 0; k < n; ++k) {
    if (!cand[k] || seen[k]) continue;
    std::vector<std::size_t> stack{k};
    seen[k] = 1;
    std::size_t top = k, count = 0;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      ++count;
      if (rows[u].value > rows[top].value) top = u;
      for (auto [da, db] : kSteps) {
        const long j = index(coords[u][0] + da, coords[u][1] + db);
        if (j < 0) continue;
        const auto uj = static_cast<std::size_t>(j);
        if (cand[uj] && !seen[uj] && std::abs(rows[uj].value - rows[u].value) <= tolerance) {
          seen[uj] = 1;
          stack.push_back(uj);
        }
      }
    }
    out.push_back({rows[top].p0, rows[top].p1, rows[top].p2, rows[top].value, count});
  }
  return out;
}

}  // namespace trinecap

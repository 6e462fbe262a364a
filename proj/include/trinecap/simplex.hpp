#pragma once

// Dense revised simplex for small-row linear programs:
//
//   maximize c^T x  subject to  A x = b,  x >= 0.
//
// The row count is tiny here (3 or 6) while the column count runs to tens of
// thousands, so the explicit basis inverse is kept dense and updated with a
// pivot per iteration, with periodic refactorization from scratch.

#include "trinecap/linalg.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <vector>

namespace trinecap::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

enum class Pricing {
  bland,    // first improving column
  dantzig,  // most improving column, falling back to Bland on degenerate stalls
};

struct Options {
  Pricing pricing = Pricing::dantzig;
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-11;
  double tie_tolerance = 1e-9;  // reduced costs this close to 0 are reported as ties
  long max_iterations = 200000;
  int refactor_every = 50;
  int degenerate_stall = 30;  // consecutive degenerate pivots before switching to Bland
};

struct Result {
  Status status = Status::iteration_limit;
  double value = 0.0;
  std::vector<long> basis;        // column indices; >= n means an artificial
  Vec basic_values;               // values of the basic variables
  Vec duals;                      // y with y^T A_j >= c_j at optimality
  std::vector<long> tied_columns; // nonbasic columns with |reduced cost| <= tie_tolerance
  long iterations = 0;

  /// Nonzero primal entries as (column, value), artificials excluded.
  std::vector<std::pair<long, double>> support(long n, double threshold = 0.0) const {
    std::vector<std::pair<long, double>> s;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (basis[i] < n && basic_values[static_cast<long>(i)] > threshold) {
        s.emplace_back(basis[i], basic_values[static_cast<long>(i)]);
      }
    }
    return s;
  }
};

namespace detail {

class Solver {
 public:
  Solver(const Mat& a, const Vec& b, const Vec& c, const Options& opt)
      : a_(a), b_(b), c_(c), opt_(opt), m_(a.rows()), n_(a.cols()) {
    // Rows with negative right-hand side are flipped so artificials start feasible.
    row_sign_ = Vec::Ones(m_);
    for (long i = 0; i < m_; ++i) {
      if (b_[i] < 0.0) {
        a_.row(i) *= -1.0;
        b_[i] = -b_[i];
        row_sign_[i] = -1.0;
      }
    }
    basis_.resize(static_cast<std::size_t>(m_));
    for (long i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
    binv_ = Mat::Identity(m_, m_);
    x_ = b_;
    in_basis_.assign(static_cast<std::size_t>(n_ + m_), false);
    for (long i = 0; i < m_; ++i) in_basis_[static_cast<std::size_t>(n_ + i)] = true;
  }

  Result solve() {
    Result r;
    // Phase 1: maximize -sum(artificials).
    Vec cost1 = Vec::Zero(n_ + m_);
    cost1.tail(m_).setConstant(-1.0);
    Status s1 = run(cost1, /*phase_two=*/false, r.iterations);
    if (s1 == Status::iteration_limit) return finish(r, s1);
    double art = 0.0;
    for (long i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] >= n_) art += x_[i];
    }
    if (art > opt_.feasibility_tolerance * static_cast<double>(m_)) return finish(r, Status::infeasible);

    Vec cost2 = Vec::Zero(n_ + m_);
    cost2.head(n_) = c_;
    Status s2 = run(cost2, /*phase_two=*/true, r.iterations);
    r.value = 0.0;
    for (long i = 0; i < m_; ++i) r.value += cost2[basis_[static_cast<std::size_t>(i)]] * x_[i];
    Vec cb(m_);
    for (long i = 0; i < m_; ++i) cb[i] = cost2[basis_[static_cast<std::size_t>(i)]];
    r.duals = binv_.transpose() * cb;
    if (s2 == Status::optimal) {
      const Vec d = c_ - a_.transpose() * r.duals;
      for (long j = 0; j < n_; ++j) {
        if (!in_basis_[static_cast<std::size_t>(j)] && std::abs(d[j]) <= opt_.tie_tolerance) {
          r.tied_columns.push_back(j);
        }
      }
    }
    r.duals = r.duals.cwiseProduct(row_sign_);  // back to the caller's row signs
    return finish(r, s2);
  }

 private:
  Vec column(long j) const {
    if (j < n_) return a_.col(j);
    return Vec::Unit(m_, j - n_);
  }

  Result finish(Result& r, Status s) {
    r.status = s;
    r.basis = basis_;
    r.basic_values = x_;
    return r;
  }

  void refactor() {
    Mat bm(m_, m_);
    for (long i = 0; i < m_; ++i) bm.col(i) = column(basis_[static_cast<std::size_t>(i)]);
    binv_ = bm.partialPivLu().inverse();
    x_ = binv_ * b_;
    for (long i = 0; i < m_; ++i) {
      if (x_[i] < 0.0 && x_[i] > -opt_.feasibility_tolerance) x_[i] = 0.0;
    }
  }

  Status run(const Vec& cost, bool phase_two, long& iterations) {
    int since_refactor = 0, degenerate_run = 0;
    const long ncols = phase_two ? n_ : n_ + m_;
    Vec cb(m_);
    while (true) {
      if (iterations >= opt_.max_iterations) return Status::iteration_limit;
      for (long i = 0; i < m_; ++i) cb[i] = cost[basis_[static_cast<std::size_t>(i)]];
      const Vec y = binv_.transpose() * cb;

      // Pricing.
      const bool bland = opt_.pricing == Pricing::bland || degenerate_run >= opt_.degenerate_stall;
      long enter = -1;
      double best = opt_.optimality_tolerance;
      const Vec d = cost.head(n_) - a_.transpose() * y;
      for (long j = 0; j < ncols; ++j) {
        if (in_basis_[static_cast<std::size_t>(j)]) continue;
        const double dj = j < n_ ? d[j] : cost[j] - y[j - n_];
        if (dj > best) {
          enter = j;
          if (bland) break;
          best = dj;
        }
      }
      if (enter < 0) return Status::optimal;

      // Ratio test; ties go to the smallest basic column index.
      const Vec alpha = binv_ * column(enter);
      long leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (long i = 0; i < m_; ++i) {
        const long bi = basis_[static_cast<std::size_t>(i)];
        double ri;
        if (alpha[i] > opt_.feasibility_tolerance) {
          ri = std::max(0.0, x_[i]) / alpha[i];
        } else if (phase_two && bi >= n_ && std::abs(alpha[i]) > opt_.feasibility_tolerance) {
          ri = 0.0;  // a zero-level artificial must not move away from 0
        } else {
          continue;
        }
        if (ri < ratio - 1e-15 || (std::abs(ri - ratio) <= 1e-15 && bi < basis_[static_cast<std::size_t>(leave)])) {
          ratio = ri;
          leave = i;
        }
      }
      if (leave < 0) return Status::unbounded;

      // Pivot.
      const double piv = alpha[leave];
      x_ -= ratio * alpha;
      x_[leave] = ratio;
      binv_.row(leave) /= piv;
      for (long i = 0; i < m_; ++i) {
        if (i != leave && alpha[i] != 0.0) binv_.row(i) -= alpha[i] * binv_.row(leave);
      }
      in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave)])] = false;
      basis_[static_cast<std::size_t>(leave)] = enter;
      in_basis_[static_cast<std::size_t>(enter)] = true;
      ++iterations;
      degenerate_run = ratio <= 1e-14 ? degenerate_run + 1 : 0;
      if (++since_refactor >= opt_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  Mat a_;
  Vec b_;
  Vec c_;
  Options opt_;
  long m_, n_;
  std::vector<long> basis_;
  std::vector<bool> in_basis_;
  Mat binv_;
  Vec row_sign_;
  Vec x_;
};

}  // namespace detail

/// Solves max c^T x s.t. A x = b, x >= 0 with a two-phase revised simplex.
inline Result solve(const Mat& a, const Vec& b, const Vec& c, const Options& opt = {}) {
  if (a.rows() != b.size() || a.cols() != c.size()) throw DimensionError("lp::solve: shape mismatch");
  return detail::Solver(a, b, c, opt).solve();
}

}  // namespace trinecap::lp

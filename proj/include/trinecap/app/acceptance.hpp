#pragma once

// The acceptance suite: each criterion recomputes a published number or a
// structural property at desk scale and compares it with its tolerance.

#include "trinecap/adaptive.hpp"
#include "trinecap/app/config.hpp"
#include "trinecap/app/csv.hpp"
#include "trinecap/c11.hpp"
#include "trinecap/info.hpp"
#include "trinecap/lp.hpp"
#include "trinecap/tree.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace trinecap::app {

/// Reference values the criteria compare against. Kept as data so a test can
/// perturb one and watch the matching row fail.
struct Expectations {
  double two_trine_capacity = 0.64542;
  double uniform_planar = 0.58496;
  double gamma1 = 0.061367;
  double theta_vanishing = 0.056651;
  double six_outcome_gap = 0.0038282;
  double six_outcome_lp_agreement = 5e-4;
  double beta_star = 2.0 / 3.0;
  double gamma2 = 0.087247;
  double c11_at_gamma2 = 1.03126;
  double overlap = 0.90364;
  double stage1 = 0.35453;
  double stage2 = 0.67673;
  double adaptive_slope = 4.42238;
  double two_trine_slope = 1.64542;
  double separation = 0.01;
  double prior_agreement = 1e-6;
  double tangency_low = kPi / 4.0;
  double tangency_high = 3.0 * kPi / 4.0;
  int alpha0_maxima = 4;
  double shoulder_p = 0.105;
  double sigma_band = 4.0;
  double decay_correlation = -0.99;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string expected;
  std::string got;
  std::string tol;
  bool pass = false;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::vector<int> only;  // empty: every criterion
  std::function<void(const CriterionResult&)> on_result;
};

namespace detail {

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "/" : "") + num(v[i]);
  return s;
}

inline void near(CriterionResult& r, double expected, double got, double tol) {
  r.expected = num(expected);
  r.got = num(got);
  r.tol = num(tol);
  r.pass = std::abs(got - expected) <= tol;
}

inline double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(CriterionResult&)> run;
};

inline std::vector<Criterion> criteria(const RunConfig& cfg, const Expectations& x) {
  std::vector<Criterion> c;
  c.push_back({1, "two-trine planar capacity", [&](CriterionResult& r) {
                 near(r, x.two_trine_capacity, two_trine_capacity(0.0), 1e-5);
               }});
  c.push_back({2, "uniform planar accessible info (LP)", [&](CriterionResult& r) {
                 const auto s = max_accessible_info(planar_trines(), planar_grid(cfg.effective_planar_n()));
                 near(r, x.uniform_planar, s.value, 1e-4);
               }});
  c.push_back({3, "gamma1", [&](CriterionResult& r) { near(r, x.gamma1, find_gamma1(), 5e-4); }});
  c.push_back({4, "theta_opt vanishing point", [&](CriterionResult& r) {
                 near(r, x.theta_vanishing, opt_theta_vanishing_alpha(), 5e-4);
               }});
  c.push_back({5, "six-outcome gap at 0.024831", [&](CriterionResult& r) {
                 const double a = 0.024831;
                 near(r, x.six_outcome_gap, equal_prior_accessible_info(a).value - max_trine_vn_info(a), 1e-4);
               }});
  c.push_back({6, "six-outcome POVM vs sphere LP", [&](CriterionResult& r) {
                 const double a = 0.024831;
                 const double six = equal_prior_accessible_info(a).value;
                 const double lp = max_accessible_info(lifted_trines(a), sphere_grid(cfg.sphere_grid_n)).value;
                 r.expected = num(six);
                 r.got = num(lp);
                 r.tol = num(x.six_outcome_lp_agreement);
                 r.pass = std::abs(lp - six) <= x.six_outcome_lp_agreement;
               }});
  c.push_back({7, "optimal beta is 2/3", [&](CriterionResult& r) {
                 std::vector<double> got;
                 bool ok = true;
                 for (double a : {0.045, 0.06, 0.09}) {
                   got.push_back(c11_best_q_measurement(a).beta);
                   ok = ok && std::abs(got.back() - x.beta_star) <= 1e-4;
                 }
                 r.expected = num(x.beta_star);
                 r.got = join(got);
                 r.tol = "1e-4";
                 r.pass = ok;
               }});
  c.push_back({8, "C11 at gamma2", [&](CriterionResult& r) {
                 near(r, x.c11_at_gamma2, c11_best_q_measurement(x.gamma2).value, 1e-3);
               }});
  c.push_back({9, "overlap, stage rates, chain identity", [&](CriterionResult& r) {
                 const double p = v_overlap(x.gamma2);
                 const double s1 = stage1_rate(x.gamma2), s2 = stage2_rate(x.gamma2);
                 const double chain =
                     std::abs(s1 + s2 - (kLog2_3 - entropy_bits({p, 0.5 * (1.0 - p), 0.5 * (1.0 - p)})));
                 r.expected = join({x.overlap, x.stage1, x.stage2, 0.0});
                 r.got = join({p, s1, s2, chain});
                 r.tol = "1e-5/1e-4/1e-4/1e-12";
                 r.pass = std::abs(p - x.overlap) <= 1e-5 && std::abs(s1 - x.stage1) <= 1e-4 &&
                          std::abs(s2 - x.stage2) <= 1e-4 && chain <= 1e-12;
               }});
  c.push_back({10, "adaptive chord slope", [&](CriterionResult& r) {
                 const double slope =
                     (c11_best_q_measurement(x.gamma2).value - two_trine_capacity(0.0)) / x.gamma2;
                 near(r, x.adaptive_slope, slope, 1e-4);
               }});
  c.push_back({11, "two-trine slope at 0", [&](CriterionResult& r) {
                 const double h = 1e-7;
                 near(r, x.two_trine_slope, (two_trine_capacity(h) - two_trine_capacity(0.0)) / h, 1e-3);
               }});
  c.push_back({12, "adaptive separation and Holevo ordering", [&](CriterionResult& r) {
                 double min_sep = 1e300;
                 bool ordered = true;
                 for (int k = 1; k <= 8; ++k) {
                   const double a = 0.01 * k;
                   const double c11 = c11_value(a), bp = best_protocol_rate(a).total, hol = holevo_capacity(a);
                   min_sep = std::min(min_sep, bp - c11);
                   ordered = ordered && c11 <= bp + 1e-12 && bp <= hol + 1e-12;
                 }
                 r.expected = ">= " + num(x.separation) + ", ordered";
                 r.got = num(min_sep) + (ordered ? ", ordered" : ", not ordered");
                 r.tol = "0";
                 r.pass = min_sep >= x.separation && ordered;
               }});
  c.push_back({13, "closed-form prior vs Blahut-Arimoto", [&](CriterionResult& r) {
                 double worst = 0.0;
                 BlahutArimotoOptions ba;
                 ba.tolerance = 1e-13;
                 for (int k = 1; k <= 10; ++k) {
                   const double a = 0.002 * k;
                   for (double beta : {two_trine_beta(a), c11_best_q_measurement(a).beta}) {
                     const QChannel ch = q_channel(a, beta);
                     const double p0 = optimal_third_prior(ch.q, ch.delta, ch.epsilon);
                     worst = std::max(worst, std::abs(blahut_arimoto(ch.matrix, ba).optimal_priors[0] - p0));
                   }
                 }
                 r.expected = "0";
                 r.got = num(worst);
                 r.tol = num(x.prior_agreement);
                 r.pass = worst <= x.prior_agreement;
               }});
  c.push_back({14, "planar dual certificate at (0,1/2,1/2)", [&](CriterionResult& r) {
                 const Ensemble e = planar_trines(ProbDist({0.0, 0.5, 0.5}));
                 const DualCertificate cert = dual_certificate(e);
                 const double lp = max_accessible_info(e, planar_grid(cfg.effective_planar_n())).value;
                 bool ok = cert.valid && cert.tangencies.size() == 2;
                 if (ok) {
                   ok = std::abs(cert.tangencies[0] - x.tangency_low) <= 1e-3 &&
                        std::abs(cert.tangencies[1] - x.tangency_high) <= 1e-3;
                 }
                 ok = ok && std::abs(2.0 * cert.offset - lp) <= 1e-5;
                 r.expected = join({x.tangency_low, x.tangency_high, lp});
                 std::vector<double> got = cert.tangencies;
                 got.push_back(2.0 * cert.offset);
                 r.got = join(got);
                 r.tol = "1e-3/1e-3/1e-5";
                 r.pass = ok;
               }});
  c.push_back({15, "two-state concavity audit", [&](CriterionResult& r) {
                 double min_f = 1e300, max_d2 = -1e300;
                 bool ok = true;
                 for (double k : {0.1, 0.25, 0.5, 0.9}) {
                   const ConcavityReport a = concavity_audit(k, 10000);
                   min_f = std::min(min_f, a.min_f);
                   max_d2 = std::max(max_d2, a.max_second_diff);
                   ok = ok && a.ok();
                 }
                 r.expected = "min F >= 0, max d2 <= 0";
                 r.got = join({min_f, max_d2});
                 r.tol = "1e-12/1e-9";
                 r.pass = ok;
               }});
  c.push_back({16, "simplex-scan local maxima", [&](CriterionResult& r) {
                 const int dd = cfg.effective_denominator();
                 const CandidateSet grid = sphere_grid(cfg.effective_scan_sphere_n());
                 ScanOptions so;
                 so.jobs = cfg.jobs;
                 const auto m0 = discrete_local_maxima(simplex_scan(0.0, dd, grid, so), dd);
                 const auto m27 = discrete_local_maxima(simplex_scan(0.027, dd, grid, so), dd);
                 // A shoulder is a maximum of the form (p, (1-p)/2, (1-p)/2) up to
                 // permutation with p near the expected value.
                 const double res = 1.0 / dd + 1e-9;
                 std::vector<double> shoulders;
                 for (const auto& m : m27) {
                   std::array<double, 3> p{m.p0, m.p1, m.p2};
                   std::sort(p.begin(), p.end());
                   if (std::abs(p[2] - p[1]) <= res && std::abs(p[0] - x.shoulder_p) <= res) shoulders.push_back(p[0]);
                 }
                 r.expected = std::to_string(x.alpha0_maxima) + " maxima; 3 shoulders at p=" + num(x.shoulder_p);
                 r.got = std::to_string(m0.size()) + " maxima; " + std::to_string(shoulders.size()) +
                         " shoulders of " + std::to_string(m27.size()) + " maxima";
                 r.tol = "1/" + std::to_string(dd);
                 r.pass = static_cast<int>(m0.size()) == x.alpha0_maxima && shoulders.size() == 3;
               }});
  c.push_back({17, "measurement-tree bound", [&](CriterionResult& r) {
                 double worst_tree = 0.0;
                 for (double a : {0.02, 0.05}) {
                   const TreeNode t = protocol_tree(a, x.gamma2);
                   const double v = evaluate_tree(t, lifted_trines(a)).total_info;
                   worst_tree = std::max(worst_tree, std::abs(v - best_protocol_rate(a, x.gamma2).total));
                 }
                 double worst_loss = 0.0;
                 for (std::uint64_t seed = 1; seed <= 200; ++seed) {
                   std::mt19937_64 g(seed);
                   std::uniform_real_distribution<double> u(0.05, 0.95);
                   const double th = u(g) * kPi / 2.0, p = u(g);
                   const Ensemble e({StateVector{1.0, 0.0}, StateVector{std::cos(th), std::sin(th)}},
                                    ProbDist({p, 1.0 - p}));
                   const TreeNode t = random_tree(e, seed);
                   const double before = evaluate_tree(t, e).total_info;
                   const double after = evaluate_tree(collapse_deepest_refinement(t, e), e).total_info;
                   worst_loss = std::max(worst_loss, before - after);
                 }
                 r.expected = "0/0";
                 r.got = join({worst_tree, worst_loss});
                 r.tol = "1e-6/1e-9";
                 r.pass = worst_tree <= 1e-6 && worst_loss <= 1e-9;
               }});
  c.push_back({18, "cascade Monte Carlo", [&](CriterionResult& r) {
                 SimOptions so;
                 so.jobs = cfg.jobs;
                 const SimReport s = simulate_cascade(0.03, x.gamma2, 1000000, cfg.seed, so);
                 r.expected = "<= " + num(x.sigma_band) + " sigma";
                 r.got = num(s.max_sigma) + " sigma";
                 r.tol = num(x.sigma_band);
                 r.pass = s.within_sigma(x.sigma_band);
               }});
  c.push_back({19, "optimal third prior decay", [&](CriterionResult& r) {
                 const auto rows = p0_decay_scan({0.04, 0.02, 0.01, 0.005});
                 bool monotone = true;
                 std::vector<double> inv, lg, p0s;
                 for (std::size_t i = 0; i < rows.size(); ++i) {
                   p0s.push_back(rows[i].p0);
                   if (i && !(rows[i].p0 < rows[i - 1].p0)) monotone = false;
                   inv.push_back(1.0 / std::sqrt(rows[i].alpha));
                   lg.push_back(std::log2(rows[i].p0));
                 }
                 const double corr = correlation(inv, lg);
                 r.expected = "monotone, corr <= " + num(x.decay_correlation);
                 r.got = (monotone ? "monotone, corr " : "not monotone, corr ") + num(corr);
                 r.tol = "0";
                 r.pass = monotone && corr <= x.decay_correlation;
               }});
  return c;
}

}  // namespace detail

inline constexpr int kCriterionCount = 19;

/// Runs the selected criteria in order. Exceptions become failing rows.
inline std::vector<CriterionResult> run_acceptance(const RunConfig& cfg, const Expectations& x = {},
                                                   const AcceptanceOptions& opt = {}) {
  std::vector<CriterionResult> out;
  for (const auto& c : detail::criteria(cfg, x)) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), c.id) == opt.only.end()) continue;
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.got = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.on_result) opt.on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string format_result_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << "  #" << r.id << ' ' << r.name << "  expected " << r.expected << "  got "
     << r.got << "  tol " << r.tol << "  (" << std::fixed;
  os.precision(2);
  os << r.seconds << " s)";
  return os.str();
}

inline Dataset acceptance_dataset(const std::vector<CriterionResult>& rows) {
  Dataset d("acceptance", {{"id", "count"},
                           {"name", "label"},
                           {"expected", "label"},
                           {"got", "label"},
                           {"tol", "label"},
                           {"status", "label"},
                           {"seconds", "seconds"}});
  int failed = 0;
  for (const auto& r : rows) {
    d.add_row({static_cast<long long>(r.id), r.name, r.expected, r.got, r.tol, std::string(r.pass ? "pass" : "fail"),
               r.seconds});
    failed += r.pass ? 0 : 1;
  }
  d.notes().push_back(std::to_string(rows.size() - failed) + " of " + std::to_string(rows.size()) + " passed");
  return d;
}

inline bool all_passed(const std::vector<CriterionResult>& rows) {
  for (const auto& r : rows) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace trinecap::app

#pragma once

// Figure datasets: each id maps to a deterministic table of curves.

#include "trinecap/adaptive.hpp"
#include "trinecap/app/cache.hpp"
#include "trinecap/app/config.hpp"
#include "trinecap/app/csv.hpp"
#include "trinecap/c11.hpp"
#include "trinecap/lp.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace trinecap::app {

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"opttheta", "manythetas", "accessible",  "c1",
                                            "q1",       "adapt-narrow", "adapt-wide", "planar3d",
                                            "alpha009", "alpha018",   "alpha027"};
  return ids;
}

inline bool is_figure_id(const std::string& id) {
  for (const auto& f : figure_ids()) {
    if (f == id) return true;
  }
  return false;
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> v;
  for (int k = 0; k <= steps; ++k) v.push_back(lo + (hi - lo) * k / steps);
  return v;
}

inline double deg(double d) { return d * kPi / 180.0; }

/// Chord from (0, I(0, pi/6)) to (gamma_1, I(gamma_1, 0)); NaN beyond gamma_1.
inline double six_outcome_line(double a) {
  if (a > gamma1()) return kNaN;
  return equal_prior_accessible_info(a).value;
}

inline Dataset opttheta() {
  Dataset d("opttheta", {{"alpha", "dimensionless"}, {"theta_opt", "radians"}});
  for (double a : linspace(0.0, 0.07, 140)) d.add_row({a, opt_theta(a)});
  d.notes().push_back("theta_opt reaches 0 at alpha = " + format_double(opt_theta_vanishing_alpha()));
  return d;
}

inline Dataset manythetas() {
  std::vector<Column> cols{{"alpha", "dimensionless"}};
  for (int t = 0; t <= 30; t += 3) cols.push_back({"theta_" + std::to_string(t) + "deg", "bits"});
  cols.push_back({"theta_opt", "bits"});
  Dataset d("manythetas", cols);
  for (double a : linspace(0.0, 0.07, 70)) {
    std::vector<Cell> row{a};
    for (int t = 0; t <= 30; t += 3) row.emplace_back(trine_vn_info(a, deg(t)));
    row.emplace_back(max_trine_vn_info(a));
    d.add_row(std::move(row));
  }
  return d;
}

inline Dataset accessible() {
  Dataset d("accessible", {{"alpha", "dimensionless"},
                           {"vn_theta0", "bits"},
                           {"vn_opt", "bits"},
                           {"six_outcome_line", "bits"},
                           {"equal_prior_accessible", "bits"}});
  for (double a : linspace(0.0, 0.1, 100)) {
    d.add_row({a, trine_vn_info(a, 0.0), max_trine_vn_info(a), six_outcome_line(a),
               equal_prior_accessible_info(a).value});
  }
  d.notes().push_back("gamma1 = " + format_double(gamma1()));
  return d;
}

inline Dataset c1() {
  Dataset d("c1", {{"alpha", "dimensionless"},
                   {"two_trine", "bits"},
                   {"fixed_meas", "bits"},
                   {"best_q", "bits"},
                   {"accessible_equal_priors", "bits"},
                   {"sym_line", "bits"},
                   {"c11", "bits"},
                   {"method", "label"}});
  const auto alphas = linspace(0.0, 0.1, 100);
  for (const auto& r : c11_curve(alphas)) {
    d.add_row({r.alpha, r.two_trine, r.fixed, r.best_q, max_trine_vn_info(r.alpha), six_outcome_line(r.alpha),
               r.best.value, std::string(to_string(r.best.method))});
  }
  d.notes().push_back("c11 is the conjectured one-shot capacity (pointwise maximum of the lower bounds)");
  return d;
}

inline Dataset q1() {
  std::vector<Column> cols{{"alpha", "dimensionless"}};
  for (int t = 0; t <= 50; t += 5) cols.push_back({"q_" + std::to_string(t) + "deg", "bits"});
  cols.push_back({"q_two_thirds", "bits"});
  cols.push_back({"best_q", "bits"});
  cols.push_back({"best_beta", "dimensionless"});
  Dataset d("q1", cols);
  for (double a : linspace(0.0, 0.1, 100)) {
    std::vector<Cell> row{a};
    for (int t = 0; t <= 50; t += 5) {
      const double b = std::pow(std::sin(deg(t)), 2);
      row.emplace_back(q_channel_capacity(a, b, C11Method::opt_measurement_opt_prior).value);
    }
    row.emplace_back(q_channel_capacity(a, 2.0 / 3.0, C11Method::opt_measurement_opt_prior).value);
    const C11Point best = c11_best_q_measurement(a);
    row.emplace_back(best.value);
    row.emplace_back(best.beta);
    d.add_row(std::move(row));
  }
  d.notes().push_back("q_<t>deg uses Q(sin^2 t)");
  return d;
}

inline Dataset adapt(bool wide) {
  std::vector<Column> cols{{"alpha", "dimensionless"}, {"two_trine", "bits"}, {"fixed_meas", "bits"},
                           {"best_q", "bits"},         {"c11", "bits"},       {"best_protocol", "bits"}};
  if (wide) {
    cols.push_back({"simple_protocol", "bits"});
    cols.push_back({"holevo", "bits"});
  }
  Dataset d(wide ? "adapt-wide" : "adapt-narrow", cols);
  const auto alphas = wide ? linspace(0.0, 1.0 / 3.0, 200) : linspace(0.0, 0.1, 100);
  for (const auto& r : c11_curve(alphas)) {
    std::vector<Cell> row{r.alpha, r.two_trine, r.fixed, r.best_q, r.best.value,
                          r.alpha <= kGamma2 ? best_protocol_rate(r.alpha).total : kNaN};
    if (wide) {
      row.emplace_back(simple_protocol_rate(std::min(r.alpha, 1.0 / 3.0)).total);
      row.emplace_back(holevo_capacity(r.alpha));
    }
    d.add_row(std::move(row));
  }
  d.notes().push_back("best_protocol uses gamma = " + format_double(kGamma2));
  return d;
}

}  // namespace detail

/// Simplex-scan dataset for lifted trines at alpha (planar candidates when
/// `planar`), with discrete local maxima listed in the header notes.
inline Dataset scan_dataset(double alpha, const RunConfig& cfg, bool planar, const std::string& id = "scan") {
  const int dd = cfg.effective_denominator();
  const CandidateSet c = planar ? planar_grid(cfg.effective_planar_n()) : sphere_grid(cfg.effective_scan_sphere_n());
  ScanOptions opt;
  opt.jobs = cfg.jobs;
  const auto rows = simplex_scan(alpha, dd, c, opt);
  Dataset d(id, {{"alpha", "dimensionless"},
                 {"p0", "probability"},
                 {"p1", "probability"},
                 {"p2", "probability"},
                 {"access_info", "bits"},
                 {"support_size", "count"},
                 {"status", "label"}});
  for (const auto& r : rows) {
    d.add_row({r.alpha, r.p0, r.p1, r.p2, r.value, static_cast<long long>(r.support_size),
               std::string(lp::to_string(r.status))});
  }
  d.notes().push_back("denominator " + std::to_string(dd) + ", " + std::to_string(c.size()) +
                      (planar ? " planar" : " sphere") + " candidates");
  for (const auto& m : discrete_local_maxima(rows, dd)) {
    d.notes().push_back("local_max p=(" + format_double(m.p0) + "," + format_double(m.p1) + "," +
                        format_double(m.p2) + ") value=" + format_double(m.value));
  }
  return d;
}

/// Builds the dataset for a figure id. Scan figures go through `cache` when given.
inline std::string figure_csv(const std::string& id, const RunConfig& cfg, const Cache* cache = nullptr) {
  auto scan = [&](double alpha, bool planar) {
    auto compute = [&] { return to_csv(scan_dataset(alpha, cfg, planar, id), cfg); };
    if (!cache) return compute();
    const std::string params = id + " alpha=" + format_double(alpha) + " " + cfg.canonical();
    return cache->get_or_compute(Cache::key("figure", params), compute);
  };
  if (id == "opttheta") return to_csv(detail::opttheta(), cfg);
  if (id == "manythetas") return to_csv(detail::manythetas(), cfg);
  if (id == "accessible") return to_csv(detail::accessible(), cfg);
  if (id == "c1") return to_csv(detail::c1(), cfg);
  if (id == "q1") return to_csv(detail::q1(), cfg);
  if (id == "adapt-narrow") return to_csv(detail::adapt(false), cfg);
  if (id == "adapt-wide") return to_csv(detail::adapt(true), cfg);
  if (id == "planar3d") return scan(0.0, true);
  if (id == "alpha009") return scan(0.009, false);
  if (id == "alpha018") return scan(0.018, false);
  if (id == "alpha027") return scan(0.027, false);
  throw UsageError("unknown figure id '" + id + "'");
}

}  // namespace trinecap::app

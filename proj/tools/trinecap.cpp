// trinecap command-line front end.

#include "trinecap/app/acceptance.hpp"
#include "trinecap/app/cache.hpp"
#include "trinecap/app/config.hpp"
#include "trinecap/app/csv.hpp"
#include "trinecap/app/figures.hpp"
#include "trinecap/trinecap.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

namespace fs = std::filesystem;
using namespace trinecap;
using namespace trinecap::app;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::string config_path;
  std::string out_dir;
  bool paper_scale = false;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
};

RunConfig resolve_config(const CLI::App& app, const Flags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) load_config_file(f.config_path, cfg);
  if (app.count("--out")) cfg.output_dir = f.out_dir;
  if (app.count("--paper-scale")) cfg.paper_scale = true;
  if (app.count("--seed")) cfg.seed = f.seed;
  if (app.count("--jobs")) cfg.jobs = f.jobs;
  fs::create_directories(cfg.output_dir);
  return cfg;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

std::string alpha_tag(double a) {
  std::string s = format_double(a);
  for (char& c : s) {
    if (c == '.') c = 'p';
  }
  return s;
}

/// Times one LP at the simplex centre and extrapolates to the whole scan.
void warn_eta(const RunConfig& cfg, double alpha, bool planar) {
  const CandidateSet c = planar ? planar_grid(cfg.effective_planar_n()) : sphere_grid(cfg.effective_scan_sphere_n());
  const Ensemble e = planar ? planar_trines() : lifted_trines(alpha);
  const auto t0 = std::chrono::steady_clock::now();
  (void)max_accessible_info(e, c);
  const double one = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double total = one * static_cast<double>(simplex_lattice_size(cfg.effective_denominator())) /
                       std::max(1u, cfg.jobs);
  std::cerr << "warning: paper-scale scan (" << c.size() << " candidates, denominator "
            << cfg.effective_denominator() << "); estimated " << static_cast<long>(total / 60.0 + 0.5)
            << " min\n";
}

int cmd_figure(const RunConfig& cfg, const std::string& id) {
  if (!is_figure_id(id)) throw UsageError("unknown figure id '" + id + "'");
  if (cfg.paper_scale) {
    if (id == "planar3d") warn_eta(cfg, 0.0, true);
    if (id.rfind("alpha", 0) == 0) warn_eta(cfg, 0.018, false);
  }
  Cache cache(cfg.resolved_cache_dir());
  const fs::path out = fs::path(cfg.output_dir) / (id + ".csv");
  write_file(out, figure_csv(id, cfg, &cache));
  std::cout << out.string() << '\n';
  return kExitOk;
}

int cmd_scan(const RunConfig& cfg, double alpha, bool planar) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw UsageError("--alpha must lie in [0,1]");
  if (cfg.paper_scale) warn_eta(cfg, alpha, planar);
  Cache cache(cfg.resolved_cache_dir());
  const std::string params = "alpha=" + format_double(alpha) + " planar=" + (planar ? "1" : "0") + " " + cfg.canonical();
  bool hit = false;
  const std::string csv = cache.get_or_compute(
      Cache::key("scan", params), [&] { return to_csv(scan_dataset(alpha, cfg, planar), cfg); }, &hit);
  const fs::path out = fs::path(cfg.output_dir) / ("scan_alpha" + alpha_tag(alpha) + (planar ? "_planar" : "") + ".csv");
  write_file(out, csv);
  std::cerr << (hit ? "cache hit: " : "computed: ") << out.string() << '\n';
  std::cout << out.string() << '\n';
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, double alpha, double gamma, std::uint64_t n) {
  if (!(gamma > 0.0 && gamma < 8.0 / 9.0)) throw UsageError("--gamma must lie in (0, 8/9)");
  if (!(alpha >= 0.0 && alpha <= gamma)) throw UsageError("--alpha must lie in [0, gamma]");
  if (n == 0) throw UsageError("--n must be positive");
  SimOptions so;
  so.jobs = cfg.jobs;
  const SimReport r = simulate_cascade(alpha, gamma, n, cfg.seed, so);
  Dataset d("simulate", {{"branch", "label"},
                         {"outcome", "label"},
                         {"count", "count"},
                         {"frequency", "probability"},
                         {"expected", "probability"}});
  const std::uint64_t planar = r.samples - r.lifted;
  for (const auto& c : r.cells) {
    const std::uint64_t base = c.branch == "lifted" ? r.lifted : planar;
    d.add_row({c.branch, c.outcome, static_cast<long long>(c.count),
               base ? static_cast<double>(c.count) / static_cast<double>(base) : std::numeric_limits<double>::quiet_NaN(), c.expected_prob});
  }
  d.notes().push_back("seed " + std::to_string(r.seed) + " samples " + std::to_string(r.samples));
  d.notes().push_back("alpha " + format_double(alpha) + " gamma " + format_double(gamma));
  d.notes().push_back("lift_rate " + format_double(r.empirical_lift_rate) + " expected " +
                      format_double(r.expected_lift_rate));
  d.notes().push_back("max_sigma " + format_double(r.max_sigma));
  const fs::path out = fs::path(cfg.output_dir) / ("simulate_alpha" + alpha_tag(alpha) + "_seed" +
                                                   std::to_string(r.seed) + ".csv");
  write_file(out, to_csv(d, cfg));
  std::cout << "seed " << r.seed << "  lift rate " << r.empirical_lift_rate << " (expected " << r.expected_lift_rate
            << ")  max deviation " << r.max_sigma << " sigma\n"
            << out.string() << '\n';
  return r.within_sigma(4.0) ? kExitOk : kExitFailure;
}

int cmd_acceptance(const RunConfig& cfg, const std::vector<int>& only) {
  std::cout << "config_hash " << cfg.hash() << '\n';
  AcceptanceOptions opt;
  opt.only = only;
  opt.on_result = [](const CriterionResult& r) { std::cout << format_result_line(r) << std::endl; };
  const auto rows = run_acceptance(cfg, {}, opt);
  const fs::path out = fs::path(cfg.output_dir) / "acceptance.csv";
  write_file(out, to_csv(acceptance_dataset(rows), cfg));
  std::cout << out.string() << '\n';
  return all_passed(rows) ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical capacities of lifted-trine ensembles", "trinecap"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", f.out_dir, "output directory");
  app.add_flag("--paper-scale", f.paper_scale, "use the full-size grids (slow)");
  app.add_option("--seed", f.seed, "root random seed");
  app.add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);

  std::string figure_id;
  auto* figure = app.add_subcommand("figure", "write one figure dataset as CSV");
  figure->add_option("id", figure_id, "figure id")->required();

  double scan_alpha = 0.0;
  bool scan_planar = false;
  auto* scan = app.add_subcommand("scan", "accessible information over the prior simplex");
  scan->add_option("--alpha", scan_alpha, "lift parameter")->required();
  scan->add_flag("--planar", scan_planar, "planar candidate grid (alpha = 0 only)");

  double sim_alpha = 0.0, sim_gamma = kGamma2;
  std::uint64_t sim_n = 1000000;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo of the adaptive measurement cascade");
  simulate->add_option("--alpha", sim_alpha, "lift parameter")->required();
  simulate->add_option("--gamma", sim_gamma, "intermediate lift target")->capture_default_str();
  simulate->add_option("--n", sim_n, "number of signals")->capture_default_str();

  std::vector<int> only;
  auto* acceptance = app.add_subcommand("acceptance", "run the acceptance criteria");
  acceptance->add_option("--only", only, "criterion ids to run")->check(CLI::Range(1, kCriterionCount));

  auto* g1 = app.add_subcommand("gamma1", "alpha where the equal-prior optimum switches to V(0)");
  auto* g2 = app.add_subcommand("gamma2", "tangency point of the adaptive chord");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig cfg = resolve_config(app, f);
    if (*figure) return cmd_figure(cfg, figure_id);
    if (*scan) {
      if (scan_planar && scan_alpha != 0.0) throw UsageError("--planar requires --alpha 0");
      return cmd_scan(cfg, scan_alpha, scan_planar);
    }
    if (*simulate) return cmd_simulate(cfg, sim_alpha, sim_gamma, sim_n);
    if (*acceptance) return cmd_acceptance(cfg, only);
    if (*g1) {
      std::cout << format_double(find_gamma1()) << '\n';
      return kExitOk;
    }
    if (*g2) {
      std::cout << format_double(find_gamma2()) << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

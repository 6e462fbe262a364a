// Runs every acceptance criterion at desk scale and prints one line each.
// Exit status is nonzero if any criterion fails.

#include "trinecap/app/acceptance.hpp"

#include <cstdlib>
#include <iostream>

int main() {
  using namespace trinecap::app;
  const RunConfig cfg;
  std::cout << "trinecap " << kVersion << "  config_hash " << cfg.hash() << std::endl;
  AcceptanceOptions opt;
  opt.on_result = [](const CriterionResult& r) { std::cout << format_result_line(r) << std::endl; };
  const auto rows = run_acceptance(cfg, {}, opt);
  int failed = 0;
  double seconds = 0.0;
  for (const auto& r : rows) {
    failed += r.pass ? 0 : 1;
    seconds += r.seconds;
  }
  std::cout << rows.size() - failed << '/' << rows.size() << " criteria passed in " << seconds << " s" << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}

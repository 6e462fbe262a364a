#pragma once

// Run configuration: flat `key = value` files, command-line overrides, and a
// content hash of everything that can change numeric output.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef TRINECAP_VERSION
#define TRINECAP_VERSION "0.0.0"
#endif

namespace trinecap::app {

inline constexpr const char* kVersion = TRINECAP_VERSION;
inline constexpr const char* kCacheDirEnv = "TRINECAP_CACHE_DIR";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
  return s;
}

struct RunConfig {
  int planar_grid_n = 3600;
  int sphere_grid_n = 20000;       // single-prior LP checks
  int scan_sphere_grid_n = 4000;   // simplex scans
  int simplex_denominator = 45;
  std::uint64_t seed = 1;
  std::string cache_dir;           // empty: <output_dir>/.trinecap-cache
  std::string output_dir = ".";
  bool paper_scale = false;
  unsigned jobs = 1;

  /// Grid sizes after applying the paper-scale switch.
  int effective_planar_n() const { return paper_scale ? 36000 : planar_grid_n; }
  int effective_scan_sphere_n() const { return paper_scale ? 96000 : scan_sphere_grid_n; }
  int effective_denominator() const { return paper_scale ? 90 : simplex_denominator; }

  std::string resolved_cache_dir() const {
    if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
    if (!cache_dir.empty()) return cache_dir;
    return output_dir + "/.trinecap-cache";
  }

  /// Canonical text of the numeric settings (paths and job count excluded:
  /// they never change results).
  std::string canonical() const {
    std::ostringstream os;
    os << "paper_scale=" << (paper_scale ? 1 : 0) << '\n'
       << "planar_grid_n=" << planar_grid_n << '\n'
       << "scan_sphere_grid_n=" << scan_sphere_grid_n << '\n'
       << "seed=" << seed << '\n'
       << "simplex_denominator=" << simplex_denominator << '\n'
       << "sphere_grid_n=" << sphere_grid_n << '\n';
    return os.str();
  }

  std::string hash() const { return hex64(fnv1a64(canonical())); }

  /// Applies one setting; throws ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value) {
    auto as_int = [&](long lo) {
      std::size_t pos = 0;
      long v = 0;
      try {
        v = std::stol(value, &pos);
      } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
      }
      if (pos != value.size() || v < lo) throw ConfigError("config: bad value for '" + key + "': " + value);
      return v;
    };
    if (key == "planar_grid_n") {
      planar_grid_n = static_cast<int>(as_int(4));
    } else if (key == "sphere_grid_n") {
      sphere_grid_n = static_cast<int>(as_int(16));
    } else if (key == "scan_sphere_grid_n") {
      scan_sphere_grid_n = static_cast<int>(as_int(16));
    } else if (key == "simplex_denominator") {
      simplex_denominator = static_cast<int>(as_int(6));
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(as_int(0));
    } else if (key == "jobs") {
      jobs = static_cast<unsigned>(as_int(1));
    } else if (key == "cache_dir") {
      cache_dir = value;
    } else if (key == "output_dir") {
      output_dir = value;
    } else if (key == "paper_scale") {
      if (value == "true" || value == "1") {
        paper_scale = true;
      } else if (value == "false" || value == "0") {
        paper_scale = false;
      } else {
        throw ConfigError("config: 'paper_scale' expects true/false, got '" + value + "'");
      }
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Reads `key = value` lines into `cfg`; '#' starts a comment.
inline void load_config(std::istream& in, RunConfig& cfg, const std::string& source = "<config>") {
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(n) + ": expected key = value");
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

inline void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  load_config(in, cfg, path);
}

}  // namespace trinecap::app

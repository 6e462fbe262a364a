#pragma once

// On-disk result cache. Entries are files named by the FNV-1a hash of
// (operation, parameters, tool version) and end with a checksum line so a
// truncated or edited entry is detected and recomputed.

#include "trinecap/app/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

namespace trinecap::app {

class Cache {
 public:
  explicit Cache(std::filesystem::path dir, std::ostream* warnings = &std::cerr)
      : dir_(std::move(dir)), warn_(warnings) {}

  static std::string key(const std::string& op, const std::string& params) {
    return hex64(fnv1a64(op + '\x1f' + params + '\x1f' + kVersion));
  }

  std::filesystem::path path_for(const std::string& key) const { return dir_ / (key + ".csv"); }

  /// Cached content, or nullopt when absent or corrupt (corrupt entries are
  /// reported and removed).
  std::optional<std::string> get(const std::string& key) const {
    const auto p = path_for(key);
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string all = ss.str();
    static const std::string kTag = "#checksum ";
    const auto pos = all.rfind(kTag);
    if (pos != std::string::npos && all.size() == pos + kTag.size() + 17 && all.back() == '\n') {
      const std::string body = all.substr(0, pos);
      if (all.substr(pos + kTag.size(), 16) == hex64(fnv1a64(body))) return body;
    }
    if (warn_) *warn_ << "warning: cache entry " << p.string() << " is corrupt; recomputing\n";
    std::error_code ec;
    std::filesystem::remove(p, ec);
    return std::nullopt;
  }

  /// Writes atomically: temp file in the same directory, then rename.
  void put(const std::string& key, const std::string& content) const {
    std::filesystem::create_directories(dir_);
    const auto final_path = path_for(key);
    auto tmp = final_path;
    tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
      out << content << "#checksum " << hex64(fnv1a64(content)) << '\n';
      if (!out) throw std::runtime_error("cache: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
  }

  /// Returns the cached value for `key`, computing and storing it on a miss.
  std::string get_or_compute(const std::string& key, const std::function<std::string()>& compute,
                             bool* hit = nullptr) const {
    if (auto v = get(key)) {
      if (hit) *hit = true;
      return *v;
    }
    if (hit) *hit = false;
    std::string v = compute();
    put(key, v);
    return v;
  }

 private:
  std::filesystem::path dir_;
  std::ostream* warn_;
};

}  // namespace trinecap::app

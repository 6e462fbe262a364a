#pragma once

// Column-oriented datasets written as CSV with a '#' comment header.

#include "trinecap/app/config.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace trinecap::app {

using Cell = std::variant<double, long long, std::string>;

struct Column {
  std::string name;
  std::string unit;  // bits, radians, probability, count, ...
};

class Dataset {
 public:
  Dataset(std::string id, std::vector<Column> columns) : id_(std::move(id)), cols_(std::move(columns)) {}

  const std::string& id() const { return id_; }
  const std::vector<Column>& columns() const { return cols_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  std::vector<std::string>& notes() { return notes_; }
  const std::vector<std::string>& notes() const { return notes_; }

  void add_row(std::vector<Cell> row) {
    if (row.size() != cols_.size()) {
      throw std::invalid_argument("dataset " + id_ + ": row has " + std::to_string(row.size()) + " cells, expected " +
                                  std::to_string(cols_.size()));
    }
    rows_.push_back(std::move(row));
  }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < cols_.size(); ++i) {
      if (cols_[i].name == name) return i;
    }
    throw std::out_of_range("dataset " + id_ + ": no column '" + name + "'");
  }

  double number(std::size_t row, const std::string& col) const {
    const Cell& c = rows_.at(row).at(column_index(col));
    if (auto d = std::get_if<double>(&c)) return *d;
    if (auto i = std::get_if<long long>(&c)) return static_cast<double>(*i);
    throw std::invalid_argument("dataset " + id_ + ": column '" + col + "' is not numeric");
  }

 private:
  std::string id_;
  std::vector<Column> cols_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::string> notes_;
};

/// Shortest round-trip-safe text for a double; NaN becomes an empty cell.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline void write_csv(std::ostream& os, const Dataset& d, const RunConfig& cfg) {
  os << "# trinecap " << kVersion << '\n';
  os << "# dataset " << d.id() << '\n';
  os << "# config_hash " << cfg.hash() << '\n';
  os << "# units";
  for (const auto& c : d.columns()) os << ' ' << c.name << '=' << c.unit;
  os << '\n';
  for (const auto& n : d.notes()) os << "# " << n << '\n';
  for (std::size_t i = 0; i < d.columns().size(); ++i) os << (i ? "," : "") << csv_escape(d.columns()[i].name);
  os << '\n';
  for (const auto& row : d.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      std::visit(
          [&os](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              os << format_double(v);
            } else if constexpr (std::is_same_v<T, long long>) {
              os << v;
            } else {
              os << csv_escape(v);
            }
          },
          row[i]);
    }
    os << '\n';
  }
}

inline std::string to_csv(const Dataset& d, const RunConfig& cfg) {
  std::ostringstream os;
  write_csv(os, d, cfg);
  return os.str();
}

}  // namespace trinecap::app

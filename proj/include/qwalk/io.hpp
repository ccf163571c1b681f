#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "experiment.hpp"

namespace qwalk {

inline constexpr const char* csv_header = "W,t,observable,value,std_error,N";

/// Decimal with 15 significant digits ("%.15g").
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

/// The double nearest to the 15-digit decimal that format_number prints.
inline double round_to_printed(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

inline void write_csv(std::ostream& out, const ResultTable& table) {
  out << csv_header << '\n';
  for (const auto& r : table)
    out << format_number(r.disorder) << ',' << r.time << ',' << r.observable << ','
        << format_number(r.value) << ',' << format_number(r.std_error) << ',' << r.realizations
        << '\n';
}

inline nlohmann::json to_json(const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table)
    rows.push_back({{"W", round_to_printed(r.disorder)},
                    {"t", r.time},
                    {"observable", r.observable},
                    {"value", round_to_printed(r.value)},
                    {"std_error", round_to_printed(r.std_error)},
                    {"N", r.realizations}});
  return nlohmann::json{{"columns", {"W", "t", "observable", "value", "std_error", "N"}},
                        {"rows", rows}};
}

inline void write_json(std::ostream& out, const ResultTable& table) {
  out << to_json(table).dump(1) << '\n';
}

namespace detail {

inline double parse_double(const std::string& field, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || *end != '\0' || errno == ERANGE)
    throw DomainError("csv line " + std::to_string(line) + ": bad number '" + field + "'");
  return v;
}

inline std::size_t parse_count(const std::string& field, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(field.c_str(), &end, 10);
  if (field.empty() || *end != '\0' || errno == ERANGE || field[0] == '-')
    throw DomainError("csv line " + std::to_string(line) + ": bad integer '" + field + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline ResultTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header)
    throw DomainError("csv: missing header '" + std::string(csv_header) + "'");
  ResultTable table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6)
      throw DomainError("csv line " + std::to_string(lineno) + ": expected 6 fields, got " +
                        std::to_string(f.size()));
    table.push_back({detail::parse_double(f[0], lineno), detail::parse_count(f[1], lineno), f[2],
                     detail::parse_double(f[3], lineno), detail::parse_double(f[4], lineno),
                     detail::parse_count(f[5], lineno)});
  }
  return table;
}

inline ResultTable from_json(const nlohmann::json& j) {
  ResultTable table;
  try {
    for (const auto& r : j.at("rows"))
      table.push_back({r.at("W").get<double>(), r.at("t").get<std::size_t>(),
                       r.at("observable").get<std::string>(), r.at("value").get<double>(),
                       r.at("std_error").get<double>(), r.at("N").get<std::size_t>()});
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("json result table: ") + e.what());
  }
  return table;
}

inline void emit(const ResultTable& table, OutputFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  if (format == OutputFormat::csv)
    write_csv(out, table);
  else
    write_json(out, table);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + s + "' (expected csv or json)");
}

/// Applies the keys of a JSON configuration document to `config`.
///
/// Layout (every key optional):
///
///     { "geometry":    { "kind": "line|ring|segment", "sites": 61 },
///       "run":         { "steps": 100, "realizations": 1000,
///                        "master_seed": 1, "workers": 0 },
///       "disorder":    [0, 0.2, 0.4, 0.6, 0.8, 1],
///       "snapshots":   { "times": [20, 40], "stride": 1 },
///       "observables": ["p0", "msd", ...],
///       "output":      { "format": "csv|json", "path": "out.csv" },
///       "analysis":    { "smoothing": 0.1, "sigma_min_time": 10,
///                        "quad_points": 0 } }
///
/// Unknown keys and type errors are collected and reported together.
/// Returns output.path if present.
inline std::string apply_config(const nlohmann::json& doc, ExperimentConfig& c) {
  std::vector<std::string> errors;
  std::string path;
  auto check_keys = [&](const nlohmann::json& obj, const std::string& section,
                        std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
      errors.push_back("'" + section + "' must be an object");
      return false;
    }
    for (const auto& [key, _] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) errors.push_back("unknown key '" + (section.empty() ? "" : section + ".") + key + "'");
    }
    return true;
  };
  auto get = [&](const nlohmann::json& obj, const char* key, const std::string& where, auto& dst) {
    if (!obj.contains(key)) return;
    try {
      obj.at(key).get_to(dst);
    } catch (const nlohmann::json::exception&) {
      errors.push_back("'" + where + "." + key + "' has the wrong type");
    }
  };

  if (!check_keys(doc, "", {"geometry", "run", "disorder", "snapshots", "observables", "output",
                            "analysis"}))
    throw ConfigError("configuration root must be a JSON object");

  if (doc.contains("geometry") && check_keys(doc["geometry"], "geometry", {"kind", "sites"})) {
    const auto& s = doc["geometry"];
    if (s.contains("kind")) {
      try {
        c.geometry = parse_geometry_kind(s["kind"].get<std::string>());
      } catch (const std::exception& e) {
        errors.push_back(std::string("geometry.kind: ") + e.what());
      }
    }
    get(s, "sites", "geometry", c.sites);
  }
  if (doc.contains("run") &&
      check_keys(doc["run"], "run", {"steps", "realizations", "master_seed", "workers"})) {
    const auto& s = doc["run"];
    get(s, "steps", "run", c.steps);
    get(s, "realizations", "run", c.realizations);
    get(s, "master_seed", "run", c.master_seed);
    get(s, "workers", "run", c.workers);
  }
  if (doc.contains("disorder")) get(doc, "disorder", "", c.disorder);
  if (doc.contains("snapshots") && check_keys(doc["snapshots"], "snapshots", {"times", "stride"})) {
    const auto& s = doc["snapshots"];
    get(s, "times", "snapshots", c.snapshot_times);
    get(s, "stride", "snapshots", c.snapshot_stride);
  }
  if (doc.contains("observables")) {
    std::vector<std::string> names;
    get(doc, "observables", "", names);
    if (doc["observables"].is_array()) {
      c.observables.clear();
      for (const auto& n : names) {
        if (auto o = parse_observable(n))
          c.observables.push_back(*o);
        else
          errors.push_back("unknown observable '" + n + "'");
      }
    }
  }
  if (doc.contains("output") && check_keys(doc["output"], "output", {"format", "path"})) {
    const auto& s = doc["output"];
    if (s.contains("format")) {
      try {
        c.format = parse_format(s["format"].get<std::string>());
      } catch (const std::exception& e) {
        errors.push_back(std::string("output.format: ") + e.what());
      }
    }
    get(s, "path", "output", path);
  }
  if (doc.contains("analysis") &&
      check_keys(doc["analysis"], "analysis", {"smoothing", "sigma_min_time", "quad_points"})) {
    const auto& s = doc["analysis"];
    if (s.contains("smoothing")) {
      if (s["smoothing"].is_null())
        c.smoothing.reset();
      else if (s["smoothing"].is_number())
        c.smoothing = s["smoothing"].get<double>();
      else
        errors.push_back("'analysis.smoothing' must be a number or null");
    }
    get(s, "sigma_min_time", "analysis", c.sigma_min_time);
    get(s, "quad_points", "analysis", c.quad_points);
  }

  if (!errors.empty()) {
    std::string msg = "invalid configuration file:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return path;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "': " + std::strerror(errno));
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace qwalk

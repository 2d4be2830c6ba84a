#pragma once

// Reports: versioned JSON, flat CSV tables with 17 significant digits, path dumps and
// growth diagnostics. Wall times go to a separate file so reports compare byte for byte.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "grid_path.hpp"
#include "growth.hpp"
#include "verify.hpp"

namespace ltfbm {

inline constexpr const char* kReportSchema = "ltfbm-report/1";

using Json = nlohmann::ordered_json;

/// %.17g; nan and inf spelled out so CSV stays parseable.
inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {
// JSON has no nan or inf; they become null.
inline Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
}  // namespace detail

inline Json to_json(const CampaignResult& r) {
  Json j;
  j["name"] = r.name;
  j["pass"] = r.pass();
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = detail::num(v);
  j["params"] = params;
  Json settings = Json::object();
  for (const auto& [k, v] : r.settings) settings[k] = v;
  j["settings"] = settings;
  j["sample_size"] = r.sample_size;
  Json est = Json::array();
  for (const auto& e : r.estimates) {
    est.push_back({{"name", e.name}, {"value", detail::num(e.value)}, {"se", detail::num(e.se)}});
  }
  j["estimates"] = est;
  Json tg = Json::array();
  for (const auto& t : r.targets) tg.push_back({{"name", t.name}, {"value", detail::num(t.value)}});
  j["targets"] = tg;
  Json ch = Json::array();
  for (const auto& c : r.checks) {
    ch.push_back({{"name", c.name},
                  {"target", c.target},
                  {"estimate", detail::num(c.estimate)},
                  {"se", detail::num(c.se)},
                  {"lower", detail::num(c.lower)},
                  {"upper", detail::num(c.upper)},
                  {"pass", c.pass}});
  }
  j["checks"] = ch;
  j["warnings"] = r.warnings;
  j["table_columns"] = r.table.columns;
  return j;
}

/// The report body; wall times are deliberately absent.
inline Json report_json(const std::vector<CampaignResult>& rs, const Json& config) {
  Json j;
  j["schema"] = kReportSchema;
  bool all = true;
  for (const auto& r : rs) all = all && r.pass();
  j["pass"] = all;
  j["config"] = config;
  Json arr = Json::array();
  for (const auto& r : rs) arr.push_back(to_json(r));
  j["campaigns"] = arr;
  return j;
}

inline Json timing_json(const std::vector<CampaignResult>& rs) {
  Json j = Json::object();
  for (const auto& r : rs) j[r.name] = r.wall_time;
  return j;
}

inline std::string table_csv(const ResultTable& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + fmt17(row[i]);
    s += "\n";
  }
  return s;
}

/// One row per check across campaigns.
inline std::string checks_csv(const std::vector<CampaignResult>& rs) {
  std::string s = "campaign,check,estimate,se,lower,upper,pass\n";
  for (const auto& r : rs) {
    for (const auto& c : r.checks) {
      s += r.name + "," + c.name + "," + fmt17(c.estimate) + "," + fmt17(c.se) + "," +
           fmt17(c.lower) + "," + fmt17(c.upper) + "," + (c.pass ? "1" : "0") + "\n";
    }
  }
  return s;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ArgumentError("cannot open " + p.string() + " for writing");
  f << s;
  if (!f) throw ArgumentError("write failed for " + p.string());
}

/// <prefix>.report.json, <prefix>.checks.csv, <prefix>.<campaign>.csv per table and
/// <prefix>.timing.json, all directly under dir.
inline void write_reports(const std::filesystem::path& dir, const std::string& prefix,
                          const std::vector<CampaignResult>& rs, const Json& config) {
  std::filesystem::create_directories(dir);
  write_text(dir / (prefix + ".report.json"), report_json(rs, config).dump(2) + "\n");
  write_text(dir / (prefix + ".checks.csv"), checks_csv(rs));
  for (const auto& r : rs) {
    if (!r.table.columns.empty()) write_text(dir / (prefix + "." + r.name + ".csv"), table_csv(r.table));
  }
  write_text(dir / (prefix + ".timing.json"), timing_json(rs).dump(2) + "\n");
}

/// `t,value` CSV for one path.
inline std::string path_csv(const GridPath& x) {
  std::string s = "t,value\n";
  for (std::size_t i = 0; i < x.size(); ++i) s += fmt17(x.time(i)) + "," + fmt17(x[i]) + "\n";
  return s;
}

/// `p,log_c,valiron_stat` CSV for one growth analysis.
inline std::string growth_csv(const GrowthEstimate& g) {
  std::string s = "p,log_c,valiron_stat\n";
  for (const auto& d : g.diag) {
    s += std::to_string(d.p) + "," + fmt17(d.log_c) + "," + fmt17(d.stat) + "\n";
  }
  return s;
}

}  // namespace ltfbm

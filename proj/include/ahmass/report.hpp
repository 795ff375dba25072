#pragma once

// Report documents: nlohmann::json trees (std::map objects, so keys come out sorted)
// written by a small emitter that prints every double with %.17g.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ahmass/config.hpp"
#include "ahmass/error.hpp"

namespace ahmass {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

/// Number or, when not finite, the strings "inf", "-inf", "nan".
inline Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

/// Every numeric result is carried as {value, error_estimate}.
inline Json estimate(double value, double error) {
  return Json{{"value", number(value)}, {"error_estimate", number(error)}};
}

inline Json exact(double value) { return estimate(value, 0.0); }

inline Json estimate_list(const Vec& values, const Vec& errors) {
  Json out = Json::array();
  for (int i = 0; i < values.size(); ++i) out.push_back(estimate(values[i], errors[i]));
  return out;
}

namespace detail {

inline void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

inline void format_double(std::string& out, double v) {
  if (!std::isfinite(v)) {
    escape_into(out, std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
    return;
  }
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void emit_json(std::string& out, const Json& j, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        escape_into(out, it.key());
        out += ": ";
        emit_json(out, it.value(), depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit_json(out, j[i], depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::string: escape_into(out, j.get<std::string>()); return;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; return;
    case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); return;
    case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); return;
    case Json::value_t::number_float: format_double(out, j.get<double>()); return;
    default: out += "null"; return;
  }
}

}  // namespace detail

/// Deterministic serialization: sorted keys, two-space indent, %.17g doubles.
inline std::string to_json_text(const Json& j) {
  std::string out;
  detail::emit_json(out, j, 0);
  out += '\n';
  return out;
}

/// Row-oriented table; cells are formatted with %.17g.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string text() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        if (std::isfinite(row[i]))
          detail::format_double(out, row[i]);
        else
          out += std::isnan(row[i]) ? "nan" : (row[i] > 0 ? "inf" : "-inf");
      }
      out += '\n';
    }
    return out;
  }
};

inline Json config_echo(const RunConfig& cfg) {
  Json fam{{"kind", cfg.family.kind}, {"n", cfg.family.n}, {"base", cfg.family.base}};
  Json params = Json::object();
  for (const auto& [k, v] : cfg.family.params) params[k] = number(v);
  fam["params"] = params;
  Json table = Json::array();
  for (const auto& row : cfg.family.table) table.push_back({number(row[0]), number(row[1])});
  fam["table"] = table;

  const QuadratureSpec& q = cfg.quadrature;
  Json radii = Json::array();
  for (double r : q.r_values) radii.push_back(number(r));
  Json quad{{"sphere_order", q.sphere_order}, {"radial_panels", q.radial_panels},
            {"radial_degree", q.radial_degree}, {"r_min", number(q.r_min)},
            {"r_outer", number(q.r_outer)},   {"r_values", radii},
            {"extrapolation", to_string(q.extrapolation)}};
  Json fd{{"step", number(cfg.fd.step)},
          {"scheme", cfg.fd.scheme == FDScheme::Central2 ? "central2" : "central4"},
          {"richardson_levels", cfg.fd.richardson_levels}};
  Json points = Json::array();
  for (const auto& p : cfg.sample.points) {
    Json row = Json::array();
    for (double v : p) row.push_back(number(v));
    points.push_back(row);
  }
  Json sample{{"count", cfg.sample.count}, {"r_lo", number(cfg.sample.r_lo)}, {"r_hi", number(cfg.sample.r_hi)},
              {"points", points},         {"map_shift", number(cfg.sample.map_shift)}};
  // threads and output paths are deliberately absent: they must not change the bytes
  Json echo{{"command", to_string(cfg.command)}, {"seed", cfg.seed}, {"family", fam},
            {"quadrature", quad}, {"fd", fd}, {"sample", sample}};
  if (cfg.wall) {
    const WallSpec& w = *cfg.wall;
    echo["wall"] = Json{{"kind", to_string(w.kind)}, {"d", number(w.d)}, {"sign", w.sign},
                        {"t0", number(w.t0)}, {"c", number(w.c)}};
  }
  return echo;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

}  // namespace ahmass

#pragma once

// Run configuration read from a flat YAML document. Top-level keys are scalars or
// sections of scalars/short lists; nesting never goes deeper than two levels.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "ahmass/error.hpp"
#include "ahmass/graph_geometry.hpp"
#include "ahmass/graph_library.hpp"
#include "ahmass/intrinsic_oracle.hpp"
#include "ahmass/mass_engine.hpp"

namespace ahmass {

enum class Command { Inspect, Verify, Mass, Penrose, Decay, Map };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::Inspect: return "inspect";
    case Command::Verify: return "verify";
    case Command::Mass: return "mass";
    case Command::Penrose: return "penrose";
    case Command::Decay: return "decay";
    case Command::Map: return "map";
  }
  return "unknown";
}

inline Command parse_command(const std::string& s) {
  static const std::map<std::string, Command> names{
      {"inspect", Command::Inspect}, {"verify", Command::Verify}, {"mass", Command::Mass},
      {"penrose", Command::Penrose}, {"decay", Command::Decay},   {"map", Command::Map}};
  const auto it = names.find(s);
  if (it == names.end()) throw Error(ErrorCode::ConfigError, "unknown command '" + s + "'");
  return it->second;
}

enum class OutputFormat { Json, Csv };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  throw Error(ErrorCode::ConfigError, "format must be json or csv, got '" + s + "'");
}

/// Points where `inspect` and `verify` evaluate, and the grid for `map`.
struct SampleSpec {
  int count = 100;
  double r_lo = 1.5;  // geodesic-polar r = sinh(distance)
  double r_hi = 10.0;
  std::vector<std::vector<double>> points;  // explicit disk points, override random sampling
  double map_shift = 0.0;                   // s in the half-space map

  void validate() const {
    if (count < 1 || count > 1000000) throw Error(ErrorCode::ConfigError, "sample.count out of range");
    if (!(r_lo > 0.0) || !(r_hi >= r_lo)) throw Error(ErrorCode::ConfigError, "need 0 < sample.r_lo <= sample.r_hi");
    if (!std::isfinite(map_shift)) throw Error(ErrorCode::ConfigError, "sample.map_shift must be finite");
  }
};

struct RunConfig {
  Command command = Command::Mass;
  FamilySpec family;
  QuadratureSpec quadrature;
  FDConfig fd;
  SampleSpec sample;
  std::optional<WallSpec> wall;
  std::uint64_t seed = 1;
  int threads = 1;
  std::optional<std::string> out_path;
  OutputFormat format = OutputFormat::Json;
};

namespace detail {

inline std::string where(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

template <class T>
T scalar_as(const YAML::Node& node, const std::string& name) {
  if (!node.IsScalar()) throw Error(ErrorCode::ConfigError, name + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw Error(ErrorCode::ConfigError, name + " has the wrong type");
  }
}

inline std::vector<double> list_as(const YAML::Node& node, const std::string& name) {
  if (!node.IsSequence()) throw Error(ErrorCode::ConfigError, name + " must be a list");
  std::vector<double> out;
  for (const auto& item : node) out.push_back(scalar_as<double>(item, name));
  return out;
}

inline void require_map(const YAML::Node& node, const std::string& name) {
  if (!node.IsMap()) throw Error(ErrorCode::ConfigError, name + " must be a mapping");
}

inline void reject_unknown(const YAML::Node& node, const std::set<std::string>& allowed,
                           const std::string& section) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw Error(ErrorCode::ConfigError, "unknown key '" + where(section, key) + "'");
  }
}

inline FDScheme parse_scheme(const std::string& s) {
  if (s == "central2") return FDScheme::Central2;
  if (s == "central4") return FDScheme::Central4;
  throw Error(ErrorCode::ConfigError, "fd.scheme must be central2 or central4");
}

inline Extrapolation parse_extrapolation(const std::string& s) {
  if (s == "none") return Extrapolation::None;
  if (s == "richardson") return Extrapolation::Richardson;
  if (s == "power-law-fit") return Extrapolation::PowerLaw;
  throw Error(ErrorCode::ConfigError, "quadrature.extrapolation must be none, richardson or power-law-fit");
}

inline FamilySpec parse_family(const YAML::Node& node) {
  require_map(node, "family");
  FamilySpec spec;
  if (!node["kind"]) throw Error(ErrorCode::ConfigError, "family.kind is required");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    const std::string name = "family." + key;
    if (key == "kind") {
      spec.kind = scalar_as<std::string>(kv.second, name);
    } else if (key == "n") {
      spec.n = scalar_as<int>(kv.second, name);
    } else if (key == "base") {
      spec.base = scalar_as<std::string>(kv.second, name);
    } else if (key == "table") {
      if (!kv.second.IsSequence()) throw Error(ErrorCode::ConfigError, "family.table must be a list of [rho, f]");
      for (const auto& row : kv.second) {
        const auto v = list_as(row, "family.table row");
        if (v.size() != 2) throw Error(ErrorCode::ConfigError, "family.table rows are [rho, f]");
        spec.table.push_back({v[0], v[1]});
      }
    } else {
      // every other key is a numeric family parameter; make_family rejects unknown ones
      spec.params[key] = scalar_as<double>(kv.second, name);
    }
  }
  return spec;
}

inline void parse_quadrature(const YAML::Node& node, QuadratureSpec& q) {
  require_map(node, "quadrature");
  reject_unknown(node,
                 {"sphere_order", "radial_panels", "radial_degree", "r_min", "r_outer", "r_values",
                  "extrapolation"},
                 "quadrature");
  if (node["sphere_order"]) q.sphere_order = scalar_as<int>(node["sphere_order"], "quadrature.sphere_order");
  if (node["radial_panels"]) q.radial_panels = scalar_as<int>(node["radial_panels"], "quadrature.radial_panels");
  if (node["radial_degree"]) q.radial_degree = scalar_as<int>(node["radial_degree"], "quadrature.radial_degree");
  if (node["r_min"]) q.r_min = scalar_as<double>(node["r_min"], "quadrature.r_min");
  if (node["r_outer"]) q.r_outer = scalar_as<double>(node["r_outer"], "quadrature.r_outer");
  if (node["r_values"]) q.r_values = list_as(node["r_values"], "quadrature.r_values");
  if (node["extrapolation"])
    q.extrapolation = parse_extrapolation(scalar_as<std::string>(node["extrapolation"], "quadrature.extrapolation"));
}

inline void parse_fd(const YAML::Node& node, FDConfig& fd) {
  require_map(node, "fd");
  reject_unknown(node, {"step", "scheme", "richardson_levels"}, "fd");
  if (node["step"]) fd.step = scalar_as<double>(node["step"], "fd.step");
  if (node["scheme"]) fd.scheme = parse_scheme(scalar_as<std::string>(node["scheme"], "fd.scheme"));
  if (node["richardson_levels"])
    fd.richardson_levels = scalar_as<int>(node["richardson_levels"], "fd.richardson_levels");
}

inline void parse_sample(const YAML::Node& node, SampleSpec& s) {
  require_map(node, "sample");
  reject_unknown(node, {"count", "r_lo", "r_hi", "points", "map_shift"}, "sample");
  if (node["count"]) s.count = scalar_as<int>(node["count"], "sample.count");
  if (node["r_lo"]) s.r_lo = scalar_as<double>(node["r_lo"], "sample.r_lo");
  if (node["r_hi"]) s.r_hi = scalar_as<double>(node["r_hi"], "sample.r_hi");
  if (node["map_shift"]) s.map_shift = scalar_as<double>(node["map_shift"], "sample.map_shift");
  if (node["points"]) {
    if (!node["points"].IsSequence()) throw Error(ErrorCode::ConfigError, "sample.points must be a list");
    for (const auto& row : node["points"]) s.points.push_back(list_as(row, "sample.points row"));
  }
}

inline WallSpec parse_wall(const YAML::Node& node) {
  require_map(node, "wall");
  reject_unknown(node, {"kind", "d", "sign", "t0", "c"}, "wall");
  if (!node["kind"]) throw Error(ErrorCode::ConfigError, "wall.kind is required");
  const auto kind = scalar_as<std::string>(node["kind"], "wall.kind");
  auto num = [&](const char* key, double fallback) {
    return node[key] ? scalar_as<double>(node[key], std::string("wall.") + key) : fallback;
  };
  WallSpec w;
  if (kind == "horosphere")
    w = WallSpec::horosphere(num("d", 0.0), static_cast<int>(num("sign", 1.0)));
  else if (kind == "geodesic_slice")
    w = WallSpec::geodesic_slice(num("t0", 0.0));
  else if (kind == "sigma_c")
    w = WallSpec::sigma_c(num("c", 0.0));
  else
    throw Error(ErrorCode::ConfigError, "wall.kind must be horosphere, geodesic_slice or sigma_c");
  if (num("sign", 1.0) != 1.0 && num("sign", 1.0) != -1.0)
    throw Error(ErrorCode::ConfigError, "wall.sign must be +1 or -1");
  w.validate();
  return w;
}

}  // namespace detail

/// Builds and validates a RunConfig. Unknown keys anywhere are rejected.
inline RunConfig parse_config(const YAML::Node& root) {
  using namespace detail;
  if (!root.IsMap()) throw Error(ErrorCode::ConfigError, "config must be a mapping");
  reject_unknown(root, {"command", "seed", "threads", "family", "quadrature", "fd", "sample", "wall", "output"}, "");
  RunConfig cfg;
  if (!root["command"]) throw Error(ErrorCode::ConfigError, "command is required");
  cfg.command = parse_command(scalar_as<std::string>(root["command"], "command"));
  if (!root["family"]) throw Error(ErrorCode::ConfigError, "family section is required");
  cfg.family = parse_family(root["family"]);
  if (root["seed"]) {
    const auto seed = scalar_as<long long>(root["seed"], "seed");
    if (seed < 0) throw Error(ErrorCode::ConfigError, "seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (root["threads"]) cfg.threads = scalar_as<int>(root["threads"], "threads");
  if (root["quadrature"]) parse_quadrature(root["quadrature"], cfg.quadrature);
  if (root["fd"]) parse_fd(root["fd"], cfg.fd);
  if (root["sample"]) parse_sample(root["sample"], cfg.sample);
  if (root["wall"]) cfg.wall = parse_wall(root["wall"]);
  if (root["output"]) {
    const YAML::Node out = root["output"];
    require_map(out, "output");
    reject_unknown(out, {"path", "format"}, "output");
    if (out["path"]) cfg.out_path = scalar_as<std::string>(out["path"], "output.path");
    if (out["format"]) cfg.format = parse_format(scalar_as<std::string>(out["format"], "output.format"));
  }
  if (cfg.threads < 1 || cfg.threads > 256) throw Error(ErrorCode::ConfigError, "threads must be in 1..256");
  if (cfg.family.n < 1 || cfg.family.n > kMaxDim)
    throw Error(ErrorCode::ConfigError, "family.n must be in 1.." + std::to_string(kMaxDim));
  try {
    cfg.quadrature.validate();
    cfg.fd.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  cfg.sample.validate();
  for (const auto& p : cfg.sample.points)
    if (static_cast<int>(p.size()) != cfg.family.n)
      throw Error(ErrorCode::ConfigError, "sample.points entries need n coordinates");
  return cfg;
}

inline RunConfig load_config_text(const std::string& text) {
  try {
    return parse_config(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("YAML: ") + e.what());
  }
}

inline RunConfig load_config_file(const std::string& path) {
  try {
    return parse_config(YAML::LoadFile(path));
  } catch (const YAML::BadFile&) {
    throw Error(ErrorCode::IoError, "cannot read config '" + path + "'");
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("YAML: ") + e.what());
  }
}

}  // namespace ahmass

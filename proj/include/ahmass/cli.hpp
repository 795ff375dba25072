#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ahmass/config.hpp"
#include "ahmass/graph_geometry.hpp"
#include "ahmass/graph_library.hpp"
#include "ahmass/intrinsic_oracle.hpp"
#include "ahmass/mass_engine.hpp"
#include "ahmass/report.hpp"
#include "ahmass/summation.hpp"

namespace ahmass {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitHypotheses = 2;

struct RunOutcome {
  Json document;
  std::optional<CsvTable> table;
  int exit_code = kExitOk;
};

namespace detail {

// Uniform in r on [r_lo, r_hi], uniform direction; explicit points take precedence.
inline std::vector<HyperPoint> sample_points(const RunConfig& cfg) {
  const int n = cfg.family.n;
  std::vector<HyperPoint> out;
  if (!cfg.sample.points.empty()) {
    for (const auto& p : cfg.sample.points) out.push_back(HyperPoint::from_disk(DiskPoint(Vec::Map(p.data(), n))));
    return out;
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(cfg.sample.r_lo, cfg.sample.r_hi);
  for (int k = 0; k < cfg.sample.count; ++k) {
    const double r = radius(rng);
    Vec theta(n);
    for (int i = 0; i < n; ++i) theta[i] = normal(rng);
    if (theta.norm() == 0.0) theta[0] = 1.0;
    out.push_back(HyperPoint::from_polar(PolarPoint(r, theta / theta.norm())));
  }
  return out;
}

// Rounding-level bound for closed-form quantities.
inline double rounding(double v) { return 64.0 * std::numeric_limits<double>::epsilon() * std::abs(v); }

inline Json rounded(double v) { return estimate(v, rounding(v)); }

inline Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(rounded(v[i]));
  return a;
}

struct Stat {
  double max = 0.0;
  double mean = 0.0;
};

inline Stat stat(const std::vector<double>& v) {
  Stat s;
  for (double x : v) s.max = std::max(s.max, x);
  s.mean = v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
  return s;
}

inline Json stat_json(const Stat& s) {
  return Json{{"max", exact(s.max)}, {"mean", exact(s.mean)}};
}

inline Json mass_vector_json(const MassVector& mv) {
  const int n = mv.P.size() - 1;
  double m2_err = 0.0;
  for (int i = 0; i <= n; ++i) m2_err += 2.0 * std::abs(mv.P[i]) * mv.P_error[i] + mv.P_error[i] * mv.P_error[i];
  Json sigma = Json::array();
  for (double s : mv.sigma) sigma.push_back(exact(s));
  return Json{{"P", estimate_list(mv.P.c, mv.P_error)},
              {"m_squared", estimate(mv.m_squared, m2_err)},
              {"causal_class", to_string(mv.causal_class)},
              {"fitted_exponents", sigma}};
}

inline Json series_json(const std::vector<SeriesPoint>& series) {
  Json rows = Json::array();
  for (const auto& s : series)
    rows.push_back(Json{{"r", exact(s.r)}, {"m_phi", estimate(s.m_phi, s.gap_estimate)},
                        {"gap_estimate", exact(s.gap_estimate)}});
  return rows;
}

inline Json mass_report_json(const MassReport& rep) {
  Json out = mass_vector_json(rep.vector);
  out["boundary_series"] = series_json(rep.boundary_series);
  const double p_err = rep.vector.P_error.norm();
  out["balanced_mass"] = rep.balanced_mass ? estimate(*rep.balanced_mass, p_err) : Json("undefined");
  out["sampled_infimum"] = rep.sampled_infimum ? estimate(*rep.sampled_infimum, p_err) : Json("undefined");
  if (rep.bulk) {
    out["bulk_value"] = estimate(rep.bulk->value.value, rep.bulk->value.error);
    out["min_scalar_excess"] = estimate(rep.bulk->min_scalar_excess, 0.0);
    out["min_angle_function"] = estimate(rep.bulk->min_theta, 0.0);
    out["scalar_tail_exponent"] = exact(rep.bulk->tail_exponent);
  } else {
    out["bulk_value"] = "not computed";
  }
  if (rep.horizon) {
    const HorizonResult& h = *rep.horizon;
    out["horizon_term"] = estimate(h.term.value, h.term.error);
    out["boundary_area"] = rounded(h.area);
    out["orthogonality_defect"] = exact(h.max_defect);
  } else {
    out["horizon_term"] = exact(0.0);
  }
  if (rep.consistency_gap) {
    const double err = p_err + (rep.bulk ? rep.bulk->value.error : 0.0) + (rep.horizon ? rep.horizon->term.error : 0.0);
    out["consistency_gap"] = estimate(*rep.consistency_gap, err);
  } else {
    out["consistency_gap"] = "not computed";
  }
  return out;
}

inline Json skeleton(const RunConfig& cfg) {
  return Json{{"tool_version", kToolVersion},
              {"schema_version", kReportSchemaVersion},
              {"command", to_string(cfg.command)},
              {"config_echo", config_echo(cfg)},
              {"results", Json::object()},
              {"hypothesis_flags", Json::object()},
              {"error_estimates", Json::object()},
              {"timings", Json::object()}};
}

inline RunOutcome started(const RunConfig& cfg) {
  RunOutcome out;
  out.document = skeleton(cfg);
  return out;
}

inline RunOutcome run_inspect(const RunConfig& cfg, const GraphFamily& family) {
  RunOutcome out = started(cfg);
  Json points = Json::array();
  for (const HyperPoint& p : sample_points(cfg)) {
    const GraphJet j = family.jets(p);
    const ExtrinsicData e = extrinsic_data(j);
    const GaussCurvature gc = scalar_curvature_gauss(e, family.dim());
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (e.B + e.B.transpose()));
    Json row{{"disk", vec_json(p.to_disk().x())},
             {"r", rounded(p.r())},
             {"u", rounded(j.u)},
             {"u_alpha", vec_json(j.u_alpha)},
             {"W", rounded(e.W)},
             {"S1", rounded(e.S1)},
             {"S2", rounded(e.S2)},
             {"angle_function", rounded(e.Theta)},
             {"scalar_curvature", rounded(gc.R)},
             {"newton_killing", vec_json(e.GXT)},
             {"principal_curvatures_symmetrized", vec_json(eig.eigenvalues())}};
    points.push_back(row);
  }
  out.document["results"]["points"] = points;
  out.document["timings"]["jet_evaluations"] = exact(static_cast<double>(points.size()));
  return out;
}

inline RunOutcome run_verify(const RunConfig& cfg, const GraphFamily& family) {
  RunOutcome out = started(cfg);
  const auto points = sample_points(cfg);
  constexpr std::size_t kWidth = 6;
  const auto rows = parallel_evaluate_rows(points.size(), kWidth, cfg.threads, [&](std::size_t i, std::span<double> s) {
    const DiskPoint x = points[i].to_disk();
    const IdentityResiduals res = residual_suite(family, x, cfg.fd);
    const GraphJet j = family.derivative_jets(points[i]);
    const ExtrinsicData e = extrinsic_data(j);
    const double w3 = e.W * e.W * e.W;
    const double scale = std::max(1.0, (w3 * e.GXT).cwiseAbs().maxCoeff());
    const double r_gauss = scalar_curvature_gauss(e, family.dim()).R;
    s[0] = res.flux;
    s[1] = res.recipe.maxCoeff() / scale;
    s[2] = res.recipe_literal.maxCoeff() / scale;
    s[3] = res.gauss / (1.0 + std::abs(r_gauss));
    const JetSelfTest jt = jet_self_test(family, points[i]);
    s[4] = jt.gradient_error;
    s[5] = jt.hessian_error;
  });
  const char* names[kWidth] = {"flux_residual", "recipe_residual_relative", "recipe_literal_residual_relative",
                               "gauss_residual_relative", "jet_gradient_error", "jet_hessian_error"};
  for (std::size_t c = 0; c < kWidth; ++c) {
    std::vector<double> col(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) col[i] = rows[i * kWidth + c];
    out.document["results"][names[c]] = stat_json(stat(col));
  }
  out.document["results"]["points"] = exact(static_cast<double>(points.size()));
  out.document["error_estimates"]["fd_order"] = exact(cfg.fd.order() + 2.0 * cfg.fd.richardson_levels);
  // 2 metric jets per stencil point, scalar and divergence paths, Richardson levels
  const int stencil = static_cast<int>(detail::stencil(cfg.fd.scheme).offsets.size());
  const double per_point = (cfg.fd.richardson_levels + 1.0) *
                           (stencil * stencil * family.dim() * family.dim() + stencil * family.dim());
  out.document["timings"]["metric_evaluations"] = exact(per_point * static_cast<double>(points.size()));
  if (cfg.format == OutputFormat::Csv) {
    CsvTable t;
    t.header = {"r", "flux_residual", "recipe_residual_relative", "recipe_literal_residual_relative",
                "gauss_residual_relative", "jet_gradient_error", "jet_hessian_error"};
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::vector<double> row{points[i].r()};
      for (std::size_t c = 0; c < kWidth; ++c) row.push_back(rows[i * kWidth + c]);
      t.rows.push_back(row);
    }
    out.table = t;
  }
  return out;
}

inline QuadratureSpec quadrature_for(const RunConfig& cfg) {
  QuadratureSpec q = cfg.quadrature;
  q.threads = cfg.threads;
  return q;
}

inline RunOutcome run_mass(const RunConfig& cfg, const GraphFamily& family) {
  RunOutcome out = started(cfg);
  const MassReport rep = mass_report(family, quadrature_for(cfg), cfg.seed, true);
  Json& res = out.document["results"];
  res = mass_report_json(rep);
  Json& flags = out.document["hypothesis_flags"];
  flags["timelike_future"] = rep.vector.causal_class == CausalClass::TimelikeFuture;
  const bool energy = !rep.bulk || rep.bulk->min_scalar_excess >= -1e-8;
  flags["dominant_energy"] = energy;
  flags["bulk_path_available"] = rep.bulk.has_value();
  Json& err = out.document["error_estimates"];
  err["P"] = res["P"];
  err["balanced_mass"] = res["balanced_mass"];
  err["consistency_gap"] = res["consistency_gap"];
  out.document["timings"]["integrand_evaluations"] = exact(static_cast<double>(rep.evaluations));
  if (cfg.format == OutputFormat::Csv) {
    CsvTable t;
    t.header = {"r", "m_phi", "gap_estimate"};
    for (const auto& s : rep.boundary_series) t.rows.push_back({s.r, s.m_phi, s.gap_estimate});
    out.table = t;
  }
  if (!energy) out.exit_code = kExitHypotheses;
  return out;
}

inline RunOutcome run_penrose(const RunConfig& cfg, const GraphFamily& family) {
  RunOutcome out = started(cfg);
  Json& res = out.document["results"];
  Json& flags = out.document["hypothesis_flags"];
  if (!family.boundary()) {
    // no horizon: only the mass is meaningful, no inequality is claimed
    const MassReport rep = mass_report(family, quadrature_for(cfg), cfg.seed, true);
    res["mass"] = mass_report_json(rep);
    flags["has_inner_boundary"] = false;
    flags["inequality_asserted"] = false;
    out.document["timings"]["integrand_evaluations"] = exact(static_cast<double>(rep.evaluations));
    out.exit_code = kExitHypotheses;
    return out;
  }
  const WallSpec wall = cfg.wall.value_or(family.boundary()->wall);
  const PenroseReport rep = penrose_report(family, wall, quadrature_for(cfg), cfg.seed);
  const double me = rep.mass_error;
  const double area_err = rep.mass_report.horizon ? rounding(rep.area) : 0.0;
  res["mass"] = mass_report_json(rep.mass_report);
  res["area"] = estimate(rep.area, area_err);
  res["balanced_mass"] = estimate(rep.mass, me);
  res["rhs_penrose_chi"] = rounded(rep.rhs_chi);
  res["rhs_penrose_hyperbolic"] = rounded(rep.rhs_hyperbolic);
  res["margin_chi"] = estimate(rep.margin_chi, me);
  res["margin_hyperbolic"] = estimate(rep.margin_hyperbolic, me);
  res["alexandrov_fenchel_bound"] = rounded(rep.af_bound);
  const double s1_err = rep.mass_report.horizon ? rep.mass_report.horizon->term.error / mass_constant(family.dim()) : 0.0;
  res["boundary_s1_integral"] = estimate(rep.s1_integral, s1_err);
  res["alexandrov_fenchel_margin"] = estimate(rep.af_margin, s1_err);
  res["min_scalar_excess"] = exact(rep.min_scalar_excess);
  if (rep.mass_report.horizon) {
    res["boundary_mean_curvature_min"] = exact(rep.mass_report.horizon->mean_curv_min);
    res["boundary_mean_curvature_max"] = exact(rep.mass_report.horizon->mean_curv_max);
    res["boundary_s1_min"] = exact(rep.mass_report.horizon->min_s1);
  }
  flags["has_inner_boundary"] = true;
  flags["orthogonal"] = rep.flags.orthogonal;
  flags["mean_convex"] = rep.flags.mean_convex;
  flags["dominant_energy"] = rep.flags.dominant_energy;
  flags["timelike_future"] = rep.flags.timelike_future;
  flags["balanced"] = rep.flags.balanced;
  flags["alexandrov_fenchel_applies"] = rep.flags.alexandrov_fenchel_applies;
  // classical AF needs convexity; only mean convexity is checked here
  flags["alexandrov_fenchel_convexity_verified"] = false;
  flags["inequality_asserted"] = rep.flags.hypotheses_met();
  Json& err = out.document["error_estimates"];
  err["balanced_mass"] = res["balanced_mass"];
  err["margin_chi"] = res["margin_chi"];
  err["margin_hyperbolic"] = res["margin_hyperbolic"];
  out.document["timings"]["integrand_evaluations"] = exact(static_cast<double>(rep.mass_report.evaluations));
  if (!rep.flags.hypotheses_met()) out.exit_code = kExitHypotheses;
  return out;
}

inline RunOutcome run_decay(const RunConfig& cfg, const GraphFamily& family) {
  RunOutcome out = started(cfg);
  const DecayEstimate d = decay_estimate(family, quadrature_for(cfg));
  Json& res = out.document["results"];
  res["tau_hat"] = exact(d.tau_hat);
  res["scalar_tail_exponent"] = exact(d.scalar_tail_exponent);
  res["admissibility_threshold"] = exact(0.5 * family.dim() + 0.05);
  if (family.declared_tau()) res["declared_tau"] = exact(*family.declared_tau());
  out.document["hypothesis_flags"]["admissible"] = d.admissible;
  out.document["hypothesis_flags"]["scalar_curvature_integrable"] = d.scalar_tail_exponent < -1.0;
  out.document["error_estimates"]["tau_hat"] = res["tau_hat"];
  out.document["timings"]["jet_evaluations"] = exact(9.0 * sphere_quadrature(family.dim() - 1, std::min(cfg.quadrature.sphere_order, 8)).size());
  if (!d.admissible) out.exit_code = kExitHypotheses;
  return out;
}

inline RunOutcome run_map(const RunConfig& cfg, const GraphFamily& family) {
  RunOutcome out = started(cfg);
  const int n = family.dim();
  CsvTable t;
  for (int i = 0; i < n; ++i) t.header.push_back("x" + std::to_string(i));
  t.header.push_back("u");
  for (int i = 0; i <= n; ++i) t.header.push_back("y" + std::to_string(i));
  Json samples = Json::array();
  for (const HyperPoint& p : sample_points(cfg)) {
    const double u = family.jets(p).u;
    const Vec x = p.to_disk().x();
    const Vec y = half_space_map(p, u + cfg.sample.map_shift);
    std::vector<double> row(x.data(), x.data() + n);
    row.push_back(u);
    for (int i = 0; i <= n; ++i) row.push_back(y[i]);
    t.rows.push_back(row);
    samples.push_back(Json{{"disk", vec_json(x)}, {"u", rounded(u)}, {"half_space", vec_json(y)}});
  }
  out.document["results"]["samples"] = samples;
  out.document["timings"]["jet_evaluations"] = exact(static_cast<double>(t.rows.size()));
  if (cfg.format == OutputFormat::Csv) out.table = t;
  return out;
}

}  // namespace detail

/// Runs one command. Library errors propagate as ahmass::Error.
inline RunOutcome run(const RunConfig& cfg) {
  const GraphFamily family = make_family(cfg.family);
  if (cfg.format == OutputFormat::Csv &&
      (cfg.command == Command::Inspect || cfg.command == Command::Penrose || cfg.command == Command::Decay))
    throw Error(ErrorCode::ConfigError, "csv output is available for verify, mass and map");
  switch (cfg.command) {
    case Command::Inspect: return detail::run_inspect(cfg, family);
    case Command::Verify: return detail::run_verify(cfg, family);
    case Command::Mass: return detail::run_mass(cfg, family);
    case Command::Penrose: return detail::run_penrose(cfg, family);
    case Command::Decay: return detail::run_decay(cfg, family);
    case Command::Map: return detail::run_map(cfg, family);
  }
  throw Error(ErrorCode::ConfigError, "unknown command");
}

inline Json error_document(const Error& e) {
  return Json{{"tool_version", kToolVersion},
              {"schema_version", kReportSchemaVersion},
              {"error", Json{{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
}

}  // namespace ahmass

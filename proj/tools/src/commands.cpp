// Copyright 2026 The qnd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qnd/errors.hpp"
#include "qnd/geometry_scan.hpp"
#include "qnd/mode_projection.hpp"
#include "qnd/paraxial_optics.hpp"
#include "qnd/sme_oracle.hpp"
#include "qnd/squeezing_dynamics.hpp"

namespace qnd::cli {

namespace {

std::ofstream open_output(const Context& ctx, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  const auto path = ctx.out_dir / name;
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  os << std::setprecision(12);
  return os;
}

void finish(std::ofstream& os, const Context& ctx, const std::string& name) {
  os.flush();
  if (!os) throw IoError("write failed for '" + (ctx.out_dir / name).string() + "'");
}

void write_csv_header(std::ostream& os, const std::string& format, const Context& ctx) {
  os << "# format=" << format << "\n# version=" << kFormatVersion
     << "\n# config=" << ctx.config.dump() << "\n";
}

void write_json(const Context& ctx, const std::string& name, const std::string& format, json body) {
  body["format"] = format;
  body["version"] = kFormatVersion;
  body["config"] = ctx.config;
  auto os = open_output(ctx, name);
  os << body.dump(2) << "\n";
  finish(os, ctx, name);
}

json numbers_json(const EffectiveNumbers& n) {
  return {{"N1", n.N1}, {"N2", n.N2}, {"N3", n.N3}, {"od_eff", n.od_eff}};
}

json cloud_json(const CloudGeometry& c) {
  return {{"sigma_perp_um", c.sigma_perp},
          {"sigma_z_um", c.sigma_z},
          {"eta0_um3", c.peak_density_eta0},
          {"N", c.total_N()}};
}

}  // namespace

void cmd_modes(const Context& ctx) {
  const json& m = ctx.config["modes"];
  const int p_max = m.value("p_max", 6);
  const int l_max = m.value("l_max", 3);
  const int points = m.value("profile_points", 101);
  if (p_max < 0 || l_max < 0) throw ValidationError("'modes.p_max' and 'modes.l_max' must be >= 0");
  if (points < 2) throw ValidationError("'modes.profile_points' must be >= 2");
  std::vector<double> planes;
  try {
    planes = m.at("z_over_zR").get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ValidationError("'modes.z_over_zR' must be a list of numbers");
  }
  const Resolved r = resolve_common(ctx.config, false);
  std::vector<ModeIndex> modes;
  for (int l = -l_max; l <= l_max; ++l)
    for (int p = 0; p <= p_max; ++p) modes.push_back({p, l});

  auto os = open_output(ctx, "modes_residuals.csv");
  write_csv_header(os, "qnd-modes-residuals/1", ctx);
  os << "z_over_zR,p_a,l_a,p_b,l_b,re,im,residual\n";
  double worst = 0.0;
  for (double zz : planes) {
    const double z = zz * r.beam.rayleigh_zR;
    for (const auto& a : modes)
      for (const auto& b : modes) {
        if (b < a) continue;
        const cplx v = mode_inner_product(a, b, z, r.beam);
        const double res = std::abs(v - (a == b ? 1.0 : 0.0));
        worst = std::max(worst, res);
        os << zz << ',' << a.p << ',' << a.l << ',' << b.p << ',' << b.l << ',' << v.real() << ','
           << v.imag() << ',' << res << '\n';
      }
  }
  finish(os, ctx, "modes_residuals.csv");

  auto prof = open_output(ctx, "modes_profiles.csv");
  write_csv_header(prof, "qnd-modes-profiles/1", ctx);
  prof << "z_over_zR,p,l,rho_um,re,im,abs2\n";
  const double rho_max = 3.0 * r.beam.waist_w0;
  for (double zz : planes) {
    const double z = zz * r.beam.rayleigh_zR;
    const double scale = gaussian_params(z, r.beam).width / r.beam.waist_w0;
    for (const auto& a : modes)
      for (int i = 0; i < points; ++i) {
        const double rho = scale * rho_max * i / (points - 1);
        const cplx u = lg_mode(a, rho, 0.0, z, r.beam);
        prof << zz << ',' << a.p << ',' << a.l << ',' << rho << ',' << u.real() << ',' << u.imag()
             << ',' << std::norm(u) << '\n';
      }
  }
  finish(prof, ctx, "modes_profiles.csv");

  write_json(ctx, "modes.json", "qnd-modes/1",
             {{"modes", modes.size()}, {"planes", planes}, {"max_residual", worst},
              {"zR_um", r.beam.rayleigh_zR}, {"A_um2", r.beam.mode_area_A}});
}

void cmd_effnums(const Context& ctx) {
  const Resolved r = resolve_common(ctx.config, true);
  const CloudGeometry cloud = resolve_cloud(r.sigma_perp, r.sigma_z, r.constraint, r.beam, r.species);
  const EffectiveNumbers n = effective_numbers(cloud, r.beam, r.species);
  std::vector<double> times;
  try {
    times = ctx.config["effnums"].at("gamma0_T").get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ValidationError("'effnums.gamma0_T' must be a list of numbers");
  }
  json xi = json::array();
  auto os = open_output(ctx, "effnums.csv");
  write_csv_header(os, "qnd-effnums/1", ctx);
  os << "gamma0_T,xi\n";
  for (double t : times) {
    if (!(t >= 0.0)) throw ValidationError("'effnums.gamma0_T' entries must be >= 0");
    const double x = coupling_strength_xi(n.od_eff, 1.0, t, r.species.spin_f);
    os << t << ',' << x << '\n';
    xi.push_back({{"gamma0_T", t}, {"xi", x}});
  }
  finish(os, ctx, "effnums.csv");
  const ProbeParameters probe = make_probe(r.species, r.beam, r.dynamics.gamma0);
  write_json(ctx, "effnums.json", "qnd-effnums/1",
             {{"cloud", cloud_json(cloud)},
              {"constraint", constraint_name(r.constraint)},
              {"numbers", numbers_json(n)},
              {"kappa_over_gamma0", probe.kappa / probe.gamma0},
              {"zR_um", r.beam.rayleigh_zR},
              {"xi", xi}});
}

void cmd_simulate(const Context& ctx) {
  const Resolved r = resolve_common(ctx.config, true);
  const CloudGeometry cloud = resolve_cloud(r.sigma_perp, r.sigma_z, r.constraint, r.beam, r.species);
  auto os = open_output(ctx, "trajectory.csv");
  write_csv_header(os, "qnd-trajectory/1", ctx);
  os << "gamma0_t,mean_Fx00,var_Fz00,zeta,zeta_inv_db\n";
  json summary;
  summary["cloud"] = cloud_json(cloud);
  if (r.dynamics.horizon == 0.0) {
    finish(os, ctx, "trajectory.csv");
    summary["numbers"] = numbers_json(effective_numbers(cloud, r.beam, r.species));
    summary["samples"] = 0;
    summary["peak"] = nullptr;
    write_json(ctx, "simulate.json", "qnd-simulate/1", summary);
    return;
  }
  const GeometryEvaluation ev = evaluate_geometry(cloud, r.beam, r.species, r.dynamics);
  for (const auto& s : ev.trajectory.samples) {
    os << s.time << ',' << s.mean_Fx00 << ',' << s.var_Fz00 << ',' << s.zeta << ','
       << inverse_db(s.zeta) << '\n';
  }
  finish(os, ctx, "trajectory.csv");
  const auto& pk = ev.trajectory.peak;
  summary["numbers"] = numbers_json(ev.numbers);
  summary["kappa"] = ev.kappa;
  summary["slices"] = ev.slices;
  summary["samples"] = ev.trajectory.samples.size();
  summary["peak"] = {{"gamma0_t", pk.time},
                     {"zeta", pk.zeta_min},
                     {"zeta_inv_db", pk.db},
                     {"at_boundary", pk.at_boundary}};
  const double peak_mean =
      std::min_element(ev.trajectory.samples.begin(), ev.trajectory.samples.end(),
                       [&](const auto& a, const auto& b) {
                         return std::abs(a.time - pk.time) < std::abs(b.time - pk.time);
                       })->mean_Fx00;
  summary["mean_decay_at_peak"] = peak_mean / ev.trajectory.samples.front().mean_Fx00;
  summary["solver"] = {{"accepted", ev.trajectory.stats.accepted},
                       {"rejected", ev.trajectory.stats.rejected}};
  if (!r.dynamics.diffuse) {
    double worst = 0.0, xi_max = 0.0;
    for (const auto& s : ev.trajectory.samples) {
      const double xi = coupling_strength_xi(ev.numbers.od_eff, 1.0, s.time, r.species.spin_f);
      worst = std::max(worst, std::abs(s.zeta * (1.0 + xi) - 1.0));
      xi_max = std::max(xi_max, xi);
    }
    summary["no_decoherence_check"] = {
        {"max_rel_deviation", worst}, {"xi_max", xi_max}, {"pass", worst < 0.01}};
  }
  write_json(ctx, "simulate.json", "qnd-simulate/1", summary);
}

void cmd_scan(const Context& ctx) {
  const ScanSpec spec = resolve_scan(ctx.config);
  const ScanResult result = run_scan(spec);
  auto os = open_output(ctx, "scan.csv");
  write_csv_header(os, "qnd-scan-run/1", ctx);
  write_scan_csv(os, result, {{"constraint", constraint_name(spec.constraint)}});
  finish(os, ctx, "scan.csv");
  json body;
  body["records"] = result.records.size();
  body["failed"] = std::count_if(result.records.begin(), result.records.end(),
                                 [](const ScanRecord& r) { return r.flag != "ok" && r.flag != "boundary"; });
  if (result.optimum >= 0) {
    const ScanRecord& o = result.records[static_cast<std::size_t>(result.optimum)];
    body["optimum"] = {{"AR", o.aspect_ratio},       {"w0_um", o.waist},
                       {"sigma_perp_um", o.sigma_perp}, {"sigma_z_um", o.sigma_z},
                       {"eta0_um3", o.eta0},         {"N", o.N},
                       {"numbers", numbers_json(o.numbers)},
                       {"peak_zeta_inv_db", o.peak_db}, {"peak_gamma0_t", o.peak_time},
                       {"flag", o.flag},             {"slices", o.slices}};
  } else {
    body["optimum"] = nullptr;
  }
  write_json(ctx, "scan.json", "qnd-scan-summary/1", body);
}

void cmd_oracle(const Context& ctx) {
  const OracleRun run = resolve_oracle(ctx.config);
  const auto sites = sites_from_weights(run.weights);
  const TrajectoryStatistics st = simulate_trajectories(run.trajectories, sites, run.config, run.seed);

  // Gaussian spin-wave model of the same sites as the reference curve.
  const RealSystem sys = site_system(run.weights);
  ModelConfig mc;
  mc.kappa = run.config.kappa;
  mc.gamma0 = run.config.gamma0 > 0.0 ? run.config.gamma0 : 1.0;
  mc.diffuse = run.config.gamma0 > 0.0;
  mc.horizon = run.config.horizon;
  mc.samples = run.config.steps + 1;
  const SqueezingTrajectory ref = integrate(sys, mc);
  auto ref_at = [&](double t) -> const TrajectorySample& {
    const auto k = static_cast<std::size_t>(std::lround(t / run.config.horizon * run.config.steps));
    return ref.samples.at(k);
  };

  json rows = json::array();
  double max_z = 0.0;
  for (std::size_t j = 0; j < st.times.size(); ++j) {
    const double se = st.var_Fz00.standard_error[j];
    const TrajectorySample& rs = ref_at(st.times[j]);
    const double diff = st.var_Fz00.mean[j] - rs.var_Fz00;
    const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
    max_z = std::max(max_z, std::abs(z));
    rows.push_back({{"time", st.times[j]},
                    {"mean_Fx00", st.mean_Fx00.mean[j]},
                    {"mean_Fx00_se", st.mean_Fx00.standard_error[j]},
                    {"mean_Fz00", st.mean_Fz00.mean[j]},
                    {"mean_Fz00_se", st.mean_Fz00.standard_error[j]},
                    {"var_Fz00", st.var_Fz00.mean[j]},
                    {"var_Fz00_se", se},
                    {"reference_var_Fz00", rs.var_Fz00},
                    {"reference_mean_Fx00", rs.mean_Fx00},
                    {"z_score", std::isfinite(z) ? json(z) : json(nullptr)}});
  }
  write_json(ctx, "oracle.json", "qnd-oracle/1",
             {{"seed", run.seed},
              {"trajectories", st.trajectories},
              {"time_unit", run.config.gamma0 > 0.0 ? "gamma0_t" : "t"},
              {"checkpoints", rows},
              {"reference", "gaussian_spin_wave_model"},
              {"max_abs_z", max_z},
              {"within_3se", max_z <= 3.0},
              {"min_eigenvalue", st.min_eigenvalue},
              {"max_trace_drift", st.max_trace_drift}});
}

}  // namespace qnd::cli

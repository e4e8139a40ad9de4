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

#include "qnd/geometry_scan.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "qnd/errors.hpp"
#include "qnd/parallel.hpp"

namespace qnd {

int effective_slice_count(const CloudGeometry& cloud, const BeamParameters& beam,
                          const DynamicsSettings& s) {
  int n = s.slice_count;
  if (s.max_slice_over_zR > 0.0) {
    const double span = 2.0 * s.extent_sigmas * cloud.sigma_z;
    const double need = std::ceil(span / (s.max_slice_over_zR * beam.rayleigh_zR));
    if (need > n) {
      n = static_cast<int>(need);
      if (n % 2 == 0) ++n;
    }
  }
  return n;
}

ModelConfig model_config(const AtomicSpecies& species, const BeamParameters& beam,
                         const DynamicsSettings& s) {
  ModelConfig c;
  c.gamma0 = s.gamma0;
  c.kappa = measurement_strength(species, beam, s.gamma0);
  c.spin_f = species.spin_f;
  c.abs_tol = s.abs_tol;
  c.rel_tol = s.rel_tol;
  c.horizon = s.horizon;
  c.samples = s.samples;
  c.diffuse = s.diffuse;
  c.measurement = s.measurement;
  return c;
}

RealSystem build_system(const CloudGeometry& cloud, const BeamParameters& beam,
                        const AtomicSpecies& species,
                        const DynamicsSettings& s) {
  if (species.spin_f != 0.5) {
    throw DomainError("spin-wave dynamics are implemented for spin-1/2 only");
  }
  const WaveBasis basis = make_basis(s.p_max);
  const SliceGrid grid =
      build_grid(cloud, effective_slice_count(cloud, beam, s), s.extent_sigmas);
  QuadratureSpec q;
  q.sigma_perp = cloud.sigma_perp;
  const ProjectionTensor tensor = projection_coefficients(basis, grid, beam, q);
  const InitialMoments init =
      initial_moments(cloud, beam, basis, grid, species.spin_f);
  return to_real_gauge(assemble_system(tensor, init),
                       gauge_phases(basis, grid, beam));
}

GeometryEvaluation evaluate_geometry(const CloudGeometry& cloud,
                                     const BeamParameters& beam,
                                     const AtomicSpecies& species,
                                     const DynamicsSettings& s) {
  GeometryEvaluation ev;
  ev.cloud = cloud;
  ev.beam = beam;
  ev.numbers = effective_numbers(cloud, beam, species);
  ev.slices = effective_slice_count(cloud, beam, s);
  const ModelConfig cfg = model_config(species, beam, s);
  ev.kappa = cfg.kappa;
  ev.trajectory = integrate(build_system(cloud, beam, species, s), cfg);
  return ev;
}

std::string constraint_name(const Constraint& c) {
  struct V {
    std::string operator()(const FixedOdEff&) const { return "fixed_od_eff"; }
    std::string operator()(const FixedTotalN&) const { return "fixed_total_N"; }
    std::string operator()(const FixedPeakDensity&) const {
      return "fixed_peak_density";
    }
  };
  return std::visit(V{}, c);
}

CloudGeometry resolve_cloud(double sigma_perp, double sigma_z,
                            const Constraint& constraint,
                            const BeamParameters& beam,
                            const AtomicSpecies& species) {
  CloudGeometry shape = make_cloud(sigma_perp, sigma_z, 0.0);
  double eta0 = 0.0;
  if (const auto* od = std::get_if<FixedOdEff>(&constraint)) {
    eta0 = solve_density_for_od(od->target, shape, beam, species);
  } else if (const auto* n = std::get_if<FixedTotalN>(&constraint)) {
    eta0 = density_for_total_number(n->N, sigma_perp, sigma_z);
  } else {
    eta0 = std::get<FixedPeakDensity>(constraint).eta0;
  }
  return make_cloud(sigma_perp, sigma_z, eta0);
}

std::pair<double, double> shape_for_aspect_ratio(double ar,
                                                 const ShapeClosure& closure) {
  if (!(ar > 0.0)) throw DomainError("aspect ratio must be positive");
  if (const auto* f = std::get_if<FixedSigmaPerp>(&closure)) {
    return {f->sigma_perp, ar * f->sigma_perp};
  }
  const double v = std::get<FixedVolume>(closure).sigma_perp2_sigma_z;
  if (!(v > 0.0)) throw DomainError("fixed volume must be positive");
  const double sp = std::cbrt(v / ar);
  return {sp, ar * sp};
}

namespace {

void check_grid(const std::vector<double>& g, const char* name) {
  if (g.empty()) throw DomainError(std::string("scan: empty grid ") + name);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 0.0) || !std::isfinite(g[i])) {
      throw DomainError(std::string("scan: grid ") + name + " must be positive");
    }
    if (i && !(g[i] > g[i - 1])) {
      throw DomainError(std::string("scan: grid ") + name +
                        " must be strictly increasing");
    }
  }
}

}  // namespace

void validate_scan(const ScanSpec& spec) {
  if (const auto* a = std::get_if<ArWaistAxes>(&spec.axes)) {
    check_grid(a->aspect_ratios, "aspect_ratios");
    check_grid(a->waists, "waists");
  } else {
    const auto& s = std::get<SigmaZWaistAxes>(spec.axes);
    if (!(s.sigma_perp > 0.0)) throw DomainError("scan: sigma_perp must be > 0");
    check_grid(s.sigma_z, "sigma_z");
    check_grid(s.waists, "waists");
  }
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (n < 1 || !(lo > 0.0) || !(hi >= lo)) {
    throw DomainError("log_grid: need 0 < lo <= hi and n >= 1");
  }
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    g[i] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  }
  if (n > 1) g.back() = hi;
  return g;
}

ScanResult run_scan(const ScanSpec& spec) {
  validate_scan(spec);
  struct Point {
    int row, col;
    double sp, sz, w0;
  };
  std::vector<Point> points;
  if (const auto* a = std::get_if<ArWaistAxes>(&spec.axes)) {
    for (std::size_t i = 0; i < a->aspect_ratios.size(); ++i) {
      const auto [sp, sz] = shape_for_aspect_ratio(a->aspect_ratios[i], a->closure);
      for (std::size_t j = 0; j < a->waists.size(); ++j) {
        points.push_back({static_cast<int>(i), static_cast<int>(j), sp, sz,
                          a->waists[j]});
      }
    }
  } else {
    const auto& s = std::get<SigmaZWaistAxes>(spec.axes);
    for (std::size_t i = 0; i < s.sigma_z.size(); ++i)
      for (std::size_t j = 0; j < s.waists.size(); ++j)
        points.push_back({static_cast<int>(i), static_cast<int>(j), s.sigma_perp,
                          s.sigma_z[i], s.waists[j]});
  }
  ScanResult result;
  result.records.resize(points.size());
  parallel_for(static_cast<int>(points.size()), [&](int k) {
    const Point& p = points[k];
    ScanRecord& r = result.records[k];
    r.row = p.row;
    r.col = p.col;
    r.sigma_perp = p.sp;
    r.sigma_z = p.sz;
    r.aspect_ratio = p.sz / p.sp;
    r.waist = p.w0;
    r.peak_db = std::numeric_limits<double>::quiet_NaN();
    r.peak_time = std::numeric_limits<double>::quiet_NaN();
    try {
      const BeamParameters beam = beam_derived(spec.wavelength, p.w0);
      const CloudGeometry cloud =
          resolve_cloud(p.sp, p.sz, spec.constraint, beam, spec.species);
      r.eta0 = cloud.peak_density_eta0;
      r.N = cloud.total_N();
      r.slices = effective_slice_count(cloud, beam, spec.dynamics);
      const GeometryEvaluation ev =
          evaluate_geometry(cloud, beam, spec.species, spec.dynamics);
      r.numbers = ev.numbers;
      r.peak_db = ev.trajectory.peak.db;
      r.peak_time = ev.trajectory.peak.time;
      r.converged = !ev.trajectory.peak.at_boundary;
      r.flag = r.converged ? "ok" : "boundary";
    } catch (const Error& e) {
      r.converged = false;
      r.flag = e.what();
    }
  });
  for (std::size_t k = 0; k < result.records.size(); ++k) {
    const auto& r = result.records[k];
    if (!r.converged) continue;
    if (result.optimum < 0 || r.peak_db > result.records[result.optimum].peak_db) {
      result.optimum = static_cast<int>(k);
    }
  }
  return result;
}

void write_scan_csv(std::ostream& os, const ScanResult& result,
                    const std::vector<std::pair<std::string, std::string>>& header) {
  for (const auto& [k, v] : header) os << "# " << k << '=' << v << '\n';
  os << "AR,w0_um,sigma_perp_um,sigma_z_um,eta0_um3,N,N1,N2,N3,od_eff,"
        "peak_zeta_inv_db,peak_gamma0_t,converged\n";
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << std::setprecision(12);
  for (const auto& r : result.records) {
    os << r.aspect_ratio << ',' << r.waist << ',' << r.sigma_perp << ','
       << r.sigma_z << ',' << r.eta0 << ',' << r.N << ',' << r.numbers.N1 << ','
       << r.numbers.N2 << ',' << r.numbers.N3 << ',' << r.numbers.od_eff << ','
       << r.peak_db << ',' << r.peak_time << ',' << (r.converged ? 1 : 0)
       << '\n';
  }
  os.flags(old_flags);
  os.precision(old_prec);
}

namespace {

double objective_value(double sp, double sz, double w0,
                       const Constraint& constraint, WaistObjective objective,
                       const AtomicSpecies& species, double wavelength,
                       const DynamicsSettings& settings) {
  const BeamParameters beam = beam_derived(wavelength, w0);
  const CloudGeometry cloud = resolve_cloud(sp, sz, constraint, beam, species);
  if (objective == WaistObjective::od_eff) return od_eff(cloud, beam, species);
  return evaluate_geometry(cloud, beam, species, settings).trajectory.peak.db;
}

// Maximises f over log x in [lo, hi]; returns (x, f(x), evaluations).
struct LogMax {
  double x, value;
  int evaluations;
};

LogMax maximise_log(const std::function<double(double)>& f, double lo, double hi,
                    double rel_tol) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw DomainError("search bracket must satisfy 0 < lo < hi");
  }
  int evals = 0;
  auto g = [&](double u) {
    ++evals;
    return -f(std::exp(u));
  };
  const double a = std::log(lo), b = std::log(hi);
  const int bits = std::clamp(
      static_cast<int>(std::ceil(-std::log2(std::max(rel_tol, 1e-8)))), 4, 30);
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::brent_find_minima(g, a, b, bits, iters);
  const double edge = 4.0 * std::max(rel_tol, 1e-8) * (b - a) + 1e-9;
  if (r.first - a < edge || b - r.first < edge) {
    throw DomainError("maximum is not bracketed by the search interval");
  }
  return {std::exp(r.first), -r.second, evals};
}

}  // namespace

WaistOptimum optimal_waist(double sigma_perp, double sigma_z,
                           const Constraint& constraint,
                           WaistObjective objective, double lo, double hi,
                           const AtomicSpecies& species, double wavelength,
                           const DynamicsSettings& settings, double rel_tol) {
  const LogMax m = maximise_log(
      [&](double w0) {
        return objective_value(sigma_perp, sigma_z, w0, constraint, objective,
                               species, wavelength, settings);
      },
      lo, hi, rel_tol);
  return {m.x, m.value, m.evaluations};
}

ArWaistOptimum refine_ar_waist_optimum(double ar_guess, double w0_guess,
                                       const ShapeClosure& closure,
                                       const Constraint& constraint,
                                       const AtomicSpecies& species,
                                       double wavelength,
                                       const DynamicsSettings& settings,
                                       double span_factor, int sweeps) {
  if (!(span_factor > 1.0)) throw DomainError("span_factor must exceed 1");
  double ar = ar_guess, w0 = w0_guess;
  int evals = 0;
  auto peak = [&](double a, double w) {
    const auto [sp, sz] = shape_for_aspect_ratio(a, closure);
    return objective_value(sp, sz, w, constraint, WaistObjective::peak_squeezing,
                           species, wavelength, settings);
  };
  for (int s = 0; s < sweeps; ++s) {
    const LogMax mw = maximise_log([&](double w) { return peak(ar, w); },
                                   w0 / span_factor, w0 * span_factor, 1e-2);
    w0 = mw.x;
    evals += mw.evaluations;
    const LogMax ma = maximise_log([&](double a) { return peak(a, w0); },
                                   ar / span_factor, ar * span_factor, 1e-2);
    ar = ma.x;
    evals += ma.evaluations;
  }
  ArWaistOptimum out;
  out.aspect_ratio = ar;
  out.waist = w0;
  const auto [sp, sz] = shape_for_aspect_ratio(ar, closure);
  const BeamParameters beam = beam_derived(wavelength, w0);
  const CloudGeometry cloud = resolve_cloud(sp, sz, constraint, beam, species);
  const GeometryEvaluation ev = evaluate_geometry(cloud, beam, species, settings);
  out.peak_db = ev.trajectory.peak.db;
  out.peak_time = ev.trajectory.peak.time;
  out.sigma_perp = sp;
  out.sigma_z = sz;
  out.od_eff = ev.numbers.od_eff;
  out.evaluations = evals + 1;
  return out;
}

std::vector<SymmetricLimitRow> symmetric_limit_study(
    double sigma, double od_target, const std::vector<double>& waists,
    const AtomicSpecies& species, double wavelength,
    const DynamicsSettings& settings) {
  const PeakInfo sym = symmetric_1d_peak(od_target, settings.gamma0, settings.horizon);
  std::vector<SymmetricLimitRow> rows(waists.size());
  parallel_for(static_cast<int>(waists.size()), [&](int i) {
    const BeamParameters beam = beam_derived(wavelength, waists[i]);
    const CloudGeometry cloud =
        resolve_cloud(sigma, sigma, FixedOdEff{od_target}, beam, species);
    const GeometryEvaluation ev = evaluate_geometry(cloud, beam, species, settings);
    SymmetricLimitRow& r = rows[i];
    r.waist = waists[i];
    r.full_peak_db = ev.trajectory.peak.db;
    r.full_peak_time = ev.trajectory.peak.time;
    r.full_at_boundary = ev.trajectory.peak.at_boundary;
    r.symmetric_peak_db = sym.db;
    r.symmetric_peak_time = sym.time;
    r.N = cloud.total_N();
    r.numbers = ev.numbers;
  });
  return rows;
}

}  // namespace qnd

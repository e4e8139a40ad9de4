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

#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qnd/ensemble_geometry.hpp"
#include "qnd/mode_projection.hpp"
#include "qnd/squeezing_dynamics.hpp"

namespace qnd {

/// Truncation, integration and horizon shared by every point of a study.
struct DynamicsSettings {
  int p_max = 15;
  int slice_count = 61;
  double extent_sigmas = 3.0;
  double max_slice_over_zR = 0.25;  // slices are added until dz <= this * zR
  double horizon = 3.0;             // gamma0 t
  double gamma0 = 1.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int samples = 2001;
  bool diffuse = true;
  bool measurement = true;
};

/// Slice count actually used: the configured count, raised (to an odd
/// number) when the slices would be thick compared with zR.
int effective_slice_count(const CloudGeometry& cloud, const BeamParameters& beam,
                          const DynamicsSettings& settings);

struct GeometryEvaluation {
  CloudGeometry cloud;
  BeamParameters beam;
  EffectiveNumbers numbers;
  SqueezingTrajectory trajectory;
  double kappa = 0.0;
  int slices = 0;
};

/// Builds the spin-wave model for one geometry and integrates it.
GeometryEvaluation evaluate_geometry(const CloudGeometry& cloud,
                                     const BeamParameters& beam,
                                     const AtomicSpecies& species,
                                     const DynamicsSettings& settings);

/// Spin-wave system for one geometry in the real gauge.
RealSystem build_system(const CloudGeometry& cloud, const BeamParameters& beam,
                        const AtomicSpecies& species,
                        const DynamicsSettings& settings);

ModelConfig model_config(const AtomicSpecies& species, const BeamParameters& beam,
                         const DynamicsSettings& settings);

struct FixedOdEff {
  double target = 50.0;
};
struct FixedTotalN {
  double N = 0.0;
};
struct FixedPeakDensity {
  double eta0 = 0.0;  // um^-3
};
using Constraint = std::variant<FixedOdEff, FixedTotalN, FixedPeakDensity>;

std::string constraint_name(const Constraint& c);

/// Cloud with the given widths and the peak density set by the constraint.
CloudGeometry resolve_cloud(double sigma_perp, double sigma_z,
                            const Constraint& constraint,
                            const BeamParameters& beam,
                            const AtomicSpecies& species);

struct FixedSigmaPerp {
  double sigma_perp = 50.0;
};
/// sigma_perp^2 sigma_z held fixed.
struct FixedVolume {
  double sigma_perp2_sigma_z = 0.0;
};
using ShapeClosure = std::variant<FixedSigmaPerp, FixedVolume>;

/// Widths for an aspect ratio under a shape closure.
std::pair<double, double> shape_for_aspect_ratio(double aspect_ratio,
                                                 const ShapeClosure& closure);

struct ArWaistAxes {
  std::vector<double> aspect_ratios;
  std::vector<double> waists;
  ShapeClosure closure;
};
struct SigmaZWaistAxes {
  double sigma_perp = 100.0;
  std::vector<double> sigma_z;
  std::vector<double> waists;
};
using ScanAxes = std::variant<ArWaistAxes, SigmaZWaistAxes>;

struct ScanSpec {
  ScanAxes axes;
  Constraint constraint;
  AtomicSpecies species;
  double wavelength = kDefaultWavelength;
  DynamicsSettings dynamics;
};

/// Throws DomainError on empty or non-monotone grids.
void validate_scan(const ScanSpec& spec);

std::vector<double> log_grid(double lo, double hi, int n);

struct ScanRecord {
  int row = 0;  // index on the first axis
  int col = 0;  // index on the waist axis
  double aspect_ratio = 0.0;
  double waist = 0.0;
  double sigma_perp = 0.0;
  double sigma_z = 0.0;
  double eta0 = 0.0;
  double N = 0.0;
  EffectiveNumbers numbers;
  double peak_db = 0.0;
  double peak_time = 0.0;
  bool converged = false;
  std::string flag;  // "ok", "boundary" or the failure message
  int slices = 0;
};

struct ScanResult {
  std::vector<ScanRecord> records;  // row-major by grid index
  int optimum = -1;                 // best converged record
};

ScanResult run_scan(const ScanSpec& spec);

/// Header lines (key=value) are written as "# key=value".
void write_scan_csv(std::ostream& os, const ScanResult& result,
                    const std::vector<std::pair<std::string, std::string>>& header);

enum class WaistObjective { od_eff, peak_squeezing };

struct WaistOptimum {
  double waist = 0.0;
  double objective = 0.0;
  int evaluations = 0;
};

/// Golden-section maximisation over log w0 inside [lo, hi].
WaistOptimum optimal_waist(double sigma_perp, double sigma_z,
                           const Constraint& constraint,
                           WaistObjective objective, double lo, double hi,
                           const AtomicSpecies& species, double wavelength,
                           const DynamicsSettings& settings,
                           double rel_tol = 1e-3);

struct ArWaistOptimum {
  double aspect_ratio = 0.0;
  double waist = 0.0;
  double peak_db = 0.0;
  double peak_time = 0.0;
  double sigma_perp = 0.0;
  double sigma_z = 0.0;
  double od_eff = 0.0;
  int evaluations = 0;
};

/// Coordinate-wise golden-section refinement of peak squeezing over
/// (log AR, log w0), starting from a guess, under a shape closure and
/// constraint.
ArWaistOptimum refine_ar_waist_optimum(double ar_guess, double w0_guess,
                                       const ShapeClosure& closure,
                                       const Constraint& constraint,
                                       const AtomicSpecies& species,
                                       double wavelength,
                                       const DynamicsSettings& settings,
                                       double span_factor = 2.0,
                                       int sweeps = 2);

struct SymmetricLimitRow {
  double waist = 0.0;
  double full_peak_db = 0.0;
  double full_peak_time = 0.0;
  bool full_at_boundary = false;
  double symmetric_peak_db = 0.0;
  double symmetric_peak_time = 0.0;
  double N = 0.0;
  EffectiveNumbers numbers;
};

std::vector<SymmetricLimitRow> symmetric_limit_study(
    double sigma, double od_target, const std::vector<double>& waists,
    const AtomicSpecies& species, double wavelength,
    const DynamicsSettings& settings);

}  // namespace qnd

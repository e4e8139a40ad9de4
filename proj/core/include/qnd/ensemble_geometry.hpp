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

#include <span>

#include "qnd/paraxial_optics.hpp"

namespace qnd {

/// Gaussian cloud eta0 * exp(-2 rho^2/sigma_perp^2 - 2 z^2/sigma_z^2).
struct CloudGeometry {
  double sigma_perp = 0.0;  // um, 1/e^2
  double sigma_z = 0.0;     // um, 1/e^2
  double peak_density_eta0 = 0.0;  // um^-3

  double total_N() const;
  double aspect_ratio() const { return sigma_z / sigma_perp; }
  double density(double rho, double z) const;
};

/// Validated constructor. eta0 may be zero.
CloudGeometry make_cloud(double sigma_perp, double sigma_z, double eta0);

/// Peak density giving total number N for the given widths.
double density_for_total_number(double N, double sigma_perp, double sigma_z);

/// cm^-3 to um^-3.
inline constexpr double per_cm3_to_per_um3(double v) { return v * 1e-12; }

struct AtomicSpecies {
  double spin_f = 0.5;
  double lande_gf = 2.0;
  double resonant_cross_section_sigma0 = 0.0;  // um^2
};

double resonant_cross_section(double wavelength);
AtomicSpecies make_species(double spin_f, double lande_gf, double wavelength);
AtomicSpecies spin_half_species(double wavelength = kDefaultWavelength);
AtomicSpecies cesium_f4_species(double wavelength = kDefaultWavelength);

struct ProbeParameters {
  double gamma0 = 1.0;
  double kappa = 0.0;
};

/// kappa = (1/9f^2)(sigma0/A) gamma0.
double measurement_strength(const AtomicSpecies& species,
                            const BeamParameters& beam, double gamma0);
ProbeParameters make_probe(const AtomicSpecies& species,
                           const BeamParameters& beam, double gamma0 = 1.0);

struct Position {
  double rho = 0.0;
  double phi = 0.0;
  double z = 0.0;
};

/// conj(u_pl) u_00 at r.
cplx beta_weight(ModeIndex mode, const Position& r,
                 const BeamParameters& beam);

struct EffectiveNumbers {
  double N1 = 0.0;
  double N2 = 0.0;
  double N3 = 0.0;
  double od_eff = 0.0;
};

/// Integral of eta |u00|^{2K} over the cloud.
double effective_atom_number(int K, const CloudGeometry& cloud,
                             const BeamParameters& beam,
                             double rel_tol = 1e-12);

double od_eff(const CloudGeometry& cloud, const BeamParameters& beam,
              const AtomicSpecies& species);

EffectiveNumbers effective_numbers(const CloudGeometry& cloud,
                                   const BeamParameters& beam,
                                   const AtomicSpecies& species);

/// Peak density for which od_eff hits the target; only the widths of
/// cloud_shape are used.
double solve_density_for_od(double target_od, const CloudGeometry& cloud_shape,
                            const BeamParameters& beam,
                            const AtomicSpecies& species);

double local_scattering_rate(const Position& r, const BeamParameters& beam,
                             double gamma0);

double coupling_strength_xi(double od_eff, double gamma0, double T,
                            double spin_f);

/// Sum_i |u00(r_i)|^2 <f_z^(i)>.
double faraday_signal(std::span<const double> spin_z,
                      std::span<const Position> positions,
                      const BeamParameters& beam);

struct ForwardCoefficients {
  double phase_shift = 0.0;
  double attenuation = 0.0;
  double faraday_angle = 0.0;
  double birefringence_angle = 0.0;
};

ForwardCoefficients dipole_forward_coefficients(cplx alpha_xx, cplx alpha_yx,
                                                const Position& r,
                                                const BeamParameters& beam);

}  // namespace qnd

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

#include "qnd/ensemble_geometry.hpp"

#include <cmath>

#include "qnd/errors.hpp"
#include "qnd/quadrature.hpp"

namespace qnd {

namespace {
const double kGaussVolume = std::pow(kPi / 2.0, 1.5);
}

double CloudGeometry::total_N() const {
  return peak_density_eta0 * kGaussVolume * sigma_perp * sigma_perp * sigma_z;
}

double CloudGeometry::density(double rho, double z) const {
  return peak_density_eta0 *
         std::exp(-2.0 * rho * rho / (sigma_perp * sigma_perp) -
                  2.0 * z * z / (sigma_z * sigma_z));
}

CloudGeometry make_cloud(double sigma_perp, double sigma_z, double eta0) {
  if (!(sigma_perp > 0.0) || !(sigma_z > 0.0) || !std::isfinite(sigma_perp) ||
      !std::isfinite(sigma_z)) {
    throw DomainError("cloud widths must be positive");
  }
  if (!(eta0 >= 0.0) || !std::isfinite(eta0)) {
    throw DomainError("peak density must be non-negative");
  }
  return {sigma_perp, sigma_z, eta0};
}

double density_for_total_number(double N, double sigma_perp, double sigma_z) {
  if (!(N >= 0.0)) throw DomainError("atom number must be non-negative");
  if (!(sigma_perp > 0.0) || !(sigma_z > 0.0)) {
    throw DomainError("cloud widths must be positive");
  }
  return N / (kGaussVolume * sigma_perp * sigma_perp * sigma_z);
}

double resonant_cross_section(double wavelength) {
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  return 3.0 * wavelength * wavelength / (2.0 * kPi);
}

AtomicSpecies make_species(double spin_f, double lande_gf, double wavelength) {
  if (spin_f != 0.5 && spin_f != 4.0) {
    throw DomainError("spin_f must be 1/2 or 4");
  }
  if (!std::isfinite(lande_gf) || lande_gf == 0.0) {
    throw DomainError("lande_gf must be finite and non-zero");
  }
  return {spin_f, lande_gf, resonant_cross_section(wavelength)};
}

AtomicSpecies spin_half_species(double wavelength) {
  return make_species(0.5, 2.0, wavelength);
}

AtomicSpecies cesium_f4_species(double wavelength) {
  return make_species(4.0, 0.25, wavelength);
}

double measurement_strength(const AtomicSpecies& species,
                            const BeamParameters& beam, double gamma0) {
  const double f = species.spin_f;
  return species.resonant_cross_section_sigma0 / beam.mode_area_A * gamma0 /
         (9.0 * f * f);
}

ProbeParameters make_probe(const AtomicSpecies& species,
                           const BeamParameters& beam, double gamma0) {
  return {gamma0, measurement_strength(species, beam, gamma0)};
}

cplx beta_weight(ModeIndex mode, const Position& r,
                 const BeamParameters& beam) {
  if (mode.p == 0 && mode.l == 0) {
    const cplx u = lg_mode(mode, r.rho, r.phi, r.z, beam);
    return std::norm(u);
  }
  return std::conj(lg_mode(mode, r.rho, r.phi, r.z, beam)) *
         lg_mode({0, 0}, r.rho, r.phi, r.z, beam);
}

double effective_atom_number(int K, const CloudGeometry& cloud,
                             const BeamParameters& beam, double rel_tol) {
  if (K < 1) throw DomainError("effective_atom_number: K must be >= 1");
  const double zR = beam.rayleigh_zR;
  const double w0sq = beam.waist_w0 * beam.waist_w0;
  const double s2 = cloud.sigma_perp * cloud.sigma_perp;
  const double sz = cloud.sigma_z;
  // Transverse Gaussian x Gaussian^K integral per plane, then z by quadrature.
  auto plane = [&](double z) {
    const double q = 1.0 + (z / zR) * (z / zR);
    const double wsq = w0sq * q;
    return std::exp(-2.0 * z * z / (sz * sz)) * std::pow(q, -K) * kPi * s2 *
           wsq / (2.0 * (wsq + K * s2));
  };
  QuadratureOptions opts;
  opts.rel_tol = rel_tol;
  const Integral r = adaptive_integrate(plane, -6.0 * sz, 6.0 * sz, opts);
  return cloud.peak_density_eta0 * r.value;
}

double od_eff(const CloudGeometry& cloud, const BeamParameters& beam,
              const AtomicSpecies& species) {
  return effective_atom_number(2, cloud, beam) *
         species.resonant_cross_section_sigma0 / beam.mode_area_A;
}

EffectiveNumbers effective_numbers(const CloudGeometry& cloud,
                                   const BeamParameters& beam,
                                   const AtomicSpecies& species) {
  EffectiveNumbers n;
  n.N1 = effective_atom_number(1, cloud, beam);
  n.N2 = effective_atom_number(2, cloud, beam);
  n.N3 = effective_atom_number(3, cloud, beam);
  n.od_eff = n.N2 * species.resonant_cross_section_sigma0 / beam.mode_area_A;
  return n;
}

double solve_density_for_od(double target_od, const CloudGeometry& cloud_shape,
                            const BeamParameters& beam,
                            const AtomicSpecies& species) {
  if (!(target_od >= 0.0) || !std::isfinite(target_od)) {
    throw DomainError("target od must be non-negative");
  }
  CloudGeometry unit = cloud_shape;
  unit.peak_density_eta0 = 1.0;
  const double i2 = effective_atom_number(2, unit, beam);
  return target_od * beam.mode_area_A /
         (species.resonant_cross_section_sigma0 * i2);
}

double local_scattering_rate(const Position& r, const BeamParameters& beam,
                             double gamma0) {
  return gamma0 * beta_weight({0, 0}, r, beam).real();
}

double coupling_strength_xi(double od_eff, double gamma0, double T,
                            double spin_f) {
  if (!(T >= 0.0)) throw DomainError("coupling_strength_xi: T must be >= 0");
  if (!(spin_f > 0.0)) throw DomainError("coupling_strength_xi: spin_f > 0");
  return od_eff * gamma0 * T / (18.0 * spin_f);
}

double faraday_signal(std::span<const double> spin_z,
                      std::span<const Position> positions,
                      const BeamParameters& beam) {
  if (spin_z.size() != positions.size()) {
    throw DomainError("faraday_signal: list lengths differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < spin_z.size(); ++i) {
    s += beta_weight({0, 0}, positions[i], beam).real() * spin_z[i];
  }
  return s;
}

ForwardCoefficients dipole_forward_coefficients(cplx alpha_xx, cplx alpha_yx,
                                                const Position& r,
                                                const BeamParameters& beam) {
  const double w = beta_weight({0, 0}, r, beam).real();
  const double c = 2.0 * kPi * beam.wavenumber_k0 / beam.mode_area_A * w;
  ForwardCoefficients out;
  out.phase_shift = c * alpha_xx.real();
  out.attenuation = 2.0 * c * alpha_xx.imag();
  out.faraday_angle = -2.0 * c * alpha_yx.imag();
  out.birefringence_angle = 2.0 * c * alpha_yx.real();
  return out;
}

}  // namespace qnd

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

#include "qnd/paraxial_optics.hpp"

#include <cmath>
#include <limits>

#include "qnd/errors.hpp"
#include "qnd/quadrature.hpp"

namespace qnd {

BeamParameters beam_derived(double wavelength, double waist) {
  if (!(wavelength > 0.0) || !(waist > 0.0) || !std::isfinite(wavelength) ||
      !std::isfinite(waist)) {
    throw DomainError("beam_derived: wavelength and waist must be positive");
  }
  BeamParameters b;
  b.wavelength = wavelength;
  b.waist_w0 = waist;
  b.wavenumber_k0 = 2.0 * kPi / wavelength;
  b.rayleigh_zR = b.wavenumber_k0 * waist * waist / 2.0;
  b.mode_area_A = kPi * waist * waist / 2.0;
  return b;
}

GaussianParams gaussian_params(double z, const BeamParameters& beam) {
  const double q = z / beam.rayleigh_zR;
  GaussianParams g;
  g.width = beam.waist_w0 * std::sqrt(1.0 + q * q);
  g.curvature = z == 0.0 ? std::numeric_limits<double>::infinity()
                         : z * (1.0 + 1.0 / (q * q));
  g.gouy = std::atan(q);
  return g;
}

namespace {

double lg_norm(int p, int al) {
  return std::exp(0.5 * (std::lgamma(p + 1.0) - std::lgamma(p + al + 1.0)));
}

// Real radial envelope without phases.
double lg_radial(ModeIndex m, double rho, double w, double w0) {
  const int al = std::abs(m.l);
  const double x = 2.0 * rho * rho / (w * w);
  double v = lg_norm(m.p, al) * (w0 / w) * std::exp(-0.5 * x);
  if (al) v *= std::pow(std::sqrt(x), al);
  if (m.p) v *= std::assoc_laguerre(m.p, al, x);
  return v;
}

}  // namespace

cplx lg_mode(ModeIndex mode, double rho, double phi, double z,
             const BeamParameters& beam) {
  if (mode.p < 0) throw DomainError("lg_mode: p must be non-negative");
  const GaussianParams g = gaussian_params(z, beam);
  const double amp = lg_radial(mode, rho, g.width, beam.waist_w0);
  const int al = std::abs(mode.l);
  double phase = -(2.0 * mode.p + al + 1.0) * g.gouy - mode.l * phi;
  if (z != 0.0) phase += beam.wavenumber_k0 * rho * rho / (2.0 * g.curvature);
  return std::polar(amp, phase);
}

cplx propagator(double dx, double dy, double dz, const BeamParameters& beam) {
  if (dz == 0.0) throw DomainError("propagator: dz must be non-zero");
  const double k0 = beam.wavenumber_k0;
  const cplx pre(0.0, -k0 / (2.0 * kPi * dz));
  return pre * std::polar(1.0, k0 * (dx * dx + dy * dy) / (2.0 * dz));
}

double radial_cutoff(ModeIndex a, ModeIndex b, double z,
                     const BeamParameters& beam, const QuadratureSpec& spec) {
  const double w = gaussian_params(z, beam).width;
  double r = spec.cutoff_widths * std::max(w, spec.sigma_perp);
  // High-order products carry a polynomial tail in x = 2 rho^2 / w^2.
  const int degree = a.p + b.p + (std::abs(a.l) + std::abs(b.l)) / 2;
  const double x_tail = 3.0 * degree + 50.0;
  return std::max(r, w * std::sqrt(x_tail / 2.0));
}

cplx mode_inner_product(ModeIndex a, ModeIndex b, double z,
                        const BeamParameters& beam,
                        const QuadratureSpec& spec) {
  return weighted_mode_inner_product(
      a, b, z, beam, [](double) { return 1.0; }, spec);
}

cplx weighted_mode_inner_product(ModeIndex a, ModeIndex b, double z,
                                 const BeamParameters& beam,
                                 const std::function<double(double)>& weight,
                                 const QuadratureSpec& spec) {
  if (a.p < 0 || b.p < 0) throw DomainError("mode_inner_product: p < 0");
  if (a.l != b.l) return {0.0, 0.0};
  const GaussianParams g = gaussian_params(z, beam);
  // Curvature and azimuthal phases cancel for equal l; Gouy phases remain.
  const double dphase = (2.0 * (a.p - b.p)) * g.gouy;
  auto f = [&](double rho) {
    return rho * weight(rho) * lg_radial(a, rho, g.width, beam.waist_w0) *
           lg_radial(b, rho, g.width, beam.waist_w0);
  };
  QuadratureOptions opts;
  opts.rel_tol = spec.rel_tol;
  opts.max_intervals = spec.max_intervals;
  const Integral r =
      adaptive_integrate(f, 0.0, radial_cutoff(a, b, z, beam, spec), opts);
  const double radial = 2.0 * kPi * r.value / beam.mode_area_A;
  return std::polar(radial, dphase);
}

}  // namespace qnd

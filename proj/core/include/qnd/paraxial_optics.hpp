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

#include <complex>
#include <compare>
#include <functional>

namespace qnd {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultWavelength = 0.852;  // um, Cs D2

/// Probe beam. Lengths in micrometres.
struct BeamParameters {
  double wavelength = kDefaultWavelength;
  double waist_w0 = 0.0;
  double rayleigh_zR = 0.0;
  double mode_area_A = 0.0;
  double wavenumber_k0 = 0.0;
};

BeamParameters beam_derived(double wavelength, double waist);

struct GaussianParams {
  double width;      // w(z)
  double curvature;  // R(z); +inf at the focus
  double gouy;       // atan(z/zR)
};

GaussianParams gaussian_params(double z, const BeamParameters& beam);

struct ModeIndex {
  int p = 0;
  int l = 0;
  auto operator<=>(const ModeIndex&) const = default;
};

/// Laguerre-Gauss amplitude u_pl, normalised so u_00(0,0) = 1.
cplx lg_mode(ModeIndex mode, double rho, double phi, double z,
             const BeamParameters& beam);

/// Fresnel propagator for transverse displacement (dx, dy) over dz.
cplx propagator(double dx, double dy, double dz, const BeamParameters& beam);

struct QuadratureSpec {
  double cutoff_widths = 6.0;  // radial cutoff in units of max(w(z), sigma_perp)
  double sigma_perp = 0.0;
  double rel_tol = 1e-13;
  int max_intervals = 2000;
};

/// (1/A) integral of conj(u_a) u_b over the transverse plane at z.
cplx mode_inner_product(ModeIndex a, ModeIndex b, double z,
                        const BeamParameters& beam,
                        const QuadratureSpec& spec = {});

/// (1/A) integral of weight(rho) conj(u_a) u_b over the plane at z, for a
/// rotationally symmetric weight.
cplx weighted_mode_inner_product(ModeIndex a, ModeIndex b, double z,
                                 const BeamParameters& beam,
                                 const std::function<double(double)>& weight,
                                 const QuadratureSpec& spec = {});

/// Radial cutoff used for a pair of modes at z.
double radial_cutoff(ModeIndex a, ModeIndex b, double z,
                     const BeamParameters& beam, const QuadratureSpec& spec);

}  // namespace qnd

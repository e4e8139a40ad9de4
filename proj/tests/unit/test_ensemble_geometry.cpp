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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles/oracles.hpp"
#include "qnd/ensemble_geometry.hpp"
#include "qnd/errors.hpp"

namespace qnd {
namespace {

const double kLambda = 0.852;

struct Geometry {
  double sp, sz, w0;
};

// Spans pancake, sphere, pencil, tight and loose focusing.
const std::vector<Geometry> kGeometries = {
    {100, 100, 10},  {100, 10, 20},   {10, 1000, 20},  {50, 5000, 31},
    {30, 300, 100},  {200, 20, 50},   {5, 5, 40},      {80, 20000, 25},
    {400, 400, 300}, {20, 3000, 15}};

TEST(BetaWeight, Examples) {
  const auto b = beam_derived(kLambda, 20);
  EXPECT_NEAR(std::abs(beta_weight({0, 0}, {0, 0, 0}, b) - 1.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(beta_weight({0, 0}, {0, 0, b.rayleigh_zR}, b) - 0.5), 0, 1e-15);
  EXPECT_NEAR(std::abs(beta_weight({1, 0}, {0, 0, 0}, b) - 1.0), 0, 1e-15);
  const cplx off = beta_weight({0, 0}, {13, 1.1, 700}, b);
  EXPECT_EQ(off.imag(), 0.0);
  EXPECT_GT(off.real(), 0.0);
  EXPECT_LE(off.real(), 1.0);
}

TEST(EffectiveAtomNumber, PointCloudLimit) {
  const auto b = beam_derived(kLambda, 20);
  const auto c = make_cloud(1e-3, 1e-3, 1e6);
  for (int K = 1; K <= 3; ++K)
    EXPECT_NEAR(effective_atom_number(K, c, b) / c.total_N(), 1.0, 1e-6) << K;
}

TEST(EffectiveAtomNumber, OrderedForEveryGeometry) {
  for (const auto& g : kGeometries) {
    const auto b = beam_derived(kLambda, g.w0);
    const auto c = make_cloud(g.sp, g.sz, 0.3);
    const double n1 = effective_atom_number(1, c, b);
    const double n2 = effective_atom_number(2, c, b);
    const double n3 = effective_atom_number(3, c, b);
    EXPECT_GE(c.total_N(), n1);
    EXPECT_GE(n1, n2);
    EXPECT_GE(n2, n3);
    EXPECT_GT(n3, 0.0);
  }
}

TEST(EffectiveAtomNumber, SphericalCloudAtFixedOd) {
  const auto b = beam_derived(kLambda, 10);
  const auto sp = spin_half_species(kLambda);
  const auto shape = make_cloud(100, 100, 1.0);
  const double eta = solve_density_for_od(50, shape, b, sp);
  const auto c = make_cloud(100, 100, eta);
  const double n2 = effective_atom_number(2, c, b);
  EXPECT_NEAR(n2 / (50 * b.mode_area_A / sp.resonant_cross_section_sigma0), 1.0, 1e-12);
  const auto mc = oracle::monte_carlo_neff(100, 100, eta, 10, kLambda, 2000000, 11);
  EXPECT_LT(std::abs(n2 - mc[1].value), 3 * mc[1].standard_error);
}

TEST(EffectiveAtomNumber, MonteCarloCrossValidation) {
  std::uint64_t seed = 1000;
  for (const auto& g : kGeometries) {
    const auto b = beam_derived(kLambda, g.w0);
    const auto c = make_cloud(g.sp, g.sz, 0.2);
    const auto mc = oracle::monte_carlo_neff(g.sp, g.sz, 0.2, g.w0, kLambda, 10000000, seed++);
    for (int K = 1; K <= 3; ++K) {
      const double v = effective_atom_number(K, c, b);
      EXPECT_LT(std::abs(v - mc[K - 1].value), 3 * mc[K - 1].standard_error)
          << "sp=" << g.sp << " sz=" << g.sz << " w0=" << g.w0 << " K=" << K;
    }
  }
}

TEST(EffectiveAtomNumber, MatchesNestedQuadrature) {
  for (const auto& g : kGeometries) {
    const auto b = beam_derived(kLambda, g.w0);
    const auto c = make_cloud(g.sp, g.sz, 0.2);
    for (int K = 1; K <= 3; ++K) {
      const double ref = oracle::nested_quadrature_neff(K, g.sp, g.sz, 0.2, g.w0, kLambda);
      EXPECT_NEAR(effective_atom_number(K, c, b) / ref, 1.0, 1e-6)
          << "sp=" << g.sp << " sz=" << g.sz << " w0=" << g.w0 << " K=" << K;
    }
  }
}

TEST(EffectiveAtomNumber, BeamWaistLimit) {
  const auto b = beam_derived(kLambda, 40);
  const auto c = make_cloud(0.4, b.rayleigh_zR / 100, 1.0);
  const auto n = effective_numbers(c, b, spin_half_species(kLambda));
  EXPECT_NEAR(n.N1 / c.total_N(), 1.0, 0.01);
  EXPECT_NEAR(n.N2 / c.total_N(), 1.0, 0.01);
  EXPECT_NEAR(n.N3 / c.total_N(), 1.0, 0.01);
}

TEST(EffectiveAtomNumber, LinearInDensity) {
  const auto b = beam_derived(kLambda, 20);
  const double a = effective_atom_number(2, make_cloud(60, 500, 0.1), b);
  const double c = effective_atom_number(2, make_cloud(60, 500, 0.7), b);
  EXPECT_NEAR(c / a, 7.0, 1e-12);
}

TEST(OdEff, InvariantUnderScaling) {
  // Transverse lengths scale by c, axial lengths (and zR) by c^2, density by 1/c^2.
  const auto sp = spin_half_species(kLambda);
  const double c = 1.7;
  const double base = od_eff(make_cloud(40, 900, 0.5), beam_derived(kLambda, 20), sp);
  const double scaled = od_eff(make_cloud(40 * c, 900 * c * c, 0.5 / (c * c)),
                               beam_derived(kLambda, 20 * c), sp);
  EXPECT_NEAR(scaled / base, 1.0, 1e-10);
}

TEST(OdEff, Definition) {
  const auto b = beam_derived(kLambda, 20);
  const auto sp = spin_half_species(kLambda);
  const auto shape = make_cloud(50, 50, 1.0);
  const double n2 = effective_atom_number(2, shape, b);
  const double eta = b.mode_area_A / sp.resonant_cross_section_sigma0 / n2;
  EXPECT_NEAR(od_eff(make_cloud(50, 50, eta), b, sp), 1.0, 1e-12);
  const double od1 = od_eff(make_cloud(50, 50, 0.3), b, sp);
  EXPECT_NEAR(od_eff(make_cloud(50, 50, 0.6), b, sp), 2 * od1, 1e-12 * od1);
}

TEST(SolveDensity, FixedOdAcrossAspectRatios) {
  const auto b = beam_derived(kLambda, 20);
  const auto sp = spin_half_species(kLambda);
  for (double ar : {0.1, 1.0, 10.0, 100.0, 316.0}) {
    const double s = 100.0 / std::cbrt(ar);
    const auto shape = make_cloud(s, s * ar, 1.0);
    const double eta = solve_density_for_od(50, shape, b, sp);
    EXPECT_NEAR(od_eff(make_cloud(s, s * ar, eta), b, sp) / 50.0, 1.0, 1e-10) << ar;
  }
}

TEST(SolveDensity, Examples) {
  const auto b = beam_derived(kLambda, 10);
  const auto sp = spin_half_species(kLambda);
  const auto shape = make_cloud(100, 100, 0.42);
  const double x = solve_density_for_od(7.0, shape, b, sp);
  EXPECT_NEAR(solve_density_for_od(14.0, shape, b, sp), 2 * x, 1e-14 * x);
  const double i2 = effective_atom_number(2, make_cloud(100, 100, 1.0), b);
  EXPECT_NEAR(solve_density_for_od(50, shape, b, sp),
              50 * b.mode_area_A / (sp.resonant_cross_section_sigma0 * i2), 1e-12);
  EXPECT_EQ(solve_density_for_od(0, shape, b, sp), 0.0);
  EXPECT_THROW(solve_density_for_od(-1, shape, b, sp), DomainError);
}

TEST(CloudGeometry, TotalNumberMatchesQuadrature) {
  const auto c = make_cloud(37, 410, 0.25);
  const double ref = oracle::nested_quadrature_neff(0, 37, 410, 0.25, 1e6, kLambda);
  EXPECT_NEAR(c.total_N() / ref, 1.0, 1e-9);
  EXPECT_NEAR(c.aspect_ratio(), 410.0 / 37.0, 1e-15);
  EXPECT_NEAR(density_for_total_number(c.total_N(), 37, 410), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(per_cm3_to_per_um3(5e11), 0.5);
}

TEST(Species, Defaults) {
  const auto h = spin_half_species(kLambda);
  EXPECT_EQ(h.spin_f, 0.5);
  EXPECT_EQ(h.lande_gf, 2.0);
  EXPECT_NEAR(h.resonant_cross_section_sigma0, 3 * kLambda * kLambda / (2 * kPi), 1e-15);
  EXPECT_EQ(cesium_f4_species(kLambda).lande_gf, 0.25);
  EXPECT_THROW(make_species(1.5, 1.0, kLambda), DomainError);
}

TEST(MeasurementStrength, SpinHalfConsistency) {
  const auto b = beam_derived(kLambda, 17);
  const auto sp = spin_half_species(kLambda);
  const double s0 = sp.resonant_cross_section_sigma0;
  EXPECT_NEAR(measurement_strength(sp, b, 2.5), s0 / b.mode_area_A * 4 * 2.5 / 9, 1e-18);
  const auto cs = cesium_f4_species(kLambda);
  EXPECT_NEAR(measurement_strength(cs, b, 1.0), s0 / b.mode_area_A / (9 * 16), 1e-18);
  EXPECT_EQ(make_probe(sp, b, 2.5).kappa, measurement_strength(sp, b, 2.5));
}

TEST(LocalScatteringRate, Examples) {
  const auto b = beam_derived(kLambda, 20);
  EXPECT_DOUBLE_EQ(local_scattering_rate({0, 0, 0}, b, 3.0), 3.0);
  EXPECT_NEAR(local_scattering_rate({0, 0, b.rayleigh_zR}, b, 3.0), 1.5, 1e-15);
  EXPECT_NEAR(local_scattering_rate({20, 0, 0}, b, 3.0), 3.0 * std::exp(-2.0), 1e-15);
}

TEST(CouplingStrength, Examples) {
  EXPECT_EQ(coupling_strength_xi(50, 1, 0, 0.5), 0.0);
  EXPECT_NEAR(coupling_strength_xi(50, 1, 0.9, 0.5), 5.0, 1e-14);
  EXPECT_NEAR(coupling_strength_xi(50, 1, 1.8, 0.5), 2 * coupling_strength_xi(50, 1, 0.9, 0.5), 1e-14);
  EXPECT_NEAR(coupling_strength_xi(100, 1, 0.9, 0.5), 2 * coupling_strength_xi(50, 1, 0.9, 0.5), 1e-14);
  EXPECT_THROW(coupling_strength_xi(50, 1, -1, 0.5), DomainError);
}

TEST(FaradaySignal, Examples) {
  const auto b = beam_derived(kLambda, 20);
  std::vector<double> fz(5, 0.5);
  std::vector<Position> origin(5);
  EXPECT_NEAR(faraday_signal(fz, origin, b), 2.5, 1e-15);
  std::vector<double> one = {0.5};
  std::vector<Position> at_zr = {{0, 0, b.rayleigh_zR}};
  EXPECT_NEAR(faraday_signal(one, at_zr, b), 0.25, 1e-15);
  const auto wide = beam_derived(kLambda, 1e6);
  std::vector<double> mixed = {0.5, -0.5, 0.5, 0.3};
  std::vector<Position> spread = {{10, 0, 5}, {30, 1, -40}, {0, 0, 100}, {50, 2, 0}};
  EXPECT_NEAR(faraday_signal(mixed, spread, wide), 0.8, 1e-8);
  EXPECT_THROW(faraday_signal(mixed, at_zr, b), DomainError);
}

TEST(DipoleForwardCoefficients, Examples) {
  const auto b = beam_derived(kLambda, 20);
  const auto real_xx = dipole_forward_coefficients(cplx(2.0, 0), cplx(0, 0), {0, 0, 0}, b);
  EXPECT_GT(real_xx.phase_shift, 0.0);
  EXPECT_EQ(real_xx.attenuation, 0.0);
  EXPECT_EQ(real_xx.faraday_angle, 0.0);
  EXPECT_EQ(real_xx.birefringence_angle, 0.0);

  const auto im_yx = dipole_forward_coefficients(cplx(0, 0), cplx(0, 0.3), {0, 0, 0}, b);
  EXPECT_EQ(im_yx.birefringence_angle, 0.0);
  EXPECT_NEAR(im_yx.faraday_angle, -4 * kPi * b.wavenumber_k0 / b.mode_area_A * 0.3, 1e-15);

  const cplx axx(1.0, 0.4), ayx(-0.2, 0.7);
  const auto at0 = dipole_forward_coefficients(axx, ayx, {0, 0, 0}, b);
  const auto atz = dipole_forward_coefficients(axx, ayx, {0, 0, b.rayleigh_zR}, b);
  EXPECT_NEAR(atz.phase_shift, at0.phase_shift / 2, 1e-15);
  EXPECT_NEAR(atz.attenuation, at0.attenuation / 2, 1e-15);
  EXPECT_NEAR(atz.faraday_angle, at0.faraday_angle / 2, 1e-15);
  EXPECT_NEAR(atz.birefringence_angle, at0.birefringence_angle / 2, 1e-15);
}

}  // namespace
}  // namespace qnd

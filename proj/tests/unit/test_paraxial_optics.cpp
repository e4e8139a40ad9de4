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
#include <limits>

#include "qnd/errors.hpp"
#include "qnd/paraxial_optics.hpp"
#include "qnd/quadrature.hpp"

namespace qnd {
namespace {

const BeamParameters kBeam = beam_derived(0.852, 20.0);

// Radial transport of an l-fold mode with the azimuthal integral done via
// Bessel functions: int_0^{2pi} e^{-il p'} e^{-i a cos(p' - p)} dp' = 2pi (-i)^l J_l(a) e^{-il p}.
cplx propagate_radial(const std::function<cplx(double)>& radial, int l, double rho,
                      double dz, const BeamParameters& beam, double rmax) {
  const double k0 = beam.wavenumber_k0;
  auto integrand = [&](double rp, bool imag) {
    const cplx v = radial(rp) * std::exp(cplx(0, k0 * rp * rp / (2 * dz))) *
                   std::cyl_bessel_j(std::abs(l), k0 * rho * rp / dz) * rp;
    return imag ? v.imag() : v.real();
  };
  QuadratureOptions o;
  o.rel_tol = 1e-13;
  const double re = adaptive_integrate([&](double r) { return integrand(r, false); }, 0, rmax, o).value;
  const double im = adaptive_integrate([&](double r) { return integrand(r, true); }, 0, rmax, o).value;
  return propagator(rho, 0.0, dz, beam) * 2.0 * kPi * std::pow(cplx(0, -1), std::abs(l)) * cplx(re, im);
}

TEST(BeamDerived, WaistTwentyMicrons) {
  const auto b = beam_derived(0.852, 20.0);
  EXPECT_NEAR(b.rayleigh_zR, 1474.926128445912, 1e-9);
  EXPECT_NEAR(b.rayleigh_zR / 1474.8, 1.0, 2e-4);
  EXPECT_NEAR(b.mode_area_A, 628.32, 0.005);
  EXPECT_DOUBLE_EQ(b.rayleigh_zR, b.wavenumber_k0 * 400.0 / 2.0);
  EXPECT_DOUBLE_EQ(b.wavenumber_k0, 2.0 * kPi / 0.852);
}

TEST(BeamDerived, ScalingWithWaist) {
  const auto a = beam_derived(1.3, 7.0);
  const auto b = beam_derived(1.3, 21.0);
  EXPECT_NEAR(b.rayleigh_zR / a.rayleigh_zR, 9.0, 1e-12);
  EXPECT_NEAR(b.mode_area_A / a.mode_area_A, 9.0, 1e-12);
}

TEST(BeamDerived, OptimalWaistRayleighRange) {
  const double zR = beam_derived(0.852, 31.0).rayleigh_zR;
  EXPECT_NEAR(zR, 3543.510023591305, 1e-9);
  EXPECT_NEAR(zR / 3543.3, 1.0, 2e-4);
}

TEST(BeamDerived, RejectsNonPositive) {
  EXPECT_THROW(beam_derived(0.0, 10.0), DomainError);
  EXPECT_THROW(beam_derived(0.852, -1.0), DomainError);
}

TEST(GaussianParams, FocalPlane) {
  const auto g = gaussian_params(0.0, kBeam);
  EXPECT_DOUBLE_EQ(g.width, 20.0);
  EXPECT_TRUE(std::isinf(g.curvature));
  EXPECT_DOUBLE_EQ(g.gouy, 0.0);
}

TEST(GaussianParams, OneRayleighRange) {
  const double zR = kBeam.rayleigh_zR;
  const auto g = gaussian_params(zR, kBeam);
  EXPECT_NEAR(g.width, 20.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(g.curvature, 2.0 * zR, 1e-9);
  EXPECT_NEAR(g.gouy, kPi / 4.0, 1e-15);
  const auto m = gaussian_params(-zR, kBeam);
  EXPECT_NEAR(m.width, g.width, 1e-12);
  EXPECT_NEAR(m.curvature, -2.0 * zR, 1e-9);
  EXPECT_NEAR(m.gouy, -kPi / 4.0, 1e-15);
}

TEST(LgMode, FundamentalValues) {
  EXPECT_NEAR(std::abs(lg_mode({0, 0}, 0, 0, 0, kBeam) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(lg_mode({0, 0}, 20.0, 0.3, 0, kBeam) - std::exp(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(lg_mode({1, 0}, 0, 0, 0, kBeam) - 1.0), 0.0, 1e-15);
}

TEST(LgMode, AzimuthalPhase) {
  for (int l : {-3, -1, 1, 2, 3}) {
    const double d = 0.7;
    const cplx a = lg_mode({2, l}, 13.0, 0.4, 500.0, kBeam);
    const cplx b = lg_mode({2, l}, 13.0, 0.4 + d, 500.0, kBeam);
    EXPECT_NEAR(std::abs(b - a * std::exp(cplx(0, -l * d))), 0.0, 1e-14 * std::abs(a)) << l;
  }
}

TEST(Propagator, OnAxisValue) {
  const double dz = 300.0;
  const cplx k = propagator(0, 0, dz, kBeam);
  EXPECT_NEAR(k.real(), 0.0, 1e-18);
  EXPECT_NEAR(k.imag(), -kBeam.wavenumber_k0 / (2 * kPi * dz), 1e-15);
  EXPECT_THROW(propagator(1, 1, 0.0, kBeam), DomainError);
}

TEST(Propagator, ModeTransport) {
  const double dz = 0.5 * kBeam.rayleigh_zR;
  for (ModeIndex m : {ModeIndex{0, 0}, ModeIndex{1, 0}, ModeIndex{1, 1}, ModeIndex{2, -2}}) {
    for (double rho : {0.0, 9.0, 25.0}) {
      if (rho == 0.0 && m.l != 0) continue;
      auto radial = [&](double r) { return lg_mode(m, r, 0.0, 0.0, kBeam); };
      const cplx got = propagate_radial(radial, m.l, rho, dz, kBeam, 12 * kBeam.waist_w0);
      const cplx want = lg_mode(m, rho, 0.0, dz, kBeam);
      EXPECT_NEAR(std::abs(got - want), 0.0, 1e-9) << m.p << "," << m.l << " rho=" << rho;
    }
  }
}

TEST(Propagator, Unitarity) {
  const double s = 15.0;
  const double dz = 2.0 * kBeam.rayleigh_zR;
  auto f = [&](double r) { return cplx(std::exp(-r * r / (s * s)), 0.0); };
  const double norm_in = kPi * s * s / 2.0;
  QuadratureOptions o;
  o.rel_tol = 1e-10;
  const double wout = 4.0 * kBeam.waist_w0 * 3.0;
  const double norm_out =
      adaptive_integrate(
          [&](double r) {
            return 2 * kPi * r * std::norm(propagate_radial(f, 0, r, dz, kBeam, 8 * s));
          },
          0, wout, o)
          .value;
  EXPECT_NEAR(norm_out / norm_in, 1.0, 1e-8);
}

TEST(Propagator, TruncatedModeSumConvergesToKernel) {
  // Smear the kernel against a Gaussian of waist s at z' = 0 and compare the
  // truncated mode expansion with the exactly propagated Gaussian at z = zR.
  const double s = 0.7 * kBeam.waist_w0;
  const double zs = kBeam.wavenumber_k0 * s * s / 2.0;
  const double z = kBeam.rayleigh_zR;
  auto exact = [&](double rho) {
    const cplx q(1.0, z / zs);
    return std::exp(-rho * rho / (s * s * q)) / q;
  };
  const int pmax = 40;
  std::vector<double> coeff(pmax + 1);
  QuadratureOptions o;
  o.rel_tol = 1e-14;
  for (int p = 0; p <= pmax; ++p) {
    coeff[p] = 2 * kPi / kBeam.mode_area_A *
               adaptive_integrate(
                   [&](double r) {
                     return r * std::exp(-r * r / (s * s)) * lg_mode({p, 0}, r, 0, 0, kBeam).real();
                   },
                   0, 12 * kBeam.waist_w0, o)
                   .value;
  }
  double previous = std::numeric_limits<double>::infinity();
  for (int P : {2, 5, 10, 20, 40}) {
    double err = 0;
    for (double rho : {0.0, 5.0, 14.0, 30.0}) {
      cplx sum = 0;
      for (int p = 0; p <= P; ++p) sum += coeff[p] * lg_mode({p, 0}, rho, 0, z, kBeam);
      err = std::max(err, std::abs(sum - exact(rho)));
    }
    EXPECT_LT(err, previous) << "P=" << P;
    previous = err;
  }
  EXPECT_LT(previous, 1e-10);
}

TEST(ModeInnerProduct, Examples) {
  for (double z : {0.0, 700.0, -4000.0}) {
    EXPECT_NEAR(std::abs(mode_inner_product({0, 0}, {0, 0}, z, kBeam) - 1.0), 0, 1e-12);
    EXPECT_NEAR(std::abs(mode_inner_product({0, 0}, {1, 0}, z, kBeam)), 0, 1e-12);
  }
  EXPECT_NEAR(std::abs(mode_inner_product({2, 1}, {2, 1}, 0, kBeam) - 1.0), 0, 1e-12);
}

TEST(ModeInnerProduct, OrthonormalityAcrossPlanes) {
  const double zR = kBeam.rayleigh_zR;
  double worst = 0;
  for (double z : {0.0, zR, -zR, 3 * zR, -3 * zR})
    for (int pa = 0; pa <= 6; ++pa)
      for (int la = -3; la <= 3; ++la)
        for (int pb = 0; pb <= 6; ++pb)
          for (int lb = -3; lb <= 3; ++lb) {
            const cplx v = mode_inner_product({pa, la}, {pb, lb}, z, kBeam);
            const double d = (pa == pb && la == lb) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(v - d));
          }
  EXPECT_LT(worst, 1e-8);
}

TEST(ModeInnerProduct, PlaneIndependence) {
  const cplx a = mode_inner_product({3, 2}, {1, 2}, 0.0, kBeam);
  const cplx b = mode_inner_product({3, 2}, {1, 2}, 2.0 * kBeam.rayleigh_zR, kBeam);
  EXPECT_NEAR(std::abs(a - b), 0.0, 1e-12);
}

}  // namespace
}  // namespace qnd

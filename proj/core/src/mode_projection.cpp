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

#include "qnd/mode_projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qnd/errors.hpp"
#include "qnd/parallel.hpp"
#include "qnd/quadrature.hpp"

namespace qnd {

SliceGrid build_grid(const CloudGeometry& cloud, int slice_count,
                     double extent_sigmas) {
  if (slice_count < 4) throw DomainError("build_grid: slice_count must be >= 4");
  if (!(extent_sigmas >= 3.0)) {
    throw DomainError("build_grid: extent must cover at least 3 sigma_z");
  }
  if (!(cloud.sigma_z > 0.0)) throw DomainError("build_grid: sigma_z <= 0");
  SliceGrid g;
  g.extent_sigmas = extent_sigmas;
  const double half = extent_sigmas * cloud.sigma_z;
  g.thickness = 2.0 * half / slice_count;
  g.centers.resize(slice_count);
  for (int k = 0; k < slice_count; ++k) {
    // Mirror pairs are written together so the grid is exactly symmetric.
    const int j = slice_count - 1 - k;
    if (j < k) break;
    const double z = -half + g.thickness * (k + 0.5);
    g.centers[k] = z;
    g.centers[j] = -z;
    if (j == k) g.centers[k] = 0.0;
  }
  return g;
}

int WaveBasis::index_of(ModeIndex m) const {
  auto it = std::find(modes.begin(), modes.end(), m);
  return it == modes.end() ? -1 : static_cast<int>(it - modes.begin());
}

WaveBasis make_basis(int p_max, std::vector<int> l_set) {
  if (p_max < 0) throw DomainError("make_basis: p_max must be >= 0");
  if (std::find(l_set.begin(), l_set.end(), 0) == l_set.end()) {
    l_set.insert(l_set.begin(), 0);
  }
  std::stable_partition(l_set.begin(), l_set.end(),
                        [](int l) { return l == 0; });
  WaveBasis b;
  b.p_max = p_max;
  for (int l : l_set) {
    if (std::find(b.l_set.begin(), b.l_set.end(), l) != b.l_set.end()) continue;
    b.l_set.push_back(l);
    for (int p = 0; p <= p_max; ++p) b.modes.push_back({p, l});
  }
  return b;
}

ProjectionTensor projection_coefficients(const WaveBasis& basis,
                                         const SliceGrid& grid,
                                         const BeamParameters& beam,
                                         const QuadratureSpec& spec) {
  const int n = basis.size();
  const int K = grid.size();
  ProjectionTensor t;
  t.basis = basis;
  t.grid = grid;
  t.slices.assign(K, Eigen::MatrixXcd::Zero(n, n));
  parallel_for(K, [&](int k) {
    const double z = grid.centers[k];
    const GaussianParams g = gaussian_params(z, beam);
    const double gw = (beam.waist_w0 / g.width) * (beam.waist_w0 / g.width);
    const double w2 = g.width * g.width;
    auto weight = [&](double rho) { return gw * std::exp(-2.0 * rho * rho / w2); };
    Eigen::MatrixXcd& c = t.slices[k];
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        const ModeIndex ma = basis.modes[a], mb = basis.modes[b];
        if (ma.l != mb.l) continue;
        const cplx v = weighted_mode_inner_product(ma, mb, z, beam, weight, spec);
        c(a, b) = v;
        c(b, a) = std::conj(v);
      }
      c(a, a) = c(a, a).real();
    }
  });
  return t;
}

namespace {

double lg_norm(int p, int al) {
  return std::exp(0.5 * (std::lgamma(p + 1.0) - std::lgamma(p + al + 1.0)));
}

// Integral of x^{al} L_pa^{al}(x) L_pb^{al}(x) e^{-decay x} over [0, inf),
// with pb < 0 meaning the second factor is absent.
double laguerre_overlap(int pa, int pb, int al, double decay) {
  auto poly = [&](double x) {
    double v = std::assoc_laguerre(pa, al, x);
    if (pb >= 0) v *= std::pow(x, al) * std::assoc_laguerre(pb, al, x);
    return v;
  };
  return laguerre_moment(poly, decay, 64);
}

}  // namespace

InitialMoments initial_moments(const CloudGeometry& cloud,
                               const BeamParameters& beam,
                               const WaveBasis& basis, const SliceGrid& grid,
                               double spin_f) {
  if (!(spin_f > 0.0)) throw DomainError("initial_moments: spin_f must be > 0");
  const int n = basis.size();
  const int K = grid.size();
  const auto phases = gauge_phases(basis, grid, beam);
  InitialMoments im;
  im.spin_f = spin_f;
  im.means.assign(K, Eigen::VectorXcd::Zero(n));
  im.covariances.assign(K, Eigen::MatrixXcd::Zero(n, n));
  im.noise_numbers.assign(K, Eigen::MatrixXcd::Zero(n, n));
  const double A = beam.mode_area_A;
  const double sp2 = cloud.sigma_perp * cloud.sigma_perp;
  parallel_for(K, [&](int k) {
    const double z = grid.centers[k];
    const GaussianParams gp = gaussian_params(z, beam);
    const double w2 = gp.width * gp.width;
    const double g = beam.waist_w0 * beam.waist_w0 / w2;
    const double s = w2 / sp2;
    const double eta_z = cloud.peak_density_eta0 *
                         std::exp(-2.0 * z * z / (cloud.sigma_z * cloud.sigma_z));
    const double base = grid.thickness * eta_z * A;
    const Eigen::VectorXcd& ph = phases[k];
    for (int a = 0; a < n; ++a) {
      const ModeIndex ma = basis.modes[a];
      const int al = std::abs(ma.l);
      const double na = lg_norm(ma.p, al);
      if (ma.l == 0) {
        im.means[k](a) = spin_f * base * na *
                         laguerre_overlap(ma.p, -1, 0, 1.0 + s) * ph(a);
      }
      for (int b = a; b < n; ++b) {
        const ModeIndex mb = basis.modes[b];
        if (mb.l != ma.l) continue;
        const double nb = lg_norm(mb.p, al);
        const cplx rel = std::conj(ph(a)) * ph(b);
        const double cov = 0.5 * spin_f * base * g * na * nb *
                           laguerre_overlap(ma.p, mb.p, al, 2.0 + s);
        const double inj = base * g * g * na * nb *
                           laguerre_overlap(ma.p, mb.p, al, 3.0 + s);
        im.covariances[k](a, b) = cov * rel;
        im.covariances[k](b, a) = cov * std::conj(rel);
        im.noise_numbers[k](a, b) = inj * rel;
        im.noise_numbers[k](b, a) = inj * std::conj(rel);
      }
    }
  });
  return im;
}

cplx InitialMoments::mean_sum(int a) const {
  cplx s = 0.0;
  for (const auto& m : means) s += m(a);
  return s;
}

cplx InitialMoments::covariance_sum(int a, int b) const {
  cplx s = 0.0;
  for (const auto& c : covariances) s += c(a, b);
  return s;
}

cplx InitialMoments::noise_sum(int a, int b) const {
  cplx s = 0.0;
  for (const auto& c : noise_numbers) s += c(a, b);
  return s;
}

std::vector<Eigen::VectorXcd> gauge_phases(const WaveBasis& basis,
                                           const SliceGrid& grid,
                                           const BeamParameters& beam) {
  std::vector<Eigen::VectorXcd> out(grid.size(),
                                    Eigen::VectorXcd::Zero(basis.size()));
  for (int k = 0; k < grid.size(); ++k) {
    const double gouy = gaussian_params(grid.centers[k], beam).gouy;
    for (int a = 0; a < basis.size(); ++a) {
      const ModeIndex m = basis.modes[a];
      out[k](a) = std::polar(1.0, (2.0 * m.p + std::abs(m.l)) * gouy);
    }
  }
  return out;
}

ConvergenceReport convergence_probe(
    const std::vector<Refinement>& sequence,
    const std::function<double(const Refinement&)>& metric, double tolerance) {
  ConvergenceReport r;
  r.levels = sequence;
  r.order = std::numeric_limits<double>::quiet_NaN();
  if (sequence.empty()) return r;
  for (const auto& lv : sequence) r.values.push_back(metric(lv));
  for (std::size_t i = 1; i < r.values.size(); ++i) {
    r.changes.push_back(r.values[i] - r.values[i - 1]);
  }
  r.extrapolated = r.values.back();
  if (r.changes.empty()) {
    r.converged_index = 0;
    return r;
  }
  for (std::size_t i = 0; i < r.changes.size(); ++i) {
    if (std::abs(r.changes[i]) <= tolerance) {
      r.converged_index = static_cast<int>(i);
      break;
    }
  }
  r.resolution = std::abs(r.changes.back());
  for (std::size_t i = 1; i < r.changes.size(); ++i) {
    const double c0 = r.changes[i - 1], c1 = r.changes[i];
    if (c0 * c1 < 0.0 || std::abs(c1) > std::abs(c0)) r.monotone = false;
  }
  const std::size_t m = r.changes.size();
  if (m >= 2) {
    const auto& a = sequence[m - 2];
    const auto& b = sequence[m - 1];
    const auto& c = sequence[m];
    const bool grid_refined = a.slice_count != b.slice_count;
    const double h0 = grid_refined ? 1.0 / a.slice_count : 1.0 / (a.p_max + 1);
    const double h1 = grid_refined ? 1.0 / b.slice_count : 1.0 / (b.p_max + 1);
    const double h2 = grid_refined ? 1.0 / c.slice_count : 1.0 / (c.p_max + 1);
    const double d0 = r.changes[m - 2], d1 = r.changes[m - 1];
    if (d0 != 0.0 && d1 != 0.0 && d0 * d1 > 0.0) {
      const double ratio = h0 / h1;
      r.order = std::log(std::abs(d0 / d1)) / std::log(ratio);
      const double rr = std::pow(h1 / h2, r.order);
      if (rr > 1.0) r.extrapolated = r.values.back() + d1 / (rr - 1.0);
    } else if (d1 == 0.0) {
      r.order = std::numeric_limits<double>::infinity();
    }
  }
  return r;
}

}  // namespace qnd

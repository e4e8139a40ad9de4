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

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "qnd/ensemble_geometry.hpp"
#include "qnd/paraxial_optics.hpp"

namespace qnd {

/// Uniform longitudinal slices, symmetric about z = 0.
struct SliceGrid {
  std::vector<double> centers;
  double thickness = 0.0;
  double extent_sigmas = 0.0;

  int size() const { return static_cast<int>(centers.size()); }
};

SliceGrid build_grid(const CloudGeometry& cloud, int slice_count,
                     double extent_sigmas = 3.0);

/// Truncated transverse basis, ordered by l (as given) then p.
struct WaveBasis {
  std::vector<ModeIndex> modes;
  int p_max = 0;
  std::vector<int> l_set;

  int size() const { return static_cast<int>(modes.size()); }
  int index_of(ModeIndex m) const;  // -1 when absent
};

WaveBasis make_basis(int p_max, std::vector<int> l_set = {0});

/// c^{a}_{b}(z_k) = (1/A) integral |u00|^2 conj(u_a) u_b, one matrix per slice.
struct ProjectionTensor {
  WaveBasis basis;
  SliceGrid grid;
  std::vector<Eigen::MatrixXcd> slices;

  cplx operator()(int a, int b, int k) const { return slices[k](a, b); }
};

ProjectionTensor projection_coefficients(const WaveBasis& basis,
                                         const SliceGrid& grid,
                                         const BeamParameters& beam,
                                         const QuadratureSpec& spec = {});

/// Spin coherent state along x. Per-slice blocks; the full covariance is
/// block diagonal in the slice index.
struct InitialMoments {
  std::vector<Eigen::VectorXcd> means;           // [k](a)
  std::vector<Eigen::MatrixXcd> covariances;     // [k](a, b)
  std::vector<Eigen::MatrixXcd> noise_numbers;   // [k](a, b)
  double spin_f = 0.5;

  int slices() const { return static_cast<int>(means.size()); }
  cplx mean_sum(int a = 0) const;
  cplx covariance_sum(int a = 0, int b = 0) const;
  cplx noise_sum(int a = 0, int b = 0) const;
};

InitialMoments initial_moments(const CloudGeometry& cloud,
                               const BeamParameters& beam,
                               const WaveBasis& basis, const SliceGrid& grid,
                               double spin_f);

/// exp(i (2p + |l|) Gouy(z_k)): the phase of beta_pl in slice k.
/// Indexed [k](a).
std::vector<Eigen::VectorXcd> gauge_phases(const WaveBasis& basis,
                                           const SliceGrid& grid,
                                           const BeamParameters& beam);

struct Refinement {
  int p_max = 15;
  int slice_count = 61;
};

struct ConvergenceReport {
  std::vector<Refinement> levels;
  std::vector<double> values;
  std::vector<double> changes;  // values[i+1] - values[i]
  int converged_index = -1;     // first level within tolerance of the next
  double resolution = 0.0;      // |last change|
  double order = 0.0;           // empirical order, NaN when undetermined
  double extrapolated = 0.0;    // Richardson estimate
  bool monotone = true;
};

ConvergenceReport convergence_probe(
    const std::vector<Refinement>& sequence,
    const std::function<double(const Refinement&)>& metric, double tolerance);

}  // namespace qnd

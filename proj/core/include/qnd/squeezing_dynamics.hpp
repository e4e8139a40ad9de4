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
#include <span>
#include <vector>

#include "qnd/mode_projection.hpp"
#include "qnd/ode.hpp"
#include "qnd/paraxial_optics.hpp"

namespace qnd {

/// Linear spin-wave model over a flattened (slice, mode) index k*block + a.
/// Coupling and injection are block diagonal with one block per slice.
template <typename Scalar>
struct SpinWaveSystem {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  int block = 1;
  std::vector<Mat> coupling;   // c-tensor, one block per slice
  std::vector<Mat> injection;  // noise numbers, one block per slice
  Vec readout;                 // selects the measured spin wave
  Vec initial_mean;
  Mat initial_covariance;
  double spin_f = 0.5;

  int blocks() const { return static_cast<int>(coupling.size()); }
  int dimension() const { return block * blocks(); }
  /// N1 and N2 implied by the initial state: mean = N1 f, var = N2 f / 2.
  double n1_reference() const;
  double n2_reference() const;
};

using RealSystem = SpinWaveSystem<double>;
using ComplexSystem = SpinWaveSystem<cplx>;

ComplexSystem assemble_system(const ProjectionTensor& tensor,
                              const InitialMoments& initial);

/// Diagonal gauge change F -> conj(phase) F that makes the l = 0 system real.
/// Throws DomainError if the result keeps an imaginary part.
RealSystem to_real_gauge(const ComplexSystem& system,
                         const std::vector<Eigen::VectorXcd>& phases);

/// Discrete spin-1/2 atoms with probe-intensity weights beta_i: a one-mode
/// block per atom.
RealSystem site_system(std::span<const double> weights);

/// Single collective mode of N atoms with unit weight.
RealSystem uniform_system(double N);

template <typename Scalar>
struct SpinWaveState {
  double time = 0.0;
  typename SpinWaveSystem<Scalar>::Vec means;
  typename SpinWaveSystem<Scalar>::Mat covariances;
};

struct ModelConfig {
  double kappa = 0.0;
  double gamma0 = 1.0;
  double spin_f = 0.5;
  double abs_tol = 1e-12;  // relative to the largest initial state entry
  double rel_tol = 1e-8;
  double horizon = 3.0;    // gamma0 t
  int samples = 2001;
  bool diffuse = true;     // gamma0 decay and injection terms
  bool measurement = true; // kappa backaction term
};

template <typename Scalar>
typename SpinWaveSystem<Scalar>::Vec mean_derivative(
    const SpinWaveState<Scalar>& state, const SpinWaveSystem<Scalar>& system,
    const ModelConfig& config);

template <typename Scalar>
typename SpinWaveSystem<Scalar>::Mat covariance_derivative(
    const SpinWaveState<Scalar>& state, const SpinWaveSystem<Scalar>& system,
    const ModelConfig& config);

struct TrajectorySample {
  double time = 0.0;  // gamma0 t
  double mean_Fx00 = 0.0;
  double var_Fz00 = 0.0;
  double zeta = 1.0;
};

struct PeakInfo {
  double time = 0.0;
  double zeta_min = 1.0;
  double db = 0.0;
  bool at_boundary = false;
};

struct SqueezingTrajectory {
  std::vector<TrajectorySample> samples;
  PeakInfo peak;
  double n1 = 0.0;
  double n2 = 0.0;
  OdeStats stats;
  double max_imag_residual = 0.0;  // of the fundamental variance, relative
};

SqueezingTrajectory integrate(const RealSystem& system,
                              const ModelConfig& config);
SqueezingTrajectory integrate(const ComplexSystem& system,
                              const ModelConfig& config);

/// Integrates and also returns the final state.
template <typename Scalar>
SqueezingTrajectory integrate_with_state(const SpinWaveSystem<Scalar>& system,
                                         const ModelConfig& config,
                                         SpinWaveState<Scalar>& final_state);

double squeezing_parameter(double mean_Fx00, double var_Fz00, double N1,
                           double N2, double spin_f);

/// 10 log10(1/zeta).
double inverse_db(double zeta);

double symmetric_1d_variance(double t, double N, double OD, double gamma0);

/// zeta of the symmetric model: variance ratio times the e^{2 gamma0 t/3}
/// mean-decay factor.
double symmetric_1d_zeta(double t, double OD, double gamma0);

PeakInfo symmetric_1d_peak(double OD, double gamma0, double horizon);

PeakInfo peak_squeezing(const SqueezingTrajectory& trajectory);

}  // namespace qnd

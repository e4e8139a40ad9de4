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
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qnd/ensemble_geometry.hpp"
#include "qnd/mode_projection.hpp"

namespace qnd {

struct SpinOperators {
  double f = 0.5;
  int dim = 2;
  Eigen::MatrixXcd fx, fy, fz;
};

/// Angular momentum matrices in the f_z basis, ordered m = f, f-1, ..., -f.
SpinOperators spin_operators(double f);

/// Coupling weights of one atom; weights[0] is beta_00, the remaining
/// entries are the unmeasured modes.
struct AtomSite {
  std::vector<cplx> weights;
  double beta00() const { return weights.empty() ? 0.0 : weights[0].real(); }
};

std::vector<AtomSite> sites_from_weights(std::span<const double> beta00);
std::vector<AtomSite> sites_from_positions(std::span<const Position> positions,
                                           const BeamParameters& beam,
                                           const WaveBasis& basis);

struct EnsembleState {
  Eigen::MatrixXcd rho;
  std::vector<AtomSite> sites;
  double spin_f = 0.5;
};

/// Product state with every atom stretched along +x.
EnsembleState coherent_state_x(std::vector<AtomSite> sites, double spin_f = 0.5);

/// Single-atom map D[rho] (also its own adjoint, so it maps observables too).
Eigen::MatrixXcd diffuse_map(const Eigen::MatrixXcd& rho,
                             const SpinOperators& ops, double g_f);

/// Sum_i gamma0 beta00(r_i) D_i[rho].
Eigen::MatrixXcd local_diffuse_generator(const EnsembleState& state,
                                         double gamma0, double g_f);

/// Eigenvalues of F_z^{pl} (diagonal in the product f_z basis).
Eigen::VectorXcd collective_spectrum(const EnsembleState& state, int mode);

struct MeasurementStep {
  EnsembleState state;
  double dy = 0.0;
};

/// Conditional update for one interval: Kraus operator on the measured mode
/// (exponential form of the first-order expansion, which keeps the state
/// positive), exact dephasing from the unmeasured modes, normalisation to
/// the incoming trace.
MeasurementStep kraus_measurement_step(const EnsembleState& state, double dt,
                                       double dW, double kappa);

struct OracleConfig {
  double kappa = 1.0;
  double gamma0 = 1.0;
  double g_f = 2.0;
  double horizon = 2.0;  // in units of 1/gamma0 when gamma0 > 0, else absolute
  int steps = 1600;
  int checkpoints = 10;
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // trajectory index
  std::vector<double> times;
  std::vector<double> dy;
  std::vector<double> mean_Fx00;
  std::vector<double> mean_Fz00;
  std::vector<double> var_Fz00;
};

/// One conditional trajectory; moments recorded at every step.
TrajectoryRecord run_trajectory(const std::vector<AtomSite>& sites,
                                const OracleConfig& config, std::uint64_t seed,
                                std::uint64_t stream);

struct MomentStatistics {
  std::vector<double> mean;
  std::vector<double> standard_error;
};

struct TrajectoryStatistics {
  std::vector<double> times;
  MomentStatistics mean_Fx00;
  MomentStatistics mean_Fz00;
  MomentStatistics var_Fz00;
  double min_eigenvalue = 0.0;
  double max_trace_drift = 0.0;
  int trajectories = 0;
  std::uint64_t seed = 0;
};

TrajectoryStatistics simulate_trajectories(int n_traj,
                                           const std::vector<AtomSite>& sites,
                                           const OracleConfig& config,
                                           std::uint64_t seed);

/// Deterministic unconditioned evolution with the same time step, returning
/// the density operator at each checkpoint.
std::vector<Eigen::MatrixXcd> unconditioned_evolution(
    const std::vector<AtomSite>& sites, const OracleConfig& config);

/// Average conditioned state at each checkpoint over n_traj trajectories.
std::vector<Eigen::MatrixXcd> averaged_conditional_states(
    int n_traj, const std::vector<AtomSite>& sites, const OracleConfig& config,
    std::uint64_t seed);

struct FlipRateReport {
  double spin_f = 0.5;
  double g_f = 2.0;
  double flip_rate = 0.0;        // per unit gamma_s
  double trace_loss_rate = 0.0;  // per unit gamma_s
  double reference = 0.0;        // 1/(12 f)
};

FlipRateReport spin_f_flip_rate_probe(double spin_f, double g_f);

/// Gaussian increments for one trajectory; the stream is keyed by
/// (seed, trajectory index) and draws are consumed in step order.
class WienerStream {
 public:
  WienerStream(std::uint64_t seed, std::uint64_t stream);
  double next(double dt);  // N(0, dt)

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace qnd

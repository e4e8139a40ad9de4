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

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>
#include <random>
#include <vector>

#include "qnd/errors.hpp"
#include "qnd/sme_oracle.hpp"
#include "qnd/squeezing_dynamics.hpp"

namespace qnd {
namespace {

Eigen::MatrixXcd random_density(int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  Eigen::MatrixXcd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
  Eigen::MatrixXcd r = a * a.adjoint();
  return r / r.trace().real();
}

double expect(const Eigen::MatrixXcd& op, const Eigen::MatrixXcd& rho) {
  return (op * rho).trace().real();
}

TEST(SpinOperators, Algebra) {
  for (double f : {0.5, 4.0}) {
    const auto o = spin_operators(f);
    EXPECT_EQ(o.dim, static_cast<int>(2 * f + 1));
    const Eigen::MatrixXcd comm = o.fx * o.fy - o.fy * o.fx;
    EXPECT_LT((comm - cplx(0, 1) * o.fz).norm(), 1e-12);
    const Eigen::MatrixXcd casimir = o.fx * o.fx + o.fy * o.fy + o.fz * o.fz;
    EXPECT_LT((casimir - f * (f + 1) * Eigen::MatrixXcd::Identity(o.dim, o.dim)).norm(), 1e-12);
    EXPECT_NEAR(o.fz(0, 0).real(), f, 1e-15);
  }
}

TEST(DiffuseMap, SpinHalfExpectationIdentities) {
  const auto o = spin_operators(0.5);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto rho = random_density(2, seed);
    const auto d = diffuse_map(rho, o, 2.0);
    EXPECT_NEAR(expect(o.fx, d), -expect(o.fx, rho) / 3.0, 1e-12);
    EXPECT_NEAR(expect(o.fy, d), -expect(o.fy, rho) / 3.0, 1e-12);
    EXPECT_NEAR(expect(o.fz, d), -2.0 / 9.0 * expect(o.fz, rho), 1e-12);
    EXPECT_NEAR(std::abs(d.trace()), 0.0, 1e-15);
  }
  const Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(2, 2) / 2.0;
  EXPECT_LT(diffuse_map(mixed, o, 2.0).norm(), 1e-16);
}

TEST(DiffuseMap, TraceRateFormula) {
  for (double g : {0.25, 1.0, 2.0}) {
    const auto o = spin_operators(4.0);
    const auto rho = random_density(9, 3);
    const auto d = diffuse_map(rho, o, g);
    // fz rho fz, fx rho fx, fy rho fy all have trace Tr(f_i^2 rho).
    const double want = -2.0 / 9.0 +
                        g * g / 9.0 * (expect(o.fz * o.fz, rho) +
                                       0.5 * (expect(o.fx * o.fx, rho) + expect(o.fy * o.fy, rho)));
    EXPECT_NEAR(d.trace().real(), want, 1e-12);
  }
}

TEST(FlipRateProbe, TraceBehaviour) {
  const auto half = spin_f_flip_rate_probe(0.5, 2.0);
  EXPECT_NEAR(half.trace_loss_rate, 0.0, 1e-15);
  EXPECT_NEAR(half.reference, 1.0 / 6.0, 1e-15);
  EXPECT_GT(half.flip_rate, 0.0);
  const auto cs = spin_f_flip_rate_probe(4.0, 0.25);
  EXPECT_GT(cs.trace_loss_rate, 0.0);
  EXPECT_NEAR(cs.reference, 1.0 / 48.0, 1e-15);
  EXPECT_GT(cs.flip_rate, 0.0);
}

TEST(LocalDiffuseGenerator, ScalesWithLocalRate) {
  const std::vector<double> w = {1.0, 0.4};
  const auto st = coherent_state_x(sites_from_weights(w));
  const auto d = local_diffuse_generator(st, 1.5, 2.0);
  const auto o = spin_operators(0.5);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(2, 2);
  const Eigen::MatrixXcd fx0 = Eigen::kroneckerProduct(o.fx, I);
  const Eigen::MatrixXcd fx1 = Eigen::kroneckerProduct(I, o.fx);
  EXPECT_NEAR(expect(fx0, d), -1.5 * 1.0 / 3.0 * 0.5, 1e-12);
  EXPECT_NEAR(expect(fx1, d), -1.5 * 0.4 / 3.0 * 0.5, 1e-12);
  EXPECT_NEAR(std::abs(d.trace()), 0.0, 1e-14);
}

TEST(EnsembleState, CoherentStateAndBudget) {
  const std::vector<double> w = {1.0, 0.5, 0.25};
  const auto st = coherent_state_x(sites_from_weights(w));
  EXPECT_EQ(st.rho.rows(), 8);
  EXPECT_NEAR(st.rho.trace().real(), 1.0, 1e-15);
  EXPECT_NEAR((st.rho * st.rho).trace().real(), 1.0, 1e-14);
  const auto lam = collective_spectrum(st, 0);
  EXPECT_NEAR(lam.real().maxCoeff(), 0.5 * (1.0 + 0.5 + 0.25), 1e-15);
  EXPECT_THROW(coherent_state_x(sites_from_weights(std::vector<double>(7, 1.0))), BudgetError);
  EXPECT_THROW(coherent_state_x(sites_from_weights(std::vector<double>(2, 1.0)), 4.0), BudgetError);
}

TEST(EnsembleState, SitesFromPositions) {
  const auto beam = beam_derived(0.852, 20);
  const auto basis = make_basis(2);
  std::vector<Position> pos = {{0, 0, 0}, {10, 0.3, beam.rayleigh_zR}};
  const auto sites = sites_from_positions(pos, beam, basis);
  ASSERT_EQ(sites.size(), 2u);
  EXPECT_NEAR(sites[0].beta00(), 1.0, 1e-15);
  for (int m = 0; m < basis.size(); ++m)
    EXPECT_NEAR(std::abs(sites[1].weights[m] - beta_weight(basis.modes[m], pos[1], beam)), 0.0, 1e-15);
}

TEST(KrausStep, EigenstateUnchanged) {
  const std::vector<double> w = {1.0, 0.6};
  auto st = coherent_state_x(sites_from_weights(w));
  st.rho.setZero();
  st.rho(1, 1) = 1.0;  // |up, down>: an F_z eigenstate
  const auto out = kraus_measurement_step(st, 0.01, 0.03, 2.0);
  EXPECT_LT((out.state.rho - st.rho).norm(), 1e-14);
  const double lam = collective_spectrum(st, 0)(1).real();
  EXPECT_NEAR(out.dy, lam * 0.01 + 0.03 / std::sqrt(2.0), 1e-15);
}

TEST(KrausStep, Preconditions) {
  const auto st = coherent_state_x(sites_from_weights(std::vector<double>{1.0}));
  EXPECT_THROW(kraus_measurement_step(st, 0.01, 0.0, 0.0), DomainError);
  EXPECT_THROW(kraus_measurement_step(st, 0.0, 0.0, 1.0), DomainError);
}

TEST(KrausStep, PositivityAndTrace) {
  const std::vector<double> w = {1.0, 0.8, 0.5};
  auto st = coherent_state_x(sites_from_weights(w));
  WienerStream noise(5, 0);
  for (int k = 0; k < 200; ++k) {
    st = kraus_measurement_step(st, 0.01, noise.next(0.01), 3.0).state;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(st.rho);
    EXPECT_GE(es.eigenvalues()(0), -1e-10);
    EXPECT_NEAR(st.rho.trace().real(), 1.0, 1e-12);
  }
}

TEST(SimulateTrajectories, Deterministic) {
  const std::vector<double> w = {1.0, 0.8, 0.5, 0.3};
  OracleConfig c;
  c.steps = 200;
  const auto a = run_trajectory(sites_from_weights(w), c, 42, 0);
  const auto b = run_trajectory(sites_from_weights(w), c, 42, 0);
  EXPECT_EQ(a.dy, b.dy);
  EXPECT_EQ(a.var_Fz00, b.var_Fz00);
  const auto s1 = simulate_trajectories(1, sites_from_weights(w), c, 42);
  const auto s2 = simulate_trajectories(1, sites_from_weights(w), c, 42);
  EXPECT_EQ(s1.var_Fz00.mean, s2.var_Fz00.mean);
  EXPECT_EQ(s1.mean_Fx00.mean, s2.mean_Fx00.mean);
  const auto other = run_trajectory(sites_from_weights(w), c, 43, 0);
  EXPECT_NE(a.dy, other.dy);
}

TEST(SimulateTrajectories, InvariantsAlongTrajectories) {
  const std::vector<double> w = {1.0, 0.8, 0.5, 0.3};
  OracleConfig c;
  c.steps = 400;
  const auto st = simulate_trajectories(50, sites_from_weights(w), c, 7);
  EXPECT_GE(st.min_eigenvalue, -1e-10);
  EXPECT_LT(st.max_trace_drift, 1e-12);
  EXPECT_EQ(st.times.size(), 10u);
  EXPECT_NEAR(st.times.back(), 2.0, 1e-12);
}

TEST(SimulateTrajectories, HomogeneousMeasurementOnly) {
  const std::vector<double> w(4, 1.0);
  OracleConfig c;
  c.gamma0 = 0.0;
  c.kappa = 1.0;
  c.horizon = 1.0;
  c.steps = 400;
  const auto st = simulate_trajectories(2000, sites_from_weights(w), c, 20260101);
  for (std::size_t j = 0; j < st.times.size(); ++j) {
    const double ref = 1.0 / (1.0 + st.times[j]);
    EXPECT_LT(std::abs(st.var_Fz00.mean[j] - ref), 3 * st.var_Fz00.standard_error[j])
        << "t=" << st.times[j];
  }
}

TEST(SimulateTrajectories, AverageReproducesUnconditionedEvolution) {
  const std::vector<double> w = {1.0, 0.7, 0.4};
  OracleConfig c;
  c.kappa = 2.0;
  c.horizon = 1.0;
  c.steps = 200;
  c.checkpoints = 4;
  const auto avg = averaged_conditional_states(2000, sites_from_weights(w), c, 99);
  const auto det = unconditioned_evolution(sites_from_weights(w), c);
  ASSERT_EQ(avg.size(), det.size());
  for (std::size_t j = 0; j < avg.size(); ++j) {
    EXPECT_LT((avg[j] - det[j]).cwiseAbs().maxCoeff(), 0.015) << j;
    EXPECT_NEAR(det[j].trace().real(), 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace qnd

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

#include "qnd/squeezing_dynamics.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

#include "qnd/errors.hpp"

namespace qnd {

namespace {

template <typename S>
double real_part(const S& v) {
  return std::real(v);
}

template <typename S>
S conj_of(const S& v) {
  if constexpr (std::is_same_v<S, double>) {
    return v;
  } else {
    return std::conj(v);
  }
}

}  // namespace

template <typename Scalar>
double SpinWaveSystem<Scalar>::n1_reference() const {
  return real_part(readout.dot(initial_mean)) / spin_f;
}

template <typename Scalar>
double SpinWaveSystem<Scalar>::n2_reference() const {
  return 2.0 * real_part(readout.dot(initial_covariance * readout)) / spin_f;
}

template struct SpinWaveSystem<double>;
template struct SpinWaveSystem<cplx>;

ComplexSystem assemble_system(const ProjectionTensor& tensor,
                              const InitialMoments& initial) {
  const int n = tensor.basis.size();
  const int K = tensor.grid.size();
  if (initial.slices() != K) {
    throw DomainError("assemble_system: slice counts differ");
  }
  const int fundamental = tensor.basis.index_of({0, 0});
  if (fundamental < 0) throw DomainError("assemble_system: basis lacks (0,0)");
  ComplexSystem s;
  s.block = n;
  s.spin_f = initial.spin_f;
  s.coupling = tensor.slices;
  s.injection = initial.noise_numbers;
  const int dim = n * K;
  s.readout = Eigen::VectorXcd::Zero(dim);
  s.initial_mean = Eigen::VectorXcd::Zero(dim);
  s.initial_covariance = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < K; ++k) {
    s.readout(k * n + fundamental) = 1.0;
    s.initial_mean.segment(k * n, n) = initial.means[k];
    s.initial_covariance.block(k * n, k * n, n, n) = initial.covariances[k];
  }
  return s;
}

namespace {

double max_abs(const Eigen::MatrixXcd& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

Eigen::MatrixXd real_checked(const Eigen::MatrixXcd& m, const char* what) {
  const double scale = max_abs(m);
  const double imag = m.size() ? m.imag().cwiseAbs().maxCoeff() : 0.0;
  if (imag > 1e-10 * std::max(scale, std::numeric_limits<double>::min())) {
    throw DomainError(std::string("to_real_gauge: ") + what +
                      " keeps an imaginary part");
  }
  return m.real();
}

}  // namespace

RealSystem to_real_gauge(const ComplexSystem& system,
                         const std::vector<Eigen::VectorXcd>& phases) {
  const int n = system.block;
  const int K = system.blocks();
  if (static_cast<int>(phases.size()) != K) {
    throw DomainError("to_real_gauge: phase table does not match the system");
  }
  Eigen::VectorXcd phi(system.dimension());
  for (int k = 0; k < K; ++k) phi.segment(k * n, n) = phases[k];
  RealSystem r;
  r.block = n;
  r.spin_f = system.spin_f;
  r.coupling.resize(K);
  r.injection.resize(K);
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXcd& p = phases[k];
    Eigen::MatrixXcd g = p.conjugate().asDiagonal() * system.coupling[k] *
                         p.asDiagonal();
    Eigen::MatrixXcd nj = p.asDiagonal() * system.injection[k] *
                          p.conjugate().asDiagonal();
    r.coupling[k] = real_checked(g, "coupling");
    r.injection[k] = real_checked(nj, "injection");
  }
  r.readout = real_checked(phi.conjugate().asDiagonal() * system.readout,
                           "readout");
  r.initial_mean =
      real_checked(phi.conjugate().asDiagonal() * system.initial_mean, "mean");
  Eigen::MatrixXcd c = phi.asDiagonal() * system.initial_covariance *
                       phi.conjugate().asDiagonal();
  r.initial_covariance = real_checked(c, "covariance");
  return r;
}

RealSystem site_system(std::span<const double> weights) {
  const int N = static_cast<int>(weights.size());
  if (N == 0) throw DomainError("site_system: no atoms");
  RealSystem s;
  s.block = 1;
  s.spin_f = 0.5;
  s.readout.resize(N);
  s.initial_mean.resize(N);
  s.initial_covariance = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    const double b = weights[i];
    if (!(b > 0.0) || b > 1.0) {
      throw DomainError("site_system: weights must lie in (0, 1]");
    }
    s.coupling.push_back(Eigen::MatrixXd::Constant(1, 1, b));
    s.injection.push_back(Eigen::MatrixXd::Constant(1, 1, b));
    s.readout(i) = b;
    s.initial_mean(i) = 0.5;
    s.initial_covariance(i, i) = 0.25;
  }
  return s;
}

RealSystem uniform_system(double N) {
  if (!(N > 0.0)) throw DomainError("uniform_system: N must be positive");
  RealSystem s;
  s.block = 1;
  s.spin_f = 0.5;
  s.coupling.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0));
  s.injection.push_back(Eigen::MatrixXd::Constant(1, 1, N));
  s.readout = Eigen::VectorXd::Constant(1, 1.0);
  s.initial_mean = Eigen::VectorXd::Constant(1, N / 2.0);
  s.initial_covariance = Eigen::MatrixXd::Constant(1, 1, N / 4.0);
  return s;
}

namespace {

// Shared kernels on raw views so the integrator can avoid copies.
template <typename Scalar>
void mean_rhs(const SpinWaveSystem<Scalar>& sys, const ModelConfig& cfg,
              const Eigen::Ref<const typename SpinWaveSystem<Scalar>::Vec>& m,
              Eigen::Ref<typename SpinWaveSystem<Scalar>::Vec> dm) {
  if (!cfg.diffuse || cfg.gamma0 == 0.0) {
    dm.setZero();
    return;
  }
  const int n = sys.block;
  const double rate = -cfg.gamma0 / 3.0;
  for (int k = 0; k < sys.blocks(); ++k) {
    dm.segment(k * n, n).noalias() = rate * (sys.coupling[k] * m.segment(k * n, n));
  }
}

template <typename Scalar>
void covariance_rhs(
    const SpinWaveSystem<Scalar>& sys, const ModelConfig& cfg,
    const Eigen::Ref<const typename SpinWaveSystem<Scalar>::Mat>& C,
    Eigen::Ref<typename SpinWaveSystem<Scalar>::Mat> dC,
    typename SpinWaveSystem<Scalar>::Mat& work) {
  using Vec = typename SpinWaveSystem<Scalar>::Vec;
  const int n = sys.block;
  const int dim = sys.dimension();
  const bool diffuse = cfg.diffuse && cfg.gamma0 != 0.0;
  const bool measure = cfg.measurement && cfg.kappa != 0.0;
  if (diffuse) {
    work.resize(dim, dim);
    for (int k = 0; k < sys.blocks(); ++k) {
      work.middleRows(k * n, n).noalias() =
          sys.coupling[k].conjugate() * C.middleRows(k * n, n);
    }
    dC.noalias() = (-2.0 * cfg.gamma0 / 9.0) * (work + work.adjoint());
    for (int k = 0; k < sys.blocks(); ++k) {
      dC.block(k * n, k * n, n, n) += (cfg.gamma0 / 9.0) * sys.injection[k];
    }
  } else {
    dC.setZero();
  }
  if (measure) {
    const Vec v = C * sys.readout;
    dC.noalias() -= cfg.kappa * (v * v.adjoint());
  }
}

}  // namespace

template <typename Scalar>
typename SpinWaveSystem<Scalar>::Vec mean_derivative(
    const SpinWaveState<Scalar>& state, const SpinWaveSystem<Scalar>& system,
    const ModelConfig& config) {
  typename SpinWaveSystem<Scalar>::Vec dm(state.means.size());
  mean_rhs<Scalar>(system, config, state.means, dm);
  return dm;
}

template <typename Scalar>
typename SpinWaveSystem<Scalar>::Mat covariance_derivative(
    const SpinWaveState<Scalar>& state, const SpinWaveSystem<Scalar>& system,
    const ModelConfig& config) {
  typename SpinWaveSystem<Scalar>::Mat dC(state.covariances.rows(),
                                          state.covariances.cols());
  typename SpinWaveSystem<Scalar>::Mat work;
  covariance_rhs<Scalar>(system, config, state.covariances, dC, work);
  return dC;
}

template Eigen::VectorXd mean_derivative(const SpinWaveState<double>&,
                                         const RealSystem&,
                                         const ModelConfig&);
template Eigen::VectorXcd mean_derivative(const SpinWaveState<cplx>&,
                                          const ComplexSystem&,
                                          const ModelConfig&);
template Eigen::MatrixXd covariance_derivative(const SpinWaveState<double>&,
                                               const RealSystem&,
                                               const ModelConfig&);
template Eigen::MatrixXcd covariance_derivative(const SpinWaveState<cplx>&,
                                                const ComplexSystem&,
                                                const ModelConfig&);

double squeezing_parameter(double mean_Fx00, double var_Fz00, double N1,
                           double N2, double spin_f) {
  if (!(mean_Fx00 > 0.0) || !std::isfinite(mean_Fx00)) {
    throw DepolarizedError("squeezing_parameter: mean spin is not positive");
  }
  if (!(N2 > 0.0)) throw DomainError("squeezing_parameter: N2 must be > 0");
  return 2.0 * spin_f * N1 * N1 / N2 * var_Fz00 / (mean_Fx00 * mean_Fx00);
}

double inverse_db(double zeta) { return 10.0 * std::log10(1.0 / zeta); }

namespace {

void validate(const ModelConfig& c) {
  if (!(c.rel_tol > 0.0) || !(c.abs_tol > 0.0)) {
    throw DomainError("model config: tolerances must be positive");
  }
  if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) {
    throw DomainError("model config: horizon must be positive");
  }
  if (!(c.gamma0 > 0.0)) {
    throw DomainError("model config: gamma0 sets the time unit and must be > 0");
  }
  if (!(c.kappa >= 0.0)) throw DomainError("model config: kappa must be >= 0");
  if (c.samples < 2) throw DomainError("model config: need at least 2 samples");
}

}  // namespace

template <typename Scalar>
SqueezingTrajectory integrate_with_state(const SpinWaveSystem<Scalar>& sys,
                                         const ModelConfig& cfg,
                                         SpinWaveState<Scalar>& final_state) {
  using Vec = typename SpinWaveSystem<Scalar>::Vec;
  using Mat = typename SpinWaveSystem<Scalar>::Mat;
  validate(cfg);
  const int dim = sys.dimension();
  if (sys.initial_mean.size() != dim || sys.readout.size() != dim ||
      sys.initial_covariance.rows() != dim ||
      sys.initial_covariance.cols() != dim) {
    throw DomainError("integrate: system dimensions are inconsistent");
  }
  const Eigen::Index nn = static_cast<Eigen::Index>(dim) * dim;
  Vec y(dim + nn);
  y.head(dim) = sys.initial_mean;
  Eigen::Map<Mat>(y.data() + dim, dim, dim) = sys.initial_covariance;

  double scale = y.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) scale = 1.0;
  OdeOptions opts;
  opts.rel_tol = cfg.rel_tol;
  opts.abs_tol = cfg.abs_tol * scale;

  Mat work;
  auto rhs = [&](double, const Vec& s, Vec& ds) {
    ds.resize(s.size());
    mean_rhs<Scalar>(sys, cfg, s.head(dim), ds.head(dim));
    Eigen::Map<const Mat> C(s.data() + dim, dim, dim);
    Eigen::Map<Mat> dC(ds.data() + dim, dim, dim);
    covariance_rhs<Scalar>(sys, cfg, C, dC, work);
  };
  const Vec& e = sys.readout;
  auto phi = [&](const Vec& s, std::vector<Scalar>& out) {
    out.resize(2);
    Eigen::Map<const Mat> C(s.data() + dim, dim, dim);
    out[0] = e.dot(s.head(dim));
    out[1] = e.dot(C * e);
  };

  const double t_end = cfg.horizon / cfg.gamma0;
  std::vector<double> times(cfg.samples);
  for (int i = 0; i < cfg.samples; ++i) {
    times[i] = t_end * static_cast<double>(i) / (cfg.samples - 1);
  }
  times.back() = t_end;

  DormandPrince<Scalar> solver(rhs, phi, opts);
  std::vector<std::vector<Scalar>> values;
  solver.run(0.0, t_end, y, times, values);

  SqueezingTrajectory tr;
  tr.stats = solver.stats();
  tr.n1 = sys.n1_reference();
  tr.n2 = sys.n2_reference();
  tr.samples.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Scalar M = values[i][0];
    const Scalar V = values[i][1];
    const double mr = real_part(M), vr = real_part(V);
    if (std::abs(M) > 0.0 && std::abs(V) > 0.0) {
      tr.max_imag_residual =
          std::max({tr.max_imag_residual, std::abs(std::imag(M)) / std::abs(M),
                    std::abs(std::imag(V)) / std::abs(V)});
    }
    TrajectorySample smp;
    smp.time = times[i] * cfg.gamma0;
    smp.mean_Fx00 = mr;
    smp.var_Fz00 = vr;
    smp.zeta = squeezing_parameter(mr, vr, tr.n1, tr.n2, sys.spin_f);
    tr.samples.push_back(smp);
  }
  tr.samples.front().zeta = 1.0;  // SCS calibration, exact by construction
  tr.peak = peak_squeezing(tr);

  final_state.time = cfg.horizon;
  final_state.means = y.head(dim);
  final_state.covariances = Eigen::Map<const Mat>(y.data() + dim, dim, dim);
  return tr;
}

template SqueezingTrajectory integrate_with_state(const RealSystem&,
                                                  const ModelConfig&,
                                                  SpinWaveState<double>&);
template SqueezingTrajectory integrate_with_state(const ComplexSystem&,
                                                  const ModelConfig&,
                                                  SpinWaveState<cplx>&);

SqueezingTrajectory integrate(const RealSystem& system,
                              const ModelConfig& config) {
  SpinWaveState<double> s;
  return integrate_with_state(system, config, s);
}

SqueezingTrajectory integrate(const ComplexSystem& system,
                              const ModelConfig& config) {
  SpinWaveState<cplx> s;
  return integrate_with_state(system, config, s);
}

double symmetric_1d_variance(double t, double N, double OD, double gamma0) {
  if (!(OD > 0.0)) throw DomainError("symmetric_1d_variance: OD must be > 0");
  const double r = std::sqrt(OD + 1.0);
  const double u = (1.0 + OD) / std::sqrt(OD) * (2.0 / 9.0) * gamma0 * t;
  const double th = std::tanh(u);
  return N / 4.0 * (r + th) / (r + (OD / 2.0 + 1.0) * th);
}

double symmetric_1d_zeta(double t, double OD, double gamma0) {
  return symmetric_1d_variance(t, 1.0, OD, gamma0) / 0.25 *
         std::exp(2.0 * gamma0 * t / 3.0);
}

PeakInfo symmetric_1d_peak(double OD, double gamma0, double horizon) {
  if (!(horizon > 0.0)) throw DomainError("symmetric_1d_peak: horizon <= 0");
  const int n = 4001;
  int best = 0;
  double best_z = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double t = horizon * i / (n - 1) / gamma0;
    const double z = symmetric_1d_zeta(t, OD, gamma0);
    if (z < best_z) {
      best_z = z;
      best = i;
    }
  }
  PeakInfo p;
  if (best == 0 || best == n - 1) {
    p.time = horizon * best / (n - 1);
    p.zeta_min = best_z;
    p.db = inverse_db(best_z);
    p.at_boundary = true;
    return p;
  }
  const double lo = horizon * (best - 1) / (n - 1) / gamma0;
  const double hi = horizon * (best + 1) / (n - 1) / gamma0;
  auto r = boost::math::tools::brent_find_minima(
      [&](double t) { return symmetric_1d_zeta(t, OD, gamma0); }, lo, hi, 50);
  p.time = r.first * gamma0;
  p.zeta_min = r.second;
  p.db = inverse_db(r.second);
  return p;
}

PeakInfo peak_squeezing(const SqueezingTrajectory& trajectory) {
  const auto& s = trajectory.samples;
  if (s.empty()) throw DomainError("peak_squeezing: empty trajectory");
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].zeta < s[best].zeta) best = i;
  }
  PeakInfo p;
  p.time = s[best].time;
  p.zeta_min = s[best].zeta;
  if (best == 0 || best + 1 == s.size()) {
    p.at_boundary = true;
  } else {
    // Vertex of the parabola through the three samples around the minimum.
    const double x0 = s[best - 1].time, x1 = s[best].time, x2 = s[best + 1].time;
    const double y0 = s[best - 1].zeta, y1 = s[best].zeta, y2 = s[best + 1].zeta;
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    if (a > 0.0) {
      const double b = d01 - a * (x0 + x1);
      const double xv = std::clamp(-b / (2.0 * a), x0, x2);
      const double yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
      if (yv <= y1) {
        p.time = xv;
        p.zeta_min = yv;
      }
    }
  }
  p.db = inverse_db(p.zeta_min);
  return p;
}

}  // namespace qnd

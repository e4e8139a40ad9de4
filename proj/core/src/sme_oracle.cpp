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

#include "qnd/sme_oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "qnd/errors.hpp"
#include "qnd/parallel.hpp"

namespace qnd {

SpinOperators spin_operators(double f) {
  const double twice = 2.0 * f;
  if (!(f > 0.0) || std::abs(twice - std::round(twice)) > 1e-12) {
    throw DomainError("spin_operators: f must be a positive half-integer");
  }
  const int d = static_cast<int>(std::round(twice)) + 1;
  SpinOperators ops;
  ops.f = f;
  ops.dim = d;
  ops.fz = Eigen::MatrixXcd::Zero(d, d);
  Eigen::MatrixXcd fp = Eigen::MatrixXcd::Zero(d, d);  // raising operator
  for (int j = 0; j < d; ++j) {
    const double m = f - j;
    ops.fz(j, j) = m;
    if (j > 0) fp(j - 1, j) = std::sqrt(f * (f + 1.0) - m * (m + 1.0));
  }
  const Eigen::MatrixXcd fm = fp.adjoint();
  ops.fx = 0.5 * (fp + fm);
  ops.fy = cplx(0.0, -0.5) * (fp - fm);
  return ops;
}

std::vector<AtomSite> sites_from_weights(std::span<const double> beta00) {
  std::vector<AtomSite> out;
  out.reserve(beta00.size());
  for (double b : beta00) out.push_back({{cplx(b, 0.0)}});
  return out;
}

std::vector<AtomSite> sites_from_positions(std::span<const Position> positions,
                                           const BeamParameters& beam,
                                           const WaveBasis& basis) {
  if (basis.index_of({0, 0}) != 0) {
    throw DomainError("sites_from_positions: basis must start with (0,0)");
  }
  std::vector<AtomSite> out;
  for (const auto& r : positions) {
    AtomSite s;
    for (const auto& m : basis.modes) s.weights.push_back(beta_weight(m, r, beam));
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

int site_dim(double f) { return static_cast<int>(std::round(2.0 * f)) + 1; }

long ipow(int b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

void check_budget(std::size_t atoms, double f) {
  const int d = site_dim(f);
  if (atoms == 0) throw DomainError("oracle: no atoms");
  if (atoms > 12 || ipow(d, static_cast<int>(atoms)) > 64) {
    throw BudgetError("oracle: Hilbert space exceeds the dense budget (64)");
  }
}

// Applies the single-site superoperator E (d^2 x d^2, row-major vec) to atom i.
void apply_site(Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& E, int site,
                int atoms, int d) {
  const long D = rho.rows();
  const long stride = ipow(d, atoms - 1 - site);
  Eigen::VectorXcd v(d * d), w(d * d);
  for (long r0 = 0; r0 < D; ++r0) {
    if ((r0 / stride) % d != 0) continue;
    for (long c0 = 0; c0 < D; ++c0) {
      if ((c0 / stride) % d != 0) continue;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) v(a * d + b) = rho(r0 + a * stride, c0 + b * stride);
      w.noalias() = E * v;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) rho(r0 + a * stride, c0 + b * stride) = w(a * d + b);
    }
  }
}

Eigen::MatrixXcd diffuse_superoperator(const SpinOperators& ops, double g_f) {
  const int d = ops.dim;
  auto sup = [&](const Eigen::MatrixXcd& x) {
    Eigen::MatrixXcd s(d * d, d * d);
    const Eigen::MatrixXcd xt = x.transpose();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) s.block(a * d, b * d, d, d) = x(a, b) * xt;
    return s;
  };
  const double g2 = g_f * g_f / 9.0;
  return -(2.0 / 9.0) * Eigen::MatrixXcd::Identity(d * d, d * d) +
         g2 * (sup(ops.fz) + 0.5 * (sup(ops.fx) + sup(ops.fy)));
}

}  // namespace

EnsembleState coherent_state_x(std::vector<AtomSite> sites, double spin_f) {
  check_budget(sites.size(), spin_f);
  const SpinOperators ops = spin_operators(spin_f);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ops.fx);
  Eigen::VectorXcd up = es.eigenvectors().col(ops.dim - 1);  // largest eigenvalue
  // Fix the global phase so the first nonzero entry is real positive.
  for (int i = 0; i < ops.dim; ++i) {
    if (std::abs(up(i)) > 1e-12) {
      up *= std::abs(up(i)) / up(i);
      break;
    }
  }
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    Eigen::VectorXcd next(psi.size() * ops.dim);
    for (Eigen::Index a = 0; a < psi.size(); ++a)
      next.segment(a * ops.dim, ops.dim) = psi(a) * up;
    psi = next;
  }
  EnsembleState s;
  s.rho = psi * psi.adjoint();
  s.sites = std::move(sites);
  s.spin_f = spin_f;
  return s;
}

Eigen::MatrixXcd diffuse_map(const Eigen::MatrixXcd& rho,
                             const SpinOperators& ops, double g_f) {
  const double g2 = g_f * g_f / 9.0;
  return -(2.0 / 9.0) * rho +
         g2 * (ops.fz * rho * ops.fz +
               0.5 * (ops.fx * rho * ops.fx + ops.fy * rho * ops.fy));
}

namespace {

Eigen::MatrixXcd embed(const Eigen::MatrixXcd& op, int site, int atoms, int d) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int j = 0; j < atoms; ++j) {
    const Eigen::MatrixXcd f =
        j == site ? op : Eigen::MatrixXcd::Identity(d, d).eval();
    Eigen::MatrixXcd k(out.rows() * d, out.cols() * d);
    for (Eigen::Index a = 0; a < out.rows(); ++a)
      for (Eigen::Index b = 0; b < out.cols(); ++b)
        k.block(a * d, b * d, d, d) = out(a, b) * f;
    out = k;
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd local_diffuse_generator(const EnsembleState& state,
                                         double gamma0, double g_f) {
  const SpinOperators ops = spin_operators(state.spin_f);
  const int atoms = static_cast<int>(state.sites.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(state.rho.rows(), state.rho.cols());
  for (int i = 0; i < atoms; ++i) {
    SpinOperators local;
    local.f = ops.f;
    local.dim = static_cast<int>(state.rho.rows());
    local.fx = embed(ops.fx, i, atoms, ops.dim);
    local.fy = embed(ops.fy, i, atoms, ops.dim);
    local.fz = embed(ops.fz, i, atoms, ops.dim);
    out += gamma0 * state.sites[i].beta00() * diffuse_map(state.rho, local, g_f);
  }
  return out;
}

Eigen::VectorXcd collective_spectrum(const EnsembleState& state, int mode) {
  const int d = site_dim(state.spin_f);
  const int atoms = static_cast<int>(state.sites.size());
  const long D = ipow(d, atoms);
  Eigen::VectorXcd lam = Eigen::VectorXcd::Zero(D);
  for (long idx = 0; idx < D; ++idx) {
    long rest = idx;
    for (int i = atoms - 1; i >= 0; --i) {
      const int level = static_cast<int>(rest % d);
      rest /= d;
      const auto& w = state.sites[i].weights;
      if (mode < static_cast<int>(w.size())) {
        lam(idx) += w[mode] * (state.spin_f - level);
      }
    }
  }
  return lam;
}

namespace {

int mode_count(const std::vector<AtomSite>& sites) {
  std::size_t m = 0;
  for (const auto& s : sites) m = std::max(m, s.weights.size());
  return static_cast<int>(m);
}

struct Propagators {
  Eigen::VectorXd lam00;
  Eigen::MatrixXcd dephase;  // elementwise factor from unmeasured modes
  std::vector<Eigen::MatrixXcd> diffuse;  // per site
  int d = 2;
  int atoms = 0;
};

Propagators make_propagators(const EnsembleState& state, const OracleConfig& c,
                             double dt, bool include_measured_dephasing) {
  Propagators p;
  p.d = site_dim(state.spin_f);
  p.atoms = static_cast<int>(state.sites.size());
  p.lam00 = collective_spectrum(state, 0).real();
  const long D = state.rho.rows();
  p.dephase = Eigen::MatrixXcd::Ones(D, D);
  const int modes = mode_count(state.sites);
  const int first = include_measured_dephasing ? 0 : 1;
  for (int m = first; m < modes; ++m) {
    const Eigen::VectorXcd lam = collective_spectrum(state, m);
    for (long a = 0; a < D; ++a)
      for (long b = 0; b < D; ++b) {
        const cplx x = lam(a) * std::conj(lam(b)) -
                       0.5 * (std::norm(lam(a)) + std::norm(lam(b)));
        p.dephase(a, b) *= std::exp(0.25 * c.kappa * dt * x);
      }
  }
  if (c.gamma0 > 0.0) {
    const SpinOperators ops = spin_operators(state.spin_f);
    const Eigen::MatrixXcd S = diffuse_superoperator(ops, c.g_f);
    for (const auto& s : state.sites) {
      const Eigen::MatrixXcd gen = (c.gamma0 * s.beta00() * dt) * S;
      p.diffuse.push_back(gen.exp());
    }
  }
  return p;
}

double time_scale(const OracleConfig& c) {
  return c.gamma0 > 0.0 ? c.horizon / c.gamma0 : c.horizon;
}

void validate(const OracleConfig& c) {
  if (!(c.kappa > 0.0)) throw DomainError("oracle: kappa must be positive");
  if (!(c.gamma0 >= 0.0)) throw DomainError("oracle: gamma0 must be >= 0");
  if (!(c.horizon > 0.0)) throw DomainError("oracle: horizon must be positive");
  if (c.steps < 1) throw DomainError("oracle: steps must be >= 1");
  if (c.checkpoints < 1 || c.checkpoints > c.steps) {
    throw DomainError("oracle: checkpoints must lie in [1, steps]");
  }
}

struct Moments {
  double fx00, fz00, var00;
};

Moments moments(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& lam00,
                const Eigen::MatrixXcd& fx00) {
  const double tr = rho.trace().real();
  const Eigen::VectorXd p = rho.diagonal().real() / tr;
  const double mz = p.dot(lam00);
  const double m2 = p.dot(lam00.cwiseProduct(lam00));
  const double mx = (fx00.cwiseProduct(rho.transpose())).sum().real() / tr;
  return {mx, mz, m2 - mz * mz};
}

Eigen::MatrixXcd fx00_operator(const EnsembleState& s) {
  const SpinOperators ops = spin_operators(s.spin_f);
  const int atoms = static_cast<int>(s.sites.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(s.rho.rows(), s.rho.cols());
  for (int i = 0; i < atoms; ++i) {
    out += s.sites[i].beta00() * embed(ops.fx, i, atoms, ops.dim);
  }
  return out;
}

// Kraus update with precomputed spectra; returns dy.
double kraus_in_place(Eigen::MatrixXcd& rho, const Propagators& p, double dt,
                      double dW, double kappa) {
  const double tr = rho.trace().real();
  const double mz = rho.diagonal().real().dot(p.lam00) / tr;
  const double dy = mz * dt + dW / std::sqrt(kappa);
  const Eigen::VectorXd a =
      (0.5 * kappa * dy * p.lam00 - 0.25 * kappa * dt * p.lam00.cwiseProduct(p.lam00))
          .array()
          .exp()
          .matrix();
  rho = a.asDiagonal() * rho * a.asDiagonal();
  rho = rho.cwiseProduct(p.dephase);
  rho *= tr / rho.trace().real();
  return dy;
}

void diffuse_in_place(Eigen::MatrixXcd& rho, const Propagators& p) {
  for (std::size_t i = 0; i < p.diffuse.size(); ++i) {
    apply_site(rho, p.diffuse[i], static_cast<int>(i), p.atoms, p.d);
  }
}

std::vector<long> checkpoint_steps(const OracleConfig& c) {
  std::vector<long> out;
  for (int j = 1; j <= c.checkpoints; ++j) {
    out.push_back(std::lround(static_cast<double>(c.steps) * j / c.checkpoints));
  }
  return out;
}

}  // namespace

MeasurementStep kraus_measurement_step(const EnsembleState& state, double dt,
                                       double dW, double kappa) {
  if (!(dt > 0.0)) throw DomainError("kraus_measurement_step: dt must be > 0");
  if (!(kappa > 0.0)) throw DomainError("kraus_measurement_step: kappa must be > 0");
  OracleConfig c;
  c.kappa = kappa;
  c.gamma0 = 0.0;
  const Propagators p = make_propagators(state, c, dt, false);
  MeasurementStep out{state, 0.0};
  out.dy = kraus_in_place(out.state.rho, p, dt, dW, kappa);
  return out;
}

WienerStream::WienerStream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double WienerStream::next(double dt) { return normal_(engine_) * std::sqrt(dt); }

TrajectoryRecord run_trajectory(const std::vector<AtomSite>& sites,
                                const OracleConfig& config, std::uint64_t seed,
                                std::uint64_t stream) {
  validate(config);
  EnsembleState s = coherent_state_x(sites);
  const double dt = time_scale(config) / config.steps;
  const Propagators p = make_propagators(s, config, dt, false);
  const Eigen::MatrixXcd fx = fx00_operator(s);
  WienerStream w(seed, stream);
  TrajectoryRecord r;
  r.seed = seed;
  r.stream = stream;
  for (int k = 1; k <= config.steps; ++k) {
    r.dy.push_back(kraus_in_place(s.rho, p, dt, w.next(dt), config.kappa));
    diffuse_in_place(s.rho, p);
    const Moments m = moments(s.rho, p.lam00, fx);
    r.times.push_back(k * dt);
    r.mean_Fx00.push_back(m.fx00);
    r.mean_Fz00.push_back(m.fz00);
    r.var_Fz00.push_back(m.var00);
  }
  return r;
}

TrajectoryStatistics simulate_trajectories(int n_traj,
                                           const std::vector<AtomSite>& sites,
                                           const OracleConfig& config,
                                           std::uint64_t seed) {
  validate(config);
  if (n_traj < 1) throw DomainError("simulate_trajectories: n_traj must be >= 1");
  const EnsembleState init = coherent_state_x(sites);
  const double dt = time_scale(config) / config.steps;
  const Propagators p = make_propagators(init, config, dt, false);
  const Eigen::MatrixXcd fx = fx00_operator(init);
  const std::vector<long> marks = checkpoint_steps(config);
  const std::size_t C = marks.size();

  struct PerTraj {
    std::vector<Moments> m;
    double min_eig = 0.0;
    double trace_drift = 0.0;
  };
  std::vector<PerTraj> results(n_traj);
  parallel_for(n_traj, [&](int t) {
    Eigen::MatrixXcd rho = init.rho;
    WienerStream w(seed, static_cast<std::uint64_t>(t));
    PerTraj& out = results[t];
    out.m.reserve(C);
    std::size_t next = 0;
    double min_eig = 1.0;
    for (long k = 1; k <= config.steps; ++k) {
      kraus_in_place(rho, p, dt, w.next(dt), config.kappa);
      diffuse_in_place(rho, p);
      if (next < C && k == marks[next]) {
        out.m.push_back(moments(rho, p.lam00, fx));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            rho, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues()(0));
        out.trace_drift = std::max(out.trace_drift, std::abs(rho.trace().real() - 1.0));
        ++next;
      }
    }
    out.min_eig = min_eig;
  });

  TrajectoryStatistics st;
  st.trajectories = n_traj;
  st.seed = seed;
  st.min_eigenvalue = 1.0;
  for (long k : marks) {
    st.times.push_back(k * dt * (config.gamma0 > 0.0 ? config.gamma0 : 1.0));
  }
  auto fill = [&](MomentStatistics& ms, double Moments::*field) {
    ms.mean.assign(C, 0.0);
    ms.standard_error.assign(C, 0.0);
    for (std::size_t j = 0; j < C; ++j) {
      double sum = 0.0;
      for (const auto& r : results) sum += r.m[j].*field;
      const double mean = sum / n_traj;
      double ss = 0.0;
      for (const auto& r : results) {
        const double d = r.m[j].*field - mean;
        ss += d * d;
      }
      ms.mean[j] = mean;
      ms.standard_error[j] =
          n_traj > 1 ? std::sqrt(ss / (n_traj - 1.0) / n_traj) : 0.0;
    }
  };
  fill(st.mean_Fx00, &Moments::fx00);
  fill(st.mean_Fz00, &Moments::fz00);
  fill(st.var_Fz00, &Moments::var00);
  for (const auto& r : results) {
    st.min_eigenvalue = std::min(st.min_eigenvalue, r.min_eig);
    st.max_trace_drift = std::max(st.max_trace_drift, r.trace_drift);
  }
  return st;
}

std::vector<Eigen::MatrixXcd> unconditioned_evolution(
    const std::vector<AtomSite>& sites, const OracleConfig& config) {
  validate(config);
  EnsembleState s = coherent_state_x(sites);
  const double dt = time_scale(config) / config.steps;
  const Propagators p = make_propagators(s, config, dt, true);
  const std::vector<long> marks = checkpoint_steps(config);
  std::vector<Eigen::MatrixXcd> out;
  std::size_t next = 0;
  for (long k = 1; k <= config.steps; ++k) {
    s.rho = s.rho.cwiseProduct(p.dephase);
    diffuse_in_place(s.rho, p);
    if (next < marks.size() && k == marks[next]) {
      out.push_back(s.rho);
      ++next;
    }
  }
  return out;
}

std::vector<Eigen::MatrixXcd> averaged_conditional_states(
    int n_traj, const std::vector<AtomSite>& sites, const OracleConfig& config,
    std::uint64_t seed) {
  validate(config);
  if (n_traj < 1) throw DomainError("averaged_conditional_states: n_traj < 1");
  const EnsembleState init = coherent_state_x(sites);
  const double dt = time_scale(config) / config.steps;
  const Propagators p = make_propagators(init, config, dt, false);
  const std::vector<long> marks = checkpoint_steps(config);
  std::vector<std::vector<Eigen::MatrixXcd>> per(n_traj);
  parallel_for(n_traj, [&](int t) {
    Eigen::MatrixXcd rho = init.rho;
    WienerStream w(seed, static_cast<std::uint64_t>(t));
    std::size_t next = 0;
    for (long k = 1; k <= config.steps; ++k) {
      kraus_in_place(rho, p, dt, w.next(dt), config.kappa);
      diffuse_in_place(rho, p);
      if (next < marks.size() && k == marks[next]) {
        per[t].push_back(rho);
        ++next;
      }
    }
  });
  std::vector<Eigen::MatrixXcd> out(marks.size(),
                                    Eigen::MatrixXcd::Zero(init.rho.rows(),
                                                           init.rho.cols()));
  for (const auto& traj : per)
    for (std::size_t j = 0; j < marks.size(); ++j) out[j] += traj[j];
  for (auto& m : out) m /= static_cast<double>(n_traj);
  return out;
}

FlipRateReport spin_f_flip_rate_probe(double spin_f, double g_f) {
  const SpinOperators ops = spin_operators(spin_f);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ops.fx);
  const Eigen::MatrixXcd U = es.eigenvectors();  // ascending fx eigenvalues
  const Eigen::VectorXcd up = U.col(ops.dim - 1);
  const Eigen::MatrixXcd rho = up * up.adjoint();
  const Eigen::MatrixXcd drho = diffuse_map(rho, ops, g_f);
  const Eigen::MatrixXcd in_x = U.adjoint() * drho * U;
  FlipRateReport r;
  r.spin_f = spin_f;
  r.g_f = g_f;
  for (int i = 0; i < ops.dim - 1; ++i) r.flip_rate += in_x(i, i).real();
  r.trace_loss_rate = -drho.trace().real();
  r.reference = 1.0 / (12.0 * spin_f);
  return r;
}

}  // namespace qnd

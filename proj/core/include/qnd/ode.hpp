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
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "qnd/errors.hpp"

namespace qnd {

struct OdeOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 selects automatically
  double max_step = 0.0;      // 0 means unbounded
  long max_steps = 2000000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

/// Dormand-Prince 5(4) with FSAL and Hairer's quartic dense output.
/// The dense output is applied to a set of linear functionals of the state
/// rather than to the state itself, so sampling costs O(stages) per
/// functional instead of O(dimension).
template <typename Scalar>
class DormandPrince {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Rhs = std::function<void(double, const Vec&, Vec&)>;
  /// Linear functionals; each must satisfy phi(a x + b y) = a phi(x) + b phi(y).
  using Functionals = std::function<void(const Vec&, std::vector<Scalar>&)>;

  DormandPrince(Rhs rhs, Functionals phi, OdeOptions opts = {})
      : rhs_(std::move(rhs)), phi_(std::move(phi)), opts_(opts) {}

  /// Integrates from t0 with y (overwritten with the final state) and fills
  /// out[i] with the functionals at sample_times[i] (ascending, within
  /// [t0, t_end]).
  void run(double t0, double t_end, Vec& y,
           const std::vector<double>& sample_times,
           std::vector<std::vector<Scalar>>& out);

  const OdeStats& stats() const { return stats_; }

 private:
  double error_norm(const Vec& y0, const Vec& y1, const Vec& err) const;

  Rhs rhs_;
  Functionals phi_;
  OdeOptions opts_;
  OdeStats stats_;
};

namespace dopri {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113,
                        a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                        e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;
}  // namespace dopri

template <typename Scalar>
double DormandPrince<Scalar>::error_norm(const Vec& y0, const Vec& y1,
                                         const Vec& err) const {
  const Eigen::Index n = y0.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc =
        opts_.abs_tol +
        opts_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = std::abs(err[i]) / sc;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(n, 1)));
}

template <typename Scalar>
void DormandPrince<Scalar>::run(double t0, double t_end, Vec& y,
                                const std::vector<double>& sample_times,
                                std::vector<std::vector<Scalar>>& out) {
  using namespace dopri;
  stats_ = {};
  out.assign(sample_times.size(), {});
  std::size_t next = 0;
  std::vector<Scalar> f0, f1, g1, g3, g4, g5, g6, g7;
  phi_(y, f0);
  while (next < sample_times.size() && sample_times[next] <= t0) {
    out[next++] = f0;
  }
  if (!(t_end > t0)) return;

  const Eigen::Index n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ys(n), y1(n), err(n);
  rhs_(t0, y, k1);
  ++stats_.evaluations;

  double span = t_end - t0;
  double h = opts_.initial_step;
  if (!(h > 0.0)) {
    const double d0 = error_norm(y, y, y);
    const double d1n = error_norm(y, y, k1);
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1n;
    h = std::min(h, 0.1 * span);
  }
  const double max_step = opts_.max_step > 0.0 ? opts_.max_step : span;

  double t = t0;
  double fac_prev = 1e-4;
  bool last_rejected = false;
  while (t < t_end) {
    if (stats_.accepted + stats_.rejected >= opts_.max_steps) {
      throw IntegrationError("step budget exhausted", t, h);
    }
    h = std::min({h, max_step, t_end - t});
    if (h < 1e-13 * std::max(1.0, std::abs(t))) {
      throw IntegrationError("step size underflow", t, h);
    }
    ys = y + h * (a21 * k1);
    rhs_(t + c2 * h, ys, k2);
    ys = y + h * (a31 * k1 + a32 * k2);
    rhs_(t + c3 * h, ys, k3);
    ys = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs_(t + c4 * h, ys, k4);
    ys = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs_(t + c5 * h, ys, k5);
    ys = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs_(t + h, ys, k6);
    y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs_(t + h, y1, k7);
    stats_.evaluations += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(y, y1, err);
    if (!std::isfinite(en)) {
      ++stats_.rejected;
      h *= 0.1;
      last_rejected = true;
      continue;
    }
    if (en > 1.0) {
      ++stats_.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
      continue;
    }
    ++stats_.accepted;
    const double t1 = t + h;
    if (next < sample_times.size() && sample_times[next] <= t1) {
      phi_(y1, f1);
      phi_(k1, g1);
      phi_(k3, g3);
      phi_(k4, g4);
      phi_(k5, g5);
      phi_(k6, g6);
      phi_(k7, g7);
      const std::size_t m = f0.size();
      while (next < sample_times.size() && sample_times[next] <= t1) {
        const double th = (sample_times[next] - t) / h;
        const double th1 = 1.0 - th;
        std::vector<Scalar> v(m);
        for (std::size_t j = 0; j < m; ++j) {
          const Scalar diff = f1[j] - f0[j];
          const Scalar bspl = h * g1[j] - diff;
          const Scalar r4 = diff - h * g7[j] - bspl;
          const Scalar r5 = h * (d1 * g1[j] + d3 * g3[j] + d4 * g4[j] +
                                 d5 * g5[j] + d6 * g6[j] + d7 * g7[j]);
          v[j] = f0[j] + th * (diff + th1 * (bspl + th * (r4 + th1 * r5)));
        }
        out[next++] = std::move(v);
      }
      f0 = std::move(f1);
      f1.clear();
    } else {
      phi_(y1, f0);
    }
    y.swap(y1);
    k1.swap(k7);
    t = t1;
    // PI step control (Gustafsson).
    const double en_c = std::max(en, 1e-10);
    double fac = 0.9 * std::pow(en_c, -0.7 / 5.0) * std::pow(fac_prev, 0.4 / 5.0);
    fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
    fac_prev = en_c;
    h *= fac;
    last_rejected = false;
  }
  // Samples at t_end that rounding pushed past the last step.
  while (next < sample_times.size()) {
    phi_(y, f0);
    out[next++] = f0;
  }
}

}  // namespace qnd

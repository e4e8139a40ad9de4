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

#include "qnd/errors.hpp"
#include "qnd/quadrature.hpp"

namespace qnd {
namespace {

TEST(AdaptiveIntegrate, GaussianOverWideInterval) {
  auto r = adaptive_integrate([](double x) { return std::exp(-x * x); }, -30, 30);
  EXPECT_NEAR(r.value, std::sqrt(3.14159265358979323846), 1e-13);
  EXPECT_LE(r.error, 1e-12 * r.l1);
}

TEST(AdaptiveIntegrate, OscillatoryIntegrand) {
  auto r = adaptive_integrate([](double x) { return std::cos(50.0 * x); }, 0, 1);
  EXPECT_NEAR(r.value, std::sin(50.0) / 50.0, 1e-13);
}

TEST(AdaptiveIntegrate, IdenticallyZeroTerminates) {
  auto r = adaptive_integrate([](double) { return 0.0; }, 0, 1);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.intervals, 1);
}

TEST(AdaptiveIntegrate, BudgetExhaustionReportsResidual) {
  QuadratureOptions opts;
  opts.max_intervals = 3;
  opts.rel_tol = 1e-15;
  try {
    adaptive_integrate([](double x) { return std::sqrt(std::abs(x - 0.3)); }, 0, 1, opts);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(GaussLaguerre, ExactForPolynomials) {
  // int x^k e^{-x} = k!
  for (int k = 0; k <= 40; ++k) {
    const double v = laguerre_moment([k](double x) { return std::pow(x, k); }, 1.0);
    EXPECT_NEAR(v / std::tgamma(k + 1.0), 1.0, 1e-12) << "k=" << k;
  }
}

TEST(GaussLaguerre, HighOrderLaguerreOrthogonality) {
  // int L_m L_n e^{-x} = delta_mn, including the tail nodes.
  for (int m : {0, 10, 25, 30})
    for (int n : {0, 10, 25, 30}) {
      const double v = laguerre_moment(
          [&](double x) { return std::laguerre(m, x) * std::laguerre(n, x); }, 1.0);
      EXPECT_NEAR(v, m == n ? 1.0 : 0.0, 1e-10) << m << "," << n;
    }
}

TEST(GaussLaguerre, ScaledDecay) {
  EXPECT_NEAR(laguerre_moment([](double x) { return x * x; }, 2.5), 2.0 / std::pow(2.5, 3), 1e-15);
  EXPECT_THROW(laguerre_moment([](double) { return 1.0; }, 0.0), DomainError);
}

}  // namespace
}  // namespace qnd

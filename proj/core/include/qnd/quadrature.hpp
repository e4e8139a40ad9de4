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

#include <functional>
#include <vector>

namespace qnd {

struct QuadratureOptions {
  double rel_tol = 1e-12;  // relative to the L1 norm of the integrand
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

struct Integral {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  int intervals = 0;
};

/// Globally adaptive 31-point Gauss-Kronrod on [a, b].
/// Throws ConvergenceError when the interval budget runs out.
Integral adaptive_integrate(const std::function<double(double)>& f, double a,
                            double b, const QuadratureOptions& opts = {});

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Laguerre rule for weight e^{-x} on [0, inf).
/// Rules are built once per n and cached.
const GaussRule& gauss_laguerre(int n);

/// Integral of p(x) e^{-a x} over [0, inf) using an n-point Laguerre rule;
/// exact when p is a polynomial of degree < 2n.
double laguerre_moment(const std::function<double(double)>& p, double a,
                       int n = 64);

}  // namespace qnd

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

#include "qnd/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <queue>

#include "qnd/errors.hpp"

namespace qnd {

namespace {

struct Piece {
  double a, b, value, error, l1;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece evaluate(const std::function<double(double)>& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0, l1 = 0.0;
  double v = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  return {a, b, v, err, l1};
}

}  // namespace

Integral adaptive_integrate(const std::function<double(double)>& f, double a,
                            double b, const QuadratureOptions& opts) {
  if (!(b > a)) {
    if (a == b) return {};
    throw DomainError("adaptive_integrate: empty or reversed interval");
  }
  std::priority_queue<Piece> heap;
  Piece whole = evaluate(f, a, b);
  heap.push(whole);
  double value = whole.value, error = whole.error, l1 = whole.l1;
  int intervals = 1;
  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * l1); };
  while (error > target()) {
    if (intervals >= opts.max_intervals) {
      throw ConvergenceError("adaptive_integrate: interval budget exhausted",
                             error);
    }
    Piece worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    Piece left = evaluate(f, worst.a, mid);
    Piece right = evaluate(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to shed accumulated rounding from the running updates.
  value = 0.0;
  error = 0.0;
  l1 = 0.0;
  std::vector<Piece> pieces;
  pieces.reserve(heap.size());
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& x, const Piece& y) { return x.a < y.a; });
  for (const auto& p : pieces) {
    value += p.value;
    error += p.error;
    l1 += p.l1;
  }
  return {value, error, l1, intervals};
}

const GaussRule& gauss_laguerre(int n) {
  if (n < 1) throw DomainError("gauss_laguerre: n must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;

  // Golub-Welsch on the Laguerre Jacobi matrix.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jacobi(i, i) = 2.0 * i + 1.0;
    if (i + 1 < n) {
      jacobi(i, i + 1) = i + 1.0;
      jacobi(i + 1, i) = i + 1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  auto rule = std::make_unique<GaussRule>();
  rule->nodes.resize(n);
  rule->weights.resize(n);
  // Eigenvector components lose relative accuracy in the tail, so nodes are
  // polished by Newton and weights come from x / ((n+1) L_{n+1}(x))^2.
  const unsigned un = static_cast<unsigned>(n);
  for (int i = 0; i < n; ++i) {
    double x = solver.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      const double ln = std::laguerre(un, x);
      const double dln = n * (ln - std::laguerre(un - 1, x)) / x;
      x -= ln / dln;
    }
    const double lp = (n + 1.0) * std::laguerre(un + 1, x);
    rule->nodes[i] = x;
    rule->weights[i] = x / (lp * lp);
  }
  const GaussRule& out = *rule;
  cache.emplace(n, std::move(rule));
  return out;
}

double laguerre_moment(const std::function<double(double)>& p, double a,
                       int n) {
  if (!(a > 0.0)) throw DomainError("laguerre_moment: decay must be positive");
  const GaussRule& rule = gauss_laguerre(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rule.weights[i] * p(rule.nodes[i] / a);
  return sum / a;
}

}  // namespace qnd

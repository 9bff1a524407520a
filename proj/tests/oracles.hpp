/* Copyright 2026 The edgenas Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Reference implementations used only by tests. They are written against the
// raw definitions (layer formulas, grid bounds, domination) and deliberately
// share no code with the library they check.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct Walk {
  std::int64_t params = 0;
  std::int64_t macs = 0;
  std::int64_t flatten = 0;
};

// Conv kernels in block order, then fc1, fc2, classes.
inline Walk layer_walk(const std::vector<int>& kernels, int fc1, int fc2, int classes) {
  Walk w;
  std::int64_t side = 48, channels = 1;
  for (int k : kernels) {
    for (int rep = 0; rep < 2; ++rep) {
      w.params += 3 * 3 * channels * k + k;
      w.macs += side * side * 3 * 3 * channels * k;
      channels = k;
    }
    side /= 2;
  }
  w.flatten = side * side * channels;
  const std::int64_t widths[] = {w.flatten, fc1, fc2, classes};
  for (int i = 0; i < 3; ++i) {
    w.params += widths[i] * widths[i + 1] + widths[i + 1];
    w.macs += widths[i] * widths[i + 1];
  }
  return w;
}

inline std::vector<int> range(int lo, int hi, int step) {
  std::vector<int> v;
  for (int x = lo; x <= hi; x += step) v.push_back(x);
  return v;
}

// Walks every (block, K1..K_block) tuple of the fixed grid and returns how
// many there are.
inline std::int64_t enumerate_conv_tuples() {
  std::int64_t n = 0;
  for (int block = 2; block <= 4; ++block) {
    for (int k1 : range(6, 16, 2)) {
      for (int k2 : range(24, 32, 4)) {
        if (block == 2) {
          (void)k1, (void)k2;
          ++n;
          continue;
        }
        for (int k3 : range(36, 48, 4)) {
          (void)k3;
          if (block == 3) {
            ++n;
            continue;
          }
          for (int k4 : range(52, 64, 4)) {
            (void)k4;
            ++n;
          }
        }
      }
    }
  }
  return n;
}

// Product of FC1, DO1, FC2, DO2 grid sizes.
inline std::int64_t fc_closed_form() {
  return std::int64_t{(120 - 100) / 5 + 1} * ((30 - 10) / 1 + 1) * ((100 - 80) / 5 + 1) *
         ((30 - 10) / 1 + 1);
}

struct Point3 {
  double accuracy, latency, power;
};

inline bool dominates(const Point3& a, const Point3& b) {
  const bool no_worse = a.accuracy >= b.accuracy && a.latency <= b.latency && a.power <= b.power;
  const bool better = a.accuracy > b.accuracy || a.latency < b.latency || a.power < b.power;
  return no_worse && better;
}

// Indices of non-dominated points by pairwise comparison.
inline std::vector<std::size_t> pareto_indices(const std::vector<Point3>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      dominated = j != i && dominates(pts[j], pts[i]);
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

// Non-negative least squares by trying every support set: solve the
// unconstrained problem on each subset of columns, keep feasible solutions,
// return the one with the smallest residual.
inline Eigen::VectorXd nnls_brute_force(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.cols());
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_res = b.squaredNorm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> cols;
    for (int c = 0; c < n; ++c) {
      if (mask & (1 << c)) cols.push_back(c);
    }
    Eigen::MatrixXd sub(a.rows(), static_cast<int>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) sub.col(static_cast<int>(i)) = a.col(cols[i]);
    const Eigen::VectorXd z = sub.completeOrthogonalDecomposition().solve(b);
    if ((z.array() < -1e-12).any()) continue;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < cols.size(); ++i) x(cols[i]) = std::max(0.0, z(static_cast<int>(i)));
    const double res = (a * x - b).squaredNorm();
    if (res < best_res - 1e-12) {
      best_res = res;
      best = x;
    }
  }
  return best;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace oracle

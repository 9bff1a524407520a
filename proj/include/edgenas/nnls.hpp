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

#pragma once

#include <Eigen/Dense>

namespace edgenas {

// Non-negative least squares, min ||A x - b|| subject to x >= 0, by the
// Lawson-Hanson active-set method. Rank-deficient passive sets are solved
// with column-pivoting QR, so the result is a basic solution.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations = 0);

// Numerical rank of A after scaling each column to unit max-norm.
int scaled_rank(const Eigen::MatrixXd& A);

}  // namespace edgenas

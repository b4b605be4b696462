#pragma once

#include <vector>

#include <Eigen/Dense>

namespace sft {

/// Normalized bump chi(x) = c exp(-1 / (1 - x^2)) on (-1, 1), zero outside.
double bump(double x);

/// delta_kappa(x) = kappa * chi(kappa * x).
double mollifier(double kappa, double x);

/// Weights of delta_kappa sampled at integer multiples of `step`, renormalized
/// to unit discrete mass. Entry r + R is the weight at offset r in [-R, R].
std::vector<double> discrete_mollifier(double kappa, double step);

/// Convolution matrix C with C(i, j) = w_{i-j} on n cells, zero-extended at
/// the ends.
Eigen::MatrixXd mollifier_matrix(double kappa, double step, int n);

}  // namespace sft

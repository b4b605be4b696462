#include "sft/fem.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wunused-parameter"
#include <unsupported/Eigen/ArpackSupport>
#pragma GCC diagnostic pop

#include "sft/error.hpp"

namespace sft::surfaces {

FemMatrices assemble(const SurfaceMesh& mesh) {
  std::vector<Eigen::Triplet<double>> k, m;
  for (const auto& t : mesh.triangles) {
    const Eigen::Vector2d e1 = t.chart[1] - t.chart[0], e2 = t.chart[2] - t.chart[0];
    const double area = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    if (!(area > 0.0)) throw NumericError("degenerate or inverted triangle in mesh");
    for (int i = 0; i < 3; ++i) {
      // Edge opposite vertex i, rotated: gradient of the hat function times 2 area.
      const Eigen::Vector2d gi = t.chart[(i + 2) % 3] - t.chart[(i + 1) % 3];
      for (int j = 0; j < 3; ++j) {
        const Eigen::Vector2d gj = t.chart[(j + 2) % 3] - t.chart[(j + 1) % 3];
        k.emplace_back(t.v[i], t.v[j], gi.dot(gj) / (4.0 * area));
        m.emplace_back(t.v[i], t.v[j], area / (i == j ? 6.0 : 12.0));
      }
    }
  }
  FemMatrices out;
  const int n = mesh.n_vertices();
  out.stiffness.resize(n, n);
  out.mass.resize(n, n);
  out.stiffness.setFromTriplets(k.begin(), k.end());
  out.mass.setFromTriplets(m.begin(), m.end());
  return out;
}

Spectrum fem_spectrum(const SurfaceMesh& mesh, double mass, int count) { return fem_spectrum(assemble(mesh), mass, count); }

Spectrum fem_spectrum(const FemMatrices& fem, double mass, int count) {
  const auto n = fem.stiffness.rows();
  if (count < 1 || count > kMaxEigenCount) throw CapacityError("eigenvalue count must be in [1, " + std::to_string(kMaxEigenCount) + "]");
  if (count >= n) throw CapacityError("eigenvalue count exceeds the mesh size");
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  if (n <= 800) {
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(fem.stiffness),
                                                                       Eigen::MatrixXd(fem.mass));
    if (es.info() != Eigen::Success) throw NumericError("dense generalized eigensolver failed");
    values = es.eigenvalues().head(count);
    vectors = es.eigenvectors().leftCols(count);
  } else {
    // Shift-invert Lanczos about -1 so that K - sigma M is positive definite.
    using Solver = Eigen::ArpackGeneralizedSelfAdjointEigenSolver<Eigen::SparseMatrix<double>,
                                                                  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>;
    Solver es(fem.stiffness, fem.mass, count, "-1.0", Eigen::ComputeEigenvectors, 1e-12);
    if (es.info() != Eigen::Success) throw NumericError("ARPACK did not converge for " + std::to_string(count) + " eigenvalues");
    values = es.eigenvalues();
    vectors = es.eigenvectors();
  }
  Spectrum out;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  for (auto i : order) {
    const Eigen::VectorXd u = vectors.col(i);
    const Eigen::VectorXd mu = fem.mass * u;
    const double r = (fem.stiffness * u - values[i] * mu).norm() / (mu.norm() * std::max(1.0, std::abs(values[i])));
    out.max_residual = std::max(out.max_residual, r);
    out.eigenvalues.push_back(values[i] + mass * mass);
  }
  if (!(out.max_residual < 1e-6)) throw NumericError("eigen residual " + std::to_string(out.max_residual) + " too large");
  return out;
}

}  // namespace sft::surfaces

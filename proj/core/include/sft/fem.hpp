#pragma once

// P1 finite elements for -Laplace + m^2 on a flat triangle mesh.

#include <vector>

#include <Eigen/Sparse>

#include "sft/surface_mesh.hpp"

namespace sft::surfaces {

struct FemMatrices {
  Eigen::SparseMatrix<double> stiffness;  // cotangent Laplacian
  Eigen::SparseMatrix<double> mass;       // consistent mass
};

FemMatrices assemble(const SurfaceMesh& mesh);

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  double max_residual = 0.0;        // max |K u - lambda M u| / |M u| (relative to lambda)
};

inline constexpr int kMaxEigenCount = 2000;

/// Lowest `count` generalized eigenvalues of K u = lambda M u, shifted by m^2.
Spectrum fem_spectrum(const SurfaceMesh& mesh, double mass, int count);
Spectrum fem_spectrum(const FemMatrices& fem, double mass, int count);

}  // namespace sft::surfaces

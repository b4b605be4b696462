#pragma once

// Zeta-regularized log det(-Laplace + m^2) from a truncated FEM spectrum.
//
// With theta(s) = sum exp(-s lambda_k), -zeta'(0) splits at s0: above s0 the
// computed eigenvalues give sum E1(s0 lambda_k); below s0 the heat trace is
// replaced by exp(-s m^2) (a/s + b + c s) with a = area / 4 pi. The constants
// b, c are fitted to exp(s m^2) theta_h(s) - a/s = b + c s + d/s^2 on a window
// of s, where d/s^2 absorbs the FEM eigenvalue error (the relative error grows
// like h^2 lambda). The same d-term is removed from the s > s0 part.

#include <vector>

#include <nlohmann/json.hpp>

#include "sft/fem.hpp"
#include "sft/surface_mesh.hpp"

namespace sft::surfaces {

struct DetSpec {
  int count = 250;        // eigenvalues computed
  double split = 0.1;     // s0
  double fit_min = 0.03;  // fit window in s
  double fit_max = 0.12;
  int fit_points = 24;
  double tail_tol = 1e-7;  // bound on exp(-fit_min * lambda_max)
};

struct DetResult {
  double log_det = 0.0;
  int eigen_count = 0;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double fit_residual = 0.0;  // rms residual of the fit
  double tail = 0.0;          // exp(-fit_min * lambda_max)
  nlohmann::json report() const;
};

DetResult logdet_from_spectrum(const std::vector<double>& eigenvalues, double area, double mass, const DetSpec& spec);
DetResult logdet_regularized(const SurfaceMesh& mesh, double mass, const DetSpec& spec);

/// Flat torus L x beta, lattice form: -a m^2 (2 ln m - 1) - sum' (A m / (pi r)) K1(m r).
double torus_logdet_lattice(double length, double beta, double mass);
/// Flat torus, product over spatial modes: beta * sum_reg omega_k + 2 sum log(1 - exp(-beta omega_k)).
double torus_logdet_modesum(double length, double beta, double mass);
/// Exact torus eigenvalues (2 pi a / L)^2 + (2 pi b / beta)^2 + m^2, lowest `count`.
std::vector<double> torus_eigenvalues(double length, double beta, double mass, int count);

nlohmann::json to_json(const DetSpec& s);

}  // namespace sft::surfaces

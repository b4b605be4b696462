#include "sft/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "sft/error.hpp"

namespace sft::surfaces {

namespace {

double e1(double x) { return boost::math::expint(1, x); }

}  // namespace

nlohmann::json DetResult::report() const {
  return {{"log_det", log_det}, {"eigen_count", eigen_count}, {"a", a}, {"b", b}, {"c", c}, {"d", d},
          {"fit_residual", fit_residual}, {"tail", tail}};
}

DetResult logdet_from_spectrum(const std::vector<double>& eigenvalues, double area, double mass, const DetSpec& spec) {
  if (!(mass > 0.0)) throw ConfigError({"log det needs m > 0"});
  if (!(spec.fit_min > 0.0 && spec.fit_max > spec.fit_min && spec.split > 0.0 && spec.fit_points >= 4))
    throw ConfigError({"log det needs 0 < fit_min < fit_max, split > 0 and at least 4 fit points"});
  if (eigenvalues.empty()) throw NumericError("log det needs eigenvalues");
  DetResult r;
  r.eigen_count = static_cast<int>(eigenvalues.size());
  const double lmax = *std::max_element(eigenvalues.begin(), eigenvalues.end());
  r.tail = std::exp(-std::min(spec.fit_min, spec.split) * lmax);
  if (r.tail > spec.tail_tol)
    throw NumericError("spectrum too short: exp(-s lambda_max) = " + std::to_string(r.tail) + " exceeds " +
                       std::to_string(spec.tail_tol) + "; raise count or the fit window");
  const double m2 = mass * mass;
  r.a = area / (4.0 * std::numbers::pi);

  Eigen::MatrixXd design(spec.fit_points, 3);
  Eigen::VectorXd rhs(spec.fit_points);
  for (int i = 0; i < spec.fit_points; ++i) {
    const double s = spec.fit_min * std::pow(spec.fit_max / spec.fit_min, static_cast<double>(i) / (spec.fit_points - 1));
    double theta = 0.0;
    for (double l : eigenvalues) theta += std::exp(-s * (l - m2));
    rhs[i] = theta - r.a / s;
    design(i, 0) = 1.0;
    design(i, 1) = s;
    design(i, 2) = 1.0 / (s * s);
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  r.b = coef[0];
  r.c = coef[1];
  r.d = coef[2];
  r.fit_residual = std::sqrt((design * coef - rhs).squaredNorm() / spec.fit_points);

  const double s0 = spec.split, x = s0 * m2, lm = std::log(mass);
  double zeta = r.a * m2 * (2.0 * lm - 1.0 - boost::math::expint(2, x) / x);
  zeta += r.b * (-2.0 * lm - e1(x));
  zeta += r.c * (1.0 - std::exp(-x)) / m2;
  for (double l : eigenvalues) zeta += e1(s0 * l);
  zeta -= r.d * boost::math::expint(3, x) / (s0 * s0);
  r.log_det = -zeta;
  if (!std::isfinite(r.log_det)) throw NumericError("log det is not finite");
  return r;
}

DetResult logdet_regularized(const SurfaceMesh& mesh, double mass, const DetSpec& spec) {
  const auto spectrum = fem_spectrum(mesh, mass, spec.count);
  return logdet_from_spectrum(spectrum.eigenvalues, mesh.area(), mass, spec);
}

double torus_logdet_lattice(double length, double beta, double mass) {
  if (!(length > 0.0 && beta > 0.0 && mass > 0.0)) throw DomainError("torus oracle needs positive L, beta, m");
  const double area = length * beta;
  double out = -area / (4.0 * std::numbers::pi) * mass * mass * (2.0 * std::log(mass) - 1.0);
  const int pmax = static_cast<int>(std::ceil(60.0 / (mass * length))) + 1;
  const int qmax = static_cast<int>(std::ceil(60.0 / (mass * beta))) + 1;
  for (int p = -pmax; p <= pmax; ++p)
    for (int q = -qmax; q <= qmax; ++q) {
      if (p == 0 && q == 0) continue;
      const double r = std::hypot(p * length, q * beta);
      if (mass * r > 700.0) continue;
      out -= area * mass / (std::numbers::pi * r) * boost::math::cyl_bessel_k(1, mass * r);
    }
  return out;
}

double torus_logdet_modesum(double length, double beta, double mass) {
  if (!(length > 0.0 && beta > 0.0 && mass > 0.0)) throw DomainError("torus oracle needs positive L, beta, m");
  double omega_sum = -length * mass * mass / (4.0 * std::numbers::pi) * (2.0 * std::log(mass) - 1.0);
  for (int p = 1; mass * p * length < 700.0; ++p)
    omega_sum -= 2.0 * mass / std::numbers::pi * boost::math::cyl_bessel_k(1, mass * p * length) / p;
  double logs = 0.0;
  for (int k = 0;; ++k) {
    const double w = std::hypot(2.0 * std::numbers::pi * k / length, mass);
    const double term = std::log1p(-std::exp(-beta * w));
    logs += (k == 0 ? 1.0 : 2.0) * term;
    if (std::abs(term) < 1e-18) break;
  }
  return beta * omega_sum + 2.0 * logs;
}

std::vector<double> torus_eigenvalues(double length, double beta, double mass, int count) {
  std::vector<double> out;
  const int kmax = count + 2;
  for (int a = -kmax; a <= kmax; ++a)
    for (int b = -kmax; b <= kmax; ++b) {
      const double x = 2.0 * std::numbers::pi * a / length, y = 2.0 * std::numbers::pi * b / beta;
      out.push_back(x * x + y * y + mass * mass);
    }
  std::sort(out.begin(), out.end());
  out.resize(static_cast<std::size_t>(count));
  return out;
}

nlohmann::json to_json(const DetSpec& s) {
  return {{"count", s.count}, {"split", s.split}, {"fit_min", s.fit_min}, {"fit_max", s.fit_max},
          {"fit_points", s.fit_points}, {"tail_tol", s.tail_tol}};
}

}  // namespace sft::surfaces

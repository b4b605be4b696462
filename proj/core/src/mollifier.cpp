#include "sft/mollifier.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sft/error.hpp"

namespace sft {

namespace {

double raw_bump(double x) {
  const double y = 1.0 - x * x;
  return y > 0.0 ? std::exp(-1.0 / y) : 0.0;
}

double bump_normalization() {
  static const double c = [] {
    const double mass =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(raw_bump, -1.0, 1.0, 15, 1e-15);
    return 1.0 / mass;
  }();
  return c;
}

}  // namespace

double bump(double x) { return bump_normalization() * raw_bump(x); }

double mollifier(double kappa, double x) { return kappa * bump(kappa * x); }

std::vector<double> discrete_mollifier(double kappa, double step) {
  if (!(kappa > 0.0)) throw DomainError("mollifier scale kappa must be positive");
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
  const int reach = static_cast<int>(std::ceil(1.0 / (kappa * step)));
  std::vector<double> w(static_cast<std::size_t>(2 * reach + 1));
  double total = 0.0;
  for (int r = -reach; r <= reach; ++r) {
    w[static_cast<std::size_t>(r + reach)] = mollifier(kappa, r * step);
    total += w[static_cast<std::size_t>(r + reach)];
  }
  if (!(total > 0.0)) throw DomainError("grid too coarse to resolve the mollifier");
  for (auto& x : w) x /= total;
  return w;
}

Eigen::MatrixXd mollifier_matrix(double kappa, double step, int n) {
  const auto w = discrete_mollifier(kappa, step);
  const int reach = static_cast<int>((w.size() - 1) / 2);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int r = -reach; r <= reach; ++r) {
      const int j = i - r;
      if (j >= 0 && j < n) c(i, j) = w[static_cast<std::size_t>(r + reach)];
    }
  return c;
}

}  // namespace sft

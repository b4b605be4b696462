#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sft/error.hpp"
#include "sft/measure.hpp"
#include "sft/mollifier.hpp"

using namespace sft;
using namespace sft::measure;

namespace {

FieldParams tiny_params() {
  FieldParams p;
  p.mass = 1.0;
  p.min_length = 1.0;
  p.max_length = 2.0;
  p.cutoff = 1.5;  // {Omega, one k=0 particle}
  p.kappa = 2.0;
  p.t_half = 1.0;
  p.dt = 0.5;
  p.n_cells = 10;
  p.seed = 7;
  return p;
}

std::vector<StringFieldSample> draw(const FreeFieldSampler& s, std::size_t n) {
  std::vector<StringFieldSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(s.sample(i));
  return out;
}

void expect_within(const MCEstimate& e, cplx target, double sigmas = 3.0) {
  EXPECT_LE(std::abs(e.mean.real() - target.real()), sigmas * e.stderr_re + 1e-12)
      << "re " << e.mean.real() << " vs " << target.real() << " se " << e.stderr_re;
  EXPECT_LE(std::abs(e.mean.imag() - target.imag()), sigmas * e.stderr_im + 1e-12)
      << "im " << e.mean.imag() << " vs " << target.imag() << " se " << e.stderr_im;
}

}  // namespace

TEST(FieldParams, CollectsEveryViolation) {
  auto p = tiny_params();
  p.kappa = 10.0;  // dl = 0.1 >= 1/(4 kappa)
  p.mass = -1.0;
  try {
    validate(p);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.violations().size(), 2u);
  }
  p = tiny_params();
  p.dt = 0.3;
  EXPECT_THROW(validate(p), ConfigError);
}

TEST(Sampler, DeterministicInSeedAndIndex) {
  const FreeFieldSampler s(tiny_params());
  EXPECT_EQ(s.sample(3).amplitudes, s.sample(3).amplitudes);
  EXPECT_NE(s.sample(3).amplitudes, s.sample(4).amplitudes);
}

TEST(Sampler, EqualTimeVarianceAndPhaseSymmetry) {
  auto p = tiny_params();
  p.n_cells = 4;
  p.kappa = 0.9;
  const FreeFieldSampler s(p);
  std::vector<cplx> var, pseudo, cross;
  for (std::size_t i = 0; i < 10000; ++i) {
    const auto x = s.sample(i);
    var.push_back(std::norm(x.at(1, 2, 1)) * p.dl());
    pseudo.push_back(x.at(1, 2, 1) * x.at(2, 2, 1) * p.dl());
    cross.push_back(std::conj(x.at(1, 0, 1)) * x.at(1, 3, 1) * p.dl());
  }
  expect_within(estimate_mean(std::span<const cplx>(var)), 1.0);
  expect_within(estimate_mean(std::span<const cplx>(pseudo)), 0.0);
  expect_within(estimate_mean(std::span<const cplx>(cross)), 0.0);
}

TEST(Sampler, LagOneAutocorrelation) {
  auto p = tiny_params();
  p.n_cells = 4;
  p.kappa = 0.9;
  p.cutoff = 2.5;
  const FreeFieldSampler s(p);
  const auto samples = draw(s, 4000);
  for (int il = 0; il < p.n_cells; ++il)
    for (std::size_t v = 1; v < s.basis()->size(); ++v) {
      std::vector<cplx> lag;
      for (const auto& x : samples) lag.push_back(std::conj(x.at(0, il, v)) * x.at(1, il, v) * p.dl());
      expect_within(estimate_mean(std::span<const cplx>(lag)), std::exp(-s.frequency(il, v) * p.dt));
    }
}

TEST(TwoPoint, OneParticleReproducesHeatKernel) {
  auto p = tiny_params();
  p.t_half = 0.5;
  p.dt = 1.0;
  const FreeFieldSampler s(p);
  const auto samples = draw(s, 10000);
  const Eigen::VectorXd g = Eigen::VectorXd::Ones(p.n_cells);
  TwoPointQuery q{1, g, 0, 1, g, 1};
  EXPECT_NEAR(two_point_analytic(s, q), std::exp(-1.0), 1e-14);
  expect_within(two_point_estimate(samples, q), std::exp(-1.0));

  TwoPointQuery same_time{1, g, 0, 1, g, 0};
  EXPECT_NEAR(two_point_analytic(s, same_time), 1.0, 1e-14);
  expect_within(two_point_estimate(samples, same_time), p.max_length - p.min_length);

  TwoPointQuery orthogonal{0, g, 0, 1, g, 0};
  expect_within(two_point_estimate(samples, orthogonal), 0.0);
  EXPECT_THROW(two_point_estimate(std::span<const StringFieldSample>(), q), UsageError);
}

TEST(TwoPoint, GaussianFourthMoment) {
  const FreeFieldSampler s(tiny_params());
  const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(10, 0.5, 1.5);
  std::vector<cplx> second, fourth;
  for (std::size_t i = 0; i < 20000; ++i) {
    const double a = std::norm(linear_functional(s.sample(i), 1, g, 2));
    second.push_back(a);
    fourth.push_back(a * a);
  }
  const auto m2 = estimate_mean(std::span<const cplx>(second));
  const auto m4 = estimate_mean(std::span<const cplx>(fourth));
  const double target = 2.0 * m2.mean.real() * m2.mean.real();
  const double se = std::hypot(m4.stderr_re, 4.0 * m2.mean.real() * m2.stderr_re);
  EXPECT_LE(std::abs(m4.mean.real() - target), 3.0 * se);
}

TEST(Mollifier, UnitDiscreteMassAndConstantsPreserved) {
  for (double kappa : {0.7, 2.0, 5.0}) {
    const auto w = discrete_mollifier(kappa, 0.04);
    double sum = 0.0;
    for (double x : w) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  auto p = tiny_params();
  p.kappa = 4.0;
  p.n_cells = 50;
  const FreeFieldSampler s(p);
  auto c = StringFieldSample::zeros(p, s.basis());
  for (auto& a : c.amplitudes) a = 2.0;
  const auto m = mollify(c, p.kappa);
  const int reach = static_cast<int>(std::ceil(1.0 / (p.kappa * p.dl())));
  for (int il = reach; il < p.n_cells - reach; ++il) EXPECT_NEAR(std::abs(m.at(0, il, 0) - 2.0), 0.0, 1e-12);
}

TEST(Mollifier, MollifiedVarianceAndTwoPoint) {
  auto p = tiny_params();
  p.n_cells = 20;
  p.kappa = 4.0;
  const FreeFieldSampler s(p);
  const auto w = discrete_mollifier(p.kappa, p.dl());
  double w2 = 0.0;
  for (double x : w) w2 += x * x;
  std::vector<cplx> var;
  std::vector<StringFieldSample> moll;
  for (std::size_t i = 0; i < 6000; ++i) {
    moll.push_back(mollify(s.sample(i), p.kappa));
    var.push_back(std::norm(moll.back().at(0, 10, 1)));
  }
  expect_within(estimate_mean(std::span<const cplx>(var)), w2 / p.dl());

  const Eigen::MatrixXd c = mollifier_matrix(p.kappa, p.dl(), p.n_cells);
  const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(p.n_cells, 1.0, 0.0);
  const double smeared = p.dl() * g.dot(c * c.transpose() * g) * std::exp(-2.0 * p.dt);
  expect_within(two_point_estimate(moll, {1, g, 0, 1, g, 2}), smeared);
}

TEST(Projections, EnergyAndVacuum) {
  auto p = tiny_params();
  p.cutoff = 2.5;
  const FreeFieldSampler s(p);
  const auto x = s.sample(0);
  const auto low = project_energy(x, 1.5);
  const auto vac = project_vacuum(x);
  for (int il = 0; il < p.n_cells; ++il) {
    EXPECT_EQ(low.at(0, il, 1), x.at(0, il, 1));
    EXPECT_EQ(low.at(0, il, 2), cplx(0.0));
    EXPECT_EQ(vac.at(0, il, 0), x.at(0, il, 0));
    EXPECT_EQ(vac.at(0, il, 1), cplx(0.0));
  }
}

TEST(Estimate, BatchMeansOnKnownData) {
  std::vector<double> x(300);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
  const auto e = estimate_mean(std::span<const double>(x));
  EXPECT_EQ(e.n, 300u);
  EXPECT_NEAR(e.mean.real(), 0.0, 1e-15);
  EXPECT_THROW(estimate_mean(std::span<const double>()), UsageError);
}

TEST(KernelCheck, FourierQuadrature) {
  for (auto [omega, tau] : {std::pair{1.0, 0.0}, std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    const auto k = covariance_kernel_check(omega, tau);
    EXPECT_NEAR(k.numeric, k.analytic, 1e-8);
  }
  EXPECT_NEAR(covariance_kernel_check(2.0, 0.5).analytic, std::exp(-1.0), 1e-15);
  EXPECT_THROW(covariance_kernel_check(0.0, 1.0), DomainError);
}

TEST(FeynmanKac, ConstantModeEqualTime) {
  FeynmanKacQuery q;
  q.f.constant = 1.0;
  q.f2.constant = 1.0;
  q.n_samples = 4000;
  const auto r = feynman_kac_2d(q);
  EXPECT_NEAR(r.continuum, 0.5, 1e-15);
  EXPECT_LE(std::abs(r.estimate.mean.real() - r.lattice), 3.0 * r.estimate.stderr_re);
  EXPECT_LE(std::abs(r.estimate.mean.real() - 0.5), 3.0 * r.estimate.stderr_re + std::abs(r.lattice - r.continuum));
  EXPECT_LT(std::abs(r.lattice - r.continuum), 0.01);
}

TEST(FeynmanKac, OrthogonalModesAndFirstMode) {
  FeynmanKacQuery q;
  q.f.cos_coef = {1.0};
  q.f2.sin_coef = {1.0};
  q.n_samples = 2000;
  auto r = feynman_kac_2d(q);
  EXPECT_EQ(r.continuum, 0.0);
  EXPECT_LE(std::abs(r.estimate.mean.real()), 3.0 * r.estimate.stderr_re + std::abs(r.lattice));

  q.f2 = q.f;
  q.t2 = 1.0;
  r = feynman_kac_2d(q);
  const double w = std::sqrt(4.0 * std::numbers::pi * std::numbers::pi + 1.0);
  EXPECT_NEAR(r.continuum, 0.5 * std::exp(-w) / w, 1e-15);
  EXPECT_LE(std::abs(r.estimate.mean.real() - r.continuum),
            3.0 * r.estimate.stderr_re + std::abs(r.lattice - r.continuum));
}

TEST(FeynmanKac, CoarseLatticeRejected) {
  FeynmanKacQuery q;
  q.f.cos_coef = {0, 0, 0, 1.0};
  q.f2 = q.f;
  EXPECT_THROW(feynman_kac_2d(q), ConfigError);
}

#include <cmath>
#include <algorithm>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "sft/error.hpp"
#include "sft/interaction.hpp"
#include "sft/mollifier.hpp"

using namespace sft;
using namespace sft::interaction;
using measure::FreeFieldSampler;

namespace {

FieldParams vertex_field(double cutoff = 2.5) {
  FieldParams p;
  p.mass = 1.0;
  p.min_length = 1.0;
  p.max_length = 2.4;
  p.cutoff = cutoff;
  p.kappa = 4.0;
  p.t_half = 0.5;
  p.dt = 0.25;
  p.n_cells = 35;
  p.seed = 11;
  return p;
}

VertexParams vertex_params() {
  VertexParams v;
  v.epsilon = 0.5;
  v.t_window = 0.5;
  v.v = 0.2;
  return v;
}

// Nested adaptive oracle for the smear mass: outer integrals over l and l1,
// inner integral over l2 restricted to the support of the profile. Each level
// is split at the kinks of its integrand.
double integrate_split(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
    if (hi > lo) total += GK::integrate(f, lo, hi, 6, 1e-11);
  }
  return total;
}

double smear_mass_oracle(double v, double lo, double hi) {
  auto inner = [&](double l, double l1) {
    const double a = std::max(lo, l - l1 - v), b = std::min(hi, l - l1);
    if (b <= a) return 0.0;
    return integrate_split([&](double l2) { return smear_profile(v, l1 + l2 - l); }, a, b, {});
  };
  auto middle = [&](double l) {
    const double b = std::min(hi, l - lo);
    if (b <= lo) return 0.0;
    return integrate_split([&](double l1) { return inner(l, l1); }, lo, b, {l - lo - v, l - hi, l - hi - v});
  };
  return integrate_split(middle, lo, hi, {2 * lo, 2 * lo + v, lo + hi - v, lo + hi, lo + hi + v});
}

measure::StringFieldSample vacuum_field(const FieldParams& p, const FreeFieldSampler& s) {
  auto x = measure::StringFieldSample::zeros(p, s.basis());
  for (int it = 0; it < p.n_times(); ++it)
    for (int il = 0; il < p.n_cells; ++il) x.at(it, il, 0) = 1.0;
  x.mollified = true;
  return x;
}

}  // namespace

TEST(VertexParams, Validation) {
  const auto f = vertex_field();
  auto p = vertex_params();
  EXPECT_TRUE(violations(p, f).empty());
  p.v = 0.3;  // >= L0/4
  EXPECT_FALSE(violations(p, f).empty());
  p = vertex_params();
  p.v = 0.15;  // dl_q = 0.04 >= v/4
  EXPECT_THROW(validate(p, f), ConfigError);
  p = vertex_params();
  p.t_window = 0.3;
  EXPECT_THROW(validate(p, f), ConfigError);
}

TEST(SmearMass, MatchesNestedOracle) {
  for (auto [v, lo, hi] : {std::tuple{0.2, 1.0, 2.4}, std::tuple{0.1, 1.0, 3.0}, std::tuple{0.24, 1.0, 2.1}}) {
    const double oracle = smear_mass_oracle(v, lo, hi);
    EXPECT_GT(oracle, 0.0);
    EXPECT_NEAR(smear_mass(v, lo, hi), oracle, 1e-8 * std::max(1.0, oracle));
  }
  EXPECT_EQ(smear_mass(0.2, 1.0, 1.9), 0.0);  // l >= 2 L0 is out of the box
}

TEST(Vertex, VacuumFieldsGiveTwoTSmearMass) {
  const auto f = vertex_field();
  const FreeFieldSampler s(f);
  const VertexKernel kernel(f, s.basis(), vertex_params());
  EXPECT_NEAR(kernel.total_weight(), smear_mass(0.2, 1.0, 2.4), 1e-10);
  const auto x = vacuum_field(f, s);
  const cplx value = kernel.evaluate(x, x, x);
  EXPECT_NEAR(value.real(), 2.0 * 0.5 * smear_mass_oracle(0.2, 1.0, 2.4), 1e-8);
  EXPECT_NEAR(value.imag(), 0.0, 1e-14);
}

TEST(Vertex, ZeroAndSesquilinear) {
  const auto f = vertex_field();
  const FreeFieldSampler s(f);
  const VertexKernel kernel(f, s.basis(), vertex_params());
  auto a = measure::mollify(s.sample(0), f.kappa);
  auto b = measure::mollify(s.sample(1), f.kappa);
  auto c = measure::mollify(s.sample(2), f.kappa);
  const auto zero = measure::mollify(measure::StringFieldSample::zeros(f, s.basis()), f.kappa);
  EXPECT_EQ(kernel.evaluate(zero, b, c), cplx(0.0));

  const cplx base = kernel.evaluate(a, b, c);
  const cplx alpha{0.3, -1.2}, beta{-0.7, 0.4};
  auto scaled = [](measure::StringFieldSample x, cplx k) {
    for (auto& y : x.amplitudes) y *= k;
    return x;
  };
  const double tol = 1e-10 * std::max(1.0, std::abs(base));
  EXPECT_NEAR(std::abs(kernel.evaluate(scaled(a, alpha), b, c) - std::conj(alpha) * base), 0.0, tol);
  EXPECT_NEAR(std::abs(kernel.evaluate(a, scaled(b, beta), c) - beta * base), 0.0, tol);
  EXPECT_NEAR(std::abs(kernel.evaluate(a, b, scaled(c, alpha)) - alpha * base), 0.0, tol);
  auto sum = b;
  const auto d = measure::mollify(s.sample(3), f.kappa);
  for (std::size_t i = 0; i < sum.amplitudes.size(); ++i) sum.amplitudes[i] += d.amplitudes[i];
  EXPECT_NEAR(std::abs(kernel.evaluate(a, sum, c) - base - kernel.evaluate(a, d, c)), 0.0, tol);
}

TEST(Vertex, RejectsMismatchedOrRawFields) {
  const auto f = vertex_field();
  const FreeFieldSampler s(f);
  const VertexKernel kernel(f, s.basis(), vertex_params());
  const auto raw = s.sample(0);
  EXPECT_THROW(kernel.evaluate(raw, raw, raw), UsageError);
  auto g = f;
  g.n_cells = 36;
  g.max_length = 2.44;
  const auto other = measure::mollify(FreeFieldSampler(g).sample(0), f.kappa);
  EXPECT_THROW(kernel.evaluate(other, other, other), UsageError);
}

TEST(Interaction, ZeroFieldAndVacuumProjection) {
  const auto f = vertex_field();
  const FreeFieldSampler s(f);
  const VertexKernel kernel(f, s.basis(), vertex_params());
  EXPECT_EQ(interaction_I(measure::StringFieldSample::zeros(f, s.basis()), kernel).value, cplx(0.0));
  auto no_vacuum = s.sample(0);
  for (std::size_t i = 0; i < no_vacuum.amplitudes.size(); i += s.basis()->size()) no_vacuum.amplitudes[i] = 0.0;
  EXPECT_EQ(projected_interaction(no_vacuum, kernel).value, cplx(0.0));

  const auto g = vertex_field(0.5);  // M < m: basis {Omega}
  const FreeFieldSampler sv(g);
  const VertexKernel kv(g, sv.basis(), vertex_params());
  const auto x = sv.sample(4);
  EXPECT_EQ(projected_interaction(x, kv).value, interaction_I(x, kv).value);
}

TEST(Interaction, MeanIsZero) {
  const auto f = vertex_field();
  const FreeFieldSampler s(f);
  const VertexKernel kernel(f, s.basis(), vertex_params());
  const auto values = measure::map_samples(s, 600, [&](const auto& x) { return interaction_I(x, kernel).value; });
  const auto e = measure::estimate_mean(std::span<const cplx>(values));
  EXPECT_LE(std::abs(e.mean.real()), 3.0 * e.stderr_re);
  EXPECT_LE(std::abs(e.mean.imag()), 3.0 * e.stderr_im);
}

TEST(Partition, TrivialProperties) {
  const auto f = vertex_field();
  const FreeFieldSampler s(f);
  std::vector<double> lambdas;
  for (int i = -10; i <= 10; ++i) lambdas.push_back(0.1 * i);
  const auto z = partition_Z(lambdas, 300, s, vertex_params());
  ASSERT_EQ(z.size(), 21u);
  EXPECT_EQ(z[10].z, cplx(1.0, 0.0));
  EXPECT_EQ(z[10].stderr_, 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    EXPECT_LE(std::abs(z[i].z), 1.0 + 1e-15);
    const auto& mirror = z[z.size() - 1 - i];
    EXPECT_LE(std::abs(z[i].z - std::conj(mirror.z)), 3.0 * std::hypot(z[i].stderr_, mirror.stderr_) + 1e-15);
  }
}

TEST(Cauchy, EqualLevelsVanishExactly) {
  const auto f = vertex_field();
  const auto e = cauchy_l2_check({2.5, 4.0}, {2.5, 4.0}, 20, f, vertex_params());
  EXPECT_EQ(e.mean, cplx(0.0));
  const auto d = cauchy_l2_check({1.5, 2.0}, {2.5, 4.0}, 20, f, vertex_params());
  EXPECT_GT(d.mean.real(), 0.0);
  EXPECT_THROW(cauchy_l2_check({2.5, 4.0}, {1.5, 4.0}, 20, f, vertex_params()), ConfigError);
}

TEST(Twisted, VacuumSectorAndSinglePoint) {
  const auto g = vertex_field(0.5);
  const FreeFieldSampler sv(g);
  const VertexKernel kv(g, sv.basis(), vertex_params());
  const auto x = sv.sample(2);
  const cplx bare = interaction_I(x, kv).value;
  const double cube = std::pow(2.0 * std::numbers::pi, 3);
  EXPECT_NEAR(std::abs(twisted_interaction(x, kv, 3).value - cube * bare), 0.0, 1e-10 * std::abs(cube * bare));

  const auto f = vertex_field();
  const FreeFieldSampler s(f);
  const VertexKernel k(f, s.basis(), vertex_params());
  const auto y = s.sample(2);
  EXPECT_NEAR(std::abs(twisted_interaction(y, k, 1).value - cube * interaction_I(y, k).value), 0.0,
              1e-10 * cube * std::abs(interaction_I(y, k).value));
}

TEST(Twisted, CommonOffsetInvariance) {
  // M = 7 admits one k = +-1 particle, so twists act nontrivially.
  auto f = vertex_field(7.0);
  f.n_cells = 30;
  f.max_length = 2.2;
  const FreeFieldSampler s(f);
  ASSERT_EQ(s.basis()->mode_window(), 1);
  auto vp = vertex_params();
  vp.t_window = 0.25;
  const VertexKernel k(f, s.basis(), vp);
  const auto x = s.sample(0);
  const cplx a = twisted_interaction(x, k, 3, 0.0).value;
  const cplx b = twisted_interaction(x, k, 3, 0.4).value;
  EXPECT_GT(std::abs(a), 0.0);
  EXPECT_NEAR(std::abs(a - b), 0.0, 1e-10 * std::abs(a));
}

TEST(Quadrature, SecondOrderInLength) {
  FieldParams f = vertex_field();
  f.n_cells = 128;
  f.kappa = 2.0;
  f.t_half = 0.25;
  const FreeFieldSampler s(f);
  const auto x = s.sample(5);
  std::vector<cplx> values;
  for (int stride : {1, 2, 4}) {
    auto vp = vertex_params();
    vp.t_window = 0.25;
    vp.l_stride = stride;
    values.push_back(interaction_I(x, VertexKernel(f, s.basis(), vp)).value);
  }
  const double coarse = std::abs(values[2] - values[1]);
  const double fine = std::abs(values[1] - values[0]);
  const double order = std::log2(coarse / fine);
  EXPECT_GT(order, 1.6) << "observed order " << order;
  EXPECT_LT(order, 2.6) << "observed order " << order;
}

#include "sft/activity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "sft/error.hpp"
#include "sft/interaction.hpp"
#include "sft/mollifier.hpp"
#include "sft/projection.hpp"

namespace sft::graphs {

namespace {

template <unsigned N>
void fill_rule(std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& b = G::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      x.push_back(0.0);
      w.push_back(b[i]);
      continue;
    }
    x.push_back(a[i]);
    w.push_back(b[i]);
    x.push_back(-a[i]);
    w.push_back(b[i]);
  }
}

// Gauss-Legendre nodes and weights on [-1, 1].
void legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  switch (n) {
    case 16: fill_rule<16>(x, w); break;
    case 24: fill_rule<24>(x, w); break;
    case 32: fill_rule<32>(x, w); break;
    case 48: fill_rule<48>(x, w); break;
    case 64: fill_rule<64>(x, w); break;
    default: throw ConfigError({"activity quad_points must be one of 16, 24, 32, 48, 64"});
  }
}

std::vector<std::size_t> state_subset(const fock::FockBasis& basis, bool vacuum_only) {
  std::vector<std::size_t> s;
  const std::size_t n = vacuum_only ? 1 : basis.size();
  for (std::size_t i = 0; i < n; ++i) s.push_back(i);
  return s;
}

}  // namespace

GridEvaluator::GridEvaluator(const interaction::FieldParams& field, const interaction::VertexParams& params,
                             bool vacuum_only, Eigen::Index max_elements)
    : field_(field), max_elements_(max_elements) {
  measure::validate(field_);
  auto basis = std::make_shared<const fock::FockBasis>(
      fock::enumerate_basis({field_.d, field_.mass, field_.min_length, field_.cutoff}));
  kernel_ = std::make_unique<interaction::VertexKernel>(field_, basis, params);
  states_ = state_subset(*basis, vacuum_only);
  const auto ds = static_cast<Eigen::Index>(states_.size());
  const auto dim = static_cast<Eigen::Index>(basis->size());

  std::set<int> used[3];
  for (const auto& t : kernel_->triples()) {
    used[0].insert(t.j);
    used[1].insert(t.j1);
    used[2].insert(t.j2);
  }
  std::vector<int> pos[3];
  for (int s = 0; s < 3; ++s) {
    cells_[s].assign(used[s].begin(), used[s].end());
    pos[s].assign(static_cast<std::size_t>(kernel_->n_cells()), -1);
    for (std::size_t i = 0; i < cells_[s].size(); ++i) pos[s][static_cast<std::size_t>(cells_[s][i])] = static_cast<int>(i);
  }

  const Eigen::Index n1 = static_cast<Eigen::Index>(cells_[1].size()) * ds;
  const Eigen::Index n2 = static_cast<Eigen::Index>(cells_[2].size()) * ds;
  split_tensor_.assign(static_cast<std::size_t>(static_cast<Eigen::Index>(cells_[0].size()) * ds * n1 * n2), 0.0);
  for (std::size_t i = 0; i < kernel_->triples().size(); ++i) {
    const auto& t = kernel_->triples()[i];
    const auto& g = kernel_->split(i);
    const Eigen::Index p0 = pos[0][static_cast<std::size_t>(t.j)], p1 = pos[1][static_cast<std::size_t>(t.j1)],
                       p2 = pos[2][static_cast<std::size_t>(t.j2)];
    for (Eigen::Index a = 0; a < ds; ++a)
      for (Eigen::Index b = 0; b < ds; ++b)
        for (Eigen::Index c = 0; c < ds; ++c) {
          const auto sa = static_cast<Eigen::Index>(states_[static_cast<std::size_t>(a)]);
          const auto sb = static_cast<Eigen::Index>(states_[static_cast<std::size_t>(b)]);
          const auto sc = static_cast<Eigen::Index>(states_[static_cast<std::size_t>(c)]);
          const Eigen::Index flat = ((p0 * ds + a) * n1 + (p1 * ds + b)) * n2 + (p2 * ds + c);
          split_tensor_[static_cast<std::size_t>(flat)] += t.weight * std::conj(g(sb * dim + sc, sa));
        }
  }

  const int stride = params.l_stride;
  const Eigen::MatrixXd c = mollifier_matrix(field_.kappa, field_.dl(), field_.n_cells);
  average_ = Eigen::MatrixXd::Zero(kernel_->n_cells(), field_.n_cells);
  for (int j = 0; j < kernel_->n_cells(); ++j)
    for (int r = 0; r < stride; ++r) average_.row(j) += c.row(j * stride + r) / stride;
  omega_.resize(field_.n_cells, ds);
  for (int k = 0; k < field_.n_cells; ++k)
    for (Eigen::Index a = 0; a < ds; ++a)
      omega_(k, a) = fock::state_energy(basis->state(states_[static_cast<std::size_t>(a)]), field_.length(k), field_.mass);
}

const Eigen::MatrixXd& GridEvaluator::propagator(int slot_a, int slot_b, int lag) const {
  const auto key = std::make_tuple(slot_a, slot_b, lag);
  if (auto it = propagators_.find(key); it != propagators_.end()) return it->second;
  const auto ds = static_cast<Eigen::Index>(states_.size());
  const auto& ca = cells_[slot_a];
  const auto& cb = cells_[slot_b];
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ca.size()) * ds,
                                              static_cast<Eigen::Index>(cb.size()) * ds);
  const double tau = lag * field_.dt;
  for (Eigen::Index s = 0; s < ds; ++s) {
    const Eigen::VectorXd decay = (-tau * omega_.col(s)).array().exp() / field_.dl();
    for (std::size_t i = 0; i < ca.size(); ++i)
      for (std::size_t j = 0; j < cb.size(); ++j)
        out(static_cast<Eigen::Index>(i) * ds + s, static_cast<Eigen::Index>(j) * ds + s) =
            (average_.row(ca[i]).transpose().array() * average_.row(cb[j]).transpose().array() * decay.array()).sum();
  }
  return propagators_.emplace(key, std::move(out)).first->second;
}

tn::Tensor GridEvaluator::vertex_tensor(VertexKind kind, int vertex) const {
  const auto ds = static_cast<Eigen::Index>(states_.size());
  tn::Tensor t;
  t.labels = {3 * vertex, 3 * vertex + 1, 3 * vertex + 2};
  for (int s = 0; s < 3; ++s) t.dims.push_back(static_cast<Eigen::Index>(cells_[s].size()) * ds);
  t.data = Eigen::Map<const Eigen::VectorXcd>(split_tensor_.data(), static_cast<Eigen::Index>(split_tensor_.size()));
  if (kind == VertexKind::join) t.data = t.data.conjugate();
  return t;
}

cplx GridEvaluator::value(const RibbonGraph& g) const {
  const int nv = g.n_vertices();
  if (nv == 0) return 1.0;
  const auto& nodes = kernel_->time_nodes();
  const auto edges = g.edges();
  std::map<std::vector<int>, cplx> cache;
  std::vector<std::size_t> assign(static_cast<std::size_t>(nv), 0);
  cplx total{0.0, 0.0};
  while (true) {
    std::vector<int> lags;
    for (const auto& e : edges)
      lags.push_back(std::abs(nodes[assign[static_cast<std::size_t>(e.conj.vertex)]].first -
                              nodes[assign[static_cast<std::size_t>(e.plain.vertex)]].first));
    auto it = cache.find(lags);
    if (it == cache.end()) {
      std::vector<tn::Tensor> net;
      for (int v = 0; v < nv; ++v) net.push_back(vertex_tensor(g.kind(v), v));
      for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& p = propagator(edges[k].conj.slot, edges[k].plain.slot, lags[k]);
        tn::Tensor t;
        t.labels = {edges[k].conj.id(), edges[k].plain.id()};
        t.dims = {p.rows(), p.cols()};
        t.data.resize(p.size());
        for (Eigen::Index r = 0; r < p.rows(); ++r)
          for (Eigen::Index c = 0; c < p.cols(); ++c) t.data[r * p.cols() + c] = p(r, c);
        net.push_back(std::move(t));
      }
      const auto result = tn::contract_network(std::move(net), max_elements_);
      it = cache.emplace(lags, result.data[0]).first;
    }
    double w = 1.0;
    for (auto a : assign) w *= nodes[a].second;
    total += w * it->second;

    std::size_t k = 0;
    while (k < assign.size() && ++assign[k] == nodes.size()) assign[k++] = 0;
    if (k == assign.size()) break;
  }
  return total;
}

MomentResult wick_moment(int order, const GridEvaluator& evaluator, int max_n) {
  if (order < 0) throw UsageError("moment order must be >= 0");
  MomentResult out;
  out.order = order;
  if (order % 2 != 0) return out;
  cplx total{0.0, 0.0};
  for (auto& g : enumerate_graphs(order / 2, max_n)) {
    GraphTerm term{g, g.moment_weight(), evaluator.value(g)};
    total += term.weight * term.value;
    out.terms.push_back(std::move(term));
  }
  out.value = total.real();
  out.imag = total.imag();
  return out;
}

std::vector<SeriesTerm> partition_series(double lambda, const std::vector<double>& even_moments) {
  std::vector<SeriesTerm> out;
  double partial = 0.0;
  double coeff = 1.0;  // (i lambda)^{2n} / (2n)!
  for (std::size_t n = 0; n < even_moments.size(); ++n) {
    if (n > 0) coeff *= -lambda * lambda / static_cast<double>((2 * n - 1) * (2 * n));
    const double term = coeff * even_moments[n];
    partial += term;
    out.push_back({static_cast<int>(n), term, partial});
  }
  return out;
}

std::vector<cplx> smeared_vertex(const ActivityParams& p, const fock::FockBasis& basis,
                                 const std::vector<std::size_t>& states, double wide, double narrow1, double narrow2) {
  const std::size_t ds = states.size();
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const projection::SmoothingParams smooth{p.epsilon, p.epsilon, p.epsilon, p.mass, p.mass, p.mass};
  std::vector<cplx> out(ds * ds * ds, 0.0);
  auto accumulate = [&](double weight, double l, double l1, double l2) {
    if (weight == 0.0) return;
    const auto g = projection::sandwiched_split(smooth, {l1, l2, std::max(l, l1 + l2)}, basis);
    for (std::size_t a = 0; a < ds; ++a)
      for (std::size_t b = 0; b < ds; ++b)
        for (std::size_t c = 0; c < ds; ++c)
          out[(a * ds + b) * ds + c] += weight * std::conj(g(static_cast<Eigen::Index>(states[b]) * dim +
                                                                 static_cast<Eigen::Index>(states[c]),
                                                             static_cast<Eigen::Index>(states[a])));
  };

  if (p.kappa <= 0.0) {
    accumulate(interaction::smear_profile(p.v, narrow1 + narrow2 - wide), wide, narrow1, narrow2);
    return out;
  }
  std::vector<double> x, w;
  legendre_rule(p.quad_points, x, w);
  // Gauss-Legendre on each piece of [lo, hi] cut at the given kinks.
  auto rule = [&](double lo, double hi, std::vector<double> cuts) {
    std::vector<std::pair<double, double>> nodes;
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = std::max(lo, cuts[i]), b = std::min(hi, cuts[i + 1]);
      if (b - a <= 1e-14 * (hi - lo)) continue;
      for (std::size_t k = 0; k < x.size(); ++k) nodes.emplace_back(0.5 * (a + b) + 0.5 * (b - a) * x[k], 0.5 * (b - a) * w[k]);
    }
    return nodes;
  };
  const double r = 1.0 / p.kappa;
  const double a1 = std::max(p.min_length, narrow1 - r), b1 = std::min(p.max_length, narrow1 + r);
  const double a0 = std::max(p.min_length, wide - r), b0 = std::min(p.max_length, wide + r);
  if (b0 <= a0 || b1 <= a1) return out;
  // The innermost range switches between its bounds at l - l1 = c; the
  // integrated function has kinks there.
  const std::vector<double> switches = {p.max_length, narrow2 + r, p.min_length + p.v, narrow2 - r + p.v,
                                        p.min_length, narrow2 - r};
  std::vector<double> outer_cuts;
  for (double c : switches) {
    outer_cuts.push_back(a1 + c);
    outer_cuts.push_back(b1 + c);
  }
  for (const auto& [l, wl0] : rule(a0, b0, outer_cuts)) {
    const double wl = wl0 * mollifier(p.kappa, l - wide);
    std::vector<double> cuts;
    for (double c : switches) cuts.push_back(l - c);
    for (const auto& [l1, wl10] : rule(a1, b1, cuts)) {
      const double wl1 = wl10 * mollifier(p.kappa, l1 - narrow1);
      // Innermost range: support of delta_kappa around narrow2 intersected with
      // the smear support l - l1 - v < l2 <= l - l1 and the length box.
      const double a2 = std::max({p.min_length, narrow2 - r, l - l1 - p.v});
      const double b2 = std::min({p.max_length, narrow2 + r, l - l1});
      if (b2 <= a2) continue;
      for (const auto& [l2, wl20] : rule(a2, b2, {})) {
        const double wl2 = wl20 * mollifier(p.kappa, l2 - narrow2);
        accumulate(wl * wl1 * wl2 * interaction::smear_profile(p.v, l1 + l2 - l), l, l1, l2);
      }
    }
  }
  return out;
}

ActivityResult activity_f(const RibbonGraph& g, const std::vector<EdgeLabel>& labels, const ActivityParams& p) {
  const auto edges = g.edges();
  if (labels.size() != edges.size())
    throw UsageError("activity needs one label per edge (" + std::to_string(edges.size()) + ")");
  for (const auto& l : labels)
    if (l.length < p.min_length || l.length > p.max_length) throw DomainError("edge width outside [L0, Linf]");
  const auto basis = fock::enumerate_basis({p.d, p.mass, p.min_length, p.cutoff});
  const auto states = state_subset(basis, p.vacuum_only);
  const auto ds = static_cast<Eigen::Index>(states.size());

  std::vector<int> edge_of(static_cast<std::size_t>(3 * g.n_vertices()), -1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    edge_of[static_cast<std::size_t>(edges[e].conj.id())] = static_cast<int>(e);
    edge_of[static_cast<std::size_t>(edges[e].plain.id())] = static_cast<int>(e);
  }
  std::vector<tn::Tensor> net;
  for (int v = 0; v < g.n_vertices(); ++v) {
    auto width = [&](int slot) { return labels[static_cast<std::size_t>(edge_of[static_cast<std::size_t>(3 * v + slot)])].length; };
    const auto s = smeared_vertex(p, basis, states, width(0), width(1), width(2));
    tn::Tensor t;
    t.labels = {3 * v, 3 * v + 1, 3 * v + 2};
    t.dims = {ds, ds, ds};
    t.data = Eigen::Map<const Eigen::VectorXcd>(s.data(), static_cast<Eigen::Index>(s.size()));
    if (g.kind(v) == VertexKind::join) t.data = t.data.conjugate();
    net.push_back(std::move(t));
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    tn::Tensor t;
    t.labels = {edges[e].conj.id(), edges[e].plain.id()};
    t.dims = {ds, ds};
    t.data = Eigen::VectorXcd::Zero(ds * ds);
    for (Eigen::Index a = 0; a < ds; ++a)
      t.data[a * ds + a] = std::exp(-std::abs(labels[e].t) *
                                    fock::state_energy(basis.state(states[static_cast<std::size_t>(a)]), labels[e].length, p.mass));
    net.push_back(std::move(t));
  }
  const auto result = tn::contract_network(std::move(net));
  return {result.data[0].real(), result.data[0].imag(), to_json(p)};
}

nlohmann::json to_json(const ActivityParams& p) {
  return {{"d", p.d},         {"m", p.mass},       {"L0", p.min_length}, {"Linf", p.max_length},
          {"M", p.cutoff},    {"v", p.v},          {"epsilon", p.epsilon}, {"kappa", p.kappa},
          {"quad_points", p.quad_points}, {"vacuum_only", p.vacuum_only}};
}

}  // namespace sft::graphs

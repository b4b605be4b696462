#include "sft/ribbon_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sft/error.hpp"

namespace sft::graphs {

namespace {

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

std::vector<int> encode(const std::vector<VertexKind>& kinds, const std::vector<int>& partner,
                        const std::vector<int>& perm) {
  const std::size_t nv = kinds.size();
  std::vector<int> code(nv + partner.size());
  for (std::size_t v = 0; v < nv; ++v) code[static_cast<std::size_t>(perm[v])] = static_cast<int>(kinds[v]);
  for (std::size_t h = 0; h < partner.size(); ++h) {
    const int target = 3 * perm[h / 3] + static_cast<int>(h % 3);
    const int p = partner[h];
    code[nv + static_cast<std::size_t>(target)] = 3 * perm[static_cast<std::size_t>(p / 3)] + p % 3;
  }
  return code;
}

// Calls f(perm) for every vertex permutation that sends split vertices to the
// first block and join vertices to the second, in a fixed order.
template <class F>
void for_each_sorting_perm(const std::vector<VertexKind>& kinds, F f) {
  std::vector<int> splits, joins;
  for (int v = 0; v < static_cast<int>(kinds.size()); ++v)
    (kinds[static_cast<std::size_t>(v)] == VertexKind::split ? splits : joins).push_back(v);
  std::vector<int> ps(splits.size()), pj(joins.size());
  std::iota(ps.begin(), ps.end(), 0);
  std::vector<int> perm(kinds.size());
  do {
    std::iota(pj.begin(), pj.end(), static_cast<int>(splits.size()));
    do {
      for (std::size_t i = 0; i < splits.size(); ++i) perm[static_cast<std::size_t>(splits[i])] = ps[i];
      for (std::size_t i = 0; i < joins.size(); ++i) perm[static_cast<std::size_t>(joins[i])] = pj[i];
      f(perm);
    } while (std::next_permutation(pj.begin(), pj.end()));
  } while (std::next_permutation(ps.begin(), ps.end()));
}

std::vector<int> canonical(const std::vector<VertexKind>& kinds, const std::vector<int>& partner) {
  std::vector<int> best;
  for_each_sorting_perm(kinds, [&](const std::vector<int>& perm) {
    auto code = encode(kinds, partner, perm);
    if (best.empty() || code < best) best = std::move(code);
  });
  return best;
}

}  // namespace

bool is_conjugate(VertexKind kind, int slot) { return (kind == VertexKind::split) == (slot == 0); }

RibbonGraph::RibbonGraph(std::vector<VertexKind> kinds, std::vector<int> partner)
    : kinds_(std::move(kinds)), partner_(std::move(partner)) {
  if (partner_.size() != 3 * kinds_.size()) throw UsageError("ribbon graph needs three half-edges per vertex");
  for (int h = 0; h < static_cast<int>(partner_.size()); ++h) {
    const int p = partner_[static_cast<std::size_t>(h)];
    if (p < 0 || p >= static_cast<int>(partner_.size()) || p == h || partner_[static_cast<std::size_t>(p)] != h)
      throw UsageError("half-edge gluing is not a fixed-point-free involution");
    if (conjugate_leg(h) == conjugate_leg(p)) throw UsageError("edges must join a conjugate leg to a plain leg");
  }
}

std::vector<Edge> RibbonGraph::edges() const {
  std::vector<Edge> out;
  for (int h = 0; h < static_cast<int>(partner_.size()); ++h)
    if (conjugate_leg(h)) out.push_back({HalfEdge::from_id(h), HalfEdge::from_id(partner(h))});
  return out;
}

std::vector<RibbonGraph> RibbonGraph::components() const {
  const int nv = n_vertices();
  std::vector<int> comp(static_cast<std::size_t>(nv), -1);
  int n_comp = 0;
  for (int start = 0; start < nv; ++start) {
    if (comp[static_cast<std::size_t>(start)] >= 0) continue;
    std::vector<int> stack{start};
    comp[static_cast<std::size_t>(start)] = n_comp;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int s = 0; s < 3; ++s) {
        const int u = partner(3 * v + s) / 3;
        if (comp[static_cast<std::size_t>(u)] < 0) {
          comp[static_cast<std::size_t>(u)] = n_comp;
          stack.push_back(u);
        }
      }
    }
    ++n_comp;
  }
  std::vector<RibbonGraph> out;
  for (int c = 0; c < n_comp; ++c) {
    std::vector<int> local(static_cast<std::size_t>(nv), -1);
    std::vector<VertexKind> kinds;
    for (int v = 0; v < nv; ++v)
      if (comp[static_cast<std::size_t>(v)] == c) {
        local[static_cast<std::size_t>(v)] = static_cast<int>(kinds.size());
        kinds.push_back(kind(v));
      }
    std::vector<int> partner(3 * kinds.size());
    for (int v = 0; v < nv; ++v) {
      if (comp[static_cast<std::size_t>(v)] != c) continue;
      for (int s = 0; s < 3; ++s) {
        const int p = this->partner(3 * v + s);
        partner[static_cast<std::size_t>(3 * local[static_cast<std::size_t>(v)] + s)] =
            3 * local[static_cast<std::size_t>(p / 3)] + p % 3;
      }
    }
    out.push_back(with_symmetry(RibbonGraph(std::move(kinds), std::move(partner))));
  }
  return out;
}

bool RibbonGraph::connected() const { return n_vertices() > 0 && components().size() == 1; }

bool RibbonGraph::has_tadpole() const {
  for (int h = 0; h < static_cast<int>(partner_.size()); ++h)
    if (partner(h) / 3 == h / 3) return true;
  return false;
}

RibbonGraph RibbonGraph::relabeled(const std::vector<int>& perm) const {
  if (perm.size() != kinds_.size()) throw UsageError("relabeling must permute every vertex");
  const auto code = encode(kinds_, partner_, perm);
  const std::size_t nv = kinds_.size();
  std::vector<VertexKind> kinds(nv);
  for (std::size_t v = 0; v < nv; ++v) kinds[v] = static_cast<VertexKind>(code[v]);
  RibbonGraph g(std::move(kinds), std::vector<int>(code.begin() + static_cast<std::ptrdiff_t>(nv), code.end()));
  g.aut_ = aut_;
  g.orbit_ = orbit_;
  return g;
}

double RibbonGraph::moment_weight() const {
  return static_cast<double>(orbit_) / std::pow(2.0, n_vertices());
}

std::vector<int> RibbonGraph::canonical_code() const { return canonical(kinds_, partner_); }

RibbonGraph with_symmetry(RibbonGraph g) {
  const auto nv = static_cast<std::size_t>(g.n_vertices());
  std::vector<int> identity(nv);
  std::iota(identity.begin(), identity.end(), 0);
  const auto self = encode(g.kinds_, g.partner_, identity);
  std::uint64_t aut = 0;
  std::vector<int> perm = identity;
  do {
    if (encode(g.kinds_, g.partner_, perm) == self) ++aut;
  } while (std::next_permutation(perm.begin(), perm.end()));
  g.aut_ = aut;
  g.orbit_ = factorial(static_cast<int>(nv)) / aut;
  return g;
}

std::vector<RibbonGraph> enumerate_graphs(int n, int max_n) {
  if (n < 0) throw UsageError("graph order must be >= 0");
  if (n > max_n)
    throw CapacityError("graph enumeration with 2n = " + std::to_string(2 * n) + " vertices exceeds the bound n <= " +
                        std::to_string(max_n));
  std::vector<VertexKind> kinds(static_cast<std::size_t>(2 * n), VertexKind::join);
  std::fill(kinds.begin(), kinds.begin() + n, VertexKind::split);
  std::vector<int> conj_legs, plain_legs;
  for (int h = 0; h < 6 * n; ++h) (is_conjugate(kinds[static_cast<std::size_t>(h / 3)], h % 3) ? conj_legs : plain_legs).push_back(h);

  // Count labeled gluings with this kind assignment per isomorphism class.
  std::map<std::vector<int>, std::uint64_t> classes;
  std::vector<int> order(plain_legs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> partner(static_cast<std::size_t>(6 * n));
  do {
    for (std::size_t i = 0; i < conj_legs.size(); ++i) {
      const int c = conj_legs[i], p = plain_legs[static_cast<std::size_t>(order[i])];
      partner[static_cast<std::size_t>(c)] = p;
      partner[static_cast<std::size_t>(p)] = c;
    }
    ++classes[canonical(kinds, partner)];
  } while (std::next_permutation(order.begin(), order.end()));

  const std::uint64_t kind_preserving = factorial(n) * factorial(n);
  std::vector<RibbonGraph> out;
  for (const auto& [code, count] : classes) {
    std::vector<VertexKind> k(static_cast<std::size_t>(2 * n));
    for (std::size_t v = 0; v < k.size(); ++v) k[v] = static_cast<VertexKind>(code[v]);
    RibbonGraph g(std::move(k), std::vector<int>(code.begin() + 2 * n, code.end()));
    g.aut_ = kind_preserving / count;
    g.orbit_ = factorial(2 * n) / g.aut_;
    out.push_back(std::move(g));
  }
  return out;
}

int genus(const RibbonGraph& g) {
  if (!g.connected()) throw UsageError("genus needs a connected graph; evaluate components separately");
  if (g.n_vertices() % 2 != 0) throw UsageError("graph must have an even number of vertices");
  const int euler = -g.n_vertices();  // one pants per vertex, tubes contribute 0
  return (2 - euler) / 2;
}

nlohmann::json to_json(const RibbonGraph& g) {
  nlohmann::json j;
  auto vertices = nlohmann::json::array();
  for (int v = 0; v < g.n_vertices(); ++v) {
    nlohmann::json legs = nlohmann::json::array();
    for (int s = 0; s < 3; ++s) legs.push_back(g.conjugate_leg(3 * v + s) ? "conj" : "plain");
    vertices.push_back({{"kind", g.kind(v) == VertexKind::split ? "split" : "join"},
                        {"cyclic_order", {3 * v, 3 * v + 1, 3 * v + 2}},
                        {"legs", legs}});
  }
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.conj.id(), e.plain.id()});
  j["vertices"] = vertices;
  j["edges"] = edges;
  j["aut_order"] = g.aut_order();
  j["orbit_size"] = g.orbit_size();
  j["connected"] = g.n_vertices() == 0 ? false : g.connected();
  return j;
}

}  // namespace sft::graphs

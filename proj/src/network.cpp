#include "fedbai/network.hpp"

#include <algorithm>
#include <string>

#include "fedbai/errors.hpp"
#include "fedbai/rng.hpp"

namespace fedbai {

DirectedGraph::DirectedGraph(std::vector<int> vertices,
                             const std::vector<std::pair<int, int>>& edges,
                             std::map<int, std::vector<int>> groups)
    : vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
    throw Error(ErrorCode::InvalidConfig, "duplicate vertex id");
  in_.assign(vertices_.size(), {});
  out_.assign(vertices_.size(), {});
  for (auto [u, v] : edges) {
    if (u == v) throw Error(ErrorCode::InvalidConfig, "self-loop at vertex " + std::to_string(u));
    const int iu = index(u), iv = index(v);
    out_[iu].push_back(v);
    in_[iv].push_back(u);
  }
  for (auto* adj : {&in_, &out_})
    for (auto& l : *adj) {
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }
  set_groups(std::move(groups));
}

int DirectedGraph::index(int v) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end() || *it != v)
    throw Error(ErrorCode::GroupNotInGraph, "vertex " + std::to_string(v) + " is not in the graph");
  return static_cast<int>(it - vertices_.begin());
}

bool DirectedGraph::has_vertex(int v) const {
  return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

bool DirectedGraph::has_edge(int u, int v) const {
  if (!has_vertex(u) || !has_vertex(v)) return false;
  const auto& o = out_[index(u)];
  return std::binary_search(o.begin(), o.end(), v);
}

std::vector<std::pair<int, int>> DirectedGraph::edges() const {
  std::vector<std::pair<int, int>> e;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (int v : out_[i]) e.emplace_back(vertices_[i], v);
  return e;
}

void DirectedGraph::set_groups(std::map<int, std::vector<int>> groups) {
  for (auto& [j, members] : groups) {
    std::sort(members.begin(), members.end());
    for (int v : members)
      if (!has_vertex(v))
        throw Error(ErrorCode::GroupNotInGraph,
                    "group " + std::to_string(j) + " names unknown vertex " + std::to_string(v));
  }
  groups_ = std::move(groups);
}

namespace {

std::vector<char> group_mask(const DirectedGraph& g, const std::vector<int>& group) {
  if (group.empty()) throw Error(ErrorCode::GroupNotInGraph, "empty client group");
  std::vector<char> in(static_cast<std::size_t>(g.num_vertices()), 0);
  for (int v : group) in[static_cast<std::size_t>(g.index(v))] = 1;
  return in;
}

}  // namespace

bool is_strongly_r_robust(const DirectedGraph& g, const std::vector<int>& group, int r) {
  std::vector<char> grown = group_mask(g, group);
  const auto& vs = g.vertices();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (grown[i]) continue;
      int inside = 0;
      for (int u : g.in_neighbors(vs[i])) inside += grown[static_cast<std::size_t>(g.index(u))];
      if (inside >= r) {
        grown[i] = 1;
        changed = true;
      }
    }
  }
  return std::all_of(grown.begin(), grown.end(), [](char c) { return c != 0; });
}

bool brute_force_strong_robustness(const DirectedGraph& g, const std::vector<int>& group, int r) {
  if (g.num_vertices() > 20)
    throw Error(ErrorCode::GraphTooLarge, "brute force limited to 20 vertices");
  const std::vector<char> in_group = group_mask(g, group);
  std::vector<int> outside;  // vertex indices outside the group
  for (int i = 0; i < g.num_vertices(); ++i)
    if (!in_group[static_cast<std::size_t>(i)]) outside.push_back(i);
  const std::uint32_t m = static_cast<std::uint32_t>(outside.size());
  std::vector<char> in_b(static_cast<std::size_t>(g.num_vertices()), 0);
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << m); ++mask) {
    std::fill(in_b.begin(), in_b.end(), 0);
    for (std::uint32_t b = 0; b < m; ++b)
      if (mask & (1U << b)) in_b[static_cast<std::size_t>(outside[b])] = 1;
    bool witness = false;
    for (std::uint32_t b = 0; b < m && !witness; ++b) {
      if (!(mask & (1U << b))) continue;
      int external = 0;
      for (int u : g.in_neighbors(g.vertices()[static_cast<std::size_t>(outside[b])]))
        external += in_b[static_cast<std::size_t>(g.index(u))] ? 0 : 1;
      witness = external >= r;
    }
    if (!witness) return false;
  }
  return true;
}

bool verify_f_local(const DirectedGraph& g, const std::vector<int>& adversaries, int f) {
  std::vector<char> bad(static_cast<std::size_t>(g.num_vertices()), 0);
  for (int a : adversaries) bad[static_cast<std::size_t>(g.index(a))] = 1;
  for (int i = 0; i < g.num_vertices(); ++i) {
    if (bad[static_cast<std::size_t>(i)]) continue;
    int seen = 0;
    for (int u : g.in_neighbors(g.vertices()[static_cast<std::size_t>(i)]))
      seen += bad[static_cast<std::size_t>(g.index(u))];
    if (seen > f) return false;
  }
  return true;
}

namespace {

std::vector<int> iota_vec(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

}  // namespace

DirectedGraph complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v) e.emplace_back(u, v);
  return DirectedGraph(iota_vec(n), e);
}

DirectedGraph ring_graph(int n, int k) {
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u)
    for (int d = 1; d <= k; ++d) {
      const int v = (u + d) % n;
      if (v == u) continue;
      e.emplace_back(u, v);
      e.emplace_back(v, u);
    }
  return DirectedGraph(iota_vec(n), e);
}

DirectedGraph random_digraph(int n, double p, std::uint64_t seed) {
  Xoshiro256 g(mix_seed({seed, static_cast<std::uint64_t>(n)}));
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && g.uniform() < p) e.emplace_back(u, v);
  return DirectedGraph(iota_vec(n), e);
}

DirectedGraph bridged_cliques_graph() {
  std::vector<std::pair<int, int>> und = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3},
                                          {5, 6}, {5, 7}, {5, 8}, {6, 7}, {6, 8}, {7, 8},
                                          {1, 4}, {2, 4}, {7, 4}, {6, 4}};
  std::vector<std::pair<int, int>> e;
  for (auto [u, v] : und) {
    e.emplace_back(u, v);
    e.emplace_back(v, u);
  }
  return DirectedGraph(iota_vec(9), e, {{0, {0, 1, 2, 3}}, {1, {4}}, {2, {5, 6, 7, 8}}});
}

DirectedGraph complete_graph_for(const std::vector<std::vector<int>>& groups) {
  std::vector<int> vs;
  std::map<int, std::vector<int>> labels;
  for (std::size_t j = 0; j < groups.size(); ++j) {
    labels[static_cast<int>(j)] = groups[j];
    vs.insert(vs.end(), groups[j].begin(), groups[j].end());
  }
  std::vector<std::pair<int, int>> e;
  for (int u : vs)
    for (int v : vs)
      if (u != v) e.emplace_back(u, v);
  return DirectedGraph(vs, e, labels);
}

}  // namespace fedbai

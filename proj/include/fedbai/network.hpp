#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace fedbai {

// Directed communication graph; an edge (u, v) means u transmits to v.
// Vertex ids are arbitrary non-negative integers, kept sorted.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  DirectedGraph(std::vector<int> vertices, const std::vector<std::pair<int, int>>& edges,
                std::map<int, std::vector<int>> groups = {});

  const std::vector<int>& vertices() const { return vertices_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  bool has_vertex(int v) const;
  bool has_edge(int u, int v) const;
  std::vector<std::pair<int, int>> edges() const;

  // In-neighbors N_v and out-neighbors N+_v, ascending.
  const std::vector<int>& in_neighbors(int v) const { return in_.at(index(v)); }
  const std::vector<int>& out_neighbors(int v) const { return out_.at(index(v)); }

  const std::map<int, std::vector<int>>& groups() const { return groups_; }
  void set_groups(std::map<int, std::vector<int>> groups);

  int index(int v) const;  // position of v in vertices()

 private:
  std::vector<int> vertices_;
  std::vector<std::vector<int>> in_, out_;
  std::map<int, std::vector<int>> groups_;
};

// Percolation check: grow a set from `group`, absorbing any vertex with at
// least r in-neighbors inside it (ascending-id sweeps to a fixpoint); robust
// iff the set reaches every vertex. Throws GroupNotInGraph for an empty group
// or one with a vertex outside the graph.
bool is_strongly_r_robust(const DirectedGraph& g, const std::vector<int>& group, int r);

// Same property by enumerating every nonempty B outside the group and asking
// for a member with at least r in-neighbors outside B. Throws GraphTooLarge
// above 20 vertices.
bool brute_force_strong_robustness(const DirectedGraph& g, const std::vector<int>& group, int r);

// True iff every non-adversarial vertex has at most f adversarial in-neighbors.
bool verify_f_local(const DirectedGraph& g, const std::vector<int>& adversaries, int f);

// Generators. Every edge is added in both directions unless stated otherwise.
DirectedGraph complete_graph(int n);
DirectedGraph ring_graph(int n, int k);  // each vertex linked to its k nearest on each side
// Each ordered pair (u, v), u != v, is an edge independently with probability p.
DirectedGraph random_digraph(int n, double p, std::uint64_t seed);

// Two 4-cliques {0,1,2,3} and {5,6,7,8} bridged through vertex 4, which is
// linked both ways to 1, 2, 6 and 7. Groups: 0 -> {0..3}, 1 -> {4}, 2 -> {5..8}.
DirectedGraph bridged_cliques_graph();

// Complete graph on the clients of `groups` with those group labels.
DirectedGraph complete_graph_for(const std::vector<std::vector<int>>& groups);

}  // namespace fedbai

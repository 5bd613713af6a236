#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace endsum {

// ===========================================================================
// Ends of finitely presented locally finite graphs
// ===========================================================================
//
// A presentation is a finite rooted digraph; the space it presents is the
// rooted tree unfolding (one fresh copy of a node per incoming edge slot).
// Balls of the unfolding form a compact exhaustion, and counting unbounded
// complementary components is the textbook end census. This module is kept
// independent of the surface machinery so it can serve as an oracle for it.

struct GraphPresentation {
  // out_edges[v] lists the successors of v, with multiplicity.
  std::vector<std::vector<std::size_t>> out_edges;
  std::size_t root = 0;

  std::size_t node_count() const { return out_edges.size(); }
};

struct FiniteGraph {
  std::size_t node_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

namespace graph_detail {

inline void check(const GraphPresentation& g) {
  if (g.out_edges.empty()) throw std::invalid_argument("graph presentation has no nodes");
  if (g.root >= g.node_count()) throw std::invalid_argument("graph root out of range");
  for (const auto& outs : g.out_edges) {
    for (std::size_t w : outs) {
      if (w >= g.node_count()) throw std::invalid_argument("graph edge target out of range");
    }
  }
}

// reach[v][w] = true iff w is reachable from v by a path of >= 1 edges.
inline std::vector<std::vector<bool>> reachability(const GraphPresentation& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> stack(g.out_edges[v].begin(), g.out_edges[v].end());
    while (!stack.empty()) {
      std::size_t w = stack.back();
      stack.pop_back();
      if (reach[v][w]) continue;
      reach[v][w] = true;
      for (std::size_t x : g.out_edges[w]) stack.push_back(x);
    }
  }
  return reach;
}

// Nodes whose unfolding subtree is infinite: those that reach a cycle.
inline std::vector<bool> pumpable_nodes(const GraphPresentation& g,
                                        const std::vector<std::vector<bool>>& reach) {
  const std::size_t n = g.node_count();
  std::vector<bool> pump(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (reach[v][v]) pump[v] = true;  // on a cycle
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (pump[v]) continue;
    for (std::size_t u = 0; u < n; ++u) {
      if (reach[u][u] && (v == u || reach[v][u])) { pump[v] = true; break; }
    }
  }
  return pump;
}

// Counts saturate here: the census only needs stabilization versus growth,
// and branching unfoldings overflow any fixed-width count within a few
// dozen stages.
constexpr std::int64_t kCountSaturation = 4'000'000'000'000'000;

// Multiplicity of each presentation node among the depth-k unfolding nodes,
// for k = 0..m (root at depth 0), saturating at kCountSaturation.
inline std::vector<std::vector<std::int64_t>> depth_counts(const GraphPresentation& g,
                                                           std::int64_t m) {
  std::vector<std::vector<std::int64_t>> counts(
      static_cast<std::size_t>(m) + 1, std::vector<std::int64_t>(g.node_count(), 0));
  counts[0][g.root] = 1;
  for (std::int64_t k = 0; k < m; ++k) {
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      const std::int64_t c = counts[static_cast<std::size_t>(k)][v];
      if (c == 0) continue;
      for (std::size_t w : g.out_edges[v]) {
        auto& slot = counts[static_cast<std::size_t>(k) + 1][w];
        slot = (slot > kCountSaturation - c) ? kCountSaturation : slot + c;
      }
    }
  }
  return counts;
}

}  // namespace graph_detail

/// The induced subgraph of the unfolding at depth <= m (the m-ball around
/// the root). Node ids are breadth-first.
inline FiniteGraph ball(const GraphPresentation& g, std::int64_t m) {
  graph_detail::check(g);
  if (m < 0) throw std::invalid_argument("ball radius must be non-negative");
  FiniteGraph out;
  // frontier holds (unfolding id, presentation node) of the current depth
  std::vector<std::pair<std::size_t, std::size_t>> frontier{{0, g.root}};
  out.node_count = 1;
  for (std::int64_t k = 0; k < m; ++k) {
    std::vector<std::pair<std::size_t, std::size_t>> next;
    for (const auto& [id, v] : frontier) {
      for (std::size_t w : g.out_edges[v]) {
        std::size_t wid = out.node_count++;
        out.edges.push_back({id, wid});
        next.push_back({wid, w});
      }
    }
    frontier = std::move(next);
  }
  return out;
}

/// Number of unbounded connected components of (unfolding minus the m-ball).
/// Each component is the subtree below one depth-(m+1) unfolding node, and
/// it is unbounded exactly when that node is pumpable in the presentation.
inline std::int64_t complement_components(const GraphPresentation& g, std::int64_t m) {
  graph_detail::check(g);
  if (m < 0) throw std::invalid_argument("stage must be non-negative");
  auto reach = graph_detail::reachability(g);
  auto pump = graph_detail::pumpable_nodes(g, reach);
  auto counts = graph_detail::depth_counts(g, m + 1);
  std::int64_t total = 0;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    if (!pump[v]) continue;
    const std::int64_t c = counts[static_cast<std::size_t>(m) + 1][v];
    total = (total > graph_detail::kCountSaturation - c) ? graph_detail::kCountSaturation
                                                         : total + c;
  }
  return total;
}

enum class CensusKind { Finite, CantorLike, Mixed };

struct CensusResult {
  CensusKind kind = CensusKind::Finite;
  std::int64_t finite_count = 0;  // meaningful when kind == Finite
  std::vector<std::int64_t> counts;
};

inline const char* to_string(CensusKind k) {
  switch (k) {
    case CensusKind::Finite: return "finite";
    case CensusKind::CantorLike: return "cantor-like";
    case CensusKind::Mixed: return "mixed";
  }
  return "?";
}

/// Default census horizon: stabilization, if it happens, happens within one
/// pumping length.
inline std::int64_t default_census_horizon(const GraphPresentation& g) {
  return 2 * static_cast<std::int64_t>(g.node_count()) + 4;
}

/// Classifies the end space of the unfolding from the component-count
/// sequence and the cycle structure of the presentation:
///   - Finite(n): counts stabilize at n and no reachable cycle branches;
///   - Cantor-like: some reachable node has two continuations inside its own
///     strongly connected region (component counts multiply);
///   - Mixed: anything else (counts creep upward without in-cycle branching,
///     the signature of a convergent sequence of ends).
inline CensusResult end_census(const GraphPresentation& g, std::int64_t m_max = -1) {
  graph_detail::check(g);
  if (m_max < 0) m_max = default_census_horizon(g);
  if (m_max < 2) throw std::invalid_argument("census horizon must be at least 2");

  CensusResult r;
  for (std::int64_t m = 0; m <= m_max; ++m) {
    r.counts.push_back(complement_components(g, m));
  }

  auto reach = graph_detail::reachability(g);
  bool branching_in_cycle = false;
  for (std::size_t v = 0; v < g.node_count() && !branching_in_cycle; ++v) {
    if (v != g.root && !reach[g.root][v]) continue;
    int returning = 0;
    for (std::size_t w : g.out_edges[v]) {
      if (w == v || reach[w][v]) ++returning;
    }
    if (returning >= 2) branching_in_cycle = true;
  }

  const std::int64_t window =
      std::min<std::int64_t>(static_cast<std::int64_t>(g.node_count()) + 1, m_max);
  // Saturated counts mean the sequence is still growing, never stabilized.
  bool stabilized = r.counts.back() < graph_detail::kCountSaturation;
  for (std::int64_t m = m_max - window; m < m_max && stabilized; ++m) {
    if (r.counts[static_cast<std::size_t>(m)] != r.counts[static_cast<std::size_t>(m_max)]) {
      stabilized = false;
    }
  }

  if (branching_in_cycle) {
    r.kind = CensusKind::CantorLike;
  } else if (stabilized) {
    r.kind = CensusKind::Finite;
    r.finite_count = r.counts.back();
  } else {
    r.kind = CensusKind::Mixed;
  }
  return r;
}

}  // namespace endsum

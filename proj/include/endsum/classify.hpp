#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "endsum/end_space.hpp"
#include "endsum/surface.hpp"

namespace endsum {

// ===========================================================================
// Classification invariants
// ===========================================================================

struct NegativeGenusError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Doubled generalized genus of a compact surface from (pi0, b, chi):
/// 2*(pi0 - (b + chi)/2). Inputs that would give negative genus are not
/// realizable by any compact surface.
inline std::int64_t genus_compact(std::int64_t pi0, std::int64_t b, std::int64_t chi) {
  std::int64_t doubled = 2 * pi0 - b - chi;
  if (doubled < 0) {
    throw NegativeGenusError("no compact surface has negative genus (2g = " +
                             std::to_string(doubled) + ")");
  }
  return doubled;
}

struct GenusValue {
  bool infinite = false;
  std::int64_t doubled = 0;  // meaningful when !infinite

  static GenusValue make_infinite() { return GenusValue{true, 0}; }
  static GenusValue finite(std::int64_t doubled) { return GenusValue{false, doubled}; }

  friend bool operator==(const GenusValue&, const GenusValue&) = default;
};

enum class Parity : std::uint8_t { Even, Odd };

inline Parity parity_of(std::int64_t doubled) {
  return (doubled % 2 == 0) ? Parity::Even : Parity::Odd;
}

/// Complete isomorphism invariant of one connected surface with compact
/// boundary: orientability class, generalized genus, parity (defined only
/// when the surface is orientable outside a compact set), boundary circle
/// count, and the canonical labeled end space. `ends` is empty for compact
/// components, which have no ends at all.
struct ClassInvariant {
  bool orientable = true;
  GenusValue genus;
  std::optional<Parity> parity;
  std::int64_t boundary_count = 0;
  std::optional<EndSpaceExpr> ends;
  bool connected = true;

  friend bool operator==(const ClassInvariant&, const ClassInvariant&) = default;
};

inline std::string describe(const GenusValue& g) {
  if (g.infinite) return "infinite";
  if (g.doubled % 2 == 0) return std::to_string(g.doubled / 2);
  return std::to_string(g.doubled) + "/2";
}

inline std::string describe(const ClassInvariant& inv) {
  std::string s = inv.orientable ? "orientable" : "non-orientable";
  s += ", genus " + describe(inv.genus);
  s += ", parity ";
  s += inv.parity ? (*inv.parity == Parity::Even ? "even" : "odd") : "undefined";
  s += ", boundary " + std::to_string(inv.boundary_count);
  s += ", ends ";
  s += inv.ends ? to_text(*inv.ends) : "none";
  return s;
}

// ===========================================================================
// Occurrence analysis of blocks in the unfolding
// ===========================================================================

struct OccurrenceClass {
  bool infinite = false;
  std::int64_t count = 0;  // exact occurrence count when !infinite

  friend bool operator==(const OccurrenceClass&, const OccurrenceClass&) = default;
};

namespace classify_detail {

// reach[v][w] = true iff w is reachable from v in >= 1 steps.
inline std::vector<std::vector<bool>> reachability(const BlockAutomaton& a) {
  const std::size_t n = a.nodes.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> stack(a.nodes[v].children.begin(), a.nodes[v].children.end());
    while (!stack.empty()) {
      std::size_t w = stack.back();
      stack.pop_back();
      if (reach[v][w]) continue;
      reach[v][w] = true;
      for (std::size_t x : a.nodes[w].children) stack.push_back(x);
    }
  }
  return reach;
}

struct AutomatonAnalysis {
  std::vector<std::vector<bool>> reach;
  std::vector<bool> reachable_from_start;  // including start itself
  std::vector<bool> pumped;                // nodes occurring infinitely often

  bool same_scc(std::size_t u, std::size_t w) const {
    return u == w || (reach[u][w] && reach[w][u]);
  }
};

inline AutomatonAnalysis analyze(const BlockAutomaton& a) {
  AutomatonAnalysis an;
  an.reach = reachability(a);
  const std::size_t n = a.nodes.size();
  an.reachable_from_start.assign(n, false);
  an.reachable_from_start[a.start] = true;
  for (std::size_t v = 0; v < n; ++v) {
    if (an.reach[a.start][v]) an.reachable_from_start[v] = true;
  }
  an.pumped.assign(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (!an.reachable_from_start[v]) continue;
    for (std::size_t u = 0; u < n; ++u) {
      if (!an.reachable_from_start[u]) continue;
      if (an.reach[u][u] && (u == v || an.reach[u][v])) { an.pumped[v] = true; break; }
    }
  }
  return an;
}

}  // namespace classify_detail

/// Whether a block appears finitely or infinitely often in the unfolding: it
/// appears infinitely often exactly when it can be reached from the start
/// through a node on a directed cycle (a pumpable prefix). In the finite case
/// the exact occurrence count is the number of distinct start-to-node paths.
inline OccurrenceClass occurrence_class(const BlockAutomaton& a, std::size_t node) {
  if (node >= a.nodes.size()) throw std::invalid_argument("occurrence_class: node out of range");
  auto an = classify_detail::analyze(a);
  if (!an.reachable_from_start[node]) return OccurrenceClass{false, 0};
  if (an.pumped[node]) return OccurrenceClass{true, 0};

  // Path counting on the cycle-free reachable region. Any path into a
  // pumped node stays pumped, so the region seen here is a DAG.
  const std::size_t n = a.nodes.size();
  std::vector<std::int64_t> occ(n, 0);
  occ[a.start] = 1;
  // Repeated relaxation in topological fashion: nodes ordered by longest
  // path works, but for these small automata a fixpoint sweep is simpler.
  std::vector<std::size_t> order;
  std::vector<int> state(n, 0);
  auto dfs = [&](auto&& self, std::size_t v) -> void {
    state[v] = 1;
    for (std::size_t w : a.nodes[v].children) {
      if (an.pumped[w] || state[w] != 0) continue;
      self(self, w);
    }
    state[v] = 2;
    order.push_back(v);
  };
  if (!an.pumped[a.start]) dfs(dfs, a.start);
  std::reverse(order.begin(), order.end());
  for (std::size_t v : order) {
    for (std::size_t w : a.nodes[v].children) {
      if (!an.pumped[w]) occ[w] += occ[v];
    }
  }
  return OccurrenceClass{false, occ[node]};
}

// ===========================================================================
// End space of an automaton unfolding
// ===========================================================================

struct UnsupportedShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Outcome of reading off the end space of an unfolding. `supported` is
/// false for automaton shapes outside the documented class; `ends` is empty
/// for fully capped automata, which present compact regions without ends.
struct AutomatonEnds {
  bool supported = true;
  std::optional<EndSpaceExpr> ends;
  std::string reason;

  static AutomatonEnds unsupported(std::string why) {
    AutomatonEnds r;
    r.supported = false;
    r.reason = std::move(why);
    return r;
  }
};

namespace classify_detail {

inline int seq_depth(const EndSpaceExpr& e) {
  switch (e.kind()) {
    case EndExprKind::Pt:
    case EndExprKind::Cantor:
      return 0;
    case EndExprKind::Seq:
      return 1 + seq_depth(e.body());
    case EndExprKind::Union: {
      int d = 0;
      for (const auto& p : e.parts()) d = std::max(d, seq_depth(p));
      return d;
    }
  }
  return 0;
}

// Label shared by every end whose path stays inside the strongly connected
// region of v: its neighborhoods are whole subtrees, so the end keeps genus
// (resp. non-orientability) exactly when some reachable block carries it.
inline EndLabel persistent_label(const BlockAutomaton& a, const AutomatonAnalysis& an,
                                 std::size_t v) {
  bool has_genus = a.nodes[v].doubled_genus > 0;
  bool all_orientable = a.nodes[v].orientable;
  for (std::size_t w = 0; w < a.nodes.size(); ++w) {
    if (!an.reach[v][w]) continue;
    if (a.nodes[w].doubled_genus > 0) has_genus = true;
    if (!a.nodes[w].orientable) all_orientable = false;
  }
  return EndLabel{has_genus ? GenusClass::Infinite : GenusClass::Zero, all_orientable};
}

struct EndsBuilder {
  const BlockAutomaton& a;
  const AutomatonAnalysis& an;
  std::map<std::size_t, AutomatonEnds> memo;

  AutomatonEnds node_ends(std::size_t v) {
    auto it = memo.find(v);
    if (it != memo.end()) return it->second;
    AutomatonEnds r = compute(v);
    memo[v] = r;
    return r;
  }

  AutomatonEnds compute(std::size_t v) {
    if (!an.reach[v][v]) {
      // Acyclic node: its ends are the disjoint union over child subtrees.
      std::vector<EndSpaceExpr> parts;
      for (std::size_t w : a.nodes[v].children) {
        AutomatonEnds sub = node_ends(w);
        if (!sub.supported) return sub;
        if (sub.ends) parts.push_back(*sub.ends);
      }
      AutomatonEnds r;
      if (parts.empty()) return r;  // capped branch
      r.ends = (parts.size() == 1) ? parts.front() : EndSpaceExpr::union_of(std::move(parts));
      return r;
    }

    const EndLabel label = persistent_label(a, an, v);

    // Count in-cycle continuations to distinguish a Cantor region from a
    // simple cycle.
    bool branching = false;
    for (std::size_t u = 0; u < a.nodes.size(); ++u) {
      if (!an.same_scc(u, v)) continue;
      int returning = 0;
      for (std::size_t w : a.nodes[u].children) {
        if (an.same_scc(w, v)) ++returning;
      }
      if (returning >= 2) { branching = true; break; }
    }

    if (branching) {
      // Complement components multiply down the unfolding: a Cantor block.
      // Side branches may only be capped; ends dangling off a Cantor region
      // accumulate onto it and have no expression in this grammar.
      for (std::size_t u = 0; u < a.nodes.size(); ++u) {
        if (!an.same_scc(u, v)) continue;
        for (std::size_t w : a.nodes[u].children) {
          if (an.same_scc(w, v)) continue;
          AutomatonEnds sub = node_ends(w);
          if (!sub.supported) return sub;
          if (sub.ends) {
            return AutomatonEnds::unsupported(
                "a branching cycle region emits its own ends; the resulting "
                "accumulation onto a cantor block is outside the supported class");
          }
        }
      }
      AutomatonEnds r;
      r.ends = EndSpaceExpr::cantor(label);
      return r;
    }

    // Simple cycle: walk it once from v, collecting the ends emitted per
    // traversal through exit edges.
    std::vector<EndSpaceExpr> per_period;
    std::size_t u = v;
    do {
      std::size_t next = u;
      bool found_next = false;
      for (std::size_t w : a.nodes[u].children) {
        if (an.same_scc(w, v)) {
          next = w;
          found_next = true;
        } else {
          AutomatonEnds sub = node_ends(w);
          if (!sub.supported) return sub;
          if (sub.ends) per_period.push_back(*sub.ends);
        }
      }
      if (!found_next) throw std::logic_error("cycle node without in-cycle successor");
      u = next;
    } while (u != v);

    AutomatonEnds r;
    if (per_period.empty()) {
      r.ends = EndSpaceExpr::pt(label);
    } else {
      EndSpaceExpr body = (per_period.size() == 1)
                              ? per_period.front()
                              : EndSpaceExpr::union_of(std::move(per_period));
      r.ends = EndSpaceExpr::seq(std::move(body), label);
    }
    return r;
  }
};

}  // namespace classify_detail

/// End space of the unfolding, read off the strongly connected structure:
/// capped branches contribute nothing, simple cycles contribute one end (or
/// a convergent sequence when they emit side ends), branching cycle regions
/// contribute a uniformly labeled Cantor block, acyclic nodes take finite
/// unions. Shapes whose expression would nest sequences deeper than two
/// levels are reported as unsupported; the graph-ends census still covers
/// them.
inline AutomatonEnds ends_of_automaton(const BlockAutomaton& a) {
  if (a.nodes.empty() || a.start >= a.nodes.size()) {
    throw std::invalid_argument("ends_of_automaton: malformed automaton");
  }
  auto an = classify_detail::analyze(a);
  classify_detail::EndsBuilder builder{a, an, {}};
  AutomatonEnds r = builder.node_ends(a.start);
  if (!r.supported) return r;
  if (r.ends) {
    r.ends = canonicalize(*r.ends);
    if (classify_detail::seq_depth(*r.ends) > 2) {
      return AutomatonEnds::unsupported(
          "sequence ends nested deeper than two levels are outside the supported class");
    }
  }
  return r;
}

// ===========================================================================
// Full classification
// ===========================================================================

inline ClassInvariant classify_component(const Component& comp) {
  ClassInvariant inv;
  inv.boundary_count = comp.boundary_count;
  inv.connected = true;

  bool orientable = comp.core.orientable;
  bool genus_infinite = false;
  std::int64_t finite_doubled = comp.core.doubled_genus;
  bool parity_defined = true;
  std::vector<EndSpaceExpr> end_parts;

  for (const auto& [name, a] : comp.anchors) {
    auto an = classify_detail::analyze(a);
    for (std::size_t v = 0; v < a.nodes.size(); ++v) {
      if (!an.reachable_from_start[v]) continue;
      const Block& blk = a.nodes[v];
      if (!blk.orientable) orientable = false;
      OccurrenceClass occ = occurrence_class(a, v);
      if (occ.infinite) {
        if (blk.doubled_genus > 0) genus_infinite = true;
        if (!blk.orientable) parity_defined = false;
      } else {
        finite_doubled += occ.count * blk.doubled_genus;
      }
    }
    AutomatonEnds ae = ends_of_automaton(a);
    if (!ae.supported) {
      throw UnsupportedShapeError("anchor " + name + ": " + ae.reason);
    }
    if (ae.ends) end_parts.push_back(*ae.ends);
  }

  inv.orientable = orientable;
  inv.genus = genus_infinite ? GenusValue::make_infinite() : GenusValue::finite(finite_doubled);
  if (parity_defined) {
    // Stabilized doubled genus mod 2: pumped blocks beyond this point are
    // orientable, hence of even doubled genus, and do not move the parity.
    inv.parity = parity_of(finite_doubled);
  }
  if (!end_parts.empty()) {
    EndSpaceExpr all = (end_parts.size() == 1) ? end_parts.front()
                                               : EndSpaceExpr::union_of(std::move(end_parts));
    inv.ends = canonicalize(all);
  }
  return inv;
}

/// Classification tuple of every component of a valid descriptor.
inline std::vector<ClassInvariant> classify(const SurfaceDescriptor& d) {
  require_valid(d);
  std::vector<ClassInvariant> out;
  out.reserve(d.components.size());
  for (const Component& comp : d.components) out.push_back(classify_component(comp));
  return out;
}

}  // namespace endsum

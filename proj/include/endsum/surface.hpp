#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace endsum {

// ===========================================================================
// Finite presentations of noncompact surfaces with compact boundary
// ===========================================================================

/// Euler characteristic of a compact surface piece with the given doubled
/// genus (2g for orientable pieces, crosscap count k otherwise) and number
/// of boundary circles. The formula 2 - 2g - b and 2 - k - b collapse to one
/// expression in the doubled convention.
inline std::int64_t piece_chi(std::int64_t doubled_genus, std::int64_t circles) {
  return 2 - doubled_genus - circles;
}

/// A compact connected surface piece. `doubled_genus` stores 2g so that
/// half-integer genus stays exact; orientable pieces need an even value.
/// `circles` counts the boundary circles of the piece itself.
struct CompactPiece {
  std::int64_t doubled_genus = 0;
  bool orientable = true;
  std::int64_t circles = 0;

  std::int64_t chi() const { return piece_chi(doubled_genus, circles); }

  friend bool operator==(const CompactPiece&, const CompactPiece&) = default;
};

/// One block of an end region. A block has one entry circle and one exit
/// circle per child, so it carries 1 + |children| boundary circles; a block
/// with no children caps its branch.
struct Block {
  std::int64_t doubled_genus = 0;
  bool orientable = true;
  std::vector<std::size_t> children;

  std::int64_t circles() const { return 1 + static_cast<std::int64_t>(children.size()); }
  std::int64_t chi() const { return piece_chi(doubled_genus, circles()); }

  friend bool operator==(const Block&, const Block&) = default;
};

/// A finite automaton whose tree unfolding (a fresh block copy per child
/// slot, glued entry-to-exit) presents the end region hanging off one anchor
/// circle of the core.
struct BlockAutomaton {
  std::vector<Block> nodes;
  std::size_t start = 0;

  friend bool operator==(const BlockAutomaton&, const BlockAutomaton&) = default;
};

/// One connected component: a compact core whose circles are either true
/// boundary circles of the surface or anchors where an end region attaches.
/// Boundary lives only on the core, so the presented surface has compact
/// boundary by construction.
struct Component {
  CompactPiece core;
  std::int64_t boundary_count = 0;
  std::vector<std::pair<std::string, BlockAutomaton>> anchors;

  friend bool operator==(const Component&, const Component&) = default;
};

struct SurfaceDescriptor {
  std::vector<Component> components;

  friend bool operator==(const SurfaceDescriptor&, const SurfaceDescriptor&) = default;
};

// ===========================================================================
// Validation
// ===========================================================================

enum class ValidationCode {
  EmptyDescriptor,
  EmptyAutomaton,
  DanglingNodeId,
  OddOrientableGenus,
  NonorientableWithoutCrosscap,
  CircleMismatch,
  NegativeValue,
  DuplicateAnchorName,
};

struct ValidationIssue {
  ValidationCode code;
  std::string detail;
};

inline const char* to_string(ValidationCode c) {
  switch (c) {
    case ValidationCode::EmptyDescriptor: return "EmptyDescriptor";
    case ValidationCode::EmptyAutomaton: return "EmptyAutomaton";
    case ValidationCode::DanglingNodeId: return "DanglingNodeId";
    case ValidationCode::OddOrientableGenus: return "OddOrientableGenus";
    case ValidationCode::NonorientableWithoutCrosscap: return "NonorientableWithoutCrosscap";
    case ValidationCode::CircleMismatch: return "CircleMismatch";
    case ValidationCode::NegativeValue: return "NegativeValue";
    case ValidationCode::DuplicateAnchorName: return "DuplicateAnchorName";
  }
  return "?";
}

/// Checks every structural invariant; an empty result means the descriptor
/// is valid.
inline std::vector<ValidationIssue> validate_descriptor(const SurfaceDescriptor& d) {
  std::vector<ValidationIssue> issues;
  auto add = [&](ValidationCode c, std::string detail) {
    issues.push_back({c, std::move(detail)});
  };

  if (d.components.empty()) {
    add(ValidationCode::EmptyDescriptor, "descriptor has no components");
    return issues;
  }
  for (std::size_t ci = 0; ci < d.components.size(); ++ci) {
    const Component& comp = d.components[ci];
    const std::string where = "component " + std::to_string(ci);

    if (comp.core.doubled_genus < 0 || comp.core.circles < 0 || comp.boundary_count < 0) {
      add(ValidationCode::NegativeValue, where + ": negative core field");
    }
    if (comp.core.orientable && comp.core.doubled_genus % 2 != 0) {
      add(ValidationCode::OddOrientableGenus,
          where + ": orientable core with doubled genus " +
              std::to_string(comp.core.doubled_genus));
    }
    if (!comp.core.orientable && comp.core.doubled_genus == 0) {
      add(ValidationCode::NonorientableWithoutCrosscap,
          where + ": a non-orientable core needs at least one crosscap");
    }
    if (comp.core.circles !=
        comp.boundary_count + static_cast<std::int64_t>(comp.anchors.size())) {
      add(ValidationCode::CircleMismatch,
          where + ": core has " + std::to_string(comp.core.circles) +
              " circles but boundary_count + anchors = " +
              std::to_string(comp.boundary_count + static_cast<std::int64_t>(comp.anchors.size())));
    }
    for (std::size_t ai = 0; ai < comp.anchors.size(); ++ai) {
      const auto& [name, a] = comp.anchors[ai];
      const std::string aw = where + ", anchor " + name;
      for (std::size_t aj = ai + 1; aj < comp.anchors.size(); ++aj) {
        if (comp.anchors[aj].first == name) {
          add(ValidationCode::DuplicateAnchorName, aw + " declared twice");
        }
      }
      if (a.nodes.empty()) {
        add(ValidationCode::EmptyAutomaton, aw + " has no blocks");
        continue;
      }
      if (a.start >= a.nodes.size()) {
        add(ValidationCode::DanglingNodeId, aw + ": start id out of range");
      }
      for (std::size_t ni = 0; ni < a.nodes.size(); ++ni) {
        const Block& blk = a.nodes[ni];
        if (blk.doubled_genus < 0) {
          add(ValidationCode::NegativeValue, aw + ", node " + std::to_string(ni));
        }
        if (blk.orientable && blk.doubled_genus % 2 != 0) {
          add(ValidationCode::OddOrientableGenus,
              aw + ", node " + std::to_string(ni) + ": orientable block with doubled genus " +
                  std::to_string(blk.doubled_genus));
        }
        if (!blk.orientable && blk.doubled_genus == 0) {
          add(ValidationCode::NonorientableWithoutCrosscap,
              aw + ", node " + std::to_string(ni) +
                  ": a non-orientable block needs at least one crosscap");
        }
        for (std::size_t c : blk.children) {
          if (c >= a.nodes.size()) {
            add(ValidationCode::DanglingNodeId,
                aw + ", node " + std::to_string(ni) + ": child id " + std::to_string(c));
          }
        }
      }
    }
  }
  return issues;
}

struct InvalidDescriptorError : std::invalid_argument {
  explicit InvalidDescriptorError(const std::vector<ValidationIssue>& issues)
      : std::invalid_argument(format(issues)) {}

  static std::string format(const std::vector<ValidationIssue>& issues) {
    std::string msg = "invalid descriptor:";
    for (const auto& i : issues) {
      msg += "\n  [";
      msg += to_string(i.code);
      msg += "] ";
      msg += i.detail;
    }
    return msg;
  }
};

inline void require_valid(const SurfaceDescriptor& d) {
  auto issues = validate_descriptor(d);
  if (!issues.empty()) throw InvalidDescriptorError(issues);
}

// ===========================================================================
// Compact exhaustion
// ===========================================================================

/// (pi0, b, chi) of a compact subsurface stage. The derived generalized
/// genus is pi0 - (b + chi)/2, stored doubled to keep half-integers exact.
struct CompactInvariant {
  std::int64_t pi0 = 0;
  std::int64_t b = 0;
  std::int64_t chi = 0;

  std::int64_t doubled_genus() const { return 2 * pi0 - b - chi; }

  friend bool operator==(const CompactInvariant&, const CompactInvariant&) = default;
};

namespace detail {

// Hard bound on every intermediate quantity of a stage computation. Stages
// whose block counts or Euler characteristic leave this range raise
// overflow_error instead of silently wrapping; the supported analysis
// horizons (m around 20, modest branching) stay far below it.
constexpr std::int64_t kStageBound = 100'000'000'000'000'000;

inline std::int64_t stage_checked(__int128 v, const char* what) {
  if (v > kStageBound || v < -static_cast<__int128>(kStageBound)) {
    throw std::overflow_error(std::string("exhaustion stage overflow in ") + what);
  }
  return static_cast<std::int64_t>(v);
}

// Occurrence counts of each presentation node among the depth-k blocks of
// the unfolding, for k = 1..m. counts[k][v] is the number of copies of v at
// depth k (the start block sits at depth 1).
inline std::vector<std::vector<std::int64_t>> unfolding_counts(const BlockAutomaton& a,
                                                               std::int64_t m) {
  std::vector<std::vector<std::int64_t>> counts(
      static_cast<std::size_t>(m) + 1, std::vector<std::int64_t>(a.nodes.size(), 0));
  if (m >= 1) counts[1][a.start] = 1;
  for (std::int64_t k = 1; k < m; ++k) {
    for (std::size_t v = 0; v < a.nodes.size(); ++v) {
      const std::int64_t c = counts[static_cast<std::size_t>(k)][v];
      if (c == 0) continue;
      for (std::size_t child : a.nodes[v].children) {
        auto& slot = counts[static_cast<std::size_t>(k) + 1][child];
        slot = stage_checked(static_cast<__int128>(slot) + c, "block counts");
      }
    }
  }
  return counts;
}

}  // namespace detail

/// Invariants of the exhaustion stage K_m of one component: the core plus
/// every unfolded block of depth <= m. b counts the true boundary circles
/// plus the depth-m frontier circles where K_{m+1} will attach.
inline CompactInvariant component_exhaustion_invariant(const Component& comp, std::int64_t m) {
  CompactInvariant inv;
  inv.pi0 = 1;
  inv.b = comp.boundary_count;
  inv.chi = comp.core.chi();
  for (const auto& [name, a] : comp.anchors) {
    (void)name;
    if (m == 0) {
      inv.b += 1;  // the anchor circle itself is the frontier
      continue;
    }
    auto counts = detail::unfolding_counts(a, m);
    __int128 frontier = inv.b;
    __int128 chi = inv.chi;
    for (std::size_t v = 0; v < a.nodes.size(); ++v) {
      frontier += static_cast<__int128>(counts[static_cast<std::size_t>(m)][v]) *
                  static_cast<std::int64_t>(a.nodes[v].children.size());
      frontier = detail::stage_checked(frontier, "frontier circles");
    }
    for (std::int64_t k = 1; k <= m; ++k) {
      for (std::size_t v = 0; v < a.nodes.size(); ++v) {
        chi += static_cast<__int128>(counts[static_cast<std::size_t>(k)][v]) * a.nodes[v].chi();
        chi = detail::stage_checked(chi, "euler characteristic");
      }
    }
    inv.b = static_cast<std::int64_t>(frontier);
    inv.chi = static_cast<std::int64_t>(chi);
  }
  return inv;
}

/// Stage-m exhaustion invariants, one per component.
inline std::vector<CompactInvariant> exhaustion_invariants(const SurfaceDescriptor& d,
                                                           std::int64_t m) {
  require_valid(d);
  std::vector<CompactInvariant> out;
  out.reserve(d.components.size());
  for (const Component& comp : d.components) {
    out.push_back(component_exhaustion_invariant(comp, m));
  }
  return out;
}

}  // namespace endsum

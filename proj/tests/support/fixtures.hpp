#pragma once

// The worked examples used across the suites: the plane, the open annulus,
// the Loch Ness monster, and compact-core variants of each.

#include "endsum/surface.hpp"

namespace endsum::testing {

// Core with one anchor circle and a single cylinder block looping on
// itself: the plane.
inline SurfaceDescriptor plane_descriptor() {
  Component c;
  c.core = CompactPiece{0, true, 1};
  c.boundary_count = 0;
  c.anchors.push_back({"a1", BlockAutomaton{{Block{0, true, {0}}}, 0}});
  return SurfaceDescriptor{{c}};
}

// The plane again, presented with a period-three cylinder cycle.
inline SurfaceDescriptor plane_period3_descriptor() {
  Component c;
  c.core = CompactPiece{0, true, 1};
  c.boundary_count = 0;
  c.anchors.push_back(
      {"a1", BlockAutomaton{{Block{0, true, {1}}, Block{0, true, {2}}, Block{0, true, {0}}}, 0}});
  return SurfaceDescriptor{{c}};
}

inline SurfaceDescriptor two_planes_descriptor() {
  auto p = plane_descriptor();
  SurfaceDescriptor d;
  d.components = {p.components[0], p.components[0]};
  return d;
}

// Two anchors with cylinder chains: the open annulus.
inline SurfaceDescriptor annulus_descriptor() {
  Component c;
  c.core = CompactPiece{0, true, 2};
  c.boundary_count = 0;
  c.anchors.push_back({"a1", BlockAutomaton{{Block{0, true, {0}}}, 0}});
  c.anchors.push_back({"a2", BlockAutomaton{{Block{0, true, {0}}}, 0}});
  return SurfaceDescriptor{{c}};
}

// One anchor, one torus block looping on itself: the Loch Ness monster.
inline SurfaceDescriptor lochness_descriptor() {
  Component c;
  c.core = CompactPiece{0, true, 1};
  c.boundary_count = 0;
  c.anchors.push_back({"a1", BlockAutomaton{{Block{2, true, {0}}}, 0}});
  return SurfaceDescriptor{{c}};
}

inline SurfaceDescriptor lochness_plus_plane_descriptor() {
  SurfaceDescriptor d;
  d.components = {lochness_descriptor().components[0], plane_descriptor().components[0]};
  return d;
}

inline SurfaceDescriptor two_lochness_descriptor() {
  SurfaceDescriptor d;
  d.components = {lochness_descriptor().components[0], lochness_descriptor().components[0]};
  return d;
}

// Torus core with one cylinder end: the punctured torus.
inline SurfaceDescriptor punctured_torus_descriptor() {
  Component c;
  c.core = CompactPiece{2, true, 1};
  c.boundary_count = 0;
  c.anchors.push_back({"a1", BlockAutomaton{{Block{0, true, {0}}}, 0}});
  return SurfaceDescriptor{{c}};
}

// Klein bottle core with one cylinder end: the punctured Klein bottle.
inline SurfaceDescriptor punctured_klein_descriptor() {
  Component c;
  c.core = CompactPiece{2, false, 1};
  c.boundary_count = 0;
  c.anchors.push_back({"a1", BlockAutomaton{{Block{0, true, {0}}}, 0}});
  return SurfaceDescriptor{{c}};
}

}  // namespace endsum::testing

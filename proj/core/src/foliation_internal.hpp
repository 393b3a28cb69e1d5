#pragma once

// Exact horizontal-foliation plumbing shared by the band decomposition and
// the mesh builder: snapped rational circumference ratios/twists, the
// trajectory continuation map, and the critical-height closure.  Internal
// to core/src.

#include <set>
#include <vector>

#include "elk/flat_surface.hpp"
#include "surface_internal.hpp"

namespace elk {
namespace internal {

// Rational model of the surface's horizontal data.  All heights are
// absolute arclengths in units of cylinder 0's circumference at flow time
// 0; real lengths are recovered by scaling with c0 * exp(-log_time).
struct FoliationCtx {
  const FlatSurface& X;
  GluingLookup gl;
  std::vector<Frac> C;   // circumference ratios c0_j / c0_0
  std::vector<Frac> tw;  // twist fractions

  explicit FoliationCtx(const FlatSurface& X_);

  double unit() const;   // arclength unit in real terms
  // frame position on (cyl, side) of an absolute body height
  Frac frame_of(int cyl, int side, const Frac& h) const;
  // body height of a frame position
  Frac height_of(int cyl, int side, const Frac& p) const;
};

struct TraceState {
  int cyl;
  Frac h;   // absolute body height in [0, C_cyl)
  int dir;  // +1 exits right, -1 exits left
  bool operator==(const TraceState&) const = default;
};

// Continue the horizontal trajectory across one gluing.  h must avoid the
// critical heights so the interval choice is unambiguous.
TraceState trace_step(const FoliationCtx& cx, const TraceState& st);

// Cuts of both circles as body heights, closed under the continuation maps.
std::vector<std::set<Frac>> critical_heights(const FoliationCtx& cx);

}  // namespace internal
}  // namespace elk

#pragma once

// Shared plumbing for the flat-surface layer: fast gluing lookup and the
// end-walk neighbor maps.  Internal to core/src.

#include <string>
#include <vector>

#include "elk/flat_surface.hpp"

namespace elk {
namespace internal {

struct GluingLookup {
  struct Slot {
    IntervalRef partner;
    bool flip = false;
    bool present = false;
  };
  // slots[cyl][side][interval]
  std::vector<std::vector<std::vector<Slot>>> slots;

  explicit GluingLookup(const FlatSurface& X);
  const Slot& at(const IntervalRef& r) const {
    return slots[r.cyl][r.side][r.interval];
  }
};

// Circle adjacency: the hi end of interval i meets the lo end of interval
// i+1 (mod m) at the shared cut.
EndRef a_neighbor(const FlatSurface& X, const EndRef& e);

// Gluing identification: lo<->lo, hi<->hi without flip; lo<->hi with flip.
EndRef b_neighbor(const GluingLookup& gl, const EndRef& e);

// Frame position of an interval end on its circle, in [0,1).
Frac end_position(const FlatSurface& X, const EndRef& e);

std::string side_name(const FlatSurface& X, int cyl, int side);

}  // namespace internal
}  // namespace elk

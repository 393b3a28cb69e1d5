#pragma once

// JSON serialization for FlatSurface.
//
// Layout:
//   {
//     "kind": {"genus": 0, "punctures": 5},
//     "tag": "s05_symmetric",                      // optional
//     "cylinders": [
//       {"core": "alpha",
//        "circumference": "1", "width": "1",       // decimal strings
//        "twist": "0",                             // absolute length
//        "twist_frac": "0",                        // fraction of circumference
//        "winding": 0,                             // optional, default 0
//        "cuts_left": ["0","1/4","1/2","3/4"],     // exact fractions
//        "cuts_right": ["0"]},
//       ...
//     ],
//     "gluing": [
//       {"side_a": "alpha.R", "interval_a": 2,
//        "side_b": "beta.L",  "interval_b": 0, "flip": false},
//       ...
//     ],
//     "marked": [{"side": "alpha.L", "at": "1/4"}, ...]
//   }
//
// All reals are strings so files stay diffable and round-trip bit-exact.
// Sides are named "<core>.L" / "<core>.R", which requires core names to be
// unique per surface.
//
// Hand-written files may use fold sugar: a gluing entry whose two interval
// references are identical with flip=true means "fold this interval onto
// itself by the half-turn".  The reader splits the interval at its midpoint,
// marks the center (simple pole), and renumbers; interval indices elsewhere
// in the file refer to the pre-split numbering.  The writer always emits the
// normalized (split) form.

#include <iosfwd>
#include <string>

#include "elk/flat_surface.hpp"

namespace elk {

FlatSurface read_flat_surface(std::istream& in);
FlatSurface read_flat_surface_file(const std::string& path);

std::string write_flat_surface(const FlatSurface& X);
void write_flat_surface_file(const FlatSurface& X, const std::string& path);

}  // namespace elk

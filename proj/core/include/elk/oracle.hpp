#pragma once

// Shortest closed curve in a fixed free-homotopy class, on a fixed mesh.
//
// The class is handed over as a representative crossing path.  The oracle
// unrolls the annular cover attached to that class — a strip of copies of the
// representative's faces, grown ring by ring with lazy face instances and
// vertex-fan closure — and looks for the shortest node-to-deck-image path on
// the lifted chord graph.  Projecting such a path back down gives a closed
// curve freely homotopic to the representative, and minimizing over start
// nodes gives the shortest one the node graph can express.  Crossings are
// then slid along their arcs (coordinate descent, each slide is convex) so
// the reported curve is a true geodesic for the given cell metric within its
// crossing sequence.
//
// The cover is cached between calls: changing the metric only changes edge
// weights, never the combinatorics, so repeated queries (as in a cutting
// plane loop) reuse all of the unrolling work.

#include <memory>
#include <string>
#include <vector>

#include "elk/mesh.hpp"

namespace elk {

// A closed curve frozen as its crossing data.  `cell_len[c]` is the flat
// length the curve spends inside cell c, so its length under a per-cell
// metric is a fixed linear functional of the metric.
struct FrozenCycle {
  CurvePath steps;               // crossing sequence, t already optimized
  std::vector<char> pinned;      // crossing i sits on a mesh vertex, cannot slide
  std::vector<double> cell_len;  // indexed by mesh cell
  std::vector<int> key;          // canonical chord-id word (dedup + tie order)

  double length(const std::vector<double>& rho) const;
  double flat_length() const;
};

struct OracleOptions {
  int depth_cap = 8;       // rings of cover growth before giving up
  int strip_periods = 2;   // seed the cover with this many periods each way
  double cut_slack = 0.5;  // report every cycle within (1+slack) of the best
  int max_cuts = 24;       // cap on reported cycles per call
  bool smooth = true;      // slide crossings to their in-sequence optimum
};

class ClassOracle {
 public:
  // `rep` must be a valid crossing path on `m` (it fixes the homotopy class);
  // `name` only decorates error messages.
  ClassOracle(const Mesh& m, CurvePath rep, std::string name, OracleOptions opt = {});
  ~ClassOracle();
  ClassOracle(ClassOracle&&) noexcept;
  ClassOracle& operator=(ClassOracle&&) noexcept;

  struct Result {
    double length = 0;                // length of the shortest cycle found
    std::vector<FrozenCycle> cycles;  // near-minimal candidates, best first
  };

  // rho: one weight per mesh cell, entries >= 0.  Throws Error("oracle_depth")
  // if the cover would need more than depth_cap rings to certify the answer.
  Result shortest(const std::vector<double>& rho);

  const std::string& name() const;
  int rings_built() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl;
};

// Slides interior crossings of a closed path to minimize its length under
// rho, keeping the crossing sequence fixed.  pinned may be empty (nothing
// pinned) or one flag per step.  Returns the final length.
double smooth_cycle(const Mesh& m, CurvePath& path, const std::vector<char>& pinned,
                    const std::vector<double>& rho);

// Flat length a closed path spends inside each cell (size = m.cells.size()).
std::vector<double> cell_lengths(const Mesh& m, const CurvePath& path);

}  // namespace elk

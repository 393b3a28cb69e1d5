#pragma once

// Quadrilateral mesh over a flat surface, the discretization behind the
// extremal-length solver.  Each cylinder carries a tensor grid: columns
// across the width, rows along the circumference.  Row lines are the
// critical heights of the horizontal foliation (so cell edges on the
// boundary circles never straddle a cut, and row structure matches across
// gluings), refined by midpoint splitting; columns start at {0, 1/2, 1}
// of the width and grade geometrically toward circles carrying marked
// points.  One refinement level splits every cell 2x2, so level r has
// exactly 4^r times the base cell count, and the cells tile the surface:
// total cell area equals the surface area to relative error 1e-9.
//
// On top of the cells sits an identified boundary complex.  Every maximal
// piece of shared cell boundary is an *arc* (interior grid segments, and
// gluing pieces subdivided by the breakpoints of both sides).  Nodes live
// on arcs: the endpoints (grid vertices and cone points -- marked points
// are excluded, so no path may pass through a puncture) plus two Steiner
// nodes at 1/3 and 2/3.  Within each face, every pair of boundary nodes is
// joined by a straight chord; shortest curves are computed on this graph.

#include <array>
#include <vector>

#include "elk/flat_surface.hpp"

namespace elk {

struct MeshOptions {
  int resolution = 0;      // midpoint refinement levels
  int puncture_depth = 2;  // width-grading levels toward marked circles (ratio 1/2)
  // Reduced node set: a single node per arc midpoint and no vertex nodes.
  // Used by the reference (enumerate-everything) configurations.
  bool midpoint_nodes_only = false;
};

struct MeshCell {
  int cyl = 0;
  Frac x0, x1;      // fraction of the width
  Frac y0, y1;      // fraction of the circumference; y1 <= y0 + 1 (top row wraps)
  double area = 0;  // at the surface's current flow time
  bool puncture_adjacent = false;
};

// Cell edges in face-local terms.
inline constexpr int EDGE_L = 0;
inline constexpr int EDGE_R = 1;
inline constexpr int EDGE_B = 2;
inline constexpr int EDGE_T = 3;

// One side of an identified boundary arc: the cell edge it lies on and the
// body coordinate along that edge (y for L/R edges, x for B/T edges) at
// parameter t = 0 and t = len.  Coordinates are unwrapped into the cell's
// own range, so u may exceed 1 on a top row.
struct MeshArcSide {
  int cell = -1;
  int edge = EDGE_L;
  double u0 = 0, u1 = 0;
};

inline constexpr int ARC_VERTICAL = 0;  // internal constant-x grid line
inline constexpr int ARC_HORIZONTAL = 1;
inline constexpr int ARC_CIRCLE = 2;  // identified boundary-circle piece

struct MeshArc {
  MeshArcSide s[2];
  int kind = ARC_VERTICAL;
  double len = 0;          // reference arclength
  int vlo = -1, vhi = -1;  // vertex ids at t = 0 / t = len
};

struct MeshNode {
  int arc = -1;
  double t = 0;
  bool pinned = false;  // arc endpoint (grid vertex): never moved by smoothing
};

struct MeshChord {
  int face = -1;
  int n0 = -1, n1 = -1;
  double len = 0;
  std::array<double, 2> p0{}, p1{};  // endpoints in face-local real coords
};

// Traversal of a face boundary: the arc, which of its sides faces this
// face, and whether the CCW walk runs t from 0 to len or backwards.
struct ArcUse {
  int arc = -1;
  int side = 0;
  bool fwd = true;
};

struct Mesh {
  // own a copy: a mesh stays valid after the surface it was built from is gone
  FlatSurface X;
  MeshOptions opt;

  std::vector<MeshCell> cells;
  std::vector<MeshArc> arcs;
  std::vector<MeshNode> nodes;
  std::vector<MeshChord> chords;

  // Cyclic CCW boundary of each face, and the vertex sitting between
  // consecutive boundary arcs (slot k precedes face_arcs[f][k]).
  std::vector<std::vector<ArcUse>> face_arcs;
  std::vector<std::vector<int>> face_corner_vertex;

  struct VertexInfo {
    int corners = 0;  // face corners around this point
    bool marked = false;
    int node = -1;  // graph node, -1 for marked points (and in midpoint mode)
  };
  std::vector<VertexInfo> verts;

  std::vector<std::vector<int>> face_chords;  // chord ids per face
  std::vector<std::vector<Frac>> xgrid, ygrid;

  int cell_index(int cyl, int ix, int iy) const;
  int columns(int cyl) const { return static_cast<int>(xgrid[cyl].size()) - 1; }
  int rows(int cyl) const { return static_cast<int>(ygrid[cyl].size()); }
  double cell_area_total() const;

  // Real face-local position of arc parameter t seen from side `side`.
  std::array<double, 2> arc_point(int arc, int side, double t) const;

  // Circle arc containing frame position p on (cyl, side); returns arc id
  // and which MeshArcSide belongs to that circle.
  std::pair<int, int> circle_arc_at(int cyl, int side, const Frac& p) const;

  // Lookup tables filled by the builder.
  // horizontal arc on grid line iy under column ix; vertical arc on
  // internal line ix (1..columns-1) at row iy.
  std::vector<std::vector<std::vector<int>>> harc, varc;
  struct CircleArcEntry {
    Frac lo;     // frame position at t = 0 end of this side
    Frac len;    // frame length
    int arc = -1;
    int side = 0;
  };
  std::vector<std::array<std::vector<CircleArcEntry>, 2>> circle_arcs;
};

Mesh build_mesh(const FlatSurface& X, const MeshOptions& opt = {});

// A closed curve on the mesh, as the sequence of arc crossings: leave
// `face` through `arc` (the MeshArcSide `side` faces the exited cell) at
// parameter t.  The next face is the arc's other side.
struct CurveStep {
  int face = -1;
  int arc = -1;
  int side = 0;
  double t = 0;
};
using CurvePath = std::vector<CurveStep>;

// Entry point of step i (the previous step's crossing seen from this face).
std::array<double, 2> path_entry_point(const Mesh& m, const CurvePath& p, std::size_t i);
std::array<double, 2> path_exit_point(const Mesh& m, const CurvePath& p, std::size_t i);

// Polyline length under a per-cell conformal factor rho (nullptr: rho = 1).
double path_length(const Mesh& m, const CurvePath& p, const std::vector<double>* rho);

// Vertical circle isotopic to the core of cylinder `cyl`, routed through
// the column containing x = 1/2.
CurvePath core_rep(const Mesh& m, int cyl);

// Closed horizontal trajectories, one per band of horizontal_bands(m.X),
// in the same order, routed at one third of each band's thickness so the
// heights avoid every grid line at every refinement level.
std::vector<CurvePath> band_reps(const Mesh& m);

// Winding class (p, q) of a closed path on a one-cylinder genus-1 surface:
// p counts signed crossings of a horizontal circle, q of the boundary
// circle, so the core is (1, 0).
std::pair<long long, long long> torus_class_of(const Mesh& m, const CurvePath& p);

// Straight-line representative of winding class (p, q) != (0, 0) on a
// one-cylinder genus-1 surface; torus_class_of(m, torus_rep(m, p, q)) is
// (p, q).  Non-primitive classes give the |gcd|-fold wrapped geodesic.
CurvePath torus_rep(const Mesh& m, long long p, long long q);

}  // namespace elk

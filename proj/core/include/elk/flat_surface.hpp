#pragma once

// Flat surfaces built from Euclidean cylinders glued along boundary
// intervals.  Each cylinder is [0,w] x (R / cZ): x runs across the width,
// y runs along the (vertical) core.  The two boundary circles are "L" (x=0)
// and "R" (x=w).
//
// Every boundary circle carries a partition into intervals, stored as exact
// fractions of the circumference in a twist-independent *gluing frame*:
// on the left circle the frame equals the body coordinate y/c, on the right
// circle the body coordinate is frame + twist.  Twisting a cylinder
// therefore never touches the partition data, which keeps gluing validation
// and cover surgery exact.
//
// Orientation bookkeeping: a gluing between an L and an R circle is
// direction-preserving (flip = false); a gluing between two circles of the
// same letter must reverse direction (flip = true).  validate() enforces
// this.  A "fold" (an interval glued to itself by the half-turn) is stored
// in normalized form: the interval split at its midpoint into a flipped
// pair, with a marked point (simple pole, cone angle pi) at the center.

#include <string>
#include <vector>

#include "elk/curves.hpp"
#include "elk/rational.hpp"
#include "elk/types.hpp"

namespace elk {

inline constexpr int SIDE_L = 0;
inline constexpr int SIDE_R = 1;

struct CylSide {
  // Sorted, distinct, in [0,1).  Interval i runs from cuts[i] to
  // cuts[(i+1) % m], wrapping through 1 when i is last.  A single cut means
  // one interval covering the whole circle.
  std::vector<Frac> cuts;

  int interval_count() const { return static_cast<int>(cuts.size()); }
  Frac lo(int i) const { return cuts.at(i); }
  Frac hi(int i) const;          // lo(i) + length, may be >= 1
  Frac length(int i) const;      // in (0,1]
  int interval_at(const Frac& pos) const;  // which interval contains pos (mod 1)
};

struct Cylinder {
  std::string core;        // name of the core curve
  double c0 = 1.0;         // circumference at flow time 0
  double w0 = 1.0;         // width at flow time 0
  double twist_frac = 0.0; // twist as a fraction of circumference, in [0,1)
  long long winding = 0;   // whole Dehn twists accumulated about the core
  CylSide side[2];         // SIDE_L, SIDE_R
};

struct IntervalRef {
  int cyl = -1;
  int side = SIDE_L;
  int interval = 0;
  bool operator==(const IntervalRef&) const = default;
};

struct Gluing {
  IntervalRef a, b;
  bool flip = false;
};

struct MarkedPoint {
  int cyl = -1;
  int side = SIDE_L;
  Frac at;  // must be a cut position on that circle
};

// One endpoint of one boundary interval; the unit of the vertex walk.
struct EndRef {
  int cyl = -1;
  int side = SIDE_L;
  int interval = 0;
  bool hi = false;
  bool operator==(const EndRef&) const = default;
};

// A cone point of the glued surface: a cycle of interval ends alternating
// between circle adjacency and gluing identification.  Cone angle is
// pi * ends.size() / 2.
struct VertexClass {
  std::vector<EndRef> ends;
  bool marked = false;
  double angle_pi() const { return static_cast<double>(ends.size()) / 2.0; }
};

struct GaussBonnetLedger {
  struct Row {
    double angle_pi;  // cone angle in units of pi
    int ends;
    bool marked;
    std::string at;   // "A.L@1/4" style location of one representative end
  };
  std::vector<Row> rows;
  double total_excess = 0;  // sum of (angle/pi - 2); equals 4g - 4
  int genus = 0;
  int punctures = 0;
};

struct FlatSurface {
  SurfaceKind kind;
  std::string basepoint_tag;  // free-form Teichmueller bookkeeping id
  std::vector<Cylinder> cylinders;
  std::vector<Gluing> gluings;
  std::vector<MarkedPoint> marked;
  double log_time = 0.0;  // accumulated geodesic-flow time

  // Metric data at the current flow time.
  double circumference(int j) const;
  double width(int j) const;
  double twist_len(int j) const { return cylinders[j].twist_frac * circumference(j); }
  double modulus(int j) const { return width(j) / circumference(j); }
  double area() const;

  int cyl_index(const std::string& core) const;  // -1 when absent
  const Gluing& gluing_of(const IntervalRef& r) const;

  // Full invariant check: partitions, gluing involution with matching
  // lengths, flip orientation rule, connectivity, cone angles (pi only at
  // marked points, >= 3pi at unmarked singularities), and the Euler count
  // against the declared (genus, punctures).  Throws Error on violation.
  void validate() const;
};

// Cone points via the end walk; cheap, does not re-validate.
std::vector<VertexClass> vertex_classes(const FlatSurface& X);

GaussBonnetLedger gauss_bonnet_ledger(const FlatSurface& X);

// Teichmueller geodesic flow: horizontal lengths scale by e^t, vertical by
// e^{-t}; so circumference -> e^{-t} c, width -> e^t w, twist -> e^{-t} twist.
// Pure; composition is exact on the stored data (the time accumulates).
FlatSurface geodesic_flow(const FlatSurface& X, double t);

// Shear cylinder j by u_j: the twist advances by u_j * width_j.  A shear of
// 1/modulus is one full left Dehn twist; whole twists land in the winding
// counter so twist powers stay exact.
FlatSurface shear_cylinders(const FlatSurface& X, const std::vector<double>& u);

// The global unipotent h_s: every cylinder sheared by s.
FlatSurface vertical_shear(const FlatSurface& X, double s);

// k_j whole left Dehn twists about core j: winding bookkeeping only, the
// geometric data is untouched.
FlatSurface dehn_twists(const FlatSurface& X, const std::vector<long long>& k);

// (1/2) log K of the piecewise-linear map shearing cylinder j by u_j, where
// a single shear by u has K(u) = (2 + u^2 + |u| sqrt(u^2+4)) / 2; returns the
// max over cylinders.  Upper-bounds the Teichmueller distance moved.
double qc_distortion_piecewise_shear(const FlatSurface& X, const std::vector<double>& u);

// One annulus of the horizontal foliation: a maximal family of parallel
// closed horizontal trajectories.
struct HorizontalBand {
  struct Seg {
    int cyl;
    Frac height;  // body height of the reference trajectory, fraction of c
    int dir;      // +1 rightward, -1 leftward
  };
  double thickness = 0;        // transverse measure (absolute length)
  std::vector<int> crossings;  // per cylinder: segments of the core across it
  std::vector<Seg> segments;   // in traversal order
};

// Decompose the horizontal foliation into bands.  Requires the cylinder
// data (circumference ratios, twists) to be rational — true for the shipped
// families and preserved by flow, whole twists, and rational shears; throws
// "band_irrational" otherwise.  Validates sum_b thickness * crossings_j =
// circumference_j exactly in rational arithmetic before scaling.
std::vector<HorizontalBand> horizontal_bands(const FlatSurface& X);

// A point on a flow ray, kept as (base, time) so times compose exactly.
struct RayPoint {
  FlatSurface base;
  double time = 0;
  FlatSurface surface() const { return geodesic_flow(base, time); }
};

}  // namespace elk

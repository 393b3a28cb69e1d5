#pragma once

// Extremal length of weighted multicurves on a flat surface.
//
// The continuous quantity is EL(F, X) = sup_rho (sum_j f_j ell_rho(g_j))^2
// / Area(rho) over conformal metrics rho.  Discretized on a mesh, a metric
// is one weight per cell and the supremum becomes a convex QP.  We solve its
// dual: with L_{C,c} the flat length that cycle C spends inside cell c,
// minimize
//
//     R(nu) = sum_c (sum_C nu_C L_{C,c})^2 / area(c)
//
// over cycle masses nu >= 0 with sum_{C in class j} nu_C = f_j.  The
// reported value is R at the minimum; the extremal metric is the mass
// density rho_c = (sum_C nu_C L_{C,c}) / (area(c) * R), normalized so that
// the weighted shortest-length sum equals one.
//
// Candidate cycles are generated lazily (cutting planes).  Each round solves
// the QP over the cycles collected so far, then asks the shortest-cycle
// oracle for the true minimum ellhat_j of every class under the current
// metric.  Scaling rho by 1/(sum f_j ellhat_j) makes it admissible, so
//
//     value * (sum_j f_j ellhat_j)^2
//
// is an unconditional lower bound on the discrete extremal length, and
// gap = 1 - (sum f ellhat)^2 is the relative duality gap.  The loop stops
// once gap <= tolerance, otherwise it adds the violating cycles and
// re-solves with the previous masses as a warm start.

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "elk/curves.hpp"
#include "elk/flat_surface.hpp"
#include "elk/mesh.hpp"
#include "elk/oracle.hpp"

namespace elk {

// Closed form on the flat torus C/(Z + tau Z): the curve class p + q*tau
// with a scalar mass in front has EL = weight^2 |p + q tau|^2 / Im tau.
// Requires Im tau > 0 and ((p,q) != (0,0) or weight == 0).
double extremal_length_torus_exact(std::complex<double> tau, long long p, long long q,
                                   double weight);

struct ELOptions {
  double tolerance = 1e-6;      // relative duality-gap target (certified)
  bool force_discrete = false;  // skip the one-cylinder-torus closed form
  double qp_tol = 1e-6;         // inner QP relative duality-gap target
  int max_rounds = 64;          // cutting-plane safety cap
};

// One cycle carrying mass in the optimal dual solution.  These are the
// binding length constraints: every active cycle of a class is shortest in
// its class under the reported metric.
struct ActiveCycle {
  int curve = -1;     // class index in the engine's curve system
  double mass = 0;    // dual mass nu_C
  double length = 0;  // length under the reported metric
  FrozenCycle cycle;
};

struct ELResult {
  double value = 0;
  std::vector<double> metric;  // per mesh cell; empty on closed-form paths
  std::vector<ActiveCycle> active_cycles;
  double gap = 0;        // certified relative duality gap (0 on closed forms)
  int resolution = 0;    // mesh refinement level used
};

// Mesh + curve registry + cached per-class oracles for one surface.  Build
// once, query many multicurves and metrics; the unrolled covers persist
// between calls, which is what makes the cutting-plane loop cheap.
//
// The registry starts with one class per cylinder core (named after the
// core) and one per horizontal band ("h1", "h2", ... in band order; the
// name "h" is accepted for the band when there is exactly one).  Extra
// classes can be registered from explicit crossing paths.
//
// compute() is not const (oracle caches grow); distinct engines never share
// state, so concurrent queries belong on separate engines — that is what
// extremal_length() does.
class ELEngine {
 public:
  ELEngine(const FlatSurface& X, int resolution, OracleOptions oracle = {},
           bool midpoint_reference = false);
  ~ELEngine();
  ELEngine(ELEngine&&) noexcept;
  ELEngine& operator=(ELEngine&&) noexcept;

  const Mesh& mesh() const;
  // Core and band classes with their geometric intersection pairing.
  const CurveSystem& system() const;
  // Horizontal-band classes in band order, with their transverse thickness.
  int band_count() const;
  int band_class(int b) const;
  double band_thickness(int b) const;

  // Registers an extra class from a representative crossing path on mesh().
  // Returns its class index.  On a one-cylinder torus, representatives of
  // the trivial winding class (0,0) are rejected ("puncture_isotopic"):
  // they are either contractible or a loop around a marked point, and
  // neither has a positive extremal length.
  int register_class(const std::string& name, CurvePath rep);
  int class_of(const std::string& name) const;  // -1 when absent

  // Extremal length of F.  Components are matched to registry classes by
  // curve NAME (F may live over any CurveSystem); duplicate names fold by
  // adding weights, zero weights drop out, the empty multicurve gives 0.
  ELResult compute(const WeightedMulticurve& F, const ELOptions& opt = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl;
};

// One-shot convenience: the whole query in one struct, one engine per call
// (hence pure and safe to run concurrently).
struct ELQuery {
  const FlatSurface* surface = nullptr;
  const WeightedMulticurve* multicurve = nullptr;
  int resolution = 0;
  double tolerance = 1e-6;
  bool force_discrete = false;
  OracleOptions oracle;
};
ELResult extremal_length(const ELQuery& q);

// Heights-times-lengths test for the extremal-length product identity.
// With F supported on the cylinder cores and proportional to the core
// widths (f_j = lambda * width_j for one lambda > 0 across ALL cylinders),
// F is the vertical multicurve of the surface's own Strebel form, whose
// horizontal multicurve F* = sum_b thickness_b * band_b we can read off.
// For such a pair the product EL(F,X) * EL(F*,X) should equal i(F,F*)^2;
// the report carries the relative defect.
struct MinskyReport {
  double el = 0;       // EL(F, X)
  double el_star = 0;  // EL(F*, X)
  double pairing = 0;  // i(F, F*)
  double defect = 0;   // |el * el_star - pairing^2| / pairing^2
};
// Throws "not_on_cores" when F has a component off the cores or the weights
// are not proportional to the widths.
MinskyReport minsky_product_check(const FlatSurface& X, const WeightedMulticurve& F,
                                  int resolution, double tolerance = 1e-6,
                                  bool force_discrete = false);

// Reference solver for small one-cylinder tori: enumerate EVERY simple
// cycle on a midpoint-node mesh (<= 40 cells), classify by winding, and
// solve the same dual QP with the complete cycle list of each requested
// class.  No smoothing, no constraint generation — comparable to an
// ELEngine built with midpoint_reference = true and oracle.smooth = false.
// Throws "bruteforce_cap" when the enumeration exceeds cycle_cap.
struct TorusClassWeight {
  long long p = 0, q = 0;
  double weight = 0;
};
ELResult extremal_length_all_cycles(const Mesh& m, const std::vector<TorusClassWeight>& F,
                                    double qp_tol = 1e-12, std::size_t cycle_cap = 1000000);

}  // namespace elk

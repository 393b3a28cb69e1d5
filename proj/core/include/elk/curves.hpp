#pragma once

// Combinatorial curve layer: named curve systems with integer geometric
// intersection pairings, weighted multicurves over them, pants decompositions,
// and the labeled-sequence convergence checker.  Nothing here touches flat
// geometry; realizations on meshes live in curve_rep.hpp.

#include <optional>
#include <string>
#include <vector>

#include "elk/rational.hpp"
#include "elk/types.hpp"

namespace elk {

struct CurveSystem {
  SurfaceKind surface;
  std::vector<std::string> curves;                 // isotopy-class names
  std::vector<std::vector<long long>> pairing;     // i(c_a, c_b); symmetric, zero diagonal

  int index_of(const std::string& name) const;     // -1 when absent
  int add_curve(const std::string& name);          // extends pairing with zeros
  void set_pairing(int a, int b, long long v);
  void validate() const;
};

struct MulticurveComponent {
  int curve = -1;
  double weight = 0.0;
  std::optional<Frac> exact;  // populated when the weight is exactly rational
};

// A formal nonnegative combination of disjoint curves from one system.
// Disjointness of the support is the caller's contract; validate() checks the
// pairing-zero part of it.
struct WeightedMulticurve {
  const CurveSystem* system = nullptr;
  std::vector<MulticurveComponent> components;

  double weight_of(int curve) const;
  // Sum of weight * pairing row, one entry per system curve.
  std::vector<double> pairing_vector() const;
  void validate() const;
};

// Multicurve whose components all have weight one and whose count matches the
// complexity of the surface.
struct PantsDecomposition {
  const CurveSystem* system = nullptr;
  std::vector<int> curves;

  void validate() const;
  WeightedMulticurve as_multicurve() const;
};

struct LabeledComponent {
  int label = 0;
  int curve = -1;
  double weight = 0.0;
};

// Sequence of multicurves whose components carry persistent labels, so that a
// component can be followed from term to term even while its isotopy class
// changes.
struct LabeledSequence {
  const CurveSystem* system = nullptr;
  std::vector<std::vector<LabeledComponent>> terms;
};

struct StrongConvergenceReport {
  bool weak = false;    // condition (1): multicurves converge against the pairing
  bool labels = false;  // condition (2): no label's mass splits or migrates
  std::string detail;   // first failure, empty when both hold
  bool pass() const { return weak && labels; }
};

// Convergence is judged on pairing vectors over the final third of the
// sequence: (1) the term vectors stay within tol of the limit's vector, and
// (2) per label, the component vector either vanishes or has a Cauchy
// normalized direction that matches a single system curve.
StrongConvergenceReport check_strong_convergence(const LabeledSequence& seq,
                                                 const WeightedMulticurve& limit,
                                                 double tol);

}  // namespace elk

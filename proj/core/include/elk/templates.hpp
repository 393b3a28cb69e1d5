#pragma once

// The shipped flat-surface families.  Each comes bundled with the curve
// bookkeeping its experiments use: core curves (one per cylinder, in
// cylinder order) and the horizontal band curves with exact intersection
// numbers against the cores.
//
//   torus                 one cylinder, both circles glued straight across
//   genus2_two_cylinder   closed genus 2, two cylinders, two 4pi zeros
//   s05_symmetric         five-punctured sphere with the anti-conformal
//                         involution fixing all five punctures
//   chain_q               S_{0,q} as a chain of q-3 cylinders (end circles
//                         carry two folds each, interfaces one fold)
//   theta_s12             twice-punctured torus; cylinder B's core is
//                         separating, A's is not
//
// All partitions/gluings use exact fractions; circumference ratios stay
// rational so horizontal tracing works after flow and whole twists.

#include <string>
#include <vector>

#include "elk/curves.hpp"
#include "elk/flat_surface.hpp"

namespace elk {

struct SurfaceBundle {
  FlatSurface surface;
  CurveSystem system;
  std::vector<int> cores;   // system index of each cylinder's core curve
  std::vector<int> hbands;  // system index per horizontal band, in horizontal_bands order
};

SurfaceBundle make_torus(double modulus = 1.0, double twist_frac = 0.0,
                         double circumference = 1.0);
SurfaceBundle make_genus2_two_cylinder(double mA = 0.5, double mB = 0.5,
                                       bool unit_area = true);
// b = circumference of the short cylinder (long one has circumference 1).
SurfaceBundle make_s05_symmetric(double mA = 1.0, double mB = 1.0, double b = 0.5,
                                 bool unit_area = true);
SurfaceBundle make_chain(int q, std::vector<double> moduli = {}, bool unit_area = true);
SurfaceBundle make_theta_s12(double mA = 1.0, double mB = 1.0, double b = 0.5,
                             bool unit_area = true);

// Dispatch by id: "torus", "genus2_two_cylinder", "s05_symmetric",
// "theta_s12", "chain_<q>".  Unknown ids throw "unknown_template".
SurfaceBundle make_template(const std::string& id, const std::vector<double>& moduli);

// Strebel realization on a combinatorial template: cylinders take the pants
// curves as cores (in order) and moduli proportional to the inputs,
// normalized to unit area.  Interval lengths are solved by the template's
// parametrization; infeasible input (wrong arity, nonpositive modulus,
// degenerate template parameters) is reported with the failing constraint.
FlatSurface strebel_surface(const PantsDecomposition& pants,
                            const std::vector<double>& moduli,
                            const std::string& gluing_template);

// Does X carry the s05_symmetric family's anti-conformal involution
// (y -> 1/2 - y on the long cylinder, y -> -y on the short one), fixing all
// five punctures?  Checks the cylinder data is isometric under that map.
bool admits_s05_involution(const FlatSurface& X);

}  // namespace elk

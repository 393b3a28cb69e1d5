#include "elk/templates.hpp"

#include <cmath>

namespace elk {

namespace {

struct Builder {
  FlatSurface X;

  int add_cyl(const std::string& core, double c, double w) {
    Cylinder cyl;
    cyl.core = core;
    cyl.c0 = c;
    cyl.w0 = w;
    X.cylinders.push_back(cyl);
    return static_cast<int>(X.cylinders.size()) - 1;
  }
  void cuts(int cyl, int side, std::vector<Frac> cs) {
    for (auto& c : cs) c = frac_mod1(c);
    std::sort(cs.begin(), cs.end());
    X.cylinders[cyl].side[side].cuts = std::move(cs);
  }
  // Interval whose lo endpoint sits at `at` (mod 1).  Cut positions survive
  // the sort; raw indices would not.
  int iv(int cyl, int side, const Frac& at) const {
    const auto& cs = X.cylinders[cyl].side[side].cuts;
    Frac want = frac_mod1(at);
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (cs[i] == want) return static_cast<int>(i);
    fail("infeasible", "no interval starts at the requested cut");
  }
  void glue(int ca, int sa, int ia, int cb, int sb, int ib, bool flip) {
    X.gluings.push_back({{ca, sa, ia}, {cb, sb, ib}, flip});
  }
  void mark(int cyl, int side, Frac at) { X.marked.push_back({cyl, side, at}); }

  // Boundary circle closed off by two folds: cuts {0,1/4,1/2,3/4}, interval
  // pairs (0,1) and (2,3) flipped, punctures at the fold centers 1/4, 3/4.
  void end_circle(int cyl, int side) {
    cuts(cyl, side, {Frac(0), Frac(1, 4), Frac(1, 2), Frac(3, 4)});
    glue(cyl, side, 0, cyl, side, 1, true);
    glue(cyl, side, 2, cyl, side, 3, true);
    mark(cyl, side, Frac(1, 4));
    mark(cyl, side, Frac(3, 4));
  }

  void scale_area(bool unit_area) {
    if (!unit_area) return;
    double area = 0;
    for (const auto& c : X.cylinders) area += c.c0 * c.w0;
    double lam = 1.0 / std::sqrt(area);
    for (auto& c : X.cylinders) {
      c.c0 *= lam;
      c.w0 *= lam;
    }
  }
};

void attach_bands(SurfaceBundle& B) {
  auto bands = horizontal_bands(B.surface);
  for (std::size_t i = 0; i < bands.size(); ++i) {
    int id = B.system.add_curve("h" + std::to_string(i + 1));
    B.hbands.push_back(id);
    for (std::size_t j = 0; j < B.cores.size(); ++j)
      B.system.set_pairing(id, B.cores[j], bands[i].crossings[j]);
  }
}

void require(bool ok, const std::string& constraint) {
  if (!ok) fail("infeasible", "template constraint failed: " + constraint);
}

}  // namespace

SurfaceBundle make_torus(double modulus, double twist_frac, double circumference) {
  require(modulus > 0, "modulus > 0");
  require(circumference > 0, "circumference > 0");
  require(twist_frac >= 0 && twist_frac < 1, "twist in [0,1)");
  Builder b;
  b.X.kind = {1, 0};
  b.X.basepoint_tag = "torus";
  int A = b.add_cyl("v", circumference, modulus * circumference);
  b.X.cylinders[A].twist_frac = twist_frac;
  b.cuts(A, SIDE_L, {Frac(0)});
  b.cuts(A, SIDE_R, {Frac(0)});
  b.glue(A, SIDE_R, 0, A, SIDE_L, 0, false);
  b.X.validate();

  SurfaceBundle out;
  out.surface = std::move(b.X);
  out.system.surface = {1, 0};
  out.cores = {out.system.add_curve("v")};
  int h = out.system.add_curve("h");
  out.system.set_pairing(out.cores[0], h, 1);
  // The horizontal curve is the single band; record it rather than re-deriving.
  out.hbands = {h};
  return out;
}

SurfaceBundle make_genus2_two_cylinder(double mA, double mB, bool unit_area) {
  require(mA > 0 && mB > 0, "moduli > 0");
  Builder b;
  b.X.kind = {2, 0};
  b.X.basepoint_tag = "genus2_two_cylinder";
  int A = b.add_cyl("aA", 1.0, mA);
  int B = b.add_cyl("aB", 1.0, mB);
  for (int cyl : {A, B})
    for (int s : {SIDE_L, SIDE_R}) b.cuts(cyl, s, {Frac(0), Frac(1, 2)});
  // Interval 0 = [0,1/2), interval 1 = [1/2,1).  The upper halves close each
  // cylinder onto itself; the lower halves chain A to B and B to A.
  b.glue(A, SIDE_R, 1, A, SIDE_L, 1, false);
  b.glue(A, SIDE_R, 0, B, SIDE_L, 0, false);
  b.glue(B, SIDE_R, 1, B, SIDE_L, 1, false);
  b.glue(B, SIDE_R, 0, A, SIDE_L, 0, false);
  b.scale_area(unit_area);
  b.X.validate();

  SurfaceBundle out;
  out.surface = std::move(b.X);
  out.system.surface = {2, 0};
  out.cores = {out.system.add_curve("aA"), out.system.add_curve("aB")};
  attach_bands(out);
  return out;
}

SurfaceBundle make_s05_symmetric(double mA, double mB, double bc, bool unit_area) {
  require(mA > 0 && mB > 0, "moduli > 0");
  require(bc > 0 && bc < 1, "short circumference in (0,1)");
  // Long cylinder A has circumference 1; fp = (1 - b)/2 is the half-length
  // of A's right-side fold, in A's frame.
  Frac bfrac = frac_from_double(bc);
  Frac fp = (1 - bfrac) / 2;
  Builder bl;
  bl.X.kind = {0, 5};
  bl.X.basepoint_tag = "s05_symmetric";
  int A = bl.add_cyl("alpha", 1.0, mA);
  int B = bl.add_cyl("beta", frac_to_double(bfrac), mB * frac_to_double(bfrac));

  // A's left circle: two folds with centers 1/4 and 3/4.
  bl.cuts(A, SIDE_L, {Frac(0), Frac(1, 4), Frac(1, 2), Frac(3, 4)});
  bl.glue(A, SIDE_L, 0, A, SIDE_L, 1, true);
  bl.glue(A, SIDE_L, 2, A, SIDE_L, 3, true);
  bl.mark(A, SIDE_L, Frac(1, 4));
  bl.mark(A, SIDE_L, Frac(3, 4));

  // A's right circle: one fold centered at 3/4 plus the long interval that
  // wraps around to B.  The upper fold cut can wrap past 1 (it does at the
  // default b = 1/2), so locate intervals by cut position, not raw index.
  Frac flo = Frac(3, 4) - fp, fhi = frac_mod1(Frac(3, 4) + fp);
  bl.cuts(A, SIDE_R, {flo, Frac(3, 4), fhi});
  bl.glue(A, SIDE_R, bl.iv(A, SIDE_R, flo), A, SIDE_R, bl.iv(A, SIDE_R, Frac(3, 4)), true);
  bl.mark(A, SIDE_R, Frac(3, 4));

  // B's left circle is one interval; its lo sits at 0 so the involution
  // y -> -y on B commutes with the long gluing (the offset must be 0 or 1/2).
  bl.cuts(B, SIDE_L, {Frac(0)});
  bl.glue(A, SIDE_R, bl.iv(A, SIDE_R, fhi), B, SIDE_L, 0, false);

  // B's right circle: two folds with centers 0 and 1/2.
  bl.cuts(B, SIDE_R, {Frac(0), Frac(1, 4), Frac(1, 2), Frac(3, 4)});
  bl.glue(B, SIDE_R, 3, B, SIDE_R, 0, true);
  bl.glue(B, SIDE_R, 1, B, SIDE_R, 2, true);
  bl.mark(B, SIDE_R, Frac(0));
  bl.mark(B, SIDE_R, Frac(1, 2));

  bl.scale_area(unit_area);
  bl.X.validate();

  SurfaceBundle out;
  out.surface = std::move(bl.X);
  out.system.surface = {0, 5};
  out.cores = {out.system.add_curve("alpha"), out.system.add_curve("beta")};
  attach_bands(out);
  return out;
}

SurfaceBundle make_chain(int q, std::vector<double> moduli, bool unit_area) {
  require(q >= 4, "q >= 4");
  int n = q - 3;
  if (moduli.empty()) moduli.assign(n, 1.0);
  require(static_cast<int>(moduli.size()) == n, "one modulus per cylinder (q-3)");
  for (double m : moduli) require(m > 0, "moduli > 0");

  Builder b;
  b.X.kind = {0, q};
  b.X.basepoint_tag = "chain_" + std::to_string(q);
  // 1-indexed chain: odd cylinders are thin (c = 1/2), even ones fat (c = 1).
  std::vector<int> cyl(n);
  for (int j = 1; j <= n; ++j) {
    double c = (j % 2 == 0) ? 1.0 : 0.5;
    cyl[j - 1] = b.add_cyl("g" + std::to_string(j), c, moduli[j - 1] * c);
  }
  b.end_circle(cyl[0], SIDE_L);
  b.end_circle(cyl[n - 1], SIDE_R);
  // Interface j joins C_j.R to C_{j+1}.L.  The fat (even-indexed) cylinder
  // carries the interface fold, centered at frame 0; the thin side is one
  // interval with its lo at 0 so mid-arcs cross fat cylinders straight.
  for (int j = 1; j <= n - 1; ++j) {
    int thin, fat, fat_side, thin_side;
    if (j % 2 == 0) {
      fat = cyl[j - 1];      // C_j is even
      fat_side = SIDE_R;
      thin = cyl[j];
      thin_side = SIDE_L;
    } else {
      fat = cyl[j];          // C_{j+1} is even
      fat_side = SIDE_L;
      thin = cyl[j - 1];
      thin_side = SIDE_R;
    }
    b.cuts(fat, fat_side, {Frac(0), Frac(1, 4), Frac(3, 4)});
    b.glue(fat, fat_side, 2, fat, fat_side, 0, true);  // fold across 0
    b.mark(fat, fat_side, Frac(0));
    b.cuts(thin, thin_side, {Frac(0)});
    b.glue(fat, fat_side, 1, thin, thin_side, 0, false);
  }
  b.scale_area(unit_area);
  b.X.validate();

  SurfaceBundle out;
  out.surface = std::move(b.X);
  out.system.surface = {0, q};
  for (int j = 1; j <= n; ++j)
    out.cores.push_back(out.system.add_curve("g" + std::to_string(j)));
  attach_bands(out);
  return out;
}

SurfaceBundle make_theta_s12(double mA, double mB, double bc, bool unit_area) {
  require(mA > 0 && mB > 0, "moduli > 0");
  require(bc > 0 && bc < 2, "edge lengths positive needs b < 2a");
  Frac bfrac = frac_from_double(bc);
  Frac half_b = bfrac / 2;  // in A's frame (A has circumference 1)
  Builder bl;
  bl.X.kind = {1, 2};
  bl.X.basepoint_tag = "theta_s12";
  int A = bl.add_cyl("alpha", 1.0, mA);
  int B = bl.add_cyl("beta", frac_to_double(bfrac), mB * frac_to_double(bfrac));

  bl.cuts(A, SIDE_R, {Frac(0), half_b});
  bl.cuts(A, SIDE_L, {Frac(0), 1 - half_b});
  bl.cuts(B, SIDE_L, {Frac(0), Frac(1, 2)});
  bl.glue(A, SIDE_R, 0, B, SIDE_L, 0, false);   // e1
  bl.glue(A, SIDE_R, 1, A, SIDE_L, 0, false);   // e2, the long way around
  bl.glue(A, SIDE_L, 1, B, SIDE_L, 1, true);    // e3, reversed
  bl.end_circle(B, SIDE_R);

  bl.scale_area(unit_area);
  bl.X.validate();

  SurfaceBundle out;
  out.surface = std::move(bl.X);
  out.system.surface = {1, 2};
  out.cores = {out.system.add_curve("alpha"), out.system.add_curve("beta")};
  attach_bands(out);
  return out;
}

SurfaceBundle make_template(const std::string& id, const std::vector<double>& moduli) {
  auto want = [&](std::size_t k) {
    require(moduli.size() == k, id + " takes " + std::to_string(k) + " moduli");
  };
  if (id == "torus") {
    want(1);
    return make_torus(moduli[0]);
  }
  if (id == "genus2_two_cylinder") {
    want(2);
    return make_genus2_two_cylinder(moduli[0], moduli[1]);
  }
  if (id == "s05_symmetric") {
    want(2);
    return make_s05_symmetric(moduli[0], moduli[1]);
  }
  if (id == "theta_s12") {
    want(2);
    return make_theta_s12(moduli[0], moduli[1]);
  }
  if (id.rfind("chain_", 0) == 0) {
    int q = 0;
    try {
      q = std::stoi(id.substr(6));
    } catch (...) {
      fail("unknown_template", "bad chain id: " + id);
    }
    return make_chain(q, moduli);
  }
  fail("unknown_template", id);
}

FlatSurface strebel_surface(const PantsDecomposition& pants,
                            const std::vector<double>& moduli,
                            const std::string& gluing_template) {
  if (!pants.system) fail("no_system", "pants decomposition without a curve system");
  SurfaceBundle bundle = make_template(gluing_template, moduli);
  require(pants.curves.size() == bundle.surface.cylinders.size(),
          "one pants curve per template cylinder");
  // Rename the cylinders after the caller's curves so V(q) reads back in
  // their system.
  for (std::size_t j = 0; j < pants.curves.size(); ++j) {
    int c = pants.curves[j];
    if (c < 0 || c >= static_cast<int>(pants.system->curves.size()))
      fail("bad_curve_index", "pants curve out of range");
    bundle.surface.cylinders[j].core = pants.system->curves[c];
  }
  return bundle.surface;
}

bool admits_s05_involution(const FlatSurface& X) {
  if (X.cylinders.size() != 2) return false;
  const Cylinder& A = X.cylinders[0];
  const Cylinder& B = X.cylinders[1];
  if (A.twist_frac != 0 || B.twist_frac != 0) return false;
  // A's circles must be symmetric under y -> 1/2 - y, B's under y -> -y.
  auto symmetric = [](const std::vector<Frac>& cuts, const Frac& two_center) {
    for (const Frac& c : cuts) {
      Frac mirror = frac_mod1(two_center - c);
      bool found = false;
      for (const Frac& d : cuts) found = found || d == mirror;
      if (!found) return false;
    }
    return true;
  };
  if (!symmetric(A.side[SIDE_L].cuts, Frac(1, 2))) return false;
  if (!symmetric(A.side[SIDE_R].cuts, Frac(1, 2))) return false;
  if (!symmetric(B.side[SIDE_L].cuts, Frac(0))) return false;
  if (!symmetric(B.side[SIDE_R].cuts, Frac(0))) return false;
  // Marked points must be fixed by the involution.
  for (const auto& mp : X.marked) {
    Frac two_center = mp.cyl == 0 ? Frac(1, 2) : Frac(0);
    if (frac_mod1(two_center - mp.at) != mp.at) return false;
  }
  // Five punctures, and the long gluing offset compatible (B.L lo at 0 or 1/2).
  if (X.marked.size() != 5) return false;
  const Frac& k0 = B.side[SIDE_L].cuts.front();
  if (!(k0 == Frac(0) || k0 == Frac(1, 2))) return false;
  return true;
}

}  // namespace elk

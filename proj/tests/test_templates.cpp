#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "elk/surface_io.hpp"
#include "elk/templates.hpp"

using namespace elk;

namespace {

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code;
  }
  return "";
}

// angle (in pi units) -> how many cone classes, split by marked
std::map<std::pair<double, bool>, int> angle_census(const FlatSurface& X) {
  std::map<std::pair<double, bool>, int> out;
  for (const auto& row : gauss_bonnet_ledger(X).rows) ++out[{row.angle_pi, row.marked}];
  return out;
}

void check_band_ledger(const SurfaceBundle& b) {
  auto bands = horizontal_bands(b.surface);
  for (std::size_t j = 0; j < b.surface.cylinders.size(); ++j) {
    double total = 0;
    for (const auto& band : bands) total += band.thickness * band.crossings[j];
    CHECK(total ==
          doctest::Approx(b.surface.circumference(static_cast<int>(j))).epsilon(1e-12));
  }
  // the bundle's band curves carry the same crossing numbers
  REQUIRE(b.hbands.size() == bands.size());
  for (std::size_t i = 0; i < bands.size(); ++i)
    for (std::size_t j = 0; j < b.cores.size(); ++j)
      CHECK(b.system.pairing[b.hbands[i]][b.cores[j]] == bands[i].crossings[j]);
}

}  // namespace

TEST_SUITE("templates") {

TEST_CASE("torus template") {
  SurfaceBundle t = make_torus();
  t.surface.validate();
  CHECK(t.surface.kind == SurfaceKind{1, 0});
  CHECK(t.surface.area() == doctest::Approx(1.0));
  CHECK(t.surface.modulus(0) == doctest::Approx(1.0));
  CHECK(t.system.pairing[t.cores[0]][t.hbands[0]] == 1);

  SurfaceBundle wide = make_torus(2.5, 0.25, 2.0);
  wide.surface.validate();
  CHECK(wide.surface.modulus(0) == doctest::Approx(2.5));
  CHECK(wide.surface.circumference(0) == doctest::Approx(2.0));
  CHECK(wide.surface.cylinders[0].twist_frac == doctest::Approx(0.25));
}

TEST_CASE("genus-2 two-cylinder template") {
  SurfaceBundle g2 = make_genus2_two_cylinder();
  g2.surface.validate();
  CHECK(g2.surface.kind == SurfaceKind{2, 0});
  CHECK(g2.surface.area() == doctest::Approx(1.0));

  auto census = angle_census(g2.surface);
  CHECK(census[{4.0, false}] == 2);  // two 4pi zeros
  CHECK(census.size() == 1);

  SUBCASE("three horizontal bands of thickness 1/2") {
    auto bands = horizontal_bands(g2.surface);
    REQUIRE(bands.size() == 3);
    std::vector<std::vector<int>> crossings;
    for (const auto& b : bands) {
      CHECK(b.thickness == doctest::Approx(0.5));
      crossings.push_back(b.crossings);
    }
    std::sort(crossings.begin(), crossings.end());
    CHECK(crossings == std::vector<std::vector<int>>{{0, 1}, {1, 0}, {1, 1}});
    check_band_ledger(g2);
  }
  SUBCASE("unequal moduli still validate") {
    SurfaceBundle g = make_genus2_two_cylinder(1.0, 3.0);
    g.surface.validate();
    CHECK(g.surface.area() == doctest::Approx(1.0));
    CHECK(g.surface.modulus(0) == doctest::Approx(1.0));
    CHECK(g.surface.modulus(1) == doctest::Approx(3.0));
    check_band_ledger(g);
  }
}

TEST_CASE("five-punctured-sphere template") {
  SurfaceBundle s = make_s05_symmetric();
  s.surface.validate();
  CHECK(s.surface.kind == SurfaceKind{0, 5});
  CHECK(s.surface.area() == doctest::Approx(1.0));

  auto census = angle_census(s.surface);
  CHECK(census[{1.0, true}] == 5);   // the five punctures
  CHECK(census[{3.0, false}] == 1);  // one simple zero
  CHECK(census[{2.0, false}] == 2);  // two regular break points
  check_band_ledger(s);

  SUBCASE("admits the anti-conformal involution for any moduli") {
    CHECK(admits_s05_involution(s.surface));
    CHECK(admits_s05_involution(make_s05_symmetric(2.0, 1.0).surface));
    CHECK(admits_s05_involution(make_s05_symmetric(1.0, 1.0, 0.7).surface));
  }
  SUBCASE("a sheared surface does not") {
    FlatSurface Y = shear_cylinders(s.surface, {0.1, 0.0});
    CHECK(!admits_s05_involution(Y));
  }
  SUBCASE("other two-cylinder surfaces do not") {
    CHECK(!admits_s05_involution(make_genus2_two_cylinder().surface));
    CHECK(!admits_s05_involution(make_theta_s12().surface));
  }
}

TEST_CASE("chain templates for S_{0,q}") {
  for (int q = 4; q <= 8; ++q) {
    CAPTURE(q);
    SurfaceBundle c = make_chain(q);
    c.surface.validate();
    CHECK(c.surface.kind == SurfaceKind{0, q});
    CHECK(static_cast<int>(c.surface.cylinders.size()) == q - 3);
    CHECK(c.surface.area() == doctest::Approx(1.0));
    CHECK(gauss_bonnet_ledger(c.surface).punctures == q);
    check_band_ledger(c);
  }
  CHECK(code_of([] { make_chain(3); }) == "infeasible");
}

TEST_CASE("theta template for S_{1,2}") {
  SurfaceBundle th = make_theta_s12();
  th.surface.validate();
  CHECK(th.surface.kind == SurfaceKind{1, 2});
  CHECK(th.surface.area() == doctest::Approx(1.0));

  auto census = angle_census(th.surface);
  CHECK(census[{1.0, true}] == 2);   // two punctures on the end circle
  CHECK(census[{3.0, false}] == 2);  // two simple zeros
  CHECK(census[{2.0, false}] == 1);
  check_band_ledger(th);

  SUBCASE("asymmetric parameters") {
    SurfaceBundle t2 = make_theta_s12(2.0, 0.5, 0.8);
    t2.surface.validate();
    CHECK(t2.surface.kind == SurfaceKind{1, 2});
    check_band_ledger(t2);
  }
}

TEST_CASE("template dispatch") {
  CHECK(make_template("torus", {1.0}).surface.kind == SurfaceKind{1, 0});
  CHECK(make_template("chain_6", {1, 1, 1}).surface.kind == SurfaceKind{0, 6});
  CHECK(code_of([] { make_template("torus", {1, 2}); }) == "infeasible");
  CHECK(code_of([] { make_template("klein", {1.0}); }) == "unknown_template");
  CHECK(code_of([] { make_template("chain_x", {}); }) == "unknown_template");
  CHECK(code_of([] { make_template("torus", {-1.0}); }) == "infeasible");
}

TEST_CASE("strebel surfaces from pants data") {
  CurveSystem sys;
  sys.surface = {2, 0};
  int a = sys.add_curve("mA"), b = sys.add_curve("mB");
  (void)sys.add_curve("spare");
  PantsDecomposition pants;
  pants.system = &sys;
  pants.curves = {a, b};

  SUBCASE("genus-2, equal moduli, unit area, renamed cores") {
    FlatSurface X = strebel_surface(pants, {1.0, 1.0}, "genus2_two_cylinder");
    X.validate();
    CHECK(X.area() == doctest::Approx(1.0));
    CHECK(X.cylinders[0].core == "mA");
    CHECK(X.cylinders[1].core == "mB");
    CHECK(X.modulus(0) == doctest::Approx(1.0));
  }
  SUBCASE("torus stays the unit square") {
    CurveSystem ts;
    ts.surface = {1, 0};
    PantsDecomposition tp;
    tp.system = &ts;
    tp.curves = {ts.add_curve("core")};
    FlatSurface X = strebel_surface(tp, {1.0}, "torus");
    CHECK(X.circumference(0) == doctest::Approx(1.0));
    CHECK(X.width(0) == doctest::Approx(1.0));
    CHECK(X.cylinders[0].core == "core");
  }
  SUBCASE("equal moduli on the symmetric template admit the involution") {
    FlatSurface X = strebel_surface(pants, {2.0, 2.0}, "s05_symmetric");
    CHECK(admits_s05_involution(X));
  }
  SUBCASE("infeasible input is reported") {
    CHECK(code_of([&] { strebel_surface(pants, {1.0}, "genus2_two_cylinder"); }) ==
          "infeasible");
    CHECK(code_of([&] { strebel_surface(pants, {1.0, 0.0}, "genus2_two_cylinder"); }) ==
          "infeasible");
    CHECK(code_of([&] { strebel_surface(pants, {1.0, 1.0}, "nonagon"); }) ==
          "unknown_template");
    PantsDecomposition big = pants;
    big.curves.push_back(2);
    CHECK(code_of([&] { strebel_surface(big, {1, 1, 1}, "genus2_two_cylinder"); }) ==
          "infeasible");
  }
}

TEST_CASE("surface JSON round trip") {
  auto roundtrip = [](const FlatSurface& X) {
    std::string once = write_flat_surface(X);
    std::istringstream in(once);
    FlatSurface Y = read_flat_surface(in);
    CHECK(write_flat_surface(Y) == once);
    CHECK(Y.kind == X.kind);
    CHECK(Y.cylinders.size() == X.cylinders.size());
    CHECK(Y.area() == doctest::Approx(X.area()).epsilon(1e-15));
  };
  roundtrip(make_torus().surface);
  roundtrip(make_torus(2.5, 0.125, 3.0).surface);
  roundtrip(make_genus2_two_cylinder(1.0, 3.0).surface);
  roundtrip(make_s05_symmetric().surface);
  roundtrip(make_theta_s12().surface);
  roundtrip(make_chain(7).surface);

  SUBCASE("flowed surfaces serialize their current metric") {
    FlatSurface X = geodesic_flow(make_genus2_two_cylinder().surface, 0.75);
    std::istringstream in(write_flat_surface(X));
    FlatSurface Y = read_flat_surface(in);
    CHECK(Y.circumference(0) == doctest::Approx(X.circumference(0)).epsilon(1e-15));
    CHECK(Y.width(1) == doctest::Approx(X.width(1)).epsilon(1e-15));
    // band structure survives because circumference ratios stay rational
    CHECK(horizontal_bands(Y).size() == horizontal_bands(X).size());
  }
  SUBCASE("windings survive") {
    FlatSurface X = dehn_twists(make_torus().surface, {3});
    std::istringstream in(write_flat_surface(X));
    CHECK(read_flat_surface(in).cylinders[0].winding == 3);
  }
}

TEST_CASE("fold sugar in hand-written files") {
  // A pillowcase written the lazy way: one cylinder, each circle one
  // interval folded onto itself.  The reader splits the folds, marks the
  // midpoints, and the creases at height 0 are marked by hand.
  std::string text = R"({
    "kind": {"genus": 0, "punctures": 4},
    "cylinders": [
      {"core": "a", "circumference": "1", "width": "1",
       "cuts_left": ["0"], "cuts_right": ["0"]}
    ],
    "gluing": [
      {"side_a": "a.L", "interval_a": 0, "side_b": "a.L", "interval_b": 0, "flip": true},
      {"side_a": "a.R", "interval_a": 0, "side_b": "a.R", "interval_b": 0, "flip": true}
    ],
    "marked": [
      {"side": "a.L", "at": "0"},
      {"side": "a.R", "at": "0"}
    ]
  })";
  std::istringstream in(text);
  FlatSurface X = read_flat_surface(in);
  CHECK(X.kind == SurfaceKind{0, 4});
  CHECK(X.cylinders[0].side[SIDE_L].cuts == std::vector<Frac>{Frac(0), Frac(1, 2)});
  CHECK(X.marked.size() == 4);
  auto led = gauss_bonnet_ledger(X);
  CHECK(led.punctures == 4);
  CHECK(led.total_excess == doctest::Approx(-4.0));

  SUBCASE("folding part of a circle splits and renumbers") {
    // q = 4 chain written with fold sugar on all four fold intervals
    std::string chain = R"({
      "kind": {"genus": 0, "punctures": 4},
      "tag": "chain_4",
      "cylinders": [
        {"core": "g1", "circumference": "1/2", "width": "2",
         "cuts_left": ["0", "1/2"], "cuts_right": ["0", "1/2"]}
      ],
      "gluing": [
        {"side_a": "g1.L", "interval_a": 0, "side_b": "g1.L", "interval_b": 0, "flip": true},
        {"side_a": "g1.L", "interval_a": 1, "side_b": "g1.L", "interval_b": 1, "flip": true},
        {"side_a": "g1.R", "interval_a": 0, "side_b": "g1.R", "interval_b": 0, "flip": true},
        {"side_a": "g1.R", "interval_a": 1, "side_b": "g1.R", "interval_b": 1, "flip": true}
      ]
    })";
    std::istringstream cin_(chain);
    FlatSurface C = read_flat_surface(cin_);
    CHECK(C.cylinders[0].side[SIDE_L].cuts ==
          std::vector<Frac>{Frac(0), Frac(1, 4), Frac(1, 2), Frac(3, 4)});
    // matches the chain template's end cylinder combinatorics
    SurfaceBundle ref = make_chain(4, {4.0}, false);
    CHECK(write_flat_surface(C) == write_flat_surface(ref.surface));
  }
  SUBCASE("bad files are rejected with io codes") {
    auto parse = [](const std::string& s) {
      std::istringstream i(s);
      read_flat_surface(i);
    };
    CHECK(code_of([&] { parse("{"); }) == "io_bad_json");
    CHECK(code_of([&] { parse("{\"kind\": {}}"); }) == "io_bad_surface");
    std::string self = R"({"kind": {"genus": 1, "punctures": 0},
      "cylinders": [{"core": "v", "circumference": "1", "width": "1",
                     "cuts_left": ["0"], "cuts_right": ["0"]}],
      "gluing": [{"side_a": "v.R", "interval_a": 0,
                  "side_b": "v.L", "interval_b": 0, "flip": false},
                 {"side_a": "v.Q", "interval_a": 0,
                  "side_b": "v.L", "interval_b": 0, "flip": false}]})";
    CHECK(code_of([&] { parse(self); }) == "io_bad_surface");
  }
}

}  // TEST_SUITE

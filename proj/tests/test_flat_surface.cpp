#include <doctest.h>

#include <cmath>
#include <functional>

#include "elk/flat_surface.hpp"
#include "elk/templates.hpp"

using namespace elk;

namespace {

// Bare square torus, built by hand so these tests don't lean on templates.cpp.
FlatSurface square_torus() {
  FlatSurface X;
  X.kind = {1, 0};
  Cylinder c;
  c.core = "v";
  c.c0 = 1;
  c.w0 = 1;
  c.side[SIDE_L].cuts = {Frac(0)};
  c.side[SIDE_R].cuts = {Frac(0)};
  X.cylinders.push_back(c);
  X.gluings.push_back({{0, SIDE_R, 0}, {0, SIDE_L, 0}, false});
  return X;
}

// Pillowcase: one cylinder, each boundary circle closed by two folds.
FlatSurface pillowcase() {
  FlatSurface X;
  X.kind = {0, 4};
  Cylinder c;
  c.core = "a";
  c.c0 = 1;
  c.w0 = 1;
  for (int s : {SIDE_L, SIDE_R}) {
    c.side[s].cuts = {Frac(0), Frac(1, 4), Frac(1, 2), Frac(3, 4)};
  }
  X.cylinders.push_back(c);
  for (int s : {SIDE_L, SIDE_R}) {
    X.gluings.push_back({{0, s, 0}, {0, s, 1}, true});
    X.gluings.push_back({{0, s, 2}, {0, s, 3}, true});
    X.marked.push_back({0, s, Frac(1, 4)});
    X.marked.push_back({0, s, Frac(3, 4)});
  }
  return X;
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code;
  }
  return "";
}

}  // namespace

TEST_SUITE("flat_surface") {

TEST_CASE("square torus validates; its one vertex class is regular") {
  FlatSurface X = square_torus();
  X.validate();
  auto classes = vertex_classes(X);
  REQUIRE(classes.size() == 1);
  CHECK(classes[0].ends.size() == 4);
  CHECK(classes[0].angle_pi() == doctest::Approx(2.0));
  CHECK(!classes[0].marked);

  auto led = gauss_bonnet_ledger(X);
  CHECK(led.genus == 1);
  CHECK(led.punctures == 0);
  CHECK(led.total_excess == doctest::Approx(0.0));
}

TEST_CASE("pillowcase: four simple poles, genus zero") {
  FlatSurface X = pillowcase();
  X.validate();
  auto led = gauss_bonnet_ledger(X);
  CHECK(led.genus == 0);
  CHECK(led.punctures == 4);
  CHECK(led.total_excess == doctest::Approx(-4.0));
  int poles = 0, regular = 0;
  for (const auto& r : led.rows) {
    if (r.marked) {
      ++poles;
      CHECK(r.angle_pi == doctest::Approx(1.0));
      CHECK(r.ends == 2);
    } else {
      ++regular;
      CHECK(r.angle_pi == doctest::Approx(2.0));
    }
  }
  CHECK(poles == 4);
  CHECK(regular == 2);  // the crease endpoints at heights 0 and 1/2
}

TEST_CASE("validate rejects malformed surfaces") {
  SUBCASE("nonpositive width") {
    FlatSurface X = square_torus();
    X.cylinders[0].w0 = 0;
    CHECK(code_of([&] { X.validate(); }) == "bad_cylinder");
  }
  SUBCASE("twist outside [0,1)") {
    FlatSurface X = square_torus();
    X.cylinders[0].twist_frac = 1.0;
    CHECK(code_of([&] { X.validate(); }) == "bad_cylinder");
  }
  SUBCASE("cuts out of order") {
    FlatSurface X = pillowcase();
    std::swap(X.cylinders[0].side[SIDE_L].cuts[1], X.cylinders[0].side[SIDE_L].cuts[2]);
    CHECK(code_of([&] { X.validate(); }) == "bad_partition");
  }
  SUBCASE("cut outside [0,1)") {
    FlatSurface X = square_torus();
    X.cylinders[0].side[SIDE_L].cuts = {Frac(1)};
    CHECK(code_of([&] { X.validate(); }) == "bad_partition");
  }
  SUBCASE("unglued interval") {
    FlatSurface X = square_torus();
    X.gluings.clear();
    CHECK(code_of([&] { X.validate(); }) == "bad_gluing");
  }
  SUBCASE("interval glued twice") {
    FlatSurface X = square_torus();
    X.gluings.push_back(X.gluings.front());
    CHECK(code_of([&] { X.validate(); }) == "bad_gluing");
  }
  SUBCASE("flip joining unlike sides") {
    FlatSurface X = square_torus();
    X.gluings[0].flip = true;
    CHECK(code_of([&] { X.validate(); }) == "bad_gluing");
  }
  SUBCASE("straight gluing joining like sides") {
    FlatSurface X = pillowcase();
    X.gluings[0].flip = false;
    CHECK(code_of([&] { X.validate(); }) == "bad_gluing");
  }
  SUBCASE("interval length mismatch") {
    // two cylinders of different circumference glued circle-to-circle
    FlatSurface X;
    X.kind = {2, 0};
    for (int j = 0; j < 2; ++j) {
      Cylinder c;
      c.core = j == 0 ? "a" : "b";
      c.c0 = j == 0 ? 1.0 : 2.0;
      c.w0 = 1;
      c.side[SIDE_L].cuts = {Frac(0)};
      c.side[SIDE_R].cuts = {Frac(0)};
      X.cylinders.push_back(c);
    }
    X.gluings.push_back({{0, SIDE_R, 0}, {1, SIDE_L, 0}, false});
    X.gluings.push_back({{1, SIDE_R, 0}, {0, SIDE_L, 0}, false});
    CHECK(code_of([&] { X.validate(); }) == "length_mismatch");
  }
  SUBCASE("unsplit fold") {
    FlatSurface X = square_torus();
    X.gluings = {{{0, SIDE_R, 0}, {0, SIDE_R, 0}, true},
                 {{0, SIDE_L, 0}, {0, SIDE_L, 0}, true}};
    CHECK(code_of([&] { X.validate(); }) == "bad_gluing");
  }
  SUBCASE("marked point off the cuts") {
    FlatSurface X = pillowcase();
    X.marked[0].at = Frac(1, 3);
    CHECK(code_of([&] { X.validate(); }) == "bad_marked");
  }
  SUBCASE("duplicate marked point") {
    FlatSurface X = pillowcase();
    X.marked.push_back(X.marked[0]);
    CHECK(code_of([&] { X.validate(); }) == "bad_marked");
  }
  SUBCASE("unmarked cone angle pi") {
    FlatSurface X = pillowcase();
    X.marked.pop_back();
    X.kind.punctures = 3;
    CHECK(code_of([&] { X.validate(); }) == "bad_cone_angle");
  }
  SUBCASE("marked point at a regular vertex") {
    FlatSurface X = square_torus();
    X.marked.push_back({0, SIDE_L, Frac(0)});
    X.kind.punctures = 1;
    CHECK(code_of([&] { X.validate(); }) == "bad_cone_angle");
  }
  SUBCASE("puncture count disagrees with kind") {
    FlatSurface X = pillowcase();
    X.kind.punctures = 3;
    CHECK(code_of([&] { X.validate(); }) == "bad_kind");
  }
  SUBCASE("genus disagrees with kind") {
    FlatSurface X = square_torus();
    X.kind.genus = 2;
    CHECK(code_of([&] { X.validate(); }) == "bad_kind");
  }
  SUBCASE("disconnected") {
    FlatSurface X = square_torus();
    Cylinder c = X.cylinders[0];
    c.core = "w";
    X.cylinders.push_back(c);
    X.gluings.push_back({{1, SIDE_R, 0}, {1, SIDE_L, 0}, false});
    CHECK(code_of([&] { X.validate(); }) == "disconnected");
  }
  SUBCASE("duplicate core name") {
    FlatSurface X = square_torus();
    X.cylinders.push_back(X.cylinders[0]);
    CHECK(code_of([&] { X.validate(); }) == "bad_cylinder");
  }
}

TEST_CASE("geodesic flow scales lengths and preserves area") {
  FlatSurface X = square_torus();
  X.cylinders[0].twist_frac = 0.25;

  FlatSurface Y = geodesic_flow(X, 1.0);
  CHECK(Y.circumference(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(Y.width(0) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(Y.twist_len(0) == doctest::Approx(0.25 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(std::fabs(Y.area() - X.area()) < 1e-12 * X.area());
  CHECK(Y.modulus(0) == doctest::Approx(std::exp(2.0)).epsilon(1e-15));

  SUBCASE("t = 0 is the identity") {
    FlatSurface Z = geodesic_flow(X, 0.0);
    CHECK(Z.circumference(0) == X.circumference(0));
    CHECK(Z.log_time == X.log_time);
  }
  SUBCASE("composition is exact on the accumulated time") {
    FlatSurface Z1 = geodesic_flow(geodesic_flow(X, 0.5), 0.5);
    FlatSurface Z2 = geodesic_flow(X, 1.0);
    CHECK(Z1.log_time == Z2.log_time);
    CHECK(Z1.circumference(0) == Z2.circumference(0));
    CHECK(Z1.width(0) == Z2.width(0));
  }
  SUBCASE("flow then flow back") {
    FlatSurface Z = geodesic_flow(geodesic_flow(X, 1.7), -1.7);
    CHECK(Z.log_time == X.log_time);
    CHECK(Z.circumference(0) == X.circumference(0));
  }
}

TEST_CASE("shears advance the twist by u * width") {
  SUBCASE("square torus, shear 1 = one full left twist") {
    FlatSurface X = square_torus();
    FlatSurface Y = vertical_shear(X, 1.0);
    CHECK(Y.cylinders[0].twist_frac == 0.0);
    CHECK(Y.cylinders[0].winding == 1);
    // the underlying cylinder data is unchanged
    CHECK(Y.circumference(0) == X.circumference(0));
    CHECK(Y.width(0) == X.width(0));
  }
  SUBCASE("modulus M needs shear 1/M for a full twist") {
    FlatSurface X = square_torus();
    X.cylinders[0].w0 = 2.0;  // modulus 2
    FlatSurface Y = vertical_shear(X, 0.5);
    CHECK(Y.cylinders[0].twist_frac == 0.0);
    CHECK(Y.cylinders[0].winding == 1);
    FlatSurface H = vertical_shear(X, 0.25);  // half a twist
    CHECK(H.cylinders[0].twist_frac == doctest::Approx(0.5));
    CHECK(H.cylinders[0].winding == 0);
  }
  SUBCASE("negative shear wraps into [0,1) with negative winding") {
    FlatSurface X = square_torus();
    FlatSurface Y = vertical_shear(X, -0.25);
    CHECK(Y.cylinders[0].twist_frac == doctest::Approx(0.75));
    CHECK(Y.cylinders[0].winding == -1);
  }
  SUBCASE("shear after flow uses the current modulus") {
    FlatSurface X = geodesic_flow(square_torus(), 0.5);  // modulus e
    FlatSurface Y = vertical_shear(X, 0.5 * std::exp(-1.0));
    CHECK(Y.cylinders[0].twist_frac == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(Y.cylinders[0].winding == 0);
  }
  SUBCASE("area is untouched") {
    FlatSurface X = square_torus();
    FlatSurface Y = vertical_shear(X, 0.37);
    CHECK(std::fabs(Y.area() - X.area()) < 1e-12);
  }
  SUBCASE("per-cylinder shear touches only its cylinder") {
    SurfaceBundle g2 = make_genus2_two_cylinder();
    FlatSurface Y = shear_cylinders(g2.surface, {0.5, 0.0});
    CHECK(Y.cylinders[0].twist_frac == doctest::Approx(0.5 * Y.modulus(0)));
    CHECK(Y.cylinders[1].twist_frac == 0.0);
  }
  SUBCASE("dehn twists only move the winding counters") {
    FlatSurface X = square_torus();
    FlatSurface Y = dehn_twists(X, {5});
    CHECK(Y.cylinders[0].winding == 5);
    CHECK(Y.cylinders[0].twist_frac == X.cylinders[0].twist_frac);
    CHECK(Y.circumference(0) == X.circumference(0));
  }
}

TEST_CASE("quasiconformal distortion of piecewise shears") {
  FlatSurface X = square_torus();
  CHECK(qc_distortion_piecewise_shear(X, {0.0}) == 0.0);
  double v1 = qc_distortion_piecewise_shear(X, {1.0});
  CHECK(v1 == doctest::Approx(0.5 * std::log((3 + std::sqrt(5.0)) / 2)).epsilon(1e-15));
  CHECK(qc_distortion_piecewise_shear(X, {-1.0}) == doctest::Approx(v1));

  SurfaceBundle g2 = make_genus2_two_cylinder();
  double vmax = qc_distortion_piecewise_shear(g2.surface, {0.25, -1.0});
  CHECK(vmax == doctest::Approx(v1));  // max over cylinders
  CHECK(qc_distortion_piecewise_shear(g2.surface, {0.25, 0.1}) ==
        doctest::Approx(qc_distortion_piecewise_shear(g2.surface, {0.25, 0.0})));
}

TEST_CASE("horizontal bands of the bare torus") {
  FlatSurface X = square_torus();
  auto bands = horizontal_bands(X);
  REQUIRE(bands.size() == 1);
  CHECK(bands[0].crossings == std::vector<int>{1});
  CHECK(bands[0].thickness == doctest::Approx(1.0));

  SUBCASE("a rational twist wraps the band around") {
    X.cylinders[0].twist_frac = frac_to_double(Frac(1, 3));
    auto tb = horizontal_bands(X);
    REQUIRE(tb.size() == 1);
    CHECK(tb[0].crossings == std::vector<int>{3});
    CHECK(tb[0].thickness == doctest::Approx(1.0 / 3));
  }
  SUBCASE("flow scales thickness with the circumference") {
    auto fb = horizontal_bands(geodesic_flow(X, 2.0));
    REQUIRE(fb.size() == 1);
    CHECK(fb[0].thickness == doctest::Approx(std::exp(-2.0)));
  }
  SUBCASE("whole twists do not change the decomposition") {
    auto wb = horizontal_bands(dehn_twists(X, {7}));
    REQUIRE(wb.size() == 1);
    CHECK(wb[0].crossings == std::vector<int>{1});
  }
}

TEST_CASE("ray points compose flow lazily") {
  RayPoint r{square_torus(), 1.5};
  FlatSurface X = r.surface();
  CHECK(X.log_time == 1.5);
  CHECK(X.circumference(0) == doctest::Approx(std::exp(-1.5)));
}

}  // TEST_SUITE

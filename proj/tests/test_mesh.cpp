#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "elk/mesh.hpp"
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

std::vector<FlatSurface> zoo() {
  std::vector<FlatSurface> out;
  out.push_back(make_torus().surface);
  out.push_back(make_torus(2.5, 0.25, 2.0).surface);
  out.push_back(make_torus(1.0, 1.0 / 3).surface);
  out.push_back(make_genus2_two_cylinder().surface);
  out.push_back(make_genus2_two_cylinder(1.0, 3.0).surface);
  out.push_back(make_s05_symmetric().surface);
  out.push_back(make_theta_s12().surface);
  out.push_back(make_chain(5).surface);
  out.push_back(geodesic_flow(make_genus2_two_cylinder().surface, 0.75));
  return out;
}

// interior charts agree up to the y-wrap of the cylinder (the top row is
// unwrapped, so crossing it jumps by one circumference)
bool same_mod_wrap(std::array<double, 2> a, std::array<double, 2> b, double circ) {
  double dy = std::abs(b[1] - a[1]);
  dy = std::min(dy, std::abs(dy - circ));
  return std::abs(b[0] - a[0]) < 1e-12 && dy < 1e-12;
}

// every step must sit on an arc side facing its own face, and consecutive
// steps must be joined by that arc's other side
void check_path(const Mesh& m, const CurvePath& p) {
  REQUIRE(!p.empty());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const CurveStep& st = p[i];
    REQUIRE(st.arc >= 0);
    REQUIRE(st.arc < static_cast<int>(m.arcs.size()));
    CHECK(m.arcs[st.arc].s[st.side].cell == st.face);
    CHECK(st.t >= -1e-12);
    CHECK(st.t <= m.arcs[st.arc].len + 1e-12);
    const CurveStep& nx = p[(i + 1) % p.size()];
    CHECK(m.arcs[st.arc].s[1 - st.side].cell == nx.face);
    if (m.arcs[st.arc].kind != ARC_CIRCLE) {
      auto a = path_exit_point(m, p, i);
      auto b = path_entry_point(m, p, (i + 1) % p.size());
      CHECK(same_mod_wrap(a, b, m.X.circumference(m.cells[st.face].cyl)));
    }
  }
}

int corner_slots(const Mesh& m) {
  int n = 0;
  for (const auto& fa : m.face_arcs) n += static_cast<int>(fa.size());
  return n;
}

int corner_total(const Mesh& m) {
  int n = 0;
  for (const auto& v : m.verts) n += v.corners;
  return n;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("square torus base mesh") {
  Mesh m = build_mesh(make_torus().surface);
  CHECK(m.cells.size() == 4);
  CHECK(m.xgrid[0] == std::vector<Frac>{Frac(0), Frac(1, 2), Frac(1)});
  CHECK(m.ygrid[0] == std::vector<Frac>{Frac(0), Frac(1, 2)});
  CHECK(m.arcs.size() == 8);  // 2 vertical + 4 horizontal + 2 circle pieces

  // one interior lattice of 4 vertices, each a regular 4-corner point
  REQUIRE(m.verts.size() == 4);
  for (const auto& v : m.verts) {
    CHECK(v.corners == 4);
    CHECK(!v.marked);
    CHECK(v.node >= 0);
  }
  CHECK(corner_total(m) == corner_slots(m));

  // 4 pinned vertex nodes + 2 steiner nodes per arc
  CHECK(m.nodes.size() == 4 + 2 * m.arcs.size());
  int pinned = 0;
  for (const auto& n : m.nodes) pinned += n.pinned ? 1 : 0;
  CHECK(pinned == 4);

  // each face sees 4 corners + 8 steiner points -> C(12,2) chords
  REQUIRE(m.face_chords.size() == 4);
  for (const auto& fc : m.face_chords) CHECK(fc.size() == 66);
  for (const auto& ch : m.chords) CHECK(ch.len > 1e-9);

  CHECK(m.cell_area_total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tiling and refinement census") {
  for (const FlatSurface& X : zoo()) {
    CAPTURE(X.basepoint_tag);
    std::size_t base = 0;
    for (int r = 0; r <= 2; ++r) {
      MeshOptions o;
      o.resolution = r;
      Mesh m = build_mesh(X, o);
      if (r == 0) base = m.cells.size();
      // refinement quadruples the census; areas always tile the surface
      CHECK(m.cells.size() == base * (1u << (2 * r)));
      CHECK(m.cell_area_total() == doctest::Approx(X.area()).epsilon(1e-9));
      CHECK(corner_total(m) == corner_slots(m));
      for (const auto& fa : m.face_arcs) CHECK(fa.size() >= 4);
      for (const auto& cell : m.cells) CHECK(cell.area > 0);
    }
  }
}

TEST_CASE("interior arcs are chart-consistent from both sides") {
  for (const FlatSurface& X : zoo()) {
    CAPTURE(X.basepoint_tag);
    Mesh m = build_mesh(X);
    for (const MeshArc& a : m.arcs) {
      if (a.kind == ARC_CIRCLE) {
        // boundary pieces live on the left or right circle of their cell
        for (int s : {0, 1}) {
          const MeshCell& c = m.cells[a.s[s].cell];
          CHECK((c.x0 == Frac(0) || c.x1 == Frac(1)));
        }
        continue;
      }
      double circ = X.circumference(m.cells[a.s[0].cell].cyl);
      for (double t : {0.0, a.len / 3, a.len}) {
        auto p0 = m.arc_point(static_cast<int>(&a - m.arcs.data()), 0, t);
        auto p1 = m.arc_point(static_cast<int>(&a - m.arcs.data()), 1, t);
        CHECK(same_mod_wrap(p0, p1, circ));
      }
    }
  }
}

TEST_CASE("marked points stay node-free and grade the width") {
  SurfaceBundle s = make_s05_symmetric();
  Mesh m = build_mesh(s.surface);

  int marked = 0;
  for (const auto& v : m.verts) {
    if (v.marked) {
      ++marked;
      CHECK(v.node == -1);
    }
  }
  CHECK(marked == 5);

  // default depth-2 grading refines toward every marked circle
  for (const auto& mp : s.surface.marked) {
    const auto& xg = m.xgrid[mp.cyl];
    if (mp.side == SIDE_L) {
      CHECK(std::count(xg.begin(), xg.end(), Frac(1, 4)) == 1);
      CHECK(std::count(xg.begin(), xg.end(), Frac(1, 8)) == 1);
    } else {
      CHECK(std::count(xg.begin(), xg.end(), Frac(3, 4)) == 1);
      CHECK(std::count(xg.begin(), xg.end(), Frac(7, 8)) == 1);
    }
  }

  int flagged = 0;
  for (const auto& cell : m.cells) {
    if (!cell.puncture_adjacent) continue;
    ++flagged;
    CHECK((cell.x0 == Frac(0) || cell.x1 == Frac(1)));
  }
  CHECK(flagged > 0);
  CHECK(flagged < static_cast<int>(m.cells.size()));

  MeshOptions flat;
  flat.puncture_depth = 0;
  Mesh m0 = build_mesh(s.surface, flat);
  for (std::size_t j = 0; j < s.surface.cylinders.size(); ++j)
    CHECK(m0.xgrid[j] == std::vector<Frac>{Frac(0), Frac(1, 2), Frac(1)});
}

TEST_CASE("core and band representatives") {
  SUBCASE("square torus") {
    Mesh m = build_mesh(make_torus().surface);
    CurvePath core = core_rep(m, 0);
    check_path(m, core);
    CHECK(core.size() == 2);
    CHECK(path_length(m, core, nullptr) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(torus_class_of(m, core) == std::pair<long long, long long>{1, 0});

    auto bands = band_reps(m);
    REQUIRE(bands.size() == 1);
    check_path(m, bands[0]);
    CHECK(path_length(m, bands[0], nullptr) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(torus_class_of(m, bands[0]) == std::pair<long long, long long>{0, 1});
  }
  SUBCASE("one-third twist") {
    Mesh m = build_mesh(make_torus(1.0, 1.0 / 3).surface);
    CHECK(m.ygrid[0] == std::vector<Frac>{Frac(0), Frac(1, 3), Frac(2, 3)});
    auto bands = band_reps(m);
    REQUIRE(bands.size() == 1);
    check_path(m, bands[0]);
    CHECK(path_length(m, bands[0], nullptr) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(torus_class_of(m, bands[0]) == std::pair<long long, long long>{1, 3});
    CHECK(torus_class_of(m, core_rep(m, 0)) == std::pair<long long, long long>{1, 0});
  }
  SUBCASE("two full twists") {
    FlatSurface X = dehn_twists(make_torus().surface, {2});
    Mesh m = build_mesh(X);
    auto bands = band_reps(m);
    REQUIRE(bands.size() == 1);
    CHECK(torus_class_of(m, bands[0]) == std::pair<long long, long long>{2, 1});
    CHECK(path_length(m, bands[0], nullptr) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("winding classes reject other surfaces") {
    Mesh m = build_mesh(make_genus2_two_cylinder().surface);
    CurvePath core = core_rep(m, 0);
    CHECK(code_of([&] { torus_class_of(m, core); }) == "el_bad_query");
  }
}

TEST_CASE("representative lengths match the flat geometry") {
  for (const FlatSurface& X : zoo()) {
    CAPTURE(X.basepoint_tag);
    MeshOptions o;
    o.resolution = 1;
    Mesh m = build_mesh(X, o);

    for (int j = 0; j < static_cast<int>(X.cylinders.size()); ++j) {
      CurvePath core = core_rep(m, j);
      check_path(m, core);
      CHECK(path_length(m, core, nullptr) ==
            doctest::Approx(X.circumference(j)).epsilon(1e-12));
    }

    auto bands = horizontal_bands(X);
    auto reps = band_reps(m);
    REQUIRE(reps.size() == bands.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
      check_path(m, reps[i]);
      double want = 0;
      for (std::size_t j = 0; j < X.cylinders.size(); ++j)
        want += bands[i].crossings[j] * X.width(static_cast<int>(j));
      CHECK(path_length(m, reps[i], nullptr) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("constant metric weights scale path lengths") {
  Mesh m = build_mesh(make_genus2_two_cylinder().surface);
  std::vector<double> rho(m.cells.size(), 2.5);
  CurvePath core = core_rep(m, 1);
  CHECK(path_length(m, core, &rho) ==
        doctest::Approx(2.5 * path_length(m, core, nullptr)).epsilon(1e-13));
}

TEST_CASE("midpoint node mode") {
  MeshOptions o;
  o.midpoint_nodes_only = true;
  Mesh m = build_mesh(make_torus().surface, o);
  CHECK(m.nodes.size() == m.arcs.size());
  for (const auto& n : m.nodes) {
    CHECK(!n.pinned);
    CHECK(n.t == doctest::Approx(m.arcs[n.arc].len / 2));
  }
  for (const auto& v : m.verts) CHECK(v.node == -1);
  REQUIRE(m.face_chords.size() == 4);
  for (const auto& fc : m.face_chords) CHECK(fc.size() == 6);
}

}  // TEST_SUITE

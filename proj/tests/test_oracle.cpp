#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "elk/mesh.hpp"
#include "elk/oracle.hpp"
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

std::vector<double> flat_rho(const Mesh& m) { return std::vector<double>(m.cells.size(), 1.0); }

// deterministic "random" metric, same on every run
std::vector<double> hash_rho(const Mesh& m) {
  std::vector<double> rho(m.cells.size());
  for (std::size_t c = 0; c < rho.size(); ++c)
    rho[c] = 1.0 + double((c * 2654435761u) % 1000) / 1000.0;
  return rho;
}

// crossing sequences produced by the oracle must be genuine closed paths
void check_cycle(const Mesh& m, const FrozenCycle& fc) {
  REQUIRE(!fc.steps.empty());
  REQUIRE(fc.cell_len.size() == m.cells.size());
  REQUIRE(fc.key.size() == fc.steps.size());
  for (std::size_t i = 0; i < fc.steps.size(); ++i) {
    const CurveStep& st = fc.steps[i];
    REQUIRE(st.arc >= 0);
    REQUIRE(st.arc < static_cast<int>(m.arcs.size()));
    CHECK(m.arcs[st.arc].s[st.side].cell == st.face);
    CHECK(st.t >= -1e-12);
    CHECK(st.t <= m.arcs[st.arc].len + 1e-12);
    const CurveStep& nx = fc.steps[(i + 1) % fc.steps.size()];
    CHECK(m.arcs[st.arc].s[1 - st.side].cell == nx.face);
  }
  // cell_len is the honest per-cell decomposition of the flat length
  double tot = 0;
  for (double v : fc.cell_len) tot += v;
  CHECK(std::abs(tot - fc.flat_length()) < 1e-12 * std::max(1.0, tot));
  CHECK(std::abs(tot - path_length(m, fc.steps, nullptr)) < 1e-9 * std::max(1.0, tot));
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("flat torus classes come out exactly") {
    struct Case {
      SurfaceBundle b;
      double core, band;
    };
    // lengths on the template's own scale (circumference 1, height = modulus)
    std::vector<Case> cases;
    cases.push_back({make_torus(), 1.0, 1.0});
    cases.push_back({make_torus(2.0), 1.0, 2.0});
    cases.push_back({make_torus(1.0, 1.0 / 3), 1.0, 3.0});
    for (auto& cs : cases) {
      Mesh m = build_mesh(cs.b.surface, {.resolution = 1});
      const auto one = flat_rho(m);
      ClassOracle core(m, core_rep(m, 0), "v");
      auto rc = core.shortest(one);
      CHECK(rc.length == doctest::Approx(cs.core).epsilon(1e-12));
      ClassOracle band(m, band_reps(m)[0], "h");
      auto rb = band.shortest(one);
      CHECK(rb.length == doctest::Approx(cs.band).epsilon(1e-12));
      for (auto& fc : rc.cycles) check_cycle(m, fc);
      for (auto& fc : rb.cycles) check_cycle(m, fc);
    }
  }

  TEST_CASE("smoothing reaches the diagonal geodesic through grid corners") {
    auto b = make_torus();
    Mesh m = build_mesh(b.surface, {.resolution = 0});
    REQUIRE(m.columns(0) == 2);
    REQUIRE(m.rows(0) == 2);
    auto cell = [&](int ix, int iy) { return m.cell_index(0, ix, iy); };
    const int f0 = cell(0, 0), f1 = cell(0, 1), f2 = cell(1, 0), f3 = cell(1, 1);

    // staircase representative of the (1,1) class
    CurvePath rep;
    auto push = [&](int face, int arc) {
      const int side = m.arcs[arc].s[0].cell == face ? 0 : 1;
      REQUIRE(m.arcs[arc].s[side].cell == face);
      rep.push_back({face, arc, side, 0.4 * m.arcs[arc].len});
    };
    int circ = -1;
    for (std::size_t a = 0; a < m.arcs.size(); ++a)
      if (m.arcs[a].kind == ARC_CIRCLE) {
        const int c0 = m.arcs[a].s[0].cell, c1 = m.arcs[a].s[1].cell;
        if ((c0 == f3 && c1 == f1) || (c0 == f1 && c1 == f3)) circ = static_cast<int>(a);
      }
    REQUIRE(circ >= 0);
    push(f0, m.varc[0][1][0]);
    push(f2, m.harc[0][1][1]);
    push(f3, circ);
    push(f1, m.harc[0][0][0]);
    CHECK(torus_class_of(m, rep) == std::pair<long long, long long>{1, 1});
    CHECK(path_length(m, rep, nullptr) > std::sqrt(2.0) + 1e-3);

    const auto one = flat_rho(m);
    ClassOracle oc(m, rep, "diag");
    auto r = oc.shortest(one);
    CHECK(r.length == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    for (auto& fc : r.cycles) {
      check_cycle(m, fc);
      CHECK(torus_class_of(m, fc.steps) == std::pair<long long, long long>{1, 1});
    }

    // the thirds grid happens to contain exact diagonals (offset -1/6), so
    // even the raw graph is exact here
    ClassOracle frozen(m, rep, "diag", {.smooth = false});
    auto rf = frozen.shortest(one);
    CHECK(rf.length == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(r.length <= rf.length + 1e-12);

    // under an uneven metric the optimal crossings refract to irrational
    // positions: the fixed grid stays strictly above, sliding closes the gap
    const auto rho = hash_rho(m);
    ClassOracle sm(m, rep, "diag");
    ClassOracle ns(m, rep, "diag", {.smooth = false});
    const auto rs = sm.shortest(rho);
    const auto rn = ns.shortest(rho);
    CHECK(rs.length < rn.length - 0.1);
    CHECK(rs.length >= std::sqrt(2.0) - 1e-9);  // rho >= 1 everywhere
  }

  TEST_CASE("metric steers the minimizer into the cheap column") {
    auto b = make_torus();
    Mesh m = build_mesh(b.surface, {.resolution = 1});
    std::vector<double> rho(m.cells.size(), 4.0);
    for (int iy = 0; iy < m.rows(0); ++iy) rho[m.cell_index(0, 0, iy)] = 1.0;

    ClassOracle core(m, core_rep(m, 0), "v");
    auto rc = core.shortest(rho);
    CHECK(rc.length == doctest::Approx(1.0).epsilon(1e-12));
    // the winning cycle never leaves the cheap column
    double off = 0;
    for (int c = 0; c < static_cast<int>(m.cells.size()); ++c) {
      bool cheap = false;
      for (int iy = 0; iy < m.rows(0); ++iy) cheap |= (c == m.cell_index(0, 0, iy));
      if (!cheap) off += rc.cycles.front().cell_len[c];
    }
    CHECK(off == doctest::Approx(0.0).epsilon(1e-12));

    // the band has to pay for every column: 1/4 * (1 + 4 + 4 + 4)
    ClassOracle band(m, band_reps(m)[0], "h");
    auto rb = band.shortest(rho);
    CHECK(rb.length == doctest::Approx(3.25).epsilon(1e-12));
  }

  TEST_CASE("depth cap reports the class by name") {
    auto b = make_torus();
    Mesh m = build_mesh(b.surface, {.resolution = 0});
    ClassOracle oc(m, core_rep(m, 0), "vcap", {.depth_cap = 0});
    const auto one = flat_rho(m);
    CHECK(code_of([&] { oc.shortest(one); }) == "oracle_depth");
    try {
      oc.shortest(one);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("vcap") != std::string::npos);
    }
  }

  TEST_CASE("candidate list is deduplicated, ordered and class-correct") {
    auto b = make_torus();
    Mesh m = build_mesh(b.surface, {.resolution = 1});
    const auto rho = hash_rho(m);
    const OracleOptions opt{};
    ClassOracle oc(m, core_rep(m, 0), "v", opt);
    auto r = oc.shortest(rho);
    REQUIRE(!r.cycles.empty());
    CHECK(r.cycles.size() <= static_cast<std::size_t>(opt.max_cuts));
    std::set<std::vector<int>> keys;
    double prev = 0;
    for (auto& fc : r.cycles) {
      check_cycle(m, fc);
      CHECK(keys.insert(fc.key).second);  // pairwise distinct canonical words
      const double len = fc.length(rho);
      CHECK(len >= prev - 1e-12);
      prev = len;
      CHECK(len <= r.length * (1 + opt.cut_slack) + 1e-9);
      CHECK(torus_class_of(m, fc.steps) == std::pair<long long, long long>{1, 0});
    }
    CHECK(r.length == doctest::Approx(r.cycles.front().length(rho)).epsilon(1e-15));
  }

  TEST_CASE("every shipped class is found at its geodesic length") {
    // cores and horizontal trajectories are closed flat geodesics, hence the
    // exact minimizers of their classes; the oracle must land on them
    std::vector<SurfaceBundle> zs;
    zs.push_back(make_genus2_two_cylinder());
    zs.push_back(make_genus2_two_cylinder(1.0, 3.0));
    zs.push_back(make_s05_symmetric());
    zs.push_back(make_theta_s12());
    zs.push_back(make_chain(5));
    for (auto& z : zs) {
      Mesh m = build_mesh(z.surface, {.resolution = 1});
      const auto one = flat_rho(m);
      for (std::size_t cyl = 0; cyl < z.surface.cylinders.size(); ++cyl) {
        auto rep = core_rep(m, static_cast<int>(cyl));
        ClassOracle oc(m, rep, "core" + std::to_string(cyl));
        auto r = oc.shortest(one);
        CHECK(r.length == doctest::Approx(path_length(m, rep, nullptr)).epsilon(1e-9));
        for (auto& fc : r.cycles) check_cycle(m, fc);
      }
      auto bands = band_reps(m);
      for (std::size_t j = 0; j < bands.size(); ++j) {
        ClassOracle oc(m, bands[j], "h" + std::to_string(j));
        auto r = oc.shortest(one);
        CHECK(r.length == doctest::Approx(path_length(m, bands[j], nullptr)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("runs are deterministic") {
    auto b = make_genus2_two_cylinder();
    Mesh m = build_mesh(b.surface, {.resolution = 1});
    const auto rho = hash_rho(m);
    auto run = [&] {
      ClassOracle oc(m, band_reps(m)[0], "h0");
      return oc.shortest(rho);
    };
    auto r1 = run(), r2 = run();
    REQUIRE(r1.cycles.size() == r2.cycles.size());
    CHECK(r1.length == r2.length);
    for (std::size_t i = 0; i < r1.cycles.size(); ++i) {
      CHECK(r1.cycles[i].key == r2.cycles[i].key);
      CHECK(r1.cycles[i].length(rho) == r2.cycles[i].length(rho));
    }
  }

  TEST_CASE("one oracle serves many metrics") {
    auto b = make_torus();
    Mesh m = build_mesh(b.surface, {.resolution = 1});
    const auto one = flat_rho(m);
    std::vector<double> col(m.cells.size(), 4.0);
    for (int iy = 0; iy < m.rows(0); ++iy) col[m.cell_index(0, 0, iy)] = 1.0;

    ClassOracle oc(m, core_rep(m, 0), "v");
    auto a1 = oc.shortest(one);
    const int rings1 = oc.rings_built();
    auto b1 = oc.shortest(col);
    auto a2 = oc.shortest(one);
    CHECK(oc.rings_built() >= rings1);  // the cover is kept, never rebuilt
    CHECK(a1.length == a2.length);
    CHECK(a1.cycles.size() == a2.cycles.size());

    // agree with a fresh oracle started on the second metric
    ClassOracle fresh(m, core_rep(m, 0), "v");
    auto b2 = fresh.shortest(col);
    CHECK(b1.length == doctest::Approx(b2.length).epsilon(1e-12));
  }

  TEST_CASE("standalone smoothing never lengthens and respects pins") {
    auto b = make_torus(1.0, 1.0 / 3);
    Mesh m = build_mesh(b.surface, {.resolution = 1});
    const auto one = flat_rho(m);
    auto rep = band_reps(m)[0];
    const double before = path_length(m, rep, &one);

    auto path = rep;
    std::vector<char> pinned(path.size(), 0);
    const double after = smooth_cycle(m, path, pinned, one);
    CHECK(after <= before + 1e-12);
    CHECK(after == doctest::Approx(3.0).epsilon(1e-9));

    // a pinned crossing stays put, and the constrained result can't beat
    // the free one
    auto path2 = rep;
    std::vector<char> pins(path2.size(), 0);
    pins[0] = 1;
    path2[0].t = 0.1 * m.arcs[path2[0].arc].len;
    const double t_fixed = path2[0].t;
    const double constrained = smooth_cycle(m, path2, pins, one);
    CHECK(path2[0].t == t_fixed);
    CHECK(constrained >= after - 1e-12);
  }
}

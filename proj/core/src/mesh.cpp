// Mesh builder: per-cylinder tensor grids joined along identified boundary
// arcs, plus the canonical curve representatives (cores and horizontal
// trajectories) used to anchor homotopy classes.

#include "elk/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "foliation_internal.hpp"
#include "surface_internal.hpp"

namespace elk {

namespace {

using internal::FoliationCtx;

double f2d(const Frac& f) { return frac_to_double(f); }

// Canonical identity of a grid vertex.  kind 0: interior point (cyl, x, y);
// kind 1: circle point interior to a gluing interval, keyed by the
// lexicographically smaller of its two (cyl, side, frame) incarnations;
// kind 2: cone point (vertex class index).
struct VKey {
  int kind = 0;
  int a = 0, b = 0;
  Frac u, v;
  bool operator<(const VKey& o) const {
    return std::tie(kind, a, b, u, v) < std::tie(o.kind, o.a, o.b, o.u, o.v);
  }
};

struct Builder {
  const FlatSurface& X;
  MeshOptions opt;
  FoliationCtx cx;
  Mesh m;

  std::vector<int> cell_off;
  std::map<std::tuple<int, int, Frac>, int> cut_class;  // (cyl, side, frame) -> class
  std::vector<VertexClass> classes;
  std::map<VKey, int> vid;
  // per cell, per edge: (arc, side) incidences
  std::vector<std::array<std::vector<std::pair<int, int>>, 4>> bins;

  Builder(const FlatSurface& X_, const MeshOptions& o) : X(X_), opt(o), cx(X_) {
    m.X = X;
    m.opt = o;
  }

  int ncyl() const { return static_cast<int>(X.cylinders.size()); }

  // ---- grids and cells --------------------------------------------------

  void grids() {
    int n = ncyl();
    m.xgrid.resize(n);
    m.ygrid.resize(n);
    auto crit = internal::critical_heights(cx);
    for (int j = 0; j < n; ++j) {
      std::set<Frac> ys;
      for (const Frac& h : crit[j]) ys.insert(h / cx.C[j]);
      if (ys.size() < 2) ys.insert(frac_mod1(*ys.begin() + Frac(1, 2)));
      for (int r = 0; r < opt.resolution; ++r) {
        std::vector<Frac> v(ys.begin(), ys.end());
        for (std::size_t k = 0; k < v.size(); ++k) {
          Frac hi = k + 1 < v.size() ? v[k + 1] : v[0] + 1;
          ys.insert(frac_mod1((v[k] + hi) / 2));
        }
      }
      m.ygrid[j].assign(ys.begin(), ys.end());

      std::set<Frac> xs{Frac(0), Frac(1, 2), Frac(1)};
      bool mkL = false, mkR = false;
      for (const auto& mp : X.marked)
        if (mp.cyl == j) (mp.side == SIDE_L ? mkL : mkR) = true;
      for (int d = 1; d <= opt.puncture_depth; ++d) {
        Frac g(1, 1LL << (d + 1));
        if (mkL) xs.insert(g);
        if (mkR) xs.insert(Frac(1) - g);
      }
      for (int r = 0; r < opt.resolution; ++r) {
        std::vector<Frac> v(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < v.size(); ++k) xs.insert((v[k] + v[k + 1]) / 2);
      }
      m.xgrid[j].assign(xs.begin(), xs.end());
    }
  }

  void make_cells() {
    cell_off.assign(ncyl() + 1, 0);
    for (int j = 0; j < ncyl(); ++j)
      cell_off[j + 1] = cell_off[j] + m.columns(j) * m.rows(j);
    m.cells.resize(cell_off.back());
    for (int j = 0; j < ncyl(); ++j) {
      double w = X.width(j), c = X.circumference(j);
      const auto& xg = m.xgrid[j];
      const auto& yg = m.ygrid[j];
      int rows = m.rows(j);
      for (int ix = 0; ix < m.columns(j); ++ix) {
        for (int iy = 0; iy < rows; ++iy) {
          MeshCell cell;
          cell.cyl = j;
          cell.x0 = xg[ix];
          cell.x1 = xg[ix + 1];
          cell.y0 = yg[iy];
          cell.y1 = iy + 1 < rows ? yg[iy + 1] : yg[0] + 1;
          cell.area = f2d(cell.x1 - cell.x0) * w * f2d(cell.y1 - cell.y0) * c;
          m.cells[cell_id(j, ix, iy)] = cell;
        }
      }
    }
  }

  int cell_id(int j, int ix, int iy) const { return cell_off[j] + ix * m.rows(j) + iy; }

  int row_at(int j, const Frac& body) const {
    const auto& yg = m.ygrid[j];
    Frac y = frac_mod1(body);
    auto it = std::upper_bound(yg.begin(), yg.end(), y);
    int k = static_cast<int>(it - yg.begin()) - 1;
    return k < 0 ? static_cast<int>(yg.size()) - 1 : k;
  }

  // unwrapped body coordinate of `body` inside cell `cell`
  Frac unwrap(const Frac& body, int cell) const {
    Frac y = frac_mod1(body);
    if (y < m.cells[cell].y0) y += 1;
    return y;
  }

  // ---- vertices ----------------------------------------------------------

  void index_cuts() {
    classes = vertex_classes(X);
    for (std::size_t k = 0; k < classes.size(); ++k)
      for (const EndRef& e : classes[k].ends)
        cut_class[{e.cyl, e.side, internal::end_position(X, e)}] = static_cast<int>(k);
  }

  int vertex_of(const VKey& key, bool marked) {
    auto [it, fresh] = vid.try_emplace(key, static_cast<int>(m.verts.size()));
    if (fresh) m.verts.push_back({0, marked, -1});
    return it->second;
  }

  int circle_vertex(int cyl, int side, const Frac& frame) {
    Frac p = frac_mod1(frame);
    auto cit = cut_class.find({cyl, side, p});
    if (cit != cut_class.end()) {
      VKey key{2, cit->second, 0, Frac(0), Frac(0)};
      return vertex_of(key, classes[cit->second].marked);
    }
    const CylSide& sd = X.cylinders[cyl].side[side];
    int i = sd.interval_at(p);
    const auto& slot = cx.gl.at({cyl, side, i});
    const IntervalRef& pr = slot.partner;
    const CylSide& psd = X.cylinders[pr.cyl].side[pr.side];
    Frac d = frac_mod1(p - sd.lo(i)) * (cx.C[cyl] / cx.C[pr.cyl]);
    Frac off = slot.flip ? psd.length(pr.interval) - d : d;
    Frac pp = frac_mod1(psd.lo(pr.interval) + off);
    std::tuple<int, int, Frac> t1{cyl, side, p}, t2{pr.cyl, pr.side, pp};
    const auto& tm = std::min(t1, t2);
    VKey key{1, std::get<0>(tm), std::get<1>(tm), std::get<2>(tm), Frac(0)};
    return vertex_of(key, false);
  }

  int interior_vertex(int cyl, const Frac& x, const Frac& y) {
    VKey key{0, cyl, 0, x, frac_mod1(y)};
    return vertex_of(key, false);
  }

  // ---- arcs ---------------------------------------------------------------

  int push_arc(MeshArc arc) {
    if (arc.s[0].cell == arc.s[1].cell)
      fail("mesh_internal", "self-glued cell edge; grid too coarse");
    int id = static_cast<int>(m.arcs.size());
    bins[arc.s[0].cell][arc.s[0].edge].push_back({id, 0});
    bins[arc.s[1].cell][arc.s[1].edge].push_back({id, 1});
    m.arcs.push_back(std::move(arc));
    return id;
  }

  void vertical_arcs() {
    m.varc.assign(ncyl(), {});
    for (int j = 0; j < ncyl(); ++j) {
      double c = X.circumference(j);
      const auto& xg = m.xgrid[j];
      const auto& yg = m.ygrid[j];
      int rows = m.rows(j);
      m.varc[j].assign(m.columns(j) + 1, std::vector<int>(rows, -1));
      for (int ix = 1; ix < m.columns(j); ++ix) {
        for (int iy = 0; iy < rows; ++iy) {
          Frac y0 = yg[iy];
          Frac y1 = iy + 1 < rows ? yg[iy + 1] : yg[0] + 1;
          MeshArc a;
          a.kind = ARC_VERTICAL;
          a.len = f2d(y1 - y0) * c;
          a.s[0] = {cell_id(j, ix - 1, iy), EDGE_R, f2d(y0), f2d(y1)};
          a.s[1] = {cell_id(j, ix, iy), EDGE_L, f2d(y0), f2d(y1)};
          a.vlo = interior_vertex(j, xg[ix], y0);
          a.vhi = interior_vertex(j, xg[ix], frac_mod1(y1));
          m.varc[j][ix][iy] = push_arc(std::move(a));
        }
      }
    }
  }

  void horizontal_arcs() {
    m.harc.assign(ncyl(), {});
    for (int j = 0; j < ncyl(); ++j) {
      double w = X.width(j);
      const auto& xg = m.xgrid[j];
      const auto& yg = m.ygrid[j];
      int rows = m.rows(j), cols = m.columns(j);
      m.harc[j].assign(rows, std::vector<int>(cols, -1));
      for (int iy = 0; iy < rows; ++iy) {
        for (int ix = 0; ix < cols; ++ix) {
          MeshArc a;
          a.kind = ARC_HORIZONTAL;
          a.len = f2d(xg[ix + 1] - xg[ix]) * w;
          a.s[0] = {cell_id(j, ix, (iy + rows - 1) % rows), EDGE_T, f2d(xg[ix]), f2d(xg[ix + 1])};
          a.s[1] = {cell_id(j, ix, iy), EDGE_B, f2d(xg[ix]), f2d(xg[ix + 1])};
          a.vlo = ix == 0 ? circle_vertex(j, SIDE_L, yg[iy])
                          : interior_vertex(j, xg[ix], yg[iy]);
          a.vhi = ix + 1 == cols ? circle_vertex(j, SIDE_R, yg[iy] - cx.tw[j])
                                 : interior_vertex(j, xg[ix + 1], yg[iy]);
          m.harc[j][iy][ix] = push_arc(std::move(a));
        }
      }
    }
  }

  void circle_arcs() {
    m.circle_arcs.resize(ncyl());
    for (const Gluing& g : X.gluings) {
      const CylSide& sa = X.cylinders[g.a.cyl].side[g.a.side];
      const CylSide& sb = X.cylinders[g.b.cyl].side[g.b.side];
      Frac ell = sa.length(g.a.interval) * cx.C[g.a.cyl];
      if (ell != sb.length(g.b.interval) * cx.C[g.b.cyl])
        fail("mesh_internal", "gluing lengths disagree after snapping");

      // breakpoints: both grids' lines landing inside the identified piece,
      // as arclength offsets from the a-side low end
      std::set<Frac> D{Frac(0), ell};
      auto add_events = [&](const IntervalRef& r, bool isB) {
        const CylSide& sd = X.cylinders[r.cyl].side[r.side];
        Frac lo = sd.lo(r.interval), L = sd.length(r.interval);
        for (const Frac& y : m.ygrid[r.cyl]) {
          Frac p = r.side == SIDE_R ? frac_mod1(y - cx.tw[r.cyl]) : y;
          Frac d = frac_mod1(p - lo);
          if (d < L) {
            Frac darc = d * cx.C[r.cyl];
            D.insert(isB && g.flip ? ell - darc : darc);
          }
        }
      };
      add_events(g.a, false);
      add_events(g.b, true);

      std::vector<Frac> bp(D.begin(), D.end());
      for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
        MeshArc arc;
        arc.kind = ARC_CIRCLE;
        arc.len = f2d(bp[k + 1] - bp[k]) * cx.unit();
        int sidx = 0;
        for (const IntervalRef* r : {&g.a, &g.b}) {
          bool isB = r == &g.b;
          const CylSide& sd = X.cylinders[r->cyl].side[r->side];
          Frac lo = sd.lo(r->interval);
          Frac e0 = isB && g.flip ? ell - bp[k] : bp[k];
          Frac e1 = isB && g.flip ? ell - bp[k + 1] : bp[k + 1];
          Frac b0 = lo + e0 / cx.C[r->cyl];
          Frac b1 = lo + e1 / cx.C[r->cyl];
          if (r->side == SIDE_R) {
            b0 += cx.tw[r->cyl];
            b1 += cx.tw[r->cyl];
          }
          int row = row_at(r->cyl, frac_mod1((b0 + b1) / 2));
          int col = r->side == SIDE_L ? 0 : m.columns(r->cyl) - 1;
          int cell = cell_id(r->cyl, col, row);
          arc.s[sidx] = {cell, r->side == SIDE_L ? EDGE_L : EDGE_R,
                         f2d(unwrap(b0, cell)), f2d(unwrap(b1, cell))};
          // frame coverage for circle_arc_at lookups
          Frac emin = std::min(e0, e1);
          m.circle_arcs[r->cyl][r->side].push_back(
              {frac_mod1(lo + emin / cx.C[r->cyl]), (bp[k + 1] - bp[k]) / cx.C[r->cyl],
               -1 /* patched below */, sidx});
          ++sidx;
        }
        const CylSide& sa2 = X.cylinders[g.a.cyl].side[g.a.side];
        arc.vlo = circle_vertex(g.a.cyl, g.a.side, sa2.lo(g.a.interval) + bp[k] / cx.C[g.a.cyl]);
        arc.vhi =
            circle_vertex(g.a.cyl, g.a.side, sa2.lo(g.a.interval) + bp[k + 1] / cx.C[g.a.cyl]);
        int id = push_arc(std::move(arc));
        // patch the two lookup entries just added
        for (const IntervalRef* r : {&g.a, &g.b}) {
          auto& list = m.circle_arcs[r->cyl][r->side];
          for (auto rit = list.rbegin(); rit != list.rend(); ++rit)
            if (rit->arc == -1) {
              rit->arc = id;
              break;
            }
        }
        if (m.verts[m.arcs[id].vlo].marked || m.verts[m.arcs[id].vhi].marked) {
          m.cells[m.arcs[id].s[0].cell].puncture_adjacent = true;
          m.cells[m.arcs[id].s[1].cell].puncture_adjacent = true;
        }
      }
    }
  }

  // ---- faces, vertices census, nodes, chords -----------------------------

  void faces() {
    int nf = static_cast<int>(m.cells.size());
    m.face_arcs.assign(nf, {});
    m.face_corner_vertex.assign(nf, {});
    for (int f = 0; f < nf; ++f) {
      auto& out = m.face_arcs[f];
      auto side_sorted = [&](int edge, bool ascending) {
        auto v = bins[f][edge];
        std::stable_sort(v.begin(), v.end(), [&](auto& l, auto& r) {
          const MeshArcSide &ls = m.arcs[l.first].s[l.second], &rs = m.arcs[r.first].s[r.second];
          double lm = std::min(ls.u0, ls.u1), rm = std::min(rs.u0, rs.u1);
          return ascending ? lm < rm : lm > rm;
        });
        for (auto& [a, s] : v) {
          const MeshArcSide& as = m.arcs[a].s[s];
          out.push_back({a, s, ascending ? as.u0 < as.u1 : as.u0 > as.u1});
        }
      };
      side_sorted(EDGE_B, true);
      side_sorted(EDGE_R, true);
      side_sorted(EDGE_T, false);
      side_sorted(EDGE_L, false);

      int deg = static_cast<int>(out.size());
      for (int k = 0; k < deg; ++k) {
        const ArcUse& prev = out[(k + deg - 1) % deg];
        const ArcUse& curr = out[k];
        int vp = prev.fwd ? m.arcs[prev.arc].vhi : m.arcs[prev.arc].vlo;
        int vc = curr.fwd ? m.arcs[curr.arc].vlo : m.arcs[curr.arc].vhi;
        if (vp != vc) fail("mesh_internal", "face boundary does not close");
        m.face_corner_vertex[f].push_back(vc);
        m.verts[vc].corners += 1;
      }
    }
  }

  void nodes_and_chords() {
    if (!opt.midpoint_nodes_only) {
      for (auto& v : m.verts)
        if (!v.marked) {
          v.node = static_cast<int>(m.nodes.size());
          m.nodes.push_back({-1, 0, true});
        }
      for (std::size_t a = 0; a < m.arcs.size(); ++a) {
        const MeshArc& arc = m.arcs[a];
        for (auto [v, t] : {std::pair{arc.vlo, 0.0}, std::pair{arc.vhi, arc.len}}) {
          int nd = m.verts[v].node;
          if (nd >= 0 && m.nodes[nd].arc < 0) {
            m.nodes[nd].arc = static_cast<int>(a);
            m.nodes[nd].t = t;
          }
        }
      }
    }
    std::vector<std::array<int, 2>> steiner(m.arcs.size(), {-1, -1});
    for (std::size_t a = 0; a < m.arcs.size(); ++a) {
      if (opt.midpoint_nodes_only) {
        steiner[a][0] = static_cast<int>(m.nodes.size());
        m.nodes.push_back({static_cast<int>(a), m.arcs[a].len / 2, false});
      } else {
        for (int k : {0, 1}) {
          steiner[a][k] = static_cast<int>(m.nodes.size());
          m.nodes.push_back({static_cast<int>(a), m.arcs[a].len * (k + 1) / 3, false});
        }
      }
    }

    int nf = static_cast<int>(m.cells.size());
    m.face_chords.assign(nf, {});
    for (int f = 0; f < nf; ++f) {
      struct Entry {
        int node;
        std::array<double, 2> p;
      };
      std::vector<Entry> ent;
      for (const ArcUse& au : m.face_arcs[f]) {
        const MeshArc& arc = m.arcs[au.arc];
        auto add = [&](int node, double t) {
          if (node < 0) return;
          ent.push_back({node, m.arc_point(au.arc, au.side, t)});
        };
        if (!opt.midpoint_nodes_only) {
          add(m.verts[arc.vlo].node, 0);
          add(m.verts[arc.vhi].node, arc.len);
        }
        for (int s : {0, 1})
          if (steiner[au.arc][s] >= 0) add(steiner[au.arc][s], m.nodes[steiner[au.arc][s]].t);
      }
      std::sort(ent.begin(), ent.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.node, a.p[0], a.p[1]) < std::tie(b.node, b.p[0], b.p[1]);
      });
      ent.erase(std::unique(ent.begin(), ent.end(),
                            [](const Entry& a, const Entry& b) {
                              return a.node == b.node && a.p == b.p;
                            }),
                ent.end());
      for (std::size_t i = 0; i < ent.size(); ++i) {
        for (std::size_t k = i + 1; k < ent.size(); ++k) {
          if (ent[i].node == ent[k].node) continue;
          MeshChord ch;
          ch.face = f;
          ch.n0 = ent[i].node;
          ch.n1 = ent[k].node;
          ch.p0 = ent[i].p;
          ch.p1 = ent[k].p;
          ch.len = std::hypot(ch.p1[0] - ch.p0[0], ch.p1[1] - ch.p0[1]);
          m.face_chords[f].push_back(static_cast<int>(m.chords.size()));
          m.chords.push_back(ch);
        }
      }
    }
  }

  void sanity() {
    for (std::size_t v = 0; v < m.verts.size(); ++v) {
      // interior grid vertices always join four cells
      // (cone points are checked against their end count in the tests)
      if (m.verts[v].corners <= 0) fail("mesh_internal", "orphan vertex");
    }
    double tot = m.cell_area_total();
    if (!close_rel(tot, X.area(), 1e-9))
      fail("mesh_internal", "cells do not tile the surface: " + fmt_real(tot) + " vs " +
                                fmt_real(X.area()));
  }

  Mesh run() {
    grids();
    make_cells();
    bins.assign(m.cells.size(), {});
    index_cuts();
    circle_arcs();
    vertical_arcs();
    horizontal_arcs();
    faces();
    nodes_and_chords();
    sanity();
    return std::move(m);
  }
};

}  // namespace

Mesh build_mesh(const FlatSurface& X, const MeshOptions& opt) {
  Builder b(X, opt);
  return b.run();
}

int Mesh::cell_index(int cyl, int ix, int iy) const {
  int off = 0;
  for (int j = 0; j < cyl; ++j) off += columns(j) * rows(j);
  return off + ix * rows(cyl) + iy;
}

double Mesh::cell_area_total() const {
  double s = 0;
  for (const auto& c : cells) s += c.area;
  return s;
}

std::array<double, 2> Mesh::arc_point(int arc, int side, double t) const {
  const MeshArc& a = arcs[arc];
  const MeshArcSide& s = a.s[side];
  const MeshCell& c = cells[s.cell];
  // endpoint-exact lerp: t = 0 and t = len land on u0/u1 bit-for-bit, so
  // corner entries from adjacent arcs coincide and dedup exactly
  double w1 = a.len == 0 ? 0.0 : t / a.len;
  double u = s.u0 * (1.0 - w1) + s.u1 * w1;
  double x, y;
  switch (s.edge) {
    case EDGE_L: x = frac_to_double(c.x0), y = u; break;
    case EDGE_R: x = frac_to_double(c.x1), y = u; break;
    case EDGE_B: x = u, y = frac_to_double(c.y0); break;
    default: x = u, y = frac_to_double(c.y1); break;
  }
  return {x * X.width(c.cyl), y * X.circumference(c.cyl)};
}

std::pair<int, int> Mesh::circle_arc_at(int cyl, int side, const Frac& p) const {
  Frac q = frac_mod1(p);
  for (const auto& e : circle_arcs[cyl][side])
    if (frac_mod1(q - e.lo) < e.len) return {e.arc, e.side};
  fail("mesh_internal", "no circle arc at the requested position");
}

std::array<double, 2> path_exit_point(const Mesh& m, const CurvePath& p, std::size_t i) {
  return m.arc_point(p[i].arc, p[i].side, p[i].t);
}

std::array<double, 2> path_entry_point(const Mesh& m, const CurvePath& p, std::size_t i) {
  const CurveStep& prev = p[(i + p.size() - 1) % p.size()];
  return m.arc_point(prev.arc, 1 - prev.side, prev.t);
}

double path_length(const Mesh& m, const CurvePath& p, const std::vector<double>* rho) {
  double total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto a = path_entry_point(m, p, i);
    auto b = path_exit_point(m, p, i);
    double seg = std::hypot(b[0] - a[0], b[1] - a[1]);
    total += rho ? (*rho)[p[i].face] * seg : seg;
  }
  return total;
}

CurvePath core_rep(const Mesh& m, int cyl) {
  const auto& xg = m.xgrid[cyl];
  auto it = std::lower_bound(xg.begin(), xg.end(), Frac(1, 2));
  int ic = static_cast<int>(it - xg.begin());  // column [1/2, ...)
  double xs = frac_to_double((xg[ic] + xg[ic + 1]) / 2);
  CurvePath path;
  int rows = m.rows(cyl);
  for (int iy = 0; iy < rows; ++iy) {
    int face = m.cell_index(cyl, ic, iy);
    int a = m.harc[cyl][(iy + 1) % rows][ic];
    const MeshArc& arc = m.arcs[a];
    int side = arc.s[0].cell == face && arc.s[0].edge == EDGE_T ? 0 : 1;
    double t = arc.len * (xs - arc.s[side].u0) / (arc.s[side].u1 - arc.s[side].u0);
    path.push_back({face, a, side, t});
  }
  return path;
}

namespace {

// parameter of unwrapped body coordinate u on (arc, side); u runs along y
// for vertical and circle arcs
double t_at_u(const Mesh& m, int a, int side, double u) {
  const MeshArcSide& s = m.arcs[a].s[side];
  return m.arcs[a].len * (u - s.u0) / (s.u1 - s.u0);
}

}  // namespace

std::vector<CurvePath> band_reps(const Mesh& m) {
  const FlatSurface& X = m.X;
  FoliationCtx cx(X);
  auto bands = horizontal_bands(X);
  auto crit = internal::critical_heights(cx);
  std::vector<std::vector<Frac>> H(crit.size());
  for (std::size_t j = 0; j < crit.size(); ++j) H[j].assign(crit[j].begin(), crit[j].end());
  auto gap_lo = [&](int j, const Frac& h) {
    const auto& v = H[j];
    auto it = std::upper_bound(v.begin(), v.end(), h);
    return it == v.begin() ? v.back() - cx.C[j] : *std::prev(it);
  };
  auto gap_hi = [&](int j, const Frac& h) {
    const auto& v = H[j];
    auto it = std::upper_bound(v.begin(), v.end(), h);
    return it == v.end() ? v.front() + cx.C[j] : *it;
  };

  std::vector<CurvePath> reps;
  for (const auto& band : bands) {
    const auto& s0 = band.segments.front();
    Frac h0 = s0.height * cx.C[s0.cyl];
    // reroute at one third of the gap: never a grid line, since refinement
    // only ever splits gaps dyadically
    Frac start = gap_lo(s0.cyl, h0) + (gap_hi(s0.cyl, h0) - gap_lo(s0.cyl, h0)) / 3;
    while (start < 0) start += cx.C[s0.cyl];
    while (start >= cx.C[s0.cyl]) start -= cx.C[s0.cyl];
    internal::TraceState st{s0.cyl, start, +1};
    auto first = st;
    std::vector<internal::TraceState> segs;
    do {
      segs.push_back(st);
      st = internal::trace_step(cx, st);
      if (segs.size() > band.segments.size())
        fail("mesh_internal", "band representative does not close with the band");
    } while (!(st == first));
    if (segs.size() != band.segments.size())
      fail("mesh_internal", "band representative does not close with the band");

    CurvePath path;
    for (const auto& seg : segs) {
      int j = seg.cyl;
      Frac y = seg.h / cx.C[j];  // body fraction, strictly inside a row
      const auto& yg = m.ygrid[j];
      auto yit = std::upper_bound(yg.begin(), yg.end(), frac_mod1(y));
      int row = static_cast<int>(yit - yg.begin()) - 1;
      if (row < 0) row = static_cast<int>(yg.size()) - 1;
      int cols = m.columns(j);
      auto emit = [&](int ix, int a, int side) {
        int face = m.cell_index(j, ix, row);
        const MeshCell& c = m.cells[face];
        Frac yy = frac_mod1(y);
        if (yy < c.y0) yy += 1;
        path.push_back({face, a, side, t_at_u(m, a, side, frac_to_double(yy))});
      };
      if (seg.dir > 0) {
        for (int ix = 0; ix < cols; ++ix) {
          if (ix + 1 < cols) {
            int a = m.varc[j][ix + 1][row];
            emit(ix, a, m.arcs[a].s[0].cell == m.cell_index(j, ix, row) ? 0 : 1);
          } else {
            auto [a, side] = m.circle_arc_at(j, SIDE_R, frac_mod1(y - cx.tw[j]));
            emit(ix, a, side);
          }
        }
      } else {
        for (int ix = cols - 1; ix >= 0; --ix) {
          if (ix > 0) {
            int a = m.varc[j][ix][row];
            emit(ix, a, m.arcs[a].s[0].cell == m.cell_index(j, ix, row) ? 0 : 1);
          } else {
            auto [a, side] = m.circle_arc_at(j, SIDE_L, frac_mod1(y));
            emit(ix, a, side);
          }
        }
      }
    }
    reps.push_back(std::move(path));
  }
  return reps;
}

std::pair<long long, long long> torus_class_of(const Mesh& m, const CurvePath& p) {
  const FlatSurface& X = m.X;
  if (X.cylinders.size() != 1 || X.kind.genus != 1)
    fail("el_bad_query", "winding classes only make sense on one-cylinder tori");
  // Chart transitions on the torus are translations, so the per-face
  // displacement vectors sum to the developed lattice vector
  // p * (0, c) + q * (w, -t).
  double Dx = 0, Dy = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto a = path_entry_point(m, p, i);
    auto b = path_exit_point(m, p, i);
    Dx += b[0] - a[0];
    Dy += b[1] - a[1];
  }
  double c = X.circumference(0), w = X.width(0);
  double t = (X.cylinders[0].twist_frac + static_cast<double>(X.cylinders[0].winding)) * c;
  long long q = std::llround(Dx / w);
  long long pw = std::llround((Dy + static_cast<double>(q) * t) / c);
  if (std::abs(Dx - static_cast<double>(q) * w) > 1e-6 * w ||
      std::abs(Dy + static_cast<double>(q) * t - static_cast<double>(pw) * c) > 1e-6 * c)
    fail("mesh_internal", "path does not develop to a lattice vector");
  return {pw, q};
}

CurvePath torus_rep(const Mesh& m, long long p, long long q) {
  const FlatSurface& X = m.X;
  if (X.cylinders.size() != 1 || X.kind.genus != 1)
    fail("el_bad_query", "winding classes only make sense on one-cylinder tori");
  if (p == 0 && q == 0)
    fail("el_bad_query", "the (0,0) winding class has no essential representative");
  const double c = X.circumference(0), w = X.width(0);
  const double tw = (X.cylinders[0].twist_frac + static_cast<double>(X.cylinders[0].winding)) * c;
  // Target displacement in body coordinates (inverse of torus_class_of).
  const double Dx = static_cast<double>(q) * w;
  const double Dy = static_cast<double>(p) * c - static_cast<double>(q) * tw;
  const double S = std::hypot(Dx, Dy);
  const double ux = Dx / S, uy = Dy / S;

  // Transcendental-ish base offsets keep the straight segment clear of grid
  // vertices for every dyadic-and-thirds grid and small (p, q).
  const double fx = 0.15915494309189535, fy = 0.36787944117144233;
  int f = -1;
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    const MeshCell& cl = m.cells[i];
    if (frac_to_double(cl.x0) <= fx && fx < frac_to_double(cl.x1) &&
        frac_to_double(cl.y0) <= fy && fy < frac_to_double(cl.y1)) {
      f = static_cast<int>(i);
      break;
    }
  }
  if (f < 0) fail("mesh_internal", "torus rep base point not covered by any cell");
  const int f0 = f;
  double px = fx * w, py = fy * c;  // body reals, unwrapped into f's own range
  const double px0 = px, py0 = py;

  CurvePath path;
  double remaining = S;
  for (int guard = 0;; ++guard) {
    if (guard > 100000) fail("mesh_internal", "torus rep walk failed to close");
    const MeshCell& cl = m.cells[f];
    const double bx0 = frac_to_double(cl.x0) * w, bx1 = frac_to_double(cl.x1) * w;
    const double by0 = frac_to_double(cl.y0) * c, by1 = frac_to_double(cl.y1) * c;
    // first wall of the cell box hit by the ray
    double s_exit = remaining;
    int edge = -1;
    auto consider = [&](double plane, double pos, double d, int e) {
      if (std::abs(d) < 1e-15) return;
      double s = (plane - pos) / d;
      if (s > 1e-12 * S && s < s_exit) s_exit = s, edge = e;
    };
    consider(bx0, px, ux, EDGE_L);
    consider(bx1, px, ux, EDGE_R);
    consider(by0, py, uy, EDGE_B);
    consider(by1, py, uy, EDGE_T);
    if (edge == -1 || s_exit >= remaining * (1.0 - 1e-12)) break;  // segment ends here
    const double qx = px + s_exit * ux, qy = py + s_exit * uy;
    const double u = (edge == EDGE_L || edge == EDGE_R) ? qy / c : qx / w;
    // the arc instance covering u on that edge of this face
    int hit = -1;
    double t_par = 0;
    for (const ArcUse& au : m.face_arcs[f]) {
      const MeshArcSide& sd = m.arcs[au.arc].s[au.side];
      if (sd.cell != f || sd.edge != edge) continue;
      const double ulo = std::min(sd.u0, sd.u1), uhi = std::max(sd.u0, sd.u1);
      if (u < ulo - 1e-9 || u > uhi + 1e-9) continue;
      hit = au.arc;
      t_par = m.arcs[au.arc].len * (u - sd.u0) / (sd.u1 - sd.u0);
      if (t_par < 1e-9 * m.arcs[au.arc].len || t_par > (1.0 - 1e-9) * m.arcs[au.arc].len)
        fail("mesh_internal", "torus rep crossing landed on a grid vertex");
      path.push_back({f, au.arc, au.side, t_par});
      break;
    }
    if (hit < 0) fail("mesh_internal", "torus rep exit point missed every arc");
    const int other = 1 - path.back().side;
    f = m.arcs[hit].s[other].cell;
    auto np = m.arc_point(hit, other, t_par);
    px = np[0], py = np[1];
    remaining -= s_exit;
  }
  if (f != f0 || std::hypot(px + remaining * ux - px0, py + remaining * uy - py0) > 1e-6 * (c + w))
    fail("mesh_internal", "torus rep did not close up");
  if (torus_class_of(m, path) != std::make_pair(p, q))
    fail("mesh_internal", "torus rep landed in the wrong winding class");
  return path;
}

}  // namespace elk

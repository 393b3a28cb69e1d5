#include "elk/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "elk/types.hpp"

namespace elk {

// ---------------------------------------------------------------------------
// FrozenCycle

double FrozenCycle::length(const std::vector<double>& rho) const {
  double s = 0;
  for (std::size_t c = 0; c < cell_len.size(); ++c) s += rho[c] * cell_len[c];
  return s;
}

double FrozenCycle::flat_length() const {
  double s = 0;
  for (double v : cell_len) s += v;
  return s;
}

std::vector<double> cell_lengths(const Mesh& m, const CurvePath& path) {
  std::vector<double> out(m.cells.size(), 0.0);
  for (std::size_t i = 0; i < path.size(); ++i) {
    auto a = path_entry_point(m, path, i);
    auto b = path_exit_point(m, path, i);
    out[path[i].face] += std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Crossing-sequence smoothing.
//
// With the sequence fixed, the length is a sum of terms rho_F * |P - Q| where
// each crossing position moves linearly along its (straight) arc, so each
// one-dimensional slide is convex and coordinate descent converges to the
// sequence optimum.  Arc endpoints are genuine candidates (curves that hug an
// interface or turn at a vertex take their minimum on the boundary of the
// slide interval), so endpoints are compared explicitly against the interior
// ternary-search point.

double smooth_cycle(const Mesh& m, CurvePath& path, const std::vector<char>& pinned,
                    const std::vector<double>& rho) {
  const std::size_t L = path.size();
  if (L == 0) return 0;

  auto total = [&] { return path_length(m, path, &rho); };
  double cur = total();
  for (int sweep = 0; sweep < 120; ++sweep) {
    for (std::size_t i = 0; i < L; ++i) {
      if (!pinned.empty() && pinned[i]) continue;
      const std::size_t prev = (i + L - 1) % L, next = (i + 1) % L;
      const auto E = m.arc_point(path[prev].arc, 1 - path[prev].side, path[prev].t);
      const auto F = m.arc_point(path[next].arc, path[next].side, path[next].t);
      const double len = m.arcs[path[i].arc].len;
      const auto A0 = m.arc_point(path[i].arc, path[i].side, 0.0);
      const auto A1 = m.arc_point(path[i].arc, path[i].side, len);
      const auto B0 = m.arc_point(path[i].arc, 1 - path[i].side, 0.0);
      const auto B1 = m.arc_point(path[i].arc, 1 - path[i].side, len);
      const double ra = rho[path[i].face], rb = rho[path[next].face];
      auto phi = [&](double t) {
        const double w1 = len == 0 ? 0.0 : t / len, w0 = 1.0 - w1;
        const double ax = A0[0] * w0 + A1[0] * w1, ay = A0[1] * w0 + A1[1] * w1;
        const double bx = B0[0] * w0 + B1[0] * w1, by = B0[1] * w0 + B1[1] * w1;
        return ra * std::hypot(E[0] - ax, E[1] - ay) + rb * std::hypot(F[0] - bx, F[1] - by);
      };
      double lo = 0, hi = len;
      for (int it = 0; it < 100; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (phi(m1) < phi(m2))
          hi = m2;
        else
          lo = m1;
      }
      double best_t = (lo + hi) / 2, best_v = phi(best_t);
      for (double t : {0.0, len})
        if (phi(t) <= best_v) best_t = t, best_v = phi(t);
      path[i].t = best_t;
    }
    const double nxt = total();
    if (cur - nxt <= 1e-13 * std::max(1.0, cur)) {
      cur = nxt;
      break;
    }
    cur = nxt;
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Base-mesh side tables for the cover graph.
//
// The graph only uses the sliding (steiner) nodes: vertex nodes are excluded,
// since a curve through a vertex is the boundary limit of slides on either
// flanking sequence and smoothing attains that limit exactly.  Each face
// keeps its node entries as (node, chart position); positions are computed
// through the same arc_point calls the mesh used, so matching is bit-exact.

namespace {

using Key2 = std::pair<int, std::pair<double, double>>;

struct Tables {
  struct Entry {
    int node;
    std::array<double, 2> p;
  };
  struct FChord {
    int id;  // global chord id
    int e0, e1;
    double len;
  };
  std::vector<std::vector<Entry>> ent;                      // per face
  std::vector<std::map<Key2, int>> ent_idx;                 // per face
  std::vector<std::vector<std::pair<int, double>>> arc_nodes;  // per arc: (node, t)
  std::vector<std::vector<std::vector<int>>> slot_ent;      // per face, per slot
  std::vector<std::vector<FChord>> fch;                     // per face
  std::vector<std::map<std::pair<int, int>, int>> chord_at;  // per face: entries -> chord
};

Tables build_tables(const Mesh& m) {
  Tables T;
  const int nf = static_cast<int>(m.cells.size());
  T.ent.resize(nf);
  T.ent_idx.resize(nf);
  T.fch.resize(nf);
  T.chord_at.resize(nf);
  T.arc_nodes.resize(m.arcs.size());
  T.slot_ent.resize(nf);

  for (std::size_t nd = 0; nd < m.nodes.size(); ++nd)
    if (!m.nodes[nd].pinned)
      T.arc_nodes[m.nodes[nd].arc].push_back({static_cast<int>(nd), m.nodes[nd].t});
  for (auto& v : T.arc_nodes)
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });

  for (int f = 0; f < nf; ++f) {
    auto intern = [&](int node, const std::array<double, 2>& p) {
      Key2 k{node, {p[0], p[1]}};
      auto it = T.ent_idx[f].find(k);
      if (it != T.ent_idx[f].end()) return it->second;
      int id = static_cast<int>(T.ent[f].size());
      T.ent[f].push_back({node, p});
      T.ent_idx[f].emplace(k, id);
      return id;
    };
    for (int ci : m.face_chords[f]) {
      const MeshChord& ch = m.chords[ci];
      if (m.nodes[ch.n0].pinned || m.nodes[ch.n1].pinned) continue;
      int e0 = intern(ch.n0, ch.p0), e1 = intern(ch.n1, ch.p1);
      T.fch[f].push_back({ci, e0, e1, ch.len});
      T.chord_at[f][{std::min(e0, e1), std::max(e0, e1)}] = ci;
    }
    const auto& slots = m.face_arcs[f];
    T.slot_ent[f].resize(slots.size());
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const ArcUse& au = slots[k];
      for (auto [node, t] : T.arc_nodes[au.arc]) {
        auto p = m.arc_point(au.arc, au.side, t);
        auto it = T.ent_idx[f].find({node, {p[0], p[1]}});
        if (it == T.ent_idx[f].end())
          fail("oracle_internal", "node entry missing from its face");
        T.slot_ent[f][k].push_back(it->second);
      }
    }
  }
  return T;
}

struct DSU {
  std::vector<int> p;
  void init(int n) {
    p.resize(n);
    for (int i = 0; i < n; ++i) p[i] = i;
  }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) p[std::max(a, b)] = std::min(a, b);
  }
};

// Canonical form of a cyclic chord word: lexicographic minimum over all
// rotations of both orientations.  Used to recognize two lifts of the same
// closed curve and to break exact length ties the same way every run.
std::vector<int> canon_word(std::vector<int> w) {
  if (w.empty()) return w;
  auto best = w;
  auto scan = [&](const std::vector<int>& s) {
    const std::size_t n = s.size();
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<int> rot(n);
      for (std::size_t i = 0; i < n; ++i) rot[i] = s[(r + i) % n];
      if (rot < best) best = rot;
    }
  };
  scan(w);
  std::reverse(w.begin(), w.end());
  scan(w);
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// The annular cover

struct ClassOracle::Impl {
  const Mesh& m;
  CurvePath rep;
  std::string nm;
  OracleOptions opt;
  Tables T;

  // cover combinatorics ------------------------------------------------------
  struct CF {
    int base;
    int ring;
    int level;
    int deck = -1, ideck = -1;
    std::vector<int> slot;  // arc-instance id per boundary slot, -1 unglued
  };
  struct CA {
    int base;              // base arc
    std::array<int, 2> f;  // face instance on base side 0 / side 1
  };
  std::vector<CF> faces;
  std::vector<CA> carcs;
  int rings = 0;
  bool graph_dirty = true;

  // lifted chord graph -------------------------------------------------------
  std::vector<int> off;  // handle offset per face instance
  int nhandles = 0;
  DSU dsu;
  std::vector<int> rootof;  // handle -> compact root id
  int nroots = 0;
  struct E {
    int u, v;      // roots
    int e0, e1;    // entry indices within the face
    int chord;     // global chord id
    int finst;     // face instance
    double len;
  };
  std::vector<E> edges;
  std::vector<std::vector<std::pair<int, int>>> adj;  // root -> (root, edge)
  std::vector<int> root_deck, root_lo, root_hi;
  std::vector<char> root_interior;
  std::vector<int> sources;
  bool sources_complete = true;

  // per-call scratch ---------------------------------------------------------
  std::vector<double> w;
  std::vector<double> dist;
  std::vector<int> stamp, pred;
  int cur_stamp = 0;

  Impl(const Mesh& mesh, CurvePath r, std::string name, OracleOptions o)
      : m(mesh), rep(std::move(r)), nm(std::move(name)), opt(o), T(build_tables(mesh)) {}

  int slot_of(int base, int arc, int side) const {
    const auto& slots = m.face_arcs[base];
    for (std::size_t k = 0; k < slots.size(); ++k)
      if (slots[k].arc == arc && slots[k].side == side) return static_cast<int>(k);
    fail("oracle_internal", "face has no slot for the requested arc side");
  }

  int new_face(int base, int ring, int level) {
    CF f;
    f.base = base;
    f.ring = ring;
    f.level = level;
    f.slot.assign(m.face_arcs[base].size(), -1);
    faces.push_back(std::move(f));
    return static_cast<int>(faces.size()) - 1;
  }

  void link(int fa, int ka, int fb, int kb) {
    const ArcUse& au = m.face_arcs[faces[fa].base][ka];
    const ArcUse& bu = m.face_arcs[faces[fb].base][kb];
    if (au.arc != bu.arc || au.side == bu.side || faces[fa].slot[ka] != -1 ||
        faces[fb].slot[kb] != -1)
      fail("oracle_internal", "inconsistent gluing request");
    CA c;
    c.base = au.arc;
    c.f[au.side] = fa;
    c.f[bu.side] = fb;
    carcs.push_back(c);
    faces[fa].slot[ka] = static_cast<int>(carcs.size()) - 1;
    faces[fb].slot[kb] = faces[fa].slot[ka];
  }

  // Fan walk around one endpoint of the unglued slot k of face fid.  Returns
  // the neighbor instance when the vertex link closes through already-glued
  // arcs (exactly verts[v].corners corner steps), -1 when the fan is open.
  // Marked vertices are removed points: their fans never close.
  int walk(int fid, int k, int end) const {
    const ArcUse au0 = m.face_arcs[faces[fid].base][k];
    const int v = end == 0 ? m.arcs[au0.arc].vlo : m.arcs[au0.arc].vhi;
    if (m.verts[v].marked) return -1;
    const int n = m.verts[v].corners;

    int cf = fid, slot = k, e = end;
    for (int count = 1; count <= n; ++count) {
      const int base = faces[cf].base;
      const int deg = static_cast<int>(m.face_arcs[base].size());
      const ArcUse& au = m.face_arcs[base][slot];
      const bool at_start = e == (au.fwd ? 0 : 1);
      slot = at_start ? (slot + deg - 1) % deg : (slot + 1) % deg;
      const ArcUse& nu = m.face_arcs[base][slot];
      e = at_start ? (nu.fwd ? 1 : 0) : (nu.fwd ? 0 : 1);
      if (count == n) {
        if (nu.arc != au0.arc || nu.side != 1 - au0.side || e != end ||
            faces[cf].slot[slot] != -1)
          fail("oracle_internal", "vertex fan closed inconsistently");
        return cf;
      }
      const int aid = faces[cf].slot[slot];
      if (aid < 0) return -1;  // fan open here
      cf = carcs[aid].f[1 - nu.side];
      slot = slot_of(faces[cf].base, nu.arc, 1 - nu.side);
      // e unchanged: same end of the same base arc
    }
    return -1;  // unreachable
  }

  void glue_or_create(int fid, int k, int ring) {
    const ArcUse& au = m.face_arcs[faces[fid].base][k];
    for (int end : {0, 1}) {
      int g = walk(fid, k, end);
      if (g >= 0) {
        link(fid, k, g, slot_of(faces[g].base, au.arc, 1 - au.side));
        return;
      }
    }
    const int nb = m.arcs[au.arc].s[1 - au.side].cell;
    const int g = new_face(nb, ring, faces[fid].level);
    link(fid, k, g, slot_of(nb, au.arc, 1 - au.side));
  }

  void glue_fixpoint() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t fid = 0; fid < faces.size(); ++fid)
        for (std::size_t k = 0; k < faces[fid].slot.size(); ++k) {
          if (faces[fid].slot[k] >= 0) continue;
          const ArcUse& au = m.face_arcs[faces[fid].base][k];
          for (int end : {0, 1}) {
            int g = walk(static_cast<int>(fid), static_cast<int>(k), end);
            if (g >= 0) {
              link(static_cast<int>(fid), static_cast<int>(k), g,
                   slot_of(faces[g].base, au.arc, 1 - au.side));
              changed = true;
              break;
            }
          }
        }
    }
  }

  bool set_deck(int x, int y) {
    if (faces[x].deck == y) return false;
    if (faces[x].deck != -1 || faces[y].ideck != -1)
      fail("oracle_internal", "deck transformation is not a bijection");
    // Levels are the winding coordinate, pinned down by ell(deck f) =
    // ell(f) + 1.  Ring faces start with their creator's level, which can
    // lag the true winding; joining two deck chains shifts the absorbed
    // chain into agreement (x is a chain tail, y a chain head, so the walk
    // covers y's whole orbit).
    const int delta = faces[x].level + 1 - faces[y].level;
    if (delta != 0)
      for (int g = y; g >= 0; g = faces[g].deck) {
        if (g == x) fail("oracle_internal", "deck orbit closed on itself");
        faces[g].level += delta;
      }
    faces[x].deck = y;
    faces[y].ideck = x;
    return true;
  }

  // Deck images spread across gluings: if f maps to g, the neighbor of f
  // across a slot maps to the neighbor of g across the same slot.
  void deck_fixpoint() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const CA& c : carcs) {
        for (int s : {0, 1}) {
          const int f = c.f[s], o = c.f[1 - s];
          const int kf = slot_of(faces[f].base, c.base, s);
          if (faces[f].deck >= 0) {
            const int aid = faces[faces[f].deck].slot[kf];
            if (aid >= 0) {
              const int o2 = carcs[aid].f[1 - s];
              if (faces[o].deck != o2) changed |= set_deck(o, o2);
            }
          }
          if (faces[f].ideck >= 0) {
            const int aid = faces[faces[f].ideck].slot[kf];
            if (aid >= 0) {
              const int o2 = carcs[aid].f[1 - s];
              if (faces[o2].deck != o) changed |= set_deck(o2, o);
            }
          }
        }
      }
    }
  }

  void ensure_strip() {
    if (!faces.empty()) return;
    if (rep.empty()) fail("oracle_internal", "empty representative path");
    const int L = static_cast<int>(rep.size());
    const int K = std::max(1, opt.strip_periods);
    const int P = 2 * K + 1;
    for (int per = 0; per < P; ++per)
      for (int i = 0; i < L; ++i) new_face(rep[i].face, 0, per - K);
    auto id = [&](int per, int i) { return per * L + i; };
    for (int per = 0; per < P; ++per)
      for (int i = 0; i < L; ++i) {
        if (per == P - 1 && i == L - 1) break;
        const CurveStep& st = rep[i];
        const int nb = rep[(i + 1) % L].face;
        if (m.arcs[st.arc].s[1 - st.side].cell != nb)
          fail("oracle_internal", "representative is not a crossing sequence");
        const int fb = i + 1 < L ? id(per, i + 1) : id(per + 1, 0);
        link(id(per, i), slot_of(st.face, st.arc, st.side), fb,
             slot_of(nb, st.arc, 1 - st.side));
      }
    for (int per = 0; per + 1 < P; ++per)
      for (int i = 0; i < L; ++i) set_deck(id(per, i), id(per + 1, i));
    glue_fixpoint();
    deck_fixpoint();
    graph_dirty = true;
  }

  void grow_ring() {
    const std::size_t nf0 = faces.size();
    const int r = rings + 1;
    for (std::size_t fid = 0; fid < nf0; ++fid)
      for (std::size_t k = 0; k < faces[fid].slot.size(); ++k)
        if (faces[fid].slot[k] < 0)
          glue_or_create(static_cast<int>(fid), static_cast<int>(k), r);
    glue_fixpoint();
    deck_fixpoint();
    rings = r;
    graph_dirty = true;
  }

  void build_graph() {
    off.assign(faces.size(), 0);
    nhandles = 0;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      off[f] = nhandles;
      nhandles += static_cast<int>(T.ent[faces[f].base].size());
    }
    dsu.init(nhandles);
    for (const CA& c : carcs) {
      const int f0 = c.f[0], f1 = c.f[1];
      const auto& se0 = T.slot_ent[faces[f0].base][slot_of(faces[f0].base, c.base, 0)];
      const auto& se1 = T.slot_ent[faces[f1].base][slot_of(faces[f1].base, c.base, 1)];
      for (std::size_t j = 0; j < se0.size(); ++j)
        dsu.unite(off[f0] + se0[j], off[f1] + se1[j]);
    }
    rootof.assign(nhandles, -1);
    nroots = 0;
    for (int h = 0; h < nhandles; ++h) {
      const int r = dsu.find(h);
      if (rootof[r] < 0) rootof[r] = nroots++;
      rootof[h] = rootof[r];
    }

    root_lo.assign(nroots, std::numeric_limits<int>::max());
    root_hi.assign(nroots, std::numeric_limits<int>::min());
    root_deck.assign(nroots, -1);
    root_interior.assign(nroots, 1);
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const int ne = static_cast<int>(T.ent[faces[f].base].size());
      const bool glued = fully_glued(static_cast<int>(f));
      for (int e = 0; e < ne; ++e) {
        const int r = rootof[off[f] + e];
        root_lo[r] = std::min(root_lo[r], faces[f].level);
        root_hi[r] = std::max(root_hi[r], faces[f].level);
        if (!glued) root_interior[r] = 0;
        if (faces[f].deck >= 0) {
          const int img = rootof[off[faces[f].deck] + e];
          if (root_deck[r] == -1)
            root_deck[r] = img;
          else if (root_deck[r] != img)
            root_deck[r] = -2;  // ambiguous while the cover is partial: skip
        }
      }
    }

    edges.clear();
    adj.assign(nroots, {});
    for (std::size_t f = 0; f < faces.size(); ++f)
      for (const Tables::FChord& fc : T.fch[faces[f].base]) {
        E e;
        e.u = rootof[off[f] + fc.e0];
        e.v = rootof[off[f] + fc.e1];
        e.e0 = fc.e0;
        e.e1 = fc.e1;
        e.chord = fc.id;
        e.finst = static_cast<int>(f);
        e.len = fc.len;
        if (e.u == e.v) fail("oracle_internal", "degenerate chord in cover graph");
        const int eid = static_cast<int>(edges.size());
        edges.push_back(e);
        adj[e.u].push_back({e.v, eid});
        adj[e.v].push_back({e.u, eid});
      }

    // Any essential cycle winds once per period, so somewhere along it two
    // consecutive faces sit at levels <= 0 and >= 1: it must pass a root
    // straddling that interface.  Searching only from those roots keeps the
    // exact minimum while skipping the (many) deck copies of each cycle.
    sources.clear();
    sources_complete = true;
    for (int r = 0; r < nroots; ++r) {
      if (root_lo[r] > 0 || root_hi[r] < 1) continue;
      if (root_deck[r] >= 0)
        sources.push_back(r);
      else if (root_interior[r])
        sources_complete = false;  // can't certify this round, keep growing
      // boundary roots without a deck image carry no insulated cycle: a
      // competitor through them would touch the cover boundary anyway
    }
    if (sources.empty()) fail("oracle_internal", "cover strip produced no sources");

    dist.assign(nroots, 0);
    stamp.assign(nroots, 0);
    pred.assign(nroots, -1);
    cur_stamp = 0;
    graph_dirty = false;
  }

  double dijkstra(int src, int tgt, double bound) {
    ++cur_stamp;
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> heap;
    dist[src] = 0;
    stamp[src] = cur_stamp;
    pred[src] = -1;
    heap.push({0.0, src});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (stamp[u] != cur_stamp || d > dist[u]) continue;
      if (d > bound) return std::numeric_limits<double>::infinity();
      if (u == tgt) return d;
      for (auto [v, eid] : adj[u]) {
        const double nd = d + w[eid];
        if (stamp[v] != cur_stamp || nd < dist[v]) {
          stamp[v] = cur_stamp;
          dist[v] = nd;
          pred[v] = eid;
          heap.push({nd, v});
        }
      }
    }
    return std::numeric_limits<double>::infinity();
  }

  std::vector<int> extract(int src, int tgt) const {
    std::vector<int> path;
    int v = tgt;
    while (v != src) {
      const int eid = pred[v];
      if (eid < 0) fail("oracle_internal", "broken predecessor chain");
      path.push_back(eid);
      v = edges[eid].u == v ? edges[eid].v : edges[eid].u;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  bool fully_glued(int f) const {
    for (int s : faces[f].slot)
      if (s < 0) return false;
    return true;
  }

  // A face is insulated when it and all its neighbors are fully glued.
  bool insulated(int f) const {
    if (!fully_glued(f)) return false;
    for (int aid : faces[f].slot) {
      const CA& c = carcs[aid];
      if (!fully_glued(c.f[0] == f ? c.f[1] : c.f[0])) return false;
    }
    return true;
  }

  // The accepted shortest path must keep one full ring of glued faces around
  // it; candidates may touch the boundary (they are still genuine curves).
  bool margin_ok(const std::vector<int>& epath) const {
    for (int eid : epath)
      if (!insulated(edges[eid].finst)) return false;
    return true;
  }

  // Turn a root path into base-level crossing data.  Merges chord runs that
  // stay in one face instance (ties can produce collinear bends) and reads
  // each crossing straight off the shared node: a sliding node lies on
  // exactly one base arc, and the two faces flanking that arc are the
  // projected faces of the adjacent segments.
  struct Candidate {
    double graph_len;
    CurvePath steps;
    std::vector<int> key;
  };

  Candidate project(int src, double d, const std::vector<int>& epath) const {
    struct Seg {
      int finst, e_from, e_to, chord;
    };
    std::vector<Seg> segs;
    int cur = src;
    for (int eid : epath) {
      const E& e = edges[eid];
      if (e.u != cur && e.v != cur) fail("oracle_internal", "edge orientation lost");
      const bool fwd = e.u == cur;
      const Seg s{e.finst, fwd ? e.e0 : e.e1, fwd ? e.e1 : e.e0, e.chord};
      cur = fwd ? e.v : e.u;
      if (!segs.empty() && segs.back().finst == s.finst) {
        segs.back().e_to = s.e_to;
        const int base = faces[s.finst].base;
        auto it = T.chord_at[base].find({std::min(segs.back().e_from, segs.back().e_to),
                                         std::max(segs.back().e_from, segs.back().e_to)});
        if (it == T.chord_at[base].end())
          fail("oracle_internal", "merged run has no direct chord");
        segs.back().chord = it->second;
      } else {
        segs.push_back(s);
      }
    }

    // The path may start and end in two cover instances of the same base
    // face: the closed-up cycle then merely grazes its own basepoint.  No
    // arc separates a face from itself, so fold the head chord into the
    // tail chord; the straight replacement is shorter (triangle inequality)
    // and stays in the same free homotopy class.
    Candidate c;
    c.graph_len = d;
    while (segs.size() >= 2 &&
           faces[segs.front().finst].base == faces[segs.back().finst].base) {
      Seg& tail = segs.back();
      tail.e_to = segs.front().e_to;
      if (tail.e_from == tail.e_to) return c;  // spiked tie; dominated, drop it
      const int base = faces[tail.finst].base;
      auto it = T.chord_at[base].find(
          {std::min(tail.e_from, tail.e_to), std::max(tail.e_from, tail.e_to)});
      if (it == T.chord_at[base].end())
        fail("oracle_internal", "merged run has no direct chord");
      tail.chord = it->second;
      segs.erase(segs.begin());
    }
    if (segs.size() < 2)
      fail("oracle_internal", "cycle collapsed into a single face");

    const std::size_t M = segs.size();
    for (std::size_t i = 0; i < M; ++i) {
      const int base = faces[segs[i].finst].base;
      const int node = T.ent[base][segs[i].e_to].node;
      const int arc = m.nodes[node].arc;
      const int next_base = faces[segs[(i + 1) % M].finst].base;
      int side;
      if (m.arcs[arc].s[0].cell == base && m.arcs[arc].s[1].cell == next_base)
        side = 0;
      else if (m.arcs[arc].s[1].cell == base && m.arcs[arc].s[0].cell == next_base)
        side = 1;
      else
        fail("oracle_internal", "crossing does not separate its two faces");
      c.steps.push_back({base, arc, side, m.nodes[node].t});
      c.key.push_back(segs[i].chord);
    }
    c.key = canon_word(c.key);
    return c;
  }

  Result shortest(const std::vector<double>& rho) {
    if (rho.size() != m.cells.size())
      fail("oracle_internal", "metric vector does not match the mesh");
    ensure_strip();

    double best = 0;
    std::vector<std::pair<int, double>> found;  // (source, distance)
    std::vector<int> best_path;
    for (;;) {
      if (graph_dirty) build_graph();
      // Ties between equal-length shortest paths are broken toward the
      // cover's interior: a relative 1e-9 surcharge on edges in faces that
      // are not yet ring-insulated.  It only reorders exact ties -- reported
      // lengths are re-measured from the projected geometry.
      w.resize(edges.size());
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const int f = edges[e].finst;
        const double pen = insulated(f) ? 1.0 : 1.0 + 1e-9;
        w[e] = std::max(rho[faces[f].base], 1e-12) * edges[e].len * pen;
      }

      best = std::numeric_limits<double>::infinity();
      found.clear();
      best_path.clear();
      std::vector<std::vector<int>> paths;
      for (int src : sources) {
        const int tgt = root_deck[src];
        const double bound = std::isinf(best)
                                 ? best
                                 : best * (1 + opt.cut_slack) + 1e-12 * std::max(1.0, best);
        const double d = dijkstra(src, tgt, bound);
        if (std::isinf(d)) continue;
        found.push_back({src, d});
        paths.push_back(extract(src, tgt));
        if (d < best) {
          best = d;
          best_path = paths.back();
        }
      }
      if (std::isinf(best)) fail("oracle_internal", "deck image unreachable");

      if (sources_complete && margin_ok(best_path)) {
        // project and dedup the near-minimal candidates
        std::map<std::vector<int>, Candidate> uniq;
        const double keep = best * (1 + opt.cut_slack) + 1e-12 * std::max(1.0, best);
        for (std::size_t i = 0; i < found.size(); ++i) {
          if (found[i].second > keep) continue;
          Candidate c = project(found[i].first, found[i].second, paths[i]);
          if (c.steps.empty()) continue;
          auto it = uniq.find(c.key);
          if (it == uniq.end()) {
            auto k = c.key;
            uniq.emplace(std::move(k), std::move(c));
          } else if (c.graph_len < it->second.graph_len) {
            it->second = std::move(c);
          }
        }

        if (uniq.empty()) fail("oracle_internal", "every candidate cycle degenerated");
        Result res;
        for (auto& [key, cand] : uniq) {
          FrozenCycle fc;
          fc.steps = std::move(cand.steps);
          fc.pinned.assign(fc.steps.size(), 0);
          if (opt.smooth) smooth_cycle(m, fc.steps, fc.pinned, rho);
          fc.cell_len = cell_lengths(m, fc.steps);
          fc.key = key;
          res.cycles.push_back(std::move(fc));
        }
        std::sort(res.cycles.begin(), res.cycles.end(),
                  [&](const FrozenCycle& a, const FrozenCycle& b) {
                    const double la = a.length(rho), lb = b.length(rho);
                    return std::tie(la, a.key) < std::tie(lb, b.key);
                  });
        res.length = res.cycles.front().length(rho);
        const double keep2 =
            res.length * (1 + opt.cut_slack) + 1e-12 * std::max(1.0, res.length);
        while (res.cycles.size() > static_cast<std::size_t>(std::max(1, opt.max_cuts)) ||
               res.cycles.back().length(rho) > keep2)
          res.cycles.pop_back();
        return res;
      }

      if (rings >= opt.depth_cap)
        fail("oracle_depth", "shortest cycle in class " + nm +
                                 " still touches the cover boundary at depth " +
                                 std::to_string(rings));
      grow_ring();
    }
  }
};

ClassOracle::ClassOracle(const Mesh& m, CurvePath rep, std::string name, OracleOptions opt)
    : impl(std::make_unique<Impl>(m, std::move(rep), std::move(name), opt)) {}
ClassOracle::~ClassOracle() = default;
ClassOracle::ClassOracle(ClassOracle&&) noexcept = default;
ClassOracle& ClassOracle::operator=(ClassOracle&&) noexcept = default;

ClassOracle::Result ClassOracle::shortest(const std::vector<double>& rho) {
  return impl->shortest(rho);
}

const std::string& ClassOracle::name() const { return impl->nm; }
int ClassOracle::rings_built() const { return impl->rings; }

}  // namespace elk

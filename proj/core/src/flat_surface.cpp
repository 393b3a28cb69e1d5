#include "elk/flat_surface.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "surface_internal.hpp"

namespace elk {

Frac CylSide::hi(int i) const {
  int m = interval_count();
  if (i + 1 < m) return cuts[i + 1];
  return cuts[0] + 1;
}

Frac CylSide::length(int i) const { return hi(i) - lo(i); }

int CylSide::interval_at(const Frac& pos) const {
  Frac p = frac_mod1(pos);
  int m = interval_count();
  for (int i = m - 1; i >= 0; --i)
    if (p >= cuts[i]) return i;
  return m - 1;  // below the first cut: the wrapping tail of the last interval
}

double FlatSurface::circumference(int j) const {
  return cylinders[j].c0 * std::exp(-log_time);
}

double FlatSurface::width(int j) const { return cylinders[j].w0 * std::exp(log_time); }

double FlatSurface::area() const {
  double a = 0;
  for (std::size_t j = 0; j < cylinders.size(); ++j)
    a += circumference(static_cast<int>(j)) * width(static_cast<int>(j));
  return a;
}

int FlatSurface::cyl_index(const std::string& core) const {
  for (std::size_t j = 0; j < cylinders.size(); ++j)
    if (cylinders[j].core == core) return static_cast<int>(j);
  return -1;
}

const Gluing& FlatSurface::gluing_of(const IntervalRef& r) const {
  for (const auto& g : gluings)
    if (g.a == r || g.b == r) return g;
  fail("bad_gluing", "interval has no gluing");
}

namespace internal {

GluingLookup::GluingLookup(const FlatSurface& X) {
  slots.resize(X.cylinders.size());
  for (std::size_t j = 0; j < X.cylinders.size(); ++j) {
    slots[j].resize(2);
    for (int s = 0; s < 2; ++s)
      slots[j][s].resize(X.cylinders[j].side[s].interval_count());
  }
  for (const auto& g : X.gluings) {
    auto put = [&](const IntervalRef& from, const IntervalRef& to) {
      Slot& sl = slots.at(from.cyl).at(from.side).at(from.interval);
      if (sl.present) fail("bad_gluing", "interval glued twice");
      sl = {to, g.flip, true};
    };
    put(g.a, g.b);
    put(g.b, g.a);
  }
}

EndRef a_neighbor(const FlatSurface& X, const EndRef& e) {
  int m = X.cylinders[e.cyl].side[e.side].interval_count();
  if (e.hi) return {e.cyl, e.side, (e.interval + 1) % m, false};
  return {e.cyl, e.side, (e.interval - 1 + m) % m, true};
}

EndRef b_neighbor(const GluingLookup& gl, const EndRef& e) {
  const auto& sl = gl.at({e.cyl, e.side, e.interval});
  if (!sl.present) fail("bad_gluing", "interval has no gluing");
  bool hi = sl.flip ? !e.hi : e.hi;
  return {sl.partner.cyl, sl.partner.side, sl.partner.interval, hi};
}

Frac end_position(const FlatSurface& X, const EndRef& e) {
  const CylSide& s = X.cylinders[e.cyl].side[e.side];
  return e.hi ? frac_mod1(s.hi(e.interval)) : s.lo(e.interval);
}

std::string side_name(const FlatSurface& X, int cyl, int side) {
  return X.cylinders[cyl].core + (side == SIDE_L ? ".L" : ".R");
}

}  // namespace internal

using internal::GluingLookup;

std::vector<VertexClass> vertex_classes(const FlatSurface& X) {
  GluingLookup gl(X);
  std::vector<VertexClass> out;
  std::set<std::tuple<int, int, int, bool>> seen;
  auto key = [](const EndRef& e) { return std::make_tuple(e.cyl, e.side, e.interval, e.hi); };

  for (std::size_t j = 0; j < X.cylinders.size(); ++j)
    for (int s = 0; s < 2; ++s) {
      int m = X.cylinders[j].side[s].interval_count();
      for (int i = 0; i < m; ++i)
        for (bool hi : {false, true}) {
          EndRef start{static_cast<int>(j), s, i, hi};
          if (seen.count(key(start))) continue;
          VertexClass vc;
          EndRef cur = start;
          bool use_a = true;
          do {
            vc.ends.push_back(cur);
            seen.insert(key(cur));
            cur = use_a ? internal::a_neighbor(X, cur) : internal::b_neighbor(gl, cur);
            use_a = !use_a;
          } while (!(cur == start));
          // marked iff some marked point sits at one of the class's cuts
          for (const auto& e : vc.ends) {
            Frac pos = internal::end_position(X, e);
            for (const auto& mp : X.marked)
              if (mp.cyl == e.cyl && mp.side == e.side && mp.at == pos) vc.marked = true;
          }
          out.push_back(std::move(vc));
        }
    }
  return out;
}

GaussBonnetLedger gauss_bonnet_ledger(const FlatSurface& X) {
  GaussBonnetLedger led;
  auto classes = vertex_classes(X);
  int intervals = 0;
  for (const auto& c : X.cylinders)
    intervals += c.side[0].interval_count() + c.side[1].interval_count();
  for (const auto& vc : classes) {
    const EndRef& e = vc.ends.front();
    GaussBonnetLedger::Row row;
    row.angle_pi = vc.angle_pi();
    row.ends = static_cast<int>(vc.ends.size());
    row.marked = vc.marked;
    row.at = internal::side_name(X, e.cyl, e.side) + "@" +
             frac_format(internal::end_position(X, e));
    led.rows.push_back(row);
    led.total_excess += row.angle_pi - 2.0;
    if (vc.marked) ++led.punctures;
  }
  std::sort(led.rows.begin(), led.rows.end(), [](const auto& a, const auto& b) {
    if (a.angle_pi != b.angle_pi) return a.angle_pi > b.angle_pi;
    return a.at < b.at;
  });
  int chi = static_cast<int>(classes.size()) - intervals / 2;
  led.genus = (2 - chi) / 2;
  return led;
}

void FlatSurface::validate() const {
  if (cylinders.empty()) fail("empty_surface", "no cylinders");
  for (std::size_t j = 0; j < cylinders.size(); ++j) {
    const Cylinder& c = cylinders[j];
    if (!(c.c0 > 0) || !std::isfinite(c.c0)) fail("bad_cylinder", c.core + ": circumference must be positive");
    if (!(c.w0 > 0) || !std::isfinite(c.w0)) fail("bad_cylinder", c.core + ": width must be positive");
    if (!(c.twist_frac >= 0 && c.twist_frac < 1))
      fail("bad_cylinder", c.core + ": twist outside [0, circumference)");
    for (int s = 0; s < 2; ++s) {
      const auto& cuts = c.side[s].cuts;
      if (cuts.empty()) fail("bad_partition", c.core + ": side without cuts");
      for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (cuts[i] < 0 || cuts[i] >= 1)
          fail("bad_partition", c.core + ": cut outside [0,1)");
        if (i > 0 && !(cuts[i - 1] < cuts[i]))
          fail("bad_partition", c.core + ": cuts not strictly increasing");
      }
    }
    for (std::size_t k = j + 1; k < cylinders.size(); ++k)
      if (cylinders[k].core == c.core) fail("bad_cylinder", "duplicate core name " + c.core);
  }

  // Gluing: fixed-point-free involution covering every interval once, lengths
  // matched, orientation rule (flip exactly when the sides share a letter).
  GluingLookup gl(*this);  // throws on double gluing
  for (std::size_t j = 0; j < cylinders.size(); ++j)
    for (int s = 0; s < 2; ++s)
      for (int i = 0; i < cylinders[j].side[s].interval_count(); ++i)
        if (!gl.at({static_cast<int>(j), s, i}).present)
          fail("bad_gluing", internal::side_name(*this, j, s) + " interval " +
                                 std::to_string(i) + " is unglued");
  for (const auto& g : gluings) {
    if (g.a == g.b) fail("bad_gluing", "interval glued to itself (fold must be split)");
    bool same_letter = g.a.side == g.b.side;
    if (same_letter != g.flip)
      fail("bad_gluing", "orientation rule: flip gluings join like sides, straight "
                         "gluings join L to R (" +
                             internal::side_name(*this, g.a.cyl, g.a.side) + " vs " +
                             internal::side_name(*this, g.b.cyl, g.b.side) + ")");
    double la = frac_to_double(cylinders[g.a.cyl].side[g.a.side].length(g.a.interval)) *
                circumference(g.a.cyl);
    double lb = frac_to_double(cylinders[g.b.cyl].side[g.b.side].length(g.b.interval)) *
                circumference(g.b.cyl);
    if (!close_rel(la, lb, 1e-12))
      fail("length_mismatch", internal::side_name(*this, g.a.cyl, g.a.side) + " interval " +
                                  std::to_string(g.a.interval) + " (" + fmt_real(la) +
                                  ") vs " + internal::side_name(*this, g.b.cyl, g.b.side) +
                                  " interval " + std::to_string(g.b.interval) + " (" +
                                  fmt_real(lb) + ")");
  }

  // Marked points must sit on cuts, no duplicates.
  for (std::size_t i = 0; i < marked.size(); ++i) {
    const MarkedPoint& mp = marked[i];
    if (mp.cyl < 0 || mp.cyl >= static_cast<int>(cylinders.size()))
      fail("bad_marked", "marked point on unknown cylinder");
    const auto& cuts = cylinders[mp.cyl].side[mp.side].cuts;
    if (std::find(cuts.begin(), cuts.end(), mp.at) == cuts.end())
      fail("bad_marked", "marked point not at a cut: " +
                             internal::side_name(*this, mp.cyl, mp.side) + "@" +
                             frac_format(mp.at));
    for (std::size_t k = i + 1; k < marked.size(); ++k)
      if (marked[k].cyl == mp.cyl && marked[k].side == mp.side && marked[k].at == mp.at)
        fail("bad_marked", "duplicate marked point");
  }

  // Connectivity across gluings.
  {
    std::vector<char> vis(cylinders.size(), 0);
    std::queue<int> q;
    q.push(0);
    vis[0] = 1;
    while (!q.empty()) {
      int j = q.front();
      q.pop();
      for (const auto& g : gluings) {
        int other = -1;
        if (g.a.cyl == j) other = g.b.cyl;
        if (g.b.cyl == j) other = g.a.cyl;
        if (other >= 0 && !vis[other]) {
          vis[other] = 1;
          q.push(other);
        }
      }
    }
    for (std::size_t j = 0; j < cylinders.size(); ++j)
      if (!vis[j]) fail("disconnected", "cylinder " + cylinders[j].core + " unreachable");
  }

  // Cone angles and the Euler count.
  auto classes = vertex_classes(*this);
  int intervals = 0;
  for (const auto& c : cylinders)
    intervals += c.side[0].interval_count() + c.side[1].interval_count();
  int poles = 0;
  for (const auto& vc : classes) {
    if (vc.ends.size() == 2 && !vc.marked) {
      const EndRef& e = vc.ends.front();
      fail("bad_cone_angle", "unmarked cone angle pi at " +
                                 internal::side_name(*this, e.cyl, e.side) + "@" +
                                 frac_format(internal::end_position(*this, e)));
    }
    if (vc.marked) {
      if (vc.ends.size() != 2) {
        const EndRef& e = vc.ends.front();
        fail("bad_cone_angle", "marked point with cone angle " +
                                   fmt_real(vc.angle_pi()) + "*pi at " +
                                   internal::side_name(*this, e.cyl, e.side));
      }
      ++poles;
    }
  }
  if (poles != static_cast<int>(marked.size()))
    fail("bad_marked", "marked points share a vertex class");
  if (poles != kind.punctures)
    fail("bad_kind", "surface has " + std::to_string(poles) + " simple poles, kind says " +
                         std::to_string(kind.punctures));
  int chi = static_cast<int>(classes.size()) - intervals / 2;
  if ((2 - chi) % 2 != 0) fail("bad_kind", "odd Euler characteristic");
  int genus = (2 - chi) / 2;
  if (genus != kind.genus)
    fail("bad_kind", "surface has genus " + std::to_string(genus) + ", kind says " +
                         std::to_string(kind.genus));
}

FlatSurface geodesic_flow(const FlatSurface& X, double t) {
  FlatSurface Y = X;
  Y.log_time = X.log_time + t;
  return Y;
}

FlatSurface shear_cylinders(const FlatSurface& X, const std::vector<double>& u) {
  if (u.size() != X.cylinders.size()) fail("bad_shear", "one shear per cylinder");
  FlatSurface Y = X;
  for (std::size_t j = 0; j < u.size(); ++j) {
    Cylinder& c = Y.cylinders[j];
    double tf = c.twist_frac + u[j] * Y.modulus(static_cast<int>(j));
    double k = std::floor(tf);
    c.twist_frac = tf - k;
    c.winding += static_cast<long long>(k);
    if (c.twist_frac >= 1.0) {  // floor rounding at an integer boundary
      c.twist_frac -= 1.0;
      c.winding += 1;
    }
  }
  return Y;
}

FlatSurface vertical_shear(const FlatSurface& X, double s) {
  return shear_cylinders(X, std::vector<double>(X.cylinders.size(), s));
}

FlatSurface dehn_twists(const FlatSurface& X, const std::vector<long long>& k) {
  if (k.size() != X.cylinders.size()) fail("bad_shear", "one twist count per cylinder");
  FlatSurface Y = X;
  for (std::size_t j = 0; j < k.size(); ++j) Y.cylinders[j].winding += k[j];
  return Y;
}

double qc_distortion_piecewise_shear(const FlatSurface& X, const std::vector<double>& u) {
  if (u.size() != X.cylinders.size()) fail("bad_shear", "one shear per cylinder");
  double best = 0;
  for (double uj : u) {
    double a = std::fabs(uj);
    double K = (2 + a * a + a * std::sqrt(a * a + 4)) / 2;
    best = std::max(best, 0.5 * std::log(K));
  }
  return best;
}

}  // namespace elk

// Horizontal band decomposition.  All tracing happens in exact rational
// arithmetic on absolute heights (arclength along the boundary circles), so
// the transverse-measure ledger sum thickness*crossings = circumference is
// checked exactly before anything is rounded.

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "elk/flat_surface.hpp"
#include "foliation_internal.hpp"
#include "surface_internal.hpp"

namespace elk {
namespace internal {

namespace {

Frac snap(double x, const char* what) {
  try {
    return frac_from_double(x, 1e-9, 1LL << 30);
  } catch (const Error&) {
    fail("band_irrational", std::string(what) + " is not rational: " + fmt_real(x));
  }
}

}  // namespace

FoliationCtx::FoliationCtx(const FlatSurface& X_) : X(X_), gl(X_) {
  // Only ratios need to be rational (area normalization scales every
  // circumference by the same, often irrational, factor).
  for (const auto& c : X.cylinders) {
    C.push_back(snap(c.c0 / X.cylinders[0].c0, "circumference ratio"));
    tw.push_back(c.twist_frac == 0.0 ? Frac(0) : snap(c.twist_frac, "twist"));
  }
}

double FoliationCtx::unit() const {
  return X.cylinders[0].c0 * std::exp(-X.log_time);
}

Frac FoliationCtx::frame_of(int cyl, int side, const Frac& h) const {
  Frac z = h / C[cyl];
  return side == SIDE_R ? frac_mod1(z - tw[cyl]) : frac_mod1(z);
}

Frac FoliationCtx::height_of(int cyl, int side, const Frac& p) const {
  Frac body = side == SIDE_R ? frac_mod1(p + tw[cyl]) : frac_mod1(p);
  return body * C[cyl];
}

TraceState trace_step(const FoliationCtx& cx, const TraceState& st) {
  int s = st.dir > 0 ? SIDE_R : SIDE_L;
  const CylSide& side = cx.X.cylinders[st.cyl].side[s];
  Frac p = cx.frame_of(st.cyl, s, st.h);
  int i = side.interval_at(p);
  Frac d = frac_mod1(p - side.lo(i));  // offset into the interval, this frame

  const auto& slot = cx.gl.at({st.cyl, s, i});
  const IntervalRef& pr = slot.partner;
  const CylSide& pside = cx.X.cylinders[pr.cyl].side[pr.side];
  Frac dp = d * (cx.C[st.cyl] / cx.C[pr.cyl]);  // same arclength, partner frame
  Frac off = slot.flip ? pside.length(pr.interval) - dp : dp;
  Frac pp = frac_mod1(pside.lo(pr.interval) + off);
  return {pr.cyl, cx.height_of(pr.cyl, pr.side, pp), pr.side == SIDE_L ? +1 : -1};
}

std::vector<std::set<Frac>> critical_heights(const FoliationCtx& cx) {
  const FlatSurface& X = cx.X;
  int n = static_cast<int>(X.cylinders.size());

  // Critical heights: every cut of either side (as a body height), closed
  // under the continuation maps in both directions.  Images of heights that
  // are themselves cuts of the exit side are cuts on the partner side, hence
  // already present; only interior heights need propagating.
  std::vector<std::set<Frac>> crit(n);
  std::deque<std::pair<int, Frac>> work;
  auto add = [&](int j, const Frac& h) {
    if (crit[j].insert(h).second) work.emplace_back(j, h);
  };
  for (int j = 0; j < n; ++j) {
    for (const Frac& z : X.cylinders[j].side[SIDE_L].cuts) add(j, z * cx.C[j]);
    for (const Frac& z : X.cylinders[j].side[SIDE_R].cuts)
      add(j, frac_mod1(z + cx.tw[j]) * cx.C[j]);
  }
  std::size_t steps = 0;
  while (!work.empty()) {
    if (++steps > 200000) fail("band_overflow", "horizontal foliation did not close up");
    auto [j, h] = work.front();
    work.pop_front();
    for (int dir : {+1, -1}) {
      int s = dir > 0 ? SIDE_R : SIDE_L;
      const CylSide& side = X.cylinders[j].side[s];
      Frac p = cx.frame_of(j, s, h);
      if (std::find(side.cuts.begin(), side.cuts.end(), p) != side.cuts.end())
        continue;  // endpoint maps to a partner cut, already critical
      TraceState img = trace_step(cx, {j, h, dir});
      add(img.cyl, img.h);
    }
  }
  return crit;
}

}  // namespace internal

std::vector<HorizontalBand> horizontal_bands(const FlatSurface& X) {
  internal::FoliationCtx cx(X);
  int n = static_cast<int>(X.cylinders.size());

  std::vector<std::set<Frac>> crit = internal::critical_heights(cx);

  // Gaps between consecutive criticals, cyclically.
  std::vector<std::vector<Frac>> H(n);
  for (int j = 0; j < n; ++j) H[j].assign(crit[j].begin(), crit[j].end());
  auto gap_index = [&](int j, const Frac& h) {
    const auto& v = H[j];
    auto it = std::upper_bound(v.begin(), v.end(), h);
    return static_cast<int>(it - v.begin()) - 1;  // h interior, so >= 0
  };
  auto gap_len = [&](int j, int g) {
    const auto& v = H[j];
    if (g + 1 < static_cast<int>(v.size())) return v[g + 1] - v[g];
    return cx.C[j] - v[g] + v[0];
  };

  std::set<std::tuple<int, int, int>> visited;  // (cyl, gap, dir)
  std::vector<HorizontalBand> bands;
  for (int j = 0; j < n; ++j) {
    for (int g = 0; g < static_cast<int>(H[j].size()); ++g) {
      if (visited.count({j, g, +1}) || visited.count({j, g, -1})) continue;
      Frac mid = H[j][g] + gap_len(j, g) / 2;
      HorizontalBand band;
      band.crossings.assign(n, 0);
      Frac thick = gap_len(j, g);
      internal::TraceState start{j, mid, +1};
      internal::TraceState cur = start;
      do {
        int cg = gap_index(cur.cyl, cur.h);
        // A band and its time-reversal are the same annulus; mark both so it
        // is traced once.
        visited.insert({cur.cyl, cg, cur.dir});
        visited.insert({cur.cyl, cg, -cur.dir});
        if (gap_len(cur.cyl, cg) != thick)
          fail("band_internal", "unequal gap widths along one band");
        band.segments.push_back({cur.cyl, cur.h / cx.C[cur.cyl], cur.dir});
        band.crossings[cur.cyl] += 1;
        cur = internal::trace_step(cx, cur);
        if (band.segments.size() > 200000)
          fail("band_overflow", "band trace did not close up");
      } while (!(cur == start));
      band.thickness = frac_to_double(thick) * cx.unit();
      bands.push_back(std::move(band));
    }
  }

  // Exact ledger: sum over bands of thickness * crossings recovers each
  // circumference.
  for (int j = 0; j < n; ++j) {
    Frac total(0);
    for (std::size_t b = 0; b < bands.size(); ++b) {
      // recover the exact thickness from any segment of the band
      const auto& s0 = bands[b].segments.front();
      Frac t = gap_len(s0.cyl, gap_index(s0.cyl, s0.height * cx.C[s0.cyl]));
      total += t * bands[b].crossings[j];
    }
    if (total != cx.C[j])
      fail("band_internal", "transverse measure mismatch on " + X.cylinders[j].core);
  }
  return bands;
}

}  // namespace elk

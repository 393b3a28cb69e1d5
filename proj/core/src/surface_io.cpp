#include "elk/surface_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace elk {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& what) { fail("io_bad_surface", what); }

std::string side_string(const FlatSurface& X, int cyl, int side) {
  return X.cylinders[cyl].core + (side == SIDE_L ? ".L" : ".R");
}

std::pair<int, int> parse_side(const FlatSurface& X, const std::string& s) {
  auto dot = s.rfind('.');
  if (dot == std::string::npos) bad("side reference '" + s + "' missing .L/.R");
  std::string core = s.substr(0, dot), letter = s.substr(dot + 1);
  int cyl = X.cyl_index(core);
  if (cyl < 0) bad("side reference '" + s + "' names unknown cylinder");
  if (letter == "L") return {cyl, SIDE_L};
  if (letter == "R") return {cyl, SIDE_R};
  bad("side reference '" + s + "' must end in .L or .R");
}

// Accept both exact fractions ("3/4") and decimal strings.
double real_field(const ordered_json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing field '") + key + "'");
  if (!j[key].is_string()) bad(std::string("field '") + key + "' must be a decimal string");
  return frac_to_double(frac_parse(j[key].get<std::string>()));
}

}  // namespace

FlatSurface read_flat_surface(std::istream& in) {
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    fail("io_bad_json", e.what());
  }

  FlatSurface X;
  if (!j.contains("kind") || !j.contains("cylinders") || !j.contains("gluing"))
    bad("need kind, cylinders, gluing");
  X.kind.genus = j["kind"].value("genus", 0);
  X.kind.punctures = j["kind"].value("punctures", 0);
  X.basepoint_tag = j.value("tag", std::string());

  for (const auto& cj : j["cylinders"]) {
    Cylinder c;
    c.core = cj.value("core", std::string());
    if (c.core.empty()) bad("cylinder without a core name");
    c.c0 = real_field(cj, "circumference");
    c.w0 = real_field(cj, "width");
    if (cj.contains("twist_frac"))
      c.twist_frac = real_field(cj, "twist_frac");
    else if (cj.contains("twist") && c.c0 > 0)
      c.twist_frac = real_field(cj, "twist") / c.c0;
    c.winding = cj.value("winding", 0LL);
    auto read_cuts = [&](const char* key, int side) {
      if (!cj.contains(key)) bad(std::string("cylinder missing ") + key);
      for (const auto& s : cj[key]) {
        if (!s.is_string()) bad("cuts must be fraction strings");
        c.side[side].cuts.push_back(frac_parse(s.get<std::string>()));
      }
      std::sort(c.side[side].cuts.begin(), c.side[side].cuts.end());
    };
    read_cuts("cuts_left", SIDE_L);
    read_cuts("cuts_right", SIDE_R);
    X.cylinders.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < X.cylinders.size(); ++i)
    for (std::size_t k = i + 1; k < X.cylinders.size(); ++k)
      if (X.cylinders[i].core == X.cylinders[k].core)
        bad("duplicate core name '" + X.cylinders[i].core + "'");

  // First pass: collect entries, spotting fold sugar (an interval glued to
  // itself with a flip).  folds[{cyl,side}] = sorted pre-split indices.
  struct RawGluing {
    IntervalRef a, b;
    bool flip;
  };
  std::vector<RawGluing> raw;
  std::map<std::pair<int, int>, std::vector<int>> folds;
  for (const auto& gj : j["gluing"]) {
    auto [ca, sa] = parse_side(X, gj.value("side_a", std::string()));
    auto [cb, sb] = parse_side(X, gj.value("side_b", std::string()));
    if (!gj.contains("interval_a") || !gj.contains("interval_b"))
      bad("gluing entry missing interval_a/interval_b");
    IntervalRef a{ca, sa, gj["interval_a"].get<int>()};
    IntervalRef b{cb, sb, gj["interval_b"].get<int>()};
    bool flip = gj.value("flip", false);
    if (a == b) {
      if (!flip) bad("an interval glued straight to itself is degenerate");
      folds[{a.cyl, a.side}].push_back(a.interval);
      continue;
    }
    raw.push_back({a, b, flip});
  }

  // Split each folded interval at its midpoint and renumber.  Inserting the
  // midpoint cuts can shift every interval index on the circle (a fold of
  // the last interval wraps its midpoint below 0), so indices are recomputed
  // from cut positions rather than patched by offsets.
  for (auto& [key, idxs] : folds) {
    auto [cyl, side] = key;
    CylSide& cs = X.cylinders[cyl].side[side];
    std::sort(idxs.begin(), idxs.end());
    if (std::adjacent_find(idxs.begin(), idxs.end()) != idxs.end())
      bad("interval folded twice");
    std::vector<Frac> lows, mids;
    for (int f : idxs) {
      if (f < 0 || f >= cs.interval_count()) bad("fold interval out of range");
      lows.push_back(cs.lo(f));
      mids.push_back(frac_mod1(cs.lo(f) + cs.length(f) / 2));
    }
    std::vector<Frac> old_cuts = cs.cuts;
    std::vector<Frac> cuts = cs.cuts;
    cuts.insert(cuts.end(), mids.begin(), mids.end());
    std::sort(cuts.begin(), cuts.end());
    if (std::adjacent_find(cuts.begin(), cuts.end()) != cuts.end())
      bad("fold midpoint collides with an existing cut");
    auto pos = [&](const Frac& p) {
      return static_cast<int>(std::lower_bound(cuts.begin(), cuts.end(), p) -
                              cuts.begin());
    };
    // Pre-split references elsewhere in the file move to wherever their lo
    // cut landed.  Fold halves appended below already use final indices and
    // are exempt because each circle is processed exactly once.
    for (auto& g : raw)
      for (IntervalRef* r : {&g.a, &g.b})
        if (r->cyl == cyl && r->side == side) {
          if (r->interval < 0 || r->interval >= static_cast<int>(old_cuts.size()))
            bad("gluing interval out of range");
          r->interval = pos(old_cuts[r->interval]);
        }
    cs.cuts = cuts;
    for (std::size_t k = 0; k < idxs.size(); ++k) {
      raw.push_back({{cyl, side, pos(lows[k])}, {cyl, side, pos(mids[k])}, true});
      X.marked.push_back({cyl, side, mids[k]});
    }
  }

  for (const auto& g : raw) X.gluings.push_back({g.a, g.b, g.flip});

  if (j.contains("marked"))
    for (const auto& mj : j["marked"]) {
      auto [cyl, side] = parse_side(X, mj.value("side", std::string()));
      if (!mj.contains("at")) bad("marked point missing 'at'");
      X.marked.push_back({cyl, side, frac_parse(mj["at"].get<std::string>())});
    }

  X.validate();
  return X;
}

FlatSurface read_flat_surface_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_open", "cannot open " + path);
  return read_flat_surface(in);
}

std::string write_flat_surface(const FlatSurface& X) {
  ordered_json j;
  j["kind"] = {{"genus", X.kind.genus}, {"punctures", X.kind.punctures}};
  if (!X.basepoint_tag.empty()) j["tag"] = X.basepoint_tag;
  j["cylinders"] = ordered_json::array();
  for (std::size_t i = 0; i < X.cylinders.size(); ++i) {
    const Cylinder& c = X.cylinders[i];
    int ci = static_cast<int>(i);
    ordered_json cj;
    cj["core"] = c.core;
    cj["circumference"] = fmt_real(X.circumference(ci));
    cj["width"] = fmt_real(X.width(ci));
    cj["twist"] = fmt_real(X.twist_len(ci));
    cj["twist_frac"] = fmt_real(c.twist_frac);
    if (c.winding != 0) cj["winding"] = c.winding;
    auto cuts_of = [&](int side) {
      ordered_json a = ordered_json::array();
      for (const Frac& f : c.side[side].cuts) a.push_back(frac_format(f));
      return a;
    };
    cj["cuts_left"] = cuts_of(SIDE_L);
    cj["cuts_right"] = cuts_of(SIDE_R);
    j["cylinders"].push_back(std::move(cj));
  }
  j["gluing"] = ordered_json::array();
  for (const Gluing& g : X.gluings)
    j["gluing"].push_back({{"side_a", side_string(X, g.a.cyl, g.a.side)},
                           {"interval_a", g.a.interval},
                           {"side_b", side_string(X, g.b.cyl, g.b.side)},
                           {"interval_b", g.b.interval},
                           {"flip", g.flip}});
  j["marked"] = ordered_json::array();
  for (const MarkedPoint& m : X.marked)
    j["marked"].push_back(
        {{"side", side_string(X, m.cyl, m.side)}, {"at", frac_format(m.at)}});
  return j.dump(2) + "\n";
}

void write_flat_surface_file(const FlatSurface& X, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io_open", "cannot open " + path + " for writing");
  out << write_flat_surface(X);
}

}  // namespace elk

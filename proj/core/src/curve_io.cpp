#include "elk/curve_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace elk {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json parse(std::istream& in) {
  try {
    return ordered_json::parse(in);
  } catch (const std::exception& e) {
    fail("io_bad_json", e.what());
  }
}

template <typename T>
void write_file(const T& value, const std::string& path,
                std::string (*writer)(const T&)) {
  std::ofstream out(path);
  if (!out) fail("io_write_failed", "cannot open '" + path + "' for writing");
  out << writer(value);
  if (!out) fail("io_write_failed", "short write to '" + path + "'");
}

}  // namespace

CurveSystem read_curve_system(std::istream& in) {
  ordered_json j = parse(in);
  auto bad = [](const std::string& what) -> void { fail("io_bad_curve_system", what); };
  if (!j.contains("surface") || !j["surface"].is_object()) bad("missing 'surface' object");
  CurveSystem sys;
  sys.surface.genus = j["surface"].value("genus", 0);
  sys.surface.punctures = j["surface"].value("punctures", 0);
  if (!j.contains("curves") || !j["curves"].is_array()) bad("missing 'curves' array");
  for (const auto& name : j["curves"]) {
    if (!name.is_string()) bad("curve names must be strings");
    if (sys.index_of(name.get<std::string>()) >= 0)
      bad("duplicate curve name '" + name.get<std::string>() + "'");
    sys.add_curve(name.get<std::string>());
  }
  if (j.contains("pairing")) {
    const auto& P = j["pairing"];
    if (!P.is_array() || P.size() != sys.curves.size())
      bad("'pairing' must be a square matrix over the curves");
    for (std::size_t a = 0; a < P.size(); ++a) {
      if (!P[a].is_array() || P[a].size() != sys.curves.size())
        bad("'pairing' must be a square matrix over the curves");
      for (std::size_t b = 0; b < P[a].size(); ++b) {
        if (!P[a][b].is_number_integer()) bad("pairing entries must be integers");
        if (a < b) sys.set_pairing(static_cast<int>(a), static_cast<int>(b),
                                   P[a][b].get<long long>());
        else if (P[a][b].get<long long>() != sys.pairing[a][b])
          bad("pairing matrix is not symmetric (or has a nonzero diagonal)");
      }
    }
  }
  sys.validate();
  return sys;
}

std::string write_curve_system(const CurveSystem& sys) {
  ordered_json j;
  j["surface"] = {{"genus", sys.surface.genus}, {"punctures", sys.surface.punctures}};
  j["curves"] = sys.curves;
  ordered_json rows = ordered_json::array();
  for (const auto& row : sys.pairing) rows.push_back(row);
  j["pairing"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::vector<MulticurveEntry> read_multicurve_entries(std::istream& in) {
  ordered_json j = parse(in);
  auto bad = [](const std::string& what) -> void { fail("io_bad_multicurve", what); };
  if (!j.contains("components") || !j["components"].is_array())
    bad("missing 'components' array");
  std::vector<MulticurveEntry> out;
  for (const auto& comp : j["components"]) {
    if (!comp.is_object() || !comp.contains("curve") || !comp["curve"].is_string())
      bad("each component needs a 'curve' name");
    if (!comp.contains("weight") || !comp["weight"].is_string())
      bad("each component needs a 'weight' string");
    MulticurveEntry e;
    e.curve = comp["curve"].get<std::string>();
    e.weight = frac_parse(comp["weight"].get<std::string>());
    if (e.weight < 0) bad("weights must be nonnegative");
    out.push_back(std::move(e));
  }
  return out;
}

WeightedMulticurve bind_multicurve(const std::vector<MulticurveEntry>& entries,
                                   const CurveSystem& sys) {
  WeightedMulticurve F;
  F.system = &sys;
  for (const MulticurveEntry& e : entries) {
    int id = sys.index_of(e.curve);
    if (id < 0) fail("io_bad_multicurve", "unknown curve '" + e.curve + "'");
    F.components.push_back({id, frac_to_double(e.weight), e.weight});
  }
  return F;
}

std::string write_multicurve(const WeightedMulticurve& F) {
  if (!F.system) fail("io_bad_multicurve", "multicurve carries no curve system");
  ordered_json comps = ordered_json::array();
  for (const MulticurveComponent& c : F.components) {
    ordered_json e;
    e["curve"] = F.system->curves.at(c.curve);
    e["weight"] = c.exact ? frac_format(*c.exact) : fmt_real(c.weight);
    comps.push_back(std::move(e));
  }
  ordered_json j;
  j["components"] = std::move(comps);
  return j.dump(2) + "\n";
}

CurveSystem read_curve_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_read_failed", "cannot open '" + path + "'");
  return read_curve_system(in);
}
void write_curve_system_file(const CurveSystem& sys, const std::string& path) {
  write_file(sys, path, &write_curve_system);
}
std::vector<MulticurveEntry> read_multicurve_entries_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_read_failed", "cannot open '" + path + "'");
  return read_multicurve_entries(in);
}
void write_multicurve_file(const WeightedMulticurve& F, const std::string& path) {
  write_file(F, path, &write_multicurve);
}

}  // namespace elk

#pragma once

// JSON serialization for curve systems and weighted multicurves.
//
//   curve_system.json   {"surface": {"genus": 2, "punctures": 0},
//                        "curves": ["aA", "aB"],
//                        "pairing": [[0, 0], [0, 0]]}
//
//   multicurve.json     {"components": [{"curve": "aA", "weight": "1"},
//                                       {"curve": "aB", "weight": "2/3"}]}
//
// Weights are strings, either decimal ("0.25") or exact rationals ("1/4");
// they parse to the exact Frac and the component keeps it.

#include <iosfwd>
#include <string>
#include <vector>

#include "elk/curves.hpp"
#include "elk/rational.hpp"

namespace elk {

CurveSystem read_curve_system(std::istream& in);
CurveSystem read_curve_system_file(const std::string& path);
std::string write_curve_system(const CurveSystem& sys);
void write_curve_system_file(const CurveSystem& sys, const std::string& path);

// A multicurve file names curves; binding them to indices needs a system.
struct MulticurveEntry {
  std::string curve;
  Frac weight;
};
std::vector<MulticurveEntry> read_multicurve_entries(std::istream& in);
std::vector<MulticurveEntry> read_multicurve_entries_file(const std::string& path);

// Exact-name binding; unknown names throw "io_bad_multicurve".  The result
// borrows `sys`, which must outlive it.
WeightedMulticurve bind_multicurve(const std::vector<MulticurveEntry>& entries,
                                   const CurveSystem& sys);

std::string write_multicurve(const WeightedMulticurve& F);
void write_multicurve_file(const WeightedMulticurve& F, const std::string& path);

}  // namespace elk

#pragma once

// Shared base types: error reporting, surface signatures, and the few
// formatting/hashing helpers that every layer (IO, experiments, CLI) needs.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace elk {

// All library errors carry a short machine-readable code ("gluing_mismatch",
// "oracle_depth", ...) plus a human explanation.  The CLI maps codes to exit
// status; tests match on them.
struct Error : std::runtime_error {
  std::string code;
  Error(std::string code_, const std::string& what_)
      : std::runtime_error(code_ + ": " + what_), code(std::move(code_)) {}
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

// Topological type of a finite-type surface.
struct SurfaceKind {
  int genus = 0;
  int punctures = 0;

  // Number of curves in a pants decomposition.
  int complexity() const { return 3 * genus + punctures - 3; }
  bool operator==(const SurfaceKind&) const = default;
};

// Shortest decimal string that parses back to exactly x.
std::string fmt_real(double x);
double parse_real(const std::string& s);

// FNV-1a, used for config hashes in reports (determinism contract).
std::uint64_t fnv64(const void* data, std::size_t n);
std::uint64_t fnv64(const std::string& s);

inline bool close_abs(double a, double b, double tol) { return std::fabs(a - b) <= tol; }
inline bool close_rel(double a, double b, double tol) {
  double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= tol * std::max(scale, 1e-300);
}

}  // namespace elk

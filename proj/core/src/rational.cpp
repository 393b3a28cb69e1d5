#include "elk/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace elk {

namespace {

bool mul_ok(long long a, long long b, long long& out) {
  return !__builtin_mul_overflow(a, b, &out);
}
bool add_ok(long long a, long long b, long long& out) {
  return !__builtin_add_overflow(a, b, &out);
}

// Exact decimal -> rational, or false on overflow / malformed tail.
bool parse_decimal(const std::string& s, Frac& out) {
  long long num = 0, den = 1;
  std::size_t i = 0;
  bool neg = false, any_digit = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
    any_digit = true;
    if (!mul_ok(num, 10, num) || !add_ok(num, s[i] - '0', num)) return false;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
      any_digit = true;
      if (!mul_ok(num, 10, num) || !add_ok(num, s[i] - '0', num)) return false;
      if (!mul_ok(den, 10, den)) return false;
    }
  }
  if (!any_digit) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    if (i == s.size()) return false;
    long long e = 0;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
      e = e * 10 + (s[i] - '0');
      if (e > 30) return false;
    }
    for (long long k = 0; k < e; ++k) {
      if (!mul_ok(eneg ? den : num, 10, eneg ? den : num)) return false;
    }
  }
  if (i != s.size()) return false;
  out = Frac(neg ? -num : num, den);
  return true;
}

}  // namespace

Frac frac_parse(const std::string& s) {
  if (s.empty()) fail("bad_rational", "empty string");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    char* end = nullptr;
    long long n = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + slash) fail("bad_rational", "bad numerator in '" + s + "'");
    long long d = std::strtoll(s.c_str() + slash + 1, &end, 10);
    if (*end != '\0' || d == 0) fail("bad_rational", "bad denominator in '" + s + "'");
    return Frac(n, d);
  }
  Frac f;
  if (parse_decimal(s, f)) return f;
  // Out-of-range decimal: snap the double value instead of rejecting.
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') fail("bad_rational", "not a rational: '" + s + "'");
  return frac_from_double(v);
}

std::string frac_format(const Frac& f) {
  std::string s = std::to_string(f.numerator());
  if (f.denominator() != 1) s += "/" + std::to_string(f.denominator());
  return s;
}

Frac frac_from_double(double x, double rel_tol, long long max_den) {
  if (!std::isfinite(x)) fail("bad_rational", "non-finite value");
  double tol = rel_tol * std::max(1.0, std::fabs(x));
  // Continued-fraction convergents p/q of x.
  long long p0 = 0, q0 = 1;  // (p,q)_{-2}
  long long p1 = 1, q1 = 0;  // (p,q)_{-1}; first step then yields floor(x)/1
  double rem = x;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(rem);
    if (fl > static_cast<double>(std::numeric_limits<long long>::max() / 4) ||
        fl < static_cast<double>(std::numeric_limits<long long>::min() / 4))
      break;
    long long a = static_cast<long long>(fl);
    long long p2, q2, t;
    if (!mul_ok(a, p1, t) || !add_ok(t, p0, p2)) break;
    if (!mul_ok(a, q1, t) || !add_ok(t, q0, q2)) break;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::fabs(approx - x) <= tol) return Frac(p1, q1);
    double frac_part = rem - fl;
    if (frac_part < 1e-18) break;
    rem = 1.0 / frac_part;
  }
  if (q1 > 0 && std::fabs(static_cast<double>(p1) / static_cast<double>(q1) - x) <= tol)
    return Frac(p1, q1);
  fail("bad_rational", "no rational within tolerance for " + fmt_real(x));
}

Frac frac_floor(const Frac& f) {
  long long n = f.numerator(), d = f.denominator();  // d > 0 by boost invariant
  long long q = n / d;
  if (n % d != 0 && n < 0) --q;
  return Frac(q, 1);
}

Frac frac_mod1(const Frac& f) { return f - frac_floor(f); }

}  // namespace elk

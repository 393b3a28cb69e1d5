#include "elk/curves.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace elk {

int CurveSystem::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < curves.size(); ++i)
    if (curves[i] == name) return static_cast<int>(i);
  return -1;
}

int CurveSystem::add_curve(const std::string& name) {
  if (index_of(name) >= 0) fail("duplicate_curve", "curve '" + name + "' already present");
  curves.push_back(name);
  for (auto& row : pairing) row.push_back(0);
  pairing.emplace_back(curves.size(), 0);
  return static_cast<int>(curves.size()) - 1;
}

void CurveSystem::set_pairing(int a, int b, long long v) {
  pairing.at(a).at(b) = v;
  pairing.at(b).at(a) = v;
}

void CurveSystem::validate() const {
  if (pairing.size() != curves.size())
    fail("bad_pairing", "pairing rows != curve count");
  std::set<std::string> seen;
  for (const auto& n : curves) {
    if (n.empty()) fail("bad_curve_name", "empty curve name");
    if (!seen.insert(n).second) fail("duplicate_curve", "curve '" + n + "' repeated");
  }
  for (std::size_t a = 0; a < pairing.size(); ++a) {
    if (pairing[a].size() != curves.size()) fail("bad_pairing", "ragged pairing matrix");
    if (pairing[a][a] != 0)
      fail("bad_pairing", "nonzero self-pairing for '" + curves[a] + "'");
    for (std::size_t b = 0; b < pairing.size(); ++b) {
      if (pairing[a][b] < 0) fail("bad_pairing", "negative pairing entry");
      if (pairing[a][b] != pairing[b][a])
        fail("bad_pairing", "pairing not symmetric at (" + curves[a] + "," + curves[b] + ")");
    }
  }
}

double WeightedMulticurve::weight_of(int curve) const {
  double w = 0;
  for (const auto& c : components)
    if (c.curve == curve) w += c.weight;
  return w;
}

std::vector<double> WeightedMulticurve::pairing_vector() const {
  std::vector<double> v(system->curves.size(), 0.0);
  for (const auto& c : components) {
    const auto& row = system->pairing.at(c.curve);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += c.weight * static_cast<double>(row[j]);
  }
  return v;
}

void WeightedMulticurve::validate() const {
  if (!system) fail("no_system", "multicurve without a curve system");
  for (const auto& c : components) {
    if (c.curve < 0 || c.curve >= static_cast<int>(system->curves.size()))
      fail("bad_curve_index", "component index out of range");
    if (!(c.weight >= 0)) fail("bad_weight", "negative or NaN component weight");
    if (c.exact && std::fabs(frac_to_double(*c.exact) - c.weight) > 1e-12 * std::max(1.0, c.weight))
      fail("bad_weight", "exact weight disagrees with stored double");
  }
  // Disjoint support: distinct component classes must have zero pairing.
  for (std::size_t a = 0; a < components.size(); ++a)
    for (std::size_t b = a + 1; b < components.size(); ++b) {
      int ca = components[a].curve, cb = components[b].curve;
      if (ca != cb && system->pairing[ca][cb] != 0 && components[a].weight > 0 &&
          components[b].weight > 0)
        fail("not_disjoint", "components '" + system->curves[ca] + "' and '" +
                                 system->curves[cb] + "' intersect");
    }
}

void PantsDecomposition::validate() const {
  if (!system) fail("no_system", "pants decomposition without a curve system");
  int want = system->surface.complexity();
  if (static_cast<int>(curves.size()) != want)
    fail("bad_pants_count", "expected " + std::to_string(want) + " curves, got " +
                                std::to_string(curves.size()));
  as_multicurve().validate();
}

WeightedMulticurve PantsDecomposition::as_multicurve() const {
  WeightedMulticurve m;
  m.system = system;
  for (int c : curves) m.components.push_back({c, 1.0, Frac(1)});
  return m;
}

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

std::vector<double> normalized(const std::vector<double>& v) {
  double m = inf_norm(v);
  std::vector<double> out(v.size(), 0.0);
  if (m > 0)
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / m;
  return out;
}

double inf_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

StrongConvergenceReport check_strong_convergence(const LabeledSequence& seq,
                                                 const WeightedMulticurve& limit,
                                                 double tol) {
  StrongConvergenceReport rep;
  if (!seq.system || seq.terms.empty()) {
    rep.detail = "empty sequence";
    return rep;
  }
  const CurveSystem& sys = *seq.system;
  std::size_t n_curves = sys.curves.size();
  std::size_t N = seq.terms.size();
  std::size_t tail = (2 * N) / 3;  // final third (at least the last term)
  if (tail >= N) tail = N - 1;

  std::vector<double> vlim = limit.pairing_vector();
  double scale = std::max(1.0, inf_norm(vlim));

  // (1) weak convergence over the tail.
  rep.weak = true;
  for (std::size_t n = tail; n < N; ++n) {
    std::vector<double> v(n_curves, 0.0);
    for (const auto& c : seq.terms[n]) {
      const auto& row = sys.pairing.at(c.curve);
      for (std::size_t j = 0; j < n_curves; ++j) v[j] += c.weight * static_cast<double>(row[j]);
    }
    if (inf_dist(v, vlim) > tol * scale) {
      rep.weak = false;
      rep.detail = "weak convergence fails at term " + std::to_string(n);
      break;
    }
  }

  // (2) per-label behaviour over the tail.
  std::set<int> labels;
  for (std::size_t n = tail; n < N; ++n)
    for (const auto& c : seq.terms[n]) labels.insert(c.label);

  rep.labels = true;
  for (int lab : labels) {
    std::vector<std::vector<double>> dirs;
    double max_mass = 0;
    for (std::size_t n = tail; n < N; ++n) {
      std::vector<double> u(n_curves, 0.0);
      for (const auto& c : seq.terms[n]) {
        if (c.label != lab) continue;
        const auto& row = sys.pairing.at(c.curve);
        for (std::size_t j = 0; j < n_curves; ++j)
          u[j] += c.weight * static_cast<double>(row[j]);
      }
      double m = inf_norm(u);
      max_mass = std::max(max_mass, m);
      if (m > tol * scale) dirs.push_back(normalized(u));
    }
    if (max_mass <= tol * scale) continue;  // label converges to zero
    bool cauchy = true;
    for (std::size_t a = 0; a + 1 < dirs.size() && cauchy; ++a)
      if (inf_dist(dirs[a], dirs.back()) > tol) cauchy = false;
    if (!cauchy) {
      rep.labels = false;
      rep.detail = "label " + std::to_string(lab) + " direction is not Cauchy";
      break;
    }
    // The settled direction must be a single system curve, not a blend.
    bool single = false;
    for (std::size_t c = 0; c < n_curves && !single; ++c) {
      std::vector<double> row(n_curves);
      for (std::size_t j = 0; j < n_curves; ++j)
        row[j] = static_cast<double>(sys.pairing[c][j]);
      if (inf_norm(row) == 0) continue;
      if (inf_dist(normalized(row), dirs.back()) <= tol) single = true;
    }
    if (!single) {
      rep.labels = false;
      rep.detail = "label " + std::to_string(lab) + " does not settle on a single curve";
      break;
    }
  }
  return rep;
}

}  // namespace elk

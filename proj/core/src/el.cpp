#include "elk/el.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <utility>

namespace elk {

double extremal_length_torus_exact(std::complex<double> tau, long long p, long long q,
                                   double weight) {
  if (!(tau.imag() > 0)) fail("el_bad_query", "tau must lie in the upper half plane");
  if (p == 0 && q == 0) {
    if (weight != 0) fail("el_bad_query", "the (0,0) class carries no extremal length");
    return 0.0;
  }
  std::complex<double> z = std::complex<double>(static_cast<double>(p), 0.0) +
                           static_cast<double>(q) * tau;
  return weight * weight * std::norm(z) / tau.imag();
}

namespace {

// ---------------------------------------------------------------------------
// Dual QP: minimize R(nu) = sum_c (sum_C nu_C L_{C,c})^2 / a_c over the
// product of scaled simplices { nu >= 0, sum_{C in class j} nu_C = f_j }.
// Primal active-set method: Newton steps on the current support via the KKT
// system, clipped at the boundary, with a Frank-Wolfe fallback; the
// Frank-Wolfe linearization also provides the optimality certificate
// (fwgap >= R - R*).
// ---------------------------------------------------------------------------

struct Pool {
  std::vector<FrozenCycle> cyc;
  std::vector<std::vector<double>> srow;  // cell_len / sqrt(area), per cycle
  std::vector<double> nu;                 // dual mass
  std::vector<char> act;                  // current working support
  std::map<std::vector<int>, int> seen;   // canonical key -> index

  // true if the cycle was new
  bool add(FrozenCycle c, const std::vector<double>& area) {
    auto [it, fresh] = seen.try_emplace(c.key, static_cast<int>(cyc.size()));
    (void)it;
    if (!fresh) return false;
    std::vector<double> s(c.cell_len.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = c.cell_len[i] / std::sqrt(area[i]);
    srow.push_back(std::move(s));
    cyc.push_back(std::move(c));
    nu.push_back(0.0);
    act.push_back(0);
    return true;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

class DualQP {
 public:
  DualQP(std::vector<Pool>& pools, const std::vector<double>& f, const std::vector<double>& area)
      : P(pools), f_(f), a_(area) {}

  void solve(double tol_rel) {
    ensure_feasible();
    refresh();
    for (int outer = 0; outer < 200; ++outer) {
      newton_descend();
      compute_grad();
      if (fwgap <= tol_rel * std::max(R, 1e-300)) return;
      if (!grow_support()) {
        // certificate short of target but no direction improves: take a
        // safeguarded Frank-Wolfe step and retry, else accept what we have
        // (the caller's own certificate stays honest regardless)
        if (!fw_step()) return;
      }
    }
  }

  double R = 0;
  double fwgap = 0;
  std::vector<double> sigma;  // sum nu_C L_C per cell

 private:
  std::vector<Pool>& P;
  const std::vector<double>& f_;
  const std::vector<double>& a_;
  std::vector<double> soa;                       // sigma / a
  std::vector<std::vector<double>> grad;         // per class, per cycle
  std::vector<double> mu;                        // per class: support derivative level

  void ensure_feasible() {
    for (std::size_t j = 0; j < P.size(); ++j) {
      double s = std::accumulate(P[j].nu.begin(), P[j].nu.end(), 0.0);
      if (s <= 0) {
        std::fill(P[j].nu.begin(), P[j].nu.end(), 0.0);
        P[j].nu[0] = f_[j];  // pools are ordered shortest-first
      } else {
        double k = f_[j] / s;
        for (double& v : P[j].nu) v *= k;
      }
      for (std::size_t i = 0; i < P[j].nu.size(); ++i) P[j].act[i] = P[j].nu[i] > 0;
    }
  }

  void refresh() {
    sigma.assign(a_.size(), 0.0);
    for (const Pool& p : P)
      for (std::size_t i = 0; i < p.cyc.size(); ++i) {
        if (p.nu[i] == 0) continue;
        const std::vector<double>& L = p.cyc[i].cell_len;
        for (std::size_t c = 0; c < L.size(); ++c) sigma[c] += p.nu[i] * L[c];
      }
    soa.resize(a_.size());
    for (std::size_t c = 0; c < a_.size(); ++c) soa[c] = sigma[c] / a_[c];
    R = dot(sigma, soa);
  }

  void compute_grad() {
    grad.assign(P.size(), {});
    mu.assign(P.size(), 0.0);
    fwgap = 0;
    for (std::size_t j = 0; j < P.size(); ++j) {
      grad[j].resize(P[j].cyc.size());
      double gmin = std::numeric_limits<double>::infinity();
      double gact = std::numeric_limits<double>::infinity();
      double have = 0;
      for (std::size_t i = 0; i < P[j].cyc.size(); ++i) {
        double g = 2.0 * dot(P[j].cyc[i].cell_len, soa);
        grad[j][i] = g;
        gmin = std::min(gmin, g);
        if (P[j].act[i]) gact = std::min(gact, g);
        have += P[j].nu[i] * g;
      }
      mu[j] = gact;
      fwgap += have - f_[j] * gmin;
    }
    fwgap = std::max(fwgap, 0.0);
  }

  // Minimize over the affine hull of the current support, walking to the
  // boundary and shrinking the support when a mass would go negative.
  void newton_descend() {
    for (int pass = 0; pass < 256; ++pass) {
      std::vector<std::pair<int, int>> S;  // (class, index)
      for (std::size_t j = 0; j < P.size(); ++j)
        for (std::size_t i = 0; i < P[j].cyc.size(); ++i)
          if (P[j].act[i]) S.emplace_back(static_cast<int>(j), static_cast<int>(i));
      const int n = static_cast<int>(S.size());
      const int J = static_cast<int>(P.size());
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + J, n + J);
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
          double h = 2.0 * dot(P[S[a].first].srow[S[a].second], P[S[b].first].srow[S[b].second]);
          K(a, b) = h;
          K(b, a) = h;
        }
      for (int a = 0; a < n; ++a) {
        K(n + S[a].first, a) = 1.0;
        K(a, n + S[a].first) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + J);
      for (int j = 0; j < J; ++j) rhs(n + j) = f_[j];
      Eigen::VectorXd x = K.fullPivLu().solve(rhs);
      if (!x.allFinite()) return;  // singular support; fall back to FW outside

      // step from nu toward x, clipped at the first mass to hit zero
      double t = 1.0;
      int block_a = -1;
      for (int a = 0; a < n; ++a) {
        double cur = P[S[a].first].nu[S[a].second], nxt = x(a);
        if (nxt < -1e-15 * f_[S[a].first] && nxt < cur) {
          double ta = cur / (cur - nxt);
          if (ta < t) t = ta, block_a = a;
        }
      }
      for (int a = 0; a < n; ++a) {
        double cur = P[S[a].first].nu[S[a].second];
        double v = cur + t * (x(a) - cur);
        P[S[a].first].nu[S[a].second] = std::max(v, 0.0);
      }
      if (block_a >= 0) {
        P[S[block_a].first].nu[S[block_a].second] = 0.0;
        P[S[block_a].first].act[S[block_a].second] = 0;
        continue;  // re-solve on the smaller support
      }
      refresh();
      return;
    }
    refresh();
  }

  bool grow_support() {
    bool grew = false;
    for (std::size_t j = 0; j < P.size(); ++j) {
      int best = -1;
      double gbest = mu[j] - 1e-12 * std::max(std::abs(mu[j]), R);
      for (std::size_t i = 0; i < P[j].cyc.size(); ++i) {
        if (P[j].act[i]) continue;
        if (grad[j][i] < gbest) gbest = grad[j][i], best = static_cast<int>(i);
      }
      if (best >= 0) P[j].act[best] = 1, grew = true;
      // retire zero-mass entries that no longer help
      for (std::size_t i = 0; i < P[j].cyc.size(); ++i)
        if (P[j].act[i] && P[j].nu[i] == 0 && grad[j][i] > mu[j] && static_cast<int>(i) != best)
          P[j].act[i] = 0;
    }
    return grew;
  }

  // Exact line search from nu toward the per-class best vertex.
  bool fw_step() {
    std::vector<std::vector<double>> d(P.size());
    std::vector<double> Md(a_.size(), 0.0);
    double gd = 0;
    for (std::size_t j = 0; j < P.size(); ++j) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < P[j].cyc.size(); ++i)
        if (grad[j][i] < grad[j][best]) best = i;
      d[j].assign(P[j].cyc.size(), 0.0);
      for (std::size_t i = 0; i < P[j].cyc.size(); ++i) d[j][i] = -P[j].nu[i];
      d[j][best] += f_[j];
      for (std::size_t i = 0; i < P[j].cyc.size(); ++i) {
        if (d[j][i] == 0) continue;
        gd += grad[j][i] * d[j][i];
        const std::vector<double>& L = P[j].cyc[i].cell_len;
        for (std::size_t c = 0; c < L.size(); ++c) Md[c] += d[j][i] * L[c];
      }
    }
    double dHd = 0;
    for (std::size_t c = 0; c < a_.size(); ++c) dHd += 2.0 * Md[c] * Md[c] / a_[c];
    if (gd >= 0 || dHd <= 0) return false;
    double t = std::min(1.0, -gd / dHd);
    if (t <= 0) return false;
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t i = 0; i < P[j].cyc.size(); ++i) {
        P[j].nu[i] = std::max(P[j].nu[i] + t * d[j][i], 0.0);
        if (P[j].nu[i] > 0) P[j].act[i] = 1;
      }
    refresh();
    return true;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

struct ELEngine::Impl {
  Mesh m;
  OracleOptions oopt;
  CurveSystem sys;
  std::vector<CurvePath> reps;
  std::vector<std::unique_ptr<ClassOracle>> oracles;
  std::vector<double> area;
  std::vector<int> core_cyl;        // class -> cylinder index, -1 off cores
  std::vector<int> hband_class;     // class ids in band order
  std::vector<double> hband_thick;
  bool torus = false;

  ClassOracle& oracle(int k) {
    if (!oracles[k])
      oracles[k] = std::make_unique<ClassOracle>(m, reps[k], sys.curves[k], oopt);
    return *oracles[k];
  }

  // body-coordinate displacement of a closed path; on a one-cylinder torus
  // its Euclidean norm is the flat geodesic length of the class
  std::array<double, 2> displacement(const CurvePath& rep) const {
    double Dx = 0, Dy = 0;
    for (std::size_t i = 0; i < rep.size(); ++i) {
      auto a = path_entry_point(m, rep, i);
      auto b = path_exit_point(m, rep, i);
      Dx += b[0] - a[0];
      Dy += b[1] - a[1];
    }
    return {Dx, Dy};
  }

  int resolve(const std::string& name) const {
    int id = sys.index_of(name);
    if (id < 0 && name == "h" && hband_class.size() == 1) id = hband_class[0];
    return id;
  }

  ELResult closed_form(const std::vector<int>& cls, const std::vector<double>& f) const;
  ELResult discrete(const std::vector<int>& cls, const std::vector<double>& f,
                    const ELOptions& opt);
};

ELEngine::ELEngine(const FlatSurface& X, int resolution, OracleOptions oracle,
                   bool midpoint_reference)
    : impl(std::make_unique<Impl>()) {
  MeshOptions mo;
  mo.resolution = resolution;
  mo.midpoint_nodes_only = midpoint_reference;
  impl->m = build_mesh(X, mo);
  impl->oopt = oracle;
  for (const MeshCell& c : impl->m.cells) impl->area.push_back(c.area);

  impl->sys.surface = X.kind;
  for (std::size_t j = 0; j < X.cylinders.size(); ++j) {
    impl->sys.add_curve(X.cylinders[j].core);
    impl->reps.push_back(core_rep(impl->m, static_cast<int>(j)));
    impl->core_cyl.push_back(static_cast<int>(j));
  }
  // Bands exist only when the horizontal data is rational; engines on
  // irrational surfaces simply have no band classes.
  try {
    auto bands = horizontal_bands(impl->m.X);
    auto breps = band_reps(impl->m);
    for (std::size_t b = 0; b < bands.size(); ++b) {
      int id = impl->sys.add_curve("h" + std::to_string(b + 1));
      impl->reps.push_back(std::move(breps[b]));
      impl->core_cyl.push_back(-1);
      impl->hband_class.push_back(id);
      impl->hband_thick.push_back(bands[b].thickness);
      for (std::size_t j = 0; j < X.cylinders.size(); ++j)
        impl->sys.set_pairing(id, static_cast<int>(j), bands[b].crossings[j]);
    }
  } catch (const Error& e) {
    if (e.code != "band_irrational") throw;
  }
  impl->oracles.resize(impl->reps.size());
  impl->torus = X.kind == SurfaceKind{1, 0} && X.cylinders.size() == 1 && X.marked.empty();
}

ELEngine::~ELEngine() = default;
ELEngine::ELEngine(ELEngine&&) noexcept = default;
ELEngine& ELEngine::operator=(ELEngine&&) noexcept = default;

const Mesh& ELEngine::mesh() const { return impl->m; }
const CurveSystem& ELEngine::system() const { return impl->sys; }
int ELEngine::class_of(const std::string& name) const { return impl->resolve(name); }
int ELEngine::band_count() const { return static_cast<int>(impl->hband_class.size()); }
int ELEngine::band_class(int b) const { return impl->hband_class.at(b); }
double ELEngine::band_thickness(int b) const { return impl->hband_thick.at(b); }

int ELEngine::register_class(const std::string& name, CurvePath rep) {
  if (impl->sys.index_of(name) >= 0)
    fail("el_bad_query", "a class named '" + name + "' is already registered");
  if (rep.empty()) fail("el_bad_query", "empty representative for class '" + name + "'");
  if (impl->torus && torus_class_of(impl->m, rep) == std::make_pair(0LL, 0LL))
    fail("puncture_isotopic",
         "representative of '" + name + "' is contractible or encircles a marked point");
  int id = impl->sys.add_curve(name);
  impl->reps.push_back(std::move(rep));
  impl->core_cyl.push_back(-1);
  impl->oracles.emplace_back();
  return id;
}

ELResult ELEngine::Impl::closed_form(const std::vector<int>& cls,
                                     const std::vector<double>& f) const {
  // All components of a multicurve on the torus are parallel; the flat
  // metric is extremal, so EL = (sum_j f_j * geodesic length)^2 / area.
  double len = 0;
  std::array<double, 2> d0{};
  for (std::size_t k = 0; k < cls.size(); ++k) {
    auto d = displacement(reps[cls[k]]);
    double n = std::hypot(d[0], d[1]);
    if (k == 0)
      d0 = d;
    else if (std::abs(d[0] * d0[1] - d[1] * d0[0]) >
             1e-9 * n * std::hypot(d0[0], d0[1]))
      fail("el_bad_query", "multicurve components intersect on the torus");
    len += f[k] * n;
  }
  ELResult out;
  out.resolution = m.opt.resolution;
  out.value = len * len / m.X.area();
  return out;
}

ELResult ELEngine::Impl::discrete(const std::vector<int>& cls, const std::vector<double>& f,
                                  const ELOptions& opt) {
  const std::size_t J = cls.size();
  const std::size_t N = area.size();
  std::vector<Pool> pools(J);
  std::vector<double> rho(N, 1.0);
  std::vector<double> s(J, std::numeric_limits<double>::infinity());
  double R = 0;
  double qp_tol = opt.qp_tol;

  for (int round = 0; round < opt.max_rounds; ++round) {
    std::vector<ClassOracle::Result> found(J);
    for (std::size_t j = 0; j < J; ++j) found[j] = oracle(cls[j]).shortest(rho);

    if (round > 0) {
      double sum_fl = 0;
      for (std::size_t j = 0; j < J; ++j) {
        double lhat = found[j].length;
        for (const FrozenCycle& c : pools[j].cyc) lhat = std::min(lhat, c.length(rho));
        if (!(lhat > 0)) fail("el_internal", "shortest cycle degenerated to zero length");
        sum_fl += f[j] * lhat;
      }
      double gap = std::max(0.0, 1.0 - sum_fl * sum_fl);
      if (gap <= opt.tolerance) {
        ELResult out;
        out.resolution = m.opt.resolution;
        out.value = R;
        out.metric = rho;
        out.gap = gap;
        for (std::size_t j = 0; j < J; ++j)
          for (std::size_t i = 0; i < pools[j].cyc.size(); ++i)
            if (pools[j].nu[i] > 1e-10 * f[j])
              out.active_cycles.push_back({cls[j], pools[j].nu[i],
                                           pools[j].cyc[i].length(rho), pools[j].cyc[i]});
        return out;
      }
    }

    bool added = false;
    for (std::size_t j = 0; j < J; ++j)
      for (FrozenCycle& c : found[j].cycles)
        if (c.length(rho) < s[j] * (1.0 - 1e-12) && pools[j].add(std::move(c), area))
          added = true;
    if (!added && round > 0) {
      // nothing new to cut yet the certificate missed: the slack is in the
      // QP, not the pool — tighten and re-solve
      qp_tol *= 1e-3;
      if (qp_tol < 1e-16) fail("el_internal", "cutting-plane loop stalled");
    }

    DualQP qp(pools, f, area);
    qp.solve(qp_tol);
    R = qp.R;
    if (!(R > 0)) fail("el_internal", "dual QP collapsed to a zero metric");
    for (std::size_t c = 0; c < N; ++c) rho[c] = qp.sigma[c] / (area[c] * R);
    for (std::size_t j = 0; j < J; ++j) {
      s[j] = std::numeric_limits<double>::infinity();
      for (const FrozenCycle& c : pools[j].cyc) s[j] = std::min(s[j], c.length(rho));
    }
  }
  fail("el_internal", "cutting-plane loop exceeded its round cap");
}

ELResult ELEngine::compute(const WeightedMulticurve& F, const ELOptions& opt) {
  if (!F.system) fail("el_bad_query", "multicurve carries no curve system");
  std::map<int, double> wts;  // engine class -> folded weight
  for (const MulticurveComponent& comp : F.components) {
    if (comp.curve < 0 || comp.curve >= static_cast<int>(F.system->curves.size()))
      fail("el_bad_query", "multicurve component references no curve");
    if (comp.weight < 0) fail("el_bad_query", "multicurve weights must be nonnegative");
    if (comp.weight == 0) continue;
    const std::string& nm = F.system->curves[comp.curve];
    int id = impl->resolve(nm);
    if (id < 0) fail("el_bad_query", "no registered curve class named '" + nm + "'");
    wts[id] += comp.weight;
  }
  if (wts.empty()) {
    ELResult out;
    out.resolution = impl->m.opt.resolution;
    out.metric.assign(impl->area.size(), 0.0);
    return out;
  }
  std::vector<int> cls;
  std::vector<double> f;
  for (const auto& [k, v] : wts) cls.push_back(k), f.push_back(v);
  if (impl->torus && !opt.force_discrete) return impl->closed_form(cls, f);
  return impl->discrete(cls, f, opt);
}

ELResult extremal_length(const ELQuery& q) {
  if (!q.surface || !q.multicurve) fail("el_bad_query", "query needs a surface and a multicurve");
  ELEngine eng(*q.surface, q.resolution, q.oracle);
  ELOptions opt;
  opt.tolerance = q.tolerance;
  opt.force_discrete = q.force_discrete;
  return eng.compute(*q.multicurve, opt);
}

// ---------------------------------------------------------------------------
// Product identity check
// ---------------------------------------------------------------------------

MinskyReport minsky_product_check(const FlatSurface& X, const WeightedMulticurve& F,
                                  int resolution, double tolerance, bool force_discrete) {
  ELEngine eng(X, resolution);
  const CurveSystem& sys = eng.system();

  if (!F.system) fail("el_bad_query", "multicurve carries no curve system");
  std::vector<double> f_cyl(X.cylinders.size(), 0.0);
  for (const MulticurveComponent& comp : F.components) {
    if (comp.weight == 0) continue;
    const std::string& nm = F.system->curves.at(comp.curve);
    int cyl = X.cyl_index(nm);
    if (cyl < 0)
      fail("not_on_cores", "component '" + nm + "' is not a cylinder core");
    f_cyl[cyl] += comp.weight;
  }
  // F must be the vertical multicurve of the surface's own Strebel form:
  // positive weight on every core, proportional to the widths.
  double lambda = 0;
  for (std::size_t j = 0; j < f_cyl.size(); ++j) {
    if (f_cyl[j] <= 0)
      fail("not_on_cores", "core '" + X.cylinders[j].core + "' carries no weight");
    double lj = f_cyl[j] / X.width(static_cast<int>(j));
    if (j == 0)
      lambda = lj;
    else if (!close_rel(lj, lambda, 1e-9))
      fail("not_on_cores", "weights are not proportional to the cylinder widths");
  }

  WeightedMulticurve Fv;  // F rebuilt over the engine's system
  Fv.system = &sys;
  for (std::size_t j = 0; j < f_cyl.size(); ++j)
    Fv.components.push_back({static_cast<int>(j), f_cyl[j], std::nullopt});
  WeightedMulticurve Fs;  // horizontal multicurve, weights = band thicknesses
  Fs.system = &sys;
  for (int b = 0; b < eng.band_count(); ++b)
    Fs.components.push_back({eng.band_class(b), eng.band_thickness(b), std::nullopt});
  if (Fs.components.empty()) fail("not_on_cores", "surface has no horizontal bands to read");

  double pairing = 0;
  for (const auto& cv : Fv.components)
    for (const auto& cb : Fs.components)
      pairing += cv.weight * cb.weight *
                 static_cast<double>(sys.pairing[cv.curve][cb.curve]);
  if (!(pairing > 0)) fail("el_internal", "vertical/horizontal pairing vanished");

  ELOptions opt;
  opt.tolerance = tolerance;
  opt.force_discrete = force_discrete;
  MinskyReport rep;
  rep.el = eng.compute(Fv, opt).value;
  rep.el_star = eng.compute(Fs, opt).value;
  rep.pairing = pairing;
  rep.defect = std::abs(rep.el * rep.el_star - pairing * pairing) / (pairing * pairing);
  return rep;
}

// ---------------------------------------------------------------------------
// Exhaustive reference solver
// ---------------------------------------------------------------------------

namespace {

// Canonical form of a cyclic arc word, orientation-free: the
// lexicographically smallest rotation of the word and of its reverse.
std::vector<int> canon_cycle(std::vector<int> w) {
  auto best_rot = [](const std::vector<int>& v) {
    std::size_t n = v.size(), best = 0;
    for (std::size_t s = 1; s < n; ++s)
      for (std::size_t k = 0; k < n; ++k) {
        int a = v[(s + k) % n], b = v[(best + k) % n];
        if (a != b) {
          if (a < b) best = s;
          break;
        }
      }
    std::vector<int> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = v[(best + k) % n];
    return out;
  };
  std::vector<int> fwd = best_rot(w);
  std::reverse(w.begin(), w.end());
  std::vector<int> rev = best_rot(w);
  return std::min(fwd, rev);
}

}  // namespace

ELResult extremal_length_all_cycles(const Mesh& m, const std::vector<TorusClassWeight>& F,
                                    double qp_tol, std::size_t cycle_cap) {
  if (m.X.cylinders.size() != 1 || m.X.kind.genus != 1)
    fail("el_bad_query", "the reference solver handles one-cylinder tori only");
  if (!m.opt.midpoint_nodes_only)
    fail("el_bad_query", "the reference solver expects a midpoint-node mesh");
  if (m.cells.size() > 40)
    fail("el_bad_query", "the reference solver is limited to 40 cells");
  for (const TorusClassWeight& t : F)
    if ((t.p == 0 && t.q == 0) || t.weight <= 0)
      fail("el_bad_query", "reference classes must be essential with positive weight");

  // chords at each node, per face
  const std::size_t A = m.arcs.size();
  std::vector<int> arc_node(A, -1);
  for (std::size_t k = 0; k < m.nodes.size(); ++k) {
    if (arc_node[m.nodes[k].arc] != -1)
      fail("el_bad_query", "mesh has several nodes per arc; rebuild with midpoint nodes");
    arc_node[m.nodes[k].arc] = static_cast<int>(k);
  }

  // Every simple closed curve on the node graph: a cyclic arc sequence with
  // distinct arcs, consecutive arcs joined by a chord of the face between
  // them.  DFS anchored at the smallest arc of the cycle.
  std::vector<std::vector<FrozenCycle>> found(F.size());
  std::set<std::vector<int>> seen;
  std::size_t budget = cycle_cap;

  std::vector<char> used(A, 0);
  std::vector<int> word;
  std::vector<double> flat(m.cells.size(), 1.0);

  auto classify = [&](const CurvePath& path) {
    auto [p, q] = torus_class_of(m, path);
    for (std::size_t t = 0; t < F.size(); ++t)
      if ((p == F[t].p && q == F[t].q) || (p == -F[t].p && q == -F[t].q))
        return static_cast<int>(t);
    return -1;
  };

  // steps from the arc word: between arcs, the shared face is determined by
  // side bookkeeping during the walk, so record (arc, face-entered) pairs
  struct Hop {
    int arc;
    int face;  // face entered after crossing arc
  };
  std::vector<Hop> hops;

  auto emit_cycle = [&]() {
    std::vector<int> key = canon_cycle(word);
    if (!seen.insert(key).second) return;
    CurvePath path;
    for (std::size_t i = 0; i < hops.size(); ++i) {
      const Hop& h = hops[i];
      const MeshArc& arc = m.arcs[h.arc];
      // the side faces the cell being exited: the face of the previous hop
      int prev_face = hops[(i + hops.size() - 1) % hops.size()].face;
      int side = arc.s[0].cell == prev_face ? 0 : 1;
      if (arc.s[side].cell != prev_face)
        fail("el_internal", "reference walk lost track of its face");
      path.push_back({prev_face, h.arc, side, m.nodes[arc_node[h.arc]].t});
    }
    int t = classify(path);
    if (t < 0) return;
    FrozenCycle c;
    c.steps = path;
    c.pinned.assign(path.size(), 1);
    c.cell_len = cell_lengths(m, path);
    c.key = std::move(key);
    found[t].push_back(std::move(c));
  };

  // iterative DFS over (arc, entered-face) states
  struct Frame {
    int arc;
    int face;
    std::size_t next_chord = 0;
  };
  for (std::size_t a0 = 0; a0 < A; ++a0) {
    if (arc_node[a0] < 0) continue;
    // both start orientations are explored; the canonical-word dedup keeps one
    for (int s0 = 0; s0 < 2; ++s0) {
      const int face0 = m.arcs[a0].s[s0].cell;
      std::vector<Frame> stack;
      stack.push_back({static_cast<int>(a0), face0, 0});
      used[a0] = 1;
      word.assign(1, static_cast<int>(a0));
      hops.assign(1, {static_cast<int>(a0), face0});
      while (!stack.empty()) {
        Frame& fr = stack.back();
        const std::vector<int>& chords = m.face_chords[fr.face];
        bool descended = false;
        while (fr.next_chord < chords.size()) {
          if (budget == 0) fail("bruteforce_cap", "cycle enumeration exceeded its cap");
          --budget;
          const MeshChord& ch = m.chords[chords[fr.next_chord++]];
          int from = arc_node[fr.arc];
          int to = -1;
          if (ch.n0 == from) to = ch.n1;
          if (ch.n1 == from) to = ch.n0;
          if (to < 0) continue;
          int barc = m.nodes[to].arc;
          if (barc == static_cast<int>(a0)) {
            // crossing the anchor arc again: the cycle closes iff it lands
            // in the face the walk started from
            const MeshArc& arc = m.arcs[barc];
            int nf = arc.s[0].cell == fr.face ? arc.s[1].cell : arc.s[0].cell;
            if (nf == face0) emit_cycle();
            continue;
          }
          if (used[barc] || barc < static_cast<int>(a0)) continue;
          const MeshArc& arc = m.arcs[barc];
          int nf = arc.s[0].cell == fr.face ? arc.s[1].cell : arc.s[0].cell;
          used[barc] = 1;
          word.push_back(barc);
          hops.push_back({barc, nf});
          stack.push_back({barc, nf, 0});
          descended = true;
          break;
        }
        if (!descended) {
          used[fr.arc] = 0;
          word.pop_back();
          hops.pop_back();
          stack.pop_back();
        }
      }
    }
  }

  std::vector<Pool> pools(F.size());
  std::vector<double> f(F.size());
  std::vector<double> area;
  for (const MeshCell& c : m.cells) area.push_back(c.area);
  for (std::size_t t = 0; t < F.size(); ++t) {
    f[t] = F[t].weight;
    if (found[t].empty())
      fail("el_internal", "no simple cycle realizes a requested class");
    std::sort(found[t].begin(), found[t].end(), [&](const FrozenCycle& x, const FrozenCycle& y) {
      double lx = x.length(flat), ly = y.length(flat);
      return lx != ly ? lx < ly : x.key < y.key;
    });
    for (FrozenCycle& c : found[t]) pools[t].add(std::move(c), area);
  }

  DualQP qp(pools, f, area);
  qp.solve(qp_tol);
  if (!(qp.R > 0)) fail("el_internal", "reference QP collapsed to a zero metric");

  ELResult out;
  out.resolution = m.opt.resolution;
  out.value = qp.R;
  out.gap = qp.fwgap / qp.R;
  out.metric.resize(area.size());
  for (std::size_t c = 0; c < area.size(); ++c) out.metric[c] = qp.sigma[c] / (area[c] * qp.R);
  for (std::size_t t = 0; t < F.size(); ++t)
    for (std::size_t i = 0; i < pools[t].cyc.size(); ++i)
      if (pools[t].nu[i] > 1e-10 * f[t])
        out.active_cycles.push_back({static_cast<int>(t), pools[t].nu[i],
                                     pools[t].cyc[i].length(out.metric), pools[t].cyc[i]});
  return out;
}

}  // namespace elk

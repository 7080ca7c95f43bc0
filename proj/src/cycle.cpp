#include "blender/cycle.hpp"

#include <cmath>
#include <sstream>

#include "blender/search.hpp"

namespace blender {

namespace {

using std::exp;
using boost::multiprecision::exp;

template <class S>
S ipow(const S& x, int k) {
  S r(1);
  for (int i = 0; i < k; ++i) r = r * x;
  return r;
}

template <class T>
T cpow(double base, int k) {
  using std::pow;
  using boost::multiprecision::pow;
  return pow(T(base), k);
}

// Smooth step from 1 at s = 0 to 0 at s = 1, with all derivatives vanishing at both ends.
template <class T>
T smooth_ramp(const T& s) {
  T a = exp(T(-1) / (T(1) - s)), b = exp(T(-1) / s);
  return a / (a + b);
}

template <class T>
T smooth_ramp_derivative(const T& s) {
  T u = T(1) - s;
  T a = exp(T(-1) / u), b = exp(T(-1) / s);
  T da = -a / (u * u), db = b / (s * s);
  T sum = a + b;
  return (da * b - a * db) / (sum * sum);
}

Check make_check(const std::string& name, double margin, const std::string& detail) {
  return {name, margin > 0, margin, detail};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

EigenTuple EigenTuple::reference() { return EigenTuple{}; }

bool EigenTuple::ordered() const {
  return 0 < lambda_t && lambda_t < 1 && 1 < sigma_t && sigma_t < zeta_t && 0 < lambda && lambda < zeta &&
         zeta < 1 && 1 < sigma;
}

template <class S>
S Poly::eval(const Point<S>& d) const {
  S r(0);
  for (const Monomial& t : terms)
    r = r + S(t.coef) * ipow(d[0], t.px) * ipow(d[1], t.py) * ipow(d[2], t.pz);
  return r;
}

bool HigherOrderSpec::zero() const {
  for (int i = 0; i < 3; ++i)
    if (!h_tilde[i].empty() || !h[i].empty()) return false;
  return true;
}

HigherOrderSpec HigherOrderSpec::small_cubic(double s) {
  HigherOrderSpec h;
  h.h_tilde[0].terms = {{s, 3, 0, 0}, {s, 0, 3, 0}, {s, 0, 0, 3}, {s, 1, 1, 1}};
  h.h_tilde[1].terms = {{s, 0, 3, 0}, {-s, 1, 2, 0}, {s, 0, 0, 3}};
  h.h_tilde[2].terms = {{s, 2, 1, 0}, {s, 0, 3, 0}};
  h.h[0].terms = {{s, 3, 0, 0}, {s, 0, 3, 0}, {s, 0, 1, 2}};
  h.h[1].terms = {{s, 2, 0, 0}, {s, 1, 1, 0}, {s, 0, 3, 0}, {s, 0, 0, 3}};
  h.h[2].terms = {{s, 0, 3, 0}, {-s, 1, 0, 2}};
  return h;
}

std::string profile_name(BumpProfile p) { return p == BumpProfile::Smooth ? "smooth" : "quintic"; }

BumpProfile parse_profile(const std::string& s) {
  if (s == "smooth") return BumpProfile::Smooth;
  if (s == "quintic") return BumpProfile::Quintic;
  throw std::invalid_argument("unknown bump profile '" + s + "' (expected smooth or quintic)");
}

bool Diagnostics::ok() const {
  for (const Check& c : checks)
    if (!c.ok) return false;
  return true;
}

const Check* Diagnostics::find(const std::string& name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string Diagnostics::summary() const {
  std::ostringstream os;
  for (const Check& c : checks)
    os << (c.ok ? "PASS " : "FAIL ") << c.name << " margin=" << c.margin << (c.detail.empty() ? "" : " " + c.detail)
       << "\n";
  return os.str();
}

Diagnostics validate_config(const CycleConfig& cfg) {
  Diagnostics d;
  const EigenTuple& e = cfg.eig;
  const TransitionCoeffs& k = cfg.coeffs;

  double order = std::min({e.lambda_t, 1 - e.lambda_t, e.sigma_t - 1, e.zeta_t - e.sigma_t, e.lambda,
                           e.zeta - e.lambda, 1 - e.zeta, e.sigma - 1});
  d.checks.push_back(make_check("eigenvalue ordering", order, "0<lt<1<st<zt, 0<l<z<1<s"));

  if (e.ordered()) {
    RegionCheck r = check_region_P(e);
    d.checks.push_back(make_check("ichi", -r.log_ichi, "product " + fmt(r.ichi())));
    d.checks.push_back(make_check("ni", -r.log_ni, "product " + fmt(r.ni())));
    d.checks.push_back(make_check("san", -r.log_san, "product " + fmt(r.san())));
  }

  auto zero_check = [&](const std::string& name, double v) {
    d.checks.push_back({name, v == 0.0, -std::fabs(v), ""});
  };
  zero_check("beta3=0", k.beta[2]);
  zero_check("gamma2=0", k.gamma[1]);
  zero_check("gamma3=0", k.gamma[2]);
  zero_check("c3=0", k.c[2]);
  d.checks.push_back(make_check("beta2*gamma1!=0", std::fabs(k.beta[1] * k.gamma[0]), ""));
  d.checks.push_back(make_check("b2*b3!=0", std::fabs(k.b[1] * k.b[2]), ""));
  d.checks.push_back(make_check("gamma1*a3>0", k.gamma[0] * k.a[2], ""));

  // Higher-order terms start at degree two; H2 has no y^2, z^2 or y z part.
  bool hot_ok = true;
  std::string hot_detail;
  for (int i = 0; i < 3; ++i)
    for (const auto* poly : {&cfg.hot.h_tilde[i], &cfg.hot.h[i]})
      for (const Monomial& t : poly->terms)
        if (t.degree() < 2 || t.px < 0 || t.py < 0 || t.pz < 0) {
          hot_ok = false;
          hot_detail = "term of degree < 2";
        }
  for (const Monomial& t : cfg.hot.h[1].terms)
    if (t.degree() == 2 && t.px == 0) {
      hot_ok = false;
      hot_detail = "H2 has a pure y/z second-order term";
    }
  d.checks.push_back({"higher-order terms", hot_ok, hot_ok ? 1.0 : -1.0, hot_detail});

  // The rho-neighbourhoods of (1,0,0) in the P-chart and (1,0,1) in the Q-chart
  // must be disjoint from their images under the linear steps.
  double r2 = 2 * cfg.rho;
  double px = (1 - r2) - e.lambda_t * (1 + r2);
  double qx = (1 - r2) - e.lambda * (1 + r2);
  double qz = (1 - r2) - e.zeta * (1 + r2);
  d.checks.push_back(make_check("rho", std::min({cfg.rho, px, std::max(qx, qz)}), "f(U) n U = empty"));
  d.checks.push_back(make_check("N1,N2>=1", std::min(cfg.N1, cfg.N2), ""));
  return d;
}

template <class S>
Point<S> local_step(Chart chart, const CycleConfig& cfg, const Point<S>& p) {
  const EigenTuple& e = cfg.eig;
  if (chart == Chart::P) return {S(e.lambda_t) * p[0], S(e.sigma_t) * p[1], S(e.zeta_t) * p[2]};
  return {S(e.lambda) * p[0], S(e.sigma) * p[1], S(e.zeta) * p[2]};
}

template <class S>
Point<S> transition(Transition which, const CycleConfig& cfg, const Point<S>& p, const Point<BaseOf<S>>& shift,
                    bool check_domain) {
  using B = BaseOf<S>;
  const TransitionCoeffs& k = cfg.coeffs;
  const bool t1 = which == Transition::T1;
  Point<S> d{p[0], p[1] - S(1), t1 ? p[2] : p[2] - S(1)};
  if (check_domain) {
    for (int i = 0; i < 3; ++i) {
      double v = std::fabs(to_double(d[i]));
      if (!(v < cfg.rho)) {
        std::ostringstream os;
        os << "transition domain violated at " << (t1 ? "T1" : "T2") << ": offset " << "xyz"[i] << " = " << v
           << " is not below rho = " << cfg.rho;
        throw DomainError(os.str());
      }
    }
  }
  const auto& hp = t1 ? cfg.hot.h_tilde : cfg.hot.h;
  Point<S> out;
  if (t1) {
    out[0] = S(1) + S(k.alpha[0]) * d[0] + S(k.alpha[1]) * d[1] + S(k.alpha[2]) * d[2];
    out[1] = S(k.beta[0]) * d[0] + S(k.beta[1]) * d[1] + S(k.beta[2]) * d[2];
    out[2] = S(k.gamma[0]) * d[0] + S(k.gamma[1]) * d[1] + S(k.gamma[2]) * d[2];
  } else {
    out[0] = S(1) + S(k.a[0]) * d[0] + S(k.a[1]) * d[1] + S(k.a[2]) * d[2];
    out[1] = S(k.b[0]) * d[0] + S(k.b[1]) * d[1] * d[1] + S(k.b[2]) * d[2] * d[2] + S(k.b[3]) * d[1] * d[2];
    out[2] = S(1) + S(k.c[0]) * d[0] + S(k.c[1]) * d[1] + S(k.c[2]) * d[2];
  }
  for (int i = 0; i < 3; ++i) {
    if (!hp[i].empty()) out[i] = out[i] + hp[i].eval(d);
    out[i] = out[i] + S(B(shift[i]));
  }
  return out;
}

template <class T>
T bump_profile(BumpProfile kind, double inner, double outer, const T& t) {
  using std::fabs;
  using boost::multiprecision::fabs;
  T a = fabs(t);
  if (a <= T(inner)) return T(1);
  if (a >= T(outer)) return T(0);
  T s = (a - T(inner)) / T(outer - inner);
  if (kind == BumpProfile::Quintic) return T(1) - s * s * s * (T(10) - T(15) * s + T(6) * s * s);
  return smooth_ramp(s);
}

template <class T>
T bump_profile_derivative(BumpProfile kind, double inner, double outer, const T& t) {
  using std::fabs;
  using boost::multiprecision::fabs;
  T a = fabs(t);
  if (a <= T(inner) || a >= T(outer)) return T(0);
  T w = T(outer - inner);
  T s = (a - T(inner)) / w;
  T ds = kind == BumpProfile::Quintic ? -T(30) * s * s * (T(1) - s) * (T(1) - s) : smooth_ramp_derivative(s);
  ds = ds / w;
  return t < T(0) ? -ds : ds;
}

double bump_B(const CycleConfig& cfg, const std::array<double, 3>& p) {
  double r = 1.0;
  for (double v : p) r *= bump_profile(cfg.profile, cfg.rho, 2 * cfg.rho, v);
  return r;
}

template <class T>
T bump_Bn(const CycleConfig& cfg, int n, const Point<T>& p) {
  if (n < 1) throw std::invalid_argument("B_n needs n >= 1");
  T zn = cpow<T>(cfg.eig.zeta, n);
  T r = cpow<T>(cfg.eig.lambda, n);
  for (const T& v : p) r = r * bump_profile(cfg.profile, 1.0 / 3.0, 0.5, T(v / zn));
  return r;
}

double bump_Bn_dx(const CycleConfig& cfg, int n, const std::array<double, 3>& p) {
  double zn = std::pow(cfg.eig.zeta, n);
  double scale = std::pow(cfg.eig.lambda / cfg.eig.zeta, n);
  return scale * bump_profile_derivative(cfg.profile, 1.0 / 3.0, 0.5, p[0] / zn) *
         bump_profile(cfg.profile, 1.0 / 3.0, 0.5, p[1] / zn) * bump_profile(cfg.profile, 1.0 / 3.0, 0.5, p[2] / zn);
}

template <class S>
Point<S> theta_n_apply(const CycleConfig& cfg, int n, const Point<S>& p) {
  using B = BaseOf<S>;
  if (n < 1) throw std::invalid_argument("theta_n needs n >= 1");
  B zn = cpow<B>(cfg.eig.zeta, n);
  Point<B> off{value_of(p[0]), value_of(p[1]) - B(1), value_of(p[2])};
  using std::fabs;
  using boost::multiprecision::fabs;
  for (const B& v : off)
    if (!(fabs(v) < zn / 2)) return p;
  Point<S> q = p;
  if constexpr (std::is_same_v<S, B>) {
    q[0] = q[0] + bump_Bn<B>(cfg, n, off);
  } else {
    // Chain rule through the bump for the jet components.
    std::array<B, 3> b, db;
    for (int i = 0; i < 3; ++i) {
      B u = off[i] / zn;
      b[i] = bump_profile(cfg.profile, 1.0 / 3.0, 0.5, u);
      db[i] = bump_profile_derivative(cfg.profile, 1.0 / 3.0, 0.5, u) / zn;
    }
    B ln = cpow<B>(cfg.eig.lambda, n);
    S shift(ln * b[0] * b[1] * b[2]);
    for (int k = 0; k < 3; ++k) {
      B g(0);
      g = g + ln * db[0] * b[1] * b[2] * p[0].d[k];
      g = g + ln * b[0] * db[1] * b[2] * p[1].d[k];
      g = g + ln * b[0] * b[1] * db[2] * p[2].d[k];
      shift.d[k] = g;
    }
    q[0] = q[0] + shift;
  }
  return q;
}

template <class S>
OrbitResult<S> compose_return_orbit(const CycleConfig& cfg, const Shifts<BaseOf<S>>& shifts, int m, int n,
                                    const Point<S>& p, const OrbitOptions& opt) {
  using B = BaseOf<S>;
  if (m < 0 || n < 0) throw std::invalid_argument("negative sojourn time");
  OrbitResult<S> r;
  Point<S> q = p;
  auto record = [&](const char* name) {
    if (opt.trace) r.trace.push_back({name, q});
  };
  record("start");

  auto linear_stage = [&](Chart chart, int steps) {
    if (steps == 0) return;
    if (opt.stepwise || (chart == Chart::Q && opt.theta_n > 0)) {
      for (int i = 0; i < steps; ++i) {
        q = local_step(chart, cfg, q);
        if (chart == Chart::Q && opt.theta_n > 0) q = theta_n_apply(cfg, opt.theta_n, q);
      }
      return;
    }
    const EigenTuple& e = cfg.eig;
    std::array<double, 3> ev = chart == Chart::P ? std::array<double, 3>{e.lambda_t, e.sigma_t, e.zeta_t}
                                                 : std::array<double, 3>{e.lambda, e.sigma, e.zeta};
    for (int i = 0; i < 3; ++i) q[i] = S(cpow<B>(ev[i], steps)) * q[i];
  };

  linear_stage(Chart::Q, n);
  record("Q^n");
  try {
    q = transition(Transition::T1, cfg, q, shifts.nu, opt.check_domains);
  } catch (const DomainError& e) {
    throw DomainError(std::string(e.what()) + " (after " + std::to_string(n) + " Q-chart steps)");
  }
  record("T1");
  linear_stage(Chart::P, m);
  record("P^m");
  try {
    q = transition(Transition::T2, cfg, q, shifts.mu, opt.check_domains);
  } catch (const DomainError& e) {
    throw DomainError(std::string(e.what()) + " (after " + std::to_string(m) + " P-chart steps)");
  }
  if (opt.theta_n > 0) q = theta_n_apply(cfg, opt.theta_n, q);
  record("T2");
  r.point = q;
  return r;
}

nlohmann::json config_to_json(const CycleConfig& cfg) {
  using nlohmann::json;
  auto poly_json = [](const Poly& p) {
    json a = json::array();
    for (const Monomial& t : p.terms) a.push_back({t.coef, t.px, t.py, t.pz});
    return a;
  };
  json hot;
  for (int i = 0; i < 3; ++i) {
    hot["h_tilde"].push_back(poly_json(cfg.hot.h_tilde[i]));
    hot["h"].push_back(poly_json(cfg.hot.h[i]));
  }
  const EigenTuple& e = cfg.eig;
  const TransitionCoeffs& k = cfg.coeffs;
  return json{{"eigenvalues",
               {{"lambda_t", e.lambda_t},
                {"sigma_t", e.sigma_t},
                {"zeta_t", e.zeta_t},
                {"lambda", e.lambda},
                {"zeta", e.zeta},
                {"sigma", e.sigma}}},
              {"coefficients",
               {{"alpha", k.alpha}, {"beta", k.beta}, {"gamma", k.gamma}, {"a", k.a}, {"b", k.b}, {"c", k.c}}},
              {"higher_order", hot},
              {"N1", cfg.N1},
              {"N2", cfg.N2},
              {"rho", cfg.rho},
              {"bump_profile", profile_name(cfg.profile)}};
}

namespace {

template <size_t N>
void read_array(const nlohmann::json& j, const std::string& path, std::array<double, N>& out) {
  if (!j.is_array() || j.size() != N)
    throw std::invalid_argument(path + ": expected an array of " + std::to_string(N) + " numbers");
  for (size_t i = 0; i < N; ++i) {
    if (!j[i].is_number()) throw std::invalid_argument(path + "[" + std::to_string(i) + "]: expected a number");
    out[i] = j[i].get<double>();
  }
}

double read_number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw std::invalid_argument(path + ": expected a number");
  return j.get<double>();
}

Poly read_poly(const nlohmann::json& j, const std::string& path) {
  Poly p;
  if (!j.is_array()) throw std::invalid_argument(path + ": expected an array of [coef, px, py, pz]");
  for (size_t i = 0; i < j.size(); ++i) {
    const auto& t = j[i];
    std::string tp = path + "[" + std::to_string(i) + "]";
    if (!t.is_array() || t.size() != 4) throw std::invalid_argument(tp + ": expected [coef, px, py, pz]");
    for (int q = 1; q < 4; ++q)
      if (!t[q].is_number_integer() || t[q].get<int>() < 0)
        throw std::invalid_argument(tp + ": exponents must be non-negative integers");
    p.terms.push_back({read_number(t[0], tp + "[0]"), t[1].get<int>(), t[2].get<int>(), t[3].get<int>()});
  }
  return p;
}

}  // namespace

namespace {

void reject_unknown(const nlohmann::json& obj, const std::string& prefix, std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool found = false;
    for (const char* k : known) found = found || it.key() == k;
    if (!found) throw std::invalid_argument(prefix + it.key() + ": unknown field");
  }
}

}  // namespace

CycleConfig config_from_json(const nlohmann::json& j) {
  CycleConfig cfg;
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  reject_unknown(j, "", {"eigenvalues", "coefficients", "higher_order", "N1", "N2", "rho", "bump_profile"});
  if (j.contains("eigenvalues")) {
    if (!j["eigenvalues"].is_object()) throw std::invalid_argument("eigenvalues: expected an object");
    reject_unknown(j["eigenvalues"], "eigenvalues.", {"lambda_t", "sigma_t", "zeta_t", "lambda", "zeta", "sigma"});
    const auto& e = j["eigenvalues"];
    auto get = [&](const char* key, double& out) {
      if (e.contains(key)) out = read_number(e[key], std::string("eigenvalues.") + key);
    };
    get("lambda_t", cfg.eig.lambda_t);
    get("sigma_t", cfg.eig.sigma_t);
    get("zeta_t", cfg.eig.zeta_t);
    get("lambda", cfg.eig.lambda);
    get("zeta", cfg.eig.zeta);
    get("sigma", cfg.eig.sigma);
  }
  if (j.contains("coefficients")) {
    const auto& c = j["coefficients"];
    if (!c.is_object()) throw std::invalid_argument("coefficients: expected an object");
    reject_unknown(c, "coefficients.", {"alpha", "beta", "gamma", "a", "b", "c"});
    if (c.contains("alpha")) read_array(c["alpha"], "coefficients.alpha", cfg.coeffs.alpha);
    if (c.contains("beta")) read_array(c["beta"], "coefficients.beta", cfg.coeffs.beta);
    if (c.contains("gamma")) read_array(c["gamma"], "coefficients.gamma", cfg.coeffs.gamma);
    if (c.contains("a")) read_array(c["a"], "coefficients.a", cfg.coeffs.a);
    if (c.contains("b")) read_array(c["b"], "coefficients.b", cfg.coeffs.b);
    if (c.contains("c")) read_array(c["c"], "coefficients.c", cfg.coeffs.c);
  }
  if (j.contains("higher_order")) {
    const auto& h = j["higher_order"];
    if (!h.is_object()) throw std::invalid_argument("higher_order: expected an object");
    reject_unknown(h, "higher_order.", {"h_tilde", "h"});
    for (const char* key : {"h_tilde", "h"}) {
      if (!h.contains(key)) continue;
      const auto& arr = h[key];
      std::string path = std::string("higher_order.") + key;
      if (!arr.is_array() || arr.size() != 3) throw std::invalid_argument(path + ": expected three polynomials");
      for (int i = 0; i < 3; ++i) {
        Poly p = read_poly(arr[i], path + "[" + std::to_string(i) + "]");
        (std::string(key) == "h" ? cfg.hot.h : cfg.hot.h_tilde)[i] = p;
      }
    }
  }
  if (j.contains("N1")) cfg.N1 = int(read_number(j["N1"], "N1"));
  if (j.contains("N2")) cfg.N2 = int(read_number(j["N2"], "N2"));
  if (j.contains("rho")) cfg.rho = read_number(j["rho"], "rho");
  if (j.contains("bump_profile")) {
    if (!j["bump_profile"].is_string()) throw std::invalid_argument("bump_profile: expected a string");
    cfg.profile = parse_profile(j["bump_profile"].get<std::string>());
  }
  return cfg;
}

#define BLENDER_CYCLE_INSTANTIATE(S)                                                                         \
  template S Poly::eval<S>(const Point<S>&) const;                                                           \
  template Point<S> local_step<S>(Chart, const CycleConfig&, const Point<S>&);                              \
  template Point<S> transition<S>(Transition, const CycleConfig&, const Point<S>&, const Point<BaseOf<S>>&, \
                                  bool);                                                                     \
  template Point<S> theta_n_apply<S>(const CycleConfig&, int, const Point<S>&);                              \
  template OrbitResult<S> compose_return_orbit<S>(const CycleConfig&, const Shifts<BaseOf<S>>&, int, int,   \
                                                  const Point<S>&, const OrbitOptions&);

BLENDER_CYCLE_INSTANTIATE(double)
BLENDER_CYCLE_INSTANTIATE(Real)
BLENDER_CYCLE_INSTANTIATE(Jet<Real>)

template double bump_profile<double>(BumpProfile, double, double, const double&);
template Real bump_profile<Real>(BumpProfile, double, double, const Real&);
template double bump_profile_derivative<double>(BumpProfile, double, double, const double&);
template Real bump_profile_derivative<Real>(BumpProfile, double, double, const Real&);
template double bump_Bn<double>(const CycleConfig&, int, const Point<double>&);
template Real bump_Bn<Real>(const CycleConfig&, int, const Point<Real>&);

}  // namespace blender

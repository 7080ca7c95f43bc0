#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>
#include <json.hpp>

namespace blender {

using Real = boost::multiprecision::mpfr_float;

// Sets the default mpfr precision for the lifetime of the scope. Reals built
// inside carry that precision; arithmetic keeps the larger operand precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits) : saved_(Real::default_precision()) { Real::default_precision(bits); }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

// Forward-mode jet: value plus gradient with respect to three inputs.
template <class T>
struct Jet {
  T v;
  std::array<T, 3> d;

  Jet() : v(0), d{T(0), T(0), T(0)} {}
  Jet(const T& c) : v(c), d{T(0), T(0), T(0)} {}
  template <class U, class = std::enable_if_t<std::is_arithmetic_v<U>>>
  Jet(U c) : v(c), d{T(0), T(0), T(0)} {}
  static Jet variable(const T& value, int index) {
    Jet j(value);
    j.d[index] = T(1);
    return j;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v + b.v;
    for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v - b.v;
    for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
  }
  friend Jet operator-(const Jet& a) {
    Jet r;
    r.v = -a.v;
    for (int i = 0; i < 3; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v * b.v;
    for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v / b.v;
    for (int i = 0; i < 3; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
    return r;
  }
  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
};

template <class S>
struct ScalarTraits {
  using base = S;
};
template <class T>
struct ScalarTraits<Jet<T>> {
  using base = T;
};
template <class S>
using BaseOf = typename ScalarTraits<S>::base;

inline double to_double(double x) { return x; }
inline double to_double(const Real& x) { return x.convert_to<double>(); }
template <class T>
double to_double(const Jet<T>& x) {
  return to_double(x.v);
}
inline const double& value_of(const double& x) { return x; }
inline const Real& value_of(const Real& x) { return x; }
template <class T>
const T& value_of(const Jet<T>& x) {
  return x.v;
}

template <class S>
using Point = std::array<S, 3>;

struct EigenTuple {
  // At P: contracting, weakly expanding, strongly expanding.
  double lambda_t = 0.05, sigma_t = 3.0, zeta_t = 9.0;
  // At Q: strongly contracting, weakly contracting, expanding.
  double lambda = 0.1, zeta = 0.15848931924611134, sigma = 1.2;

  static EigenTuple reference();
  // Ordering 0 < lambda_t < 1 < sigma_t < zeta_t and 0 < lambda < zeta < 1 < sigma.
  bool ordered() const;
};

struct TransitionCoeffs {
  // First transition, from near X = (0,1,0) in the Q-chart to near (1,0,0) in the P-chart.
  std::array<double, 3> alpha{0, 1, 1}, beta{0, 1, 0}, gamma{1, 0, 0};
  // Second transition, from near Y = (0,1,1) in the P-chart to near (1,0,1) in the Q-chart.
  std::array<double, 3> a{1, 1, 1};
  std::array<double, 4> b{1, 1, 1, 0};
  std::array<double, 3> c{1, 1, 0};
};

struct Monomial {
  double coef = 0.0;
  int px = 0, py = 0, pz = 0;
  int degree() const { return px + py + pz; }
};

struct Poly {
  std::vector<Monomial> terms;
  bool empty() const { return terms.empty(); }
  template <class S>
  S eval(const Point<S>& d) const;
};

// Higher-order parts of the two transitions, as polynomials in the offsets
// from the base points. h_tilde belongs to the first transition, h to the second.
struct HigherOrderSpec {
  std::array<Poly, 3> h_tilde, h;
  bool zero() const;
  // Small cubic terms that respect the vanishing conditions, for exercising the
  // higher-order bookkeeping. The second component of h also carries x^2 and x y.
  static HigherOrderSpec small_cubic(double scale);
};

enum class BumpProfile { Smooth, Quintic };
std::string profile_name(BumpProfile p);
BumpProfile parse_profile(const std::string& s);

struct CycleConfig {
  EigenTuple eig;
  TransitionCoeffs coeffs;
  HigherOrderSpec hot;
  int N1 = 1, N2 = 1;  // metadata: the transitions are given directly
  double rho = 0.05;
  BumpProfile profile = BumpProfile::Smooth;
};

struct Check {
  std::string name;
  bool ok = false;
  double margin = 0.0;
  std::string detail;
};

struct Diagnostics {
  std::vector<Check> checks;
  bool ok() const;
  const Check* find(const std::string& name) const;
  std::string summary() const;
};

Diagnostics validate_config(const CycleConfig& cfg);

enum class Chart { P, Q };
enum class Transition { T1, T2 };

// One step of the linearised dynamics: componentwise product with the chart's eigenvalues.
template <class S>
Point<S> local_step(Chart chart, const CycleConfig& cfg, const Point<S>& p);

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Taylor form of the transition plus the shift vector. The point must lie
// within rho of the base point (X for T1, Y for T2) in every coordinate,
// where the bump equals one; otherwise DomainError names the stage.
template <class S>
Point<S> transition(Transition which, const CycleConfig& cfg, const Point<S>& p, const Point<BaseOf<S>>& shift,
                    bool check_domain = true);

// Scalar profile with plateau |t| <= inner and support |t| < outer.
template <class T>
T bump_profile(BumpProfile kind, double inner, double outer, const T& t);
template <class T>
T bump_profile_derivative(BumpProfile kind, double inner, double outer, const T& t);

// Bump of the six-parameter family: b(x) b(y) b(z), plateau rho, support 2 rho.
double bump_B(const CycleConfig& cfg, const std::array<double, 3>& p);
// Perturbation bump: lambda^n B(p / zeta^n) with plateau 1/3 and support 1/2.
template <class T>
T bump_Bn(const CycleConfig& cfg, int n, const Point<T>& p);
// d/dx of bump_Bn.
double bump_Bn_dx(const CycleConfig& cfg, int n, const std::array<double, 3>& p);

// Shifts x by B_n(x, y - 1, z) inside |x|, |y - 1|, |z| < zeta^n / 2 (Q-chart
// coordinates); identity elsewhere.
template <class S>
Point<S> theta_n_apply(const CycleConfig& cfg, int n, const Point<S>& p);

template <class T>
struct Shifts {
  Point<T> mu{T(0), T(0), T(0)}, nu{T(0), T(0), T(0)};
};

struct OrbitOptions {
  bool check_domains = true;
  int theta_n = 0;        // perturbation index applied after each Q-chart step; 0 is off
  bool stepwise = false;  // iterate the linear stages one step at a time instead of by powers
  bool trace = true;
};

template <class S>
struct OrbitStage {
  std::string name;
  Point<S> point;
};

template <class S>
struct OrbitResult {
  Point<S> point;
  std::vector<OrbitStage<S>> trace;
};

// n Q-steps, the first transition plus nu, m P-steps, the second transition plus mu.
template <class S>
OrbitResult<S> compose_return_orbit(const CycleConfig& cfg, const Shifts<BaseOf<S>>& shifts, int m, int n,
                                    const Point<S>& p, const OrbitOptions& opt = {});

nlohmann::json config_to_json(const CycleConfig& cfg);
// Throws std::invalid_argument naming the offending field.
CycleConfig config_from_json(const nlohmann::json& j);

}  // namespace blender

#include "blender/renorm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace blender {

namespace {

using boost::multiprecision::pow;

Real rpow(double base, int k) { return pow(Real(base), k); }

template <class S>
Point<S> psi_t(const RenormData& d, const Point<S>& p) {
  return {S(d.sx) * p[0] + S(1), S(d.sy) * p[1] + S(d.y0), S(d.sx) * p[2] + S(1)};
}

template <class S>
Point<S> psi_inverse_t(const RenormData& d, const Point<S>& p) {
  return {(p[0] - S(1)) / S(d.sx), (p[1] - S(d.y0)) / S(d.sy), (p[2] - S(1)) / S(d.sx)};
}

void require_nonzero(double v, const char* name) {
  if (v == 0.0) throw std::invalid_argument(std::string("limit map needs ") + name + " != 0");
}

void check_limit_coeffs(const TransitionCoeffs& k) {
  require_nonzero(k.a[1], "a2");
  require_nonzero(k.a[2], "a3");
  require_nonzero(k.b[1], "b2");
  require_nonzero(k.beta[1], "beta2");
  require_nonzero(k.c[1], "c2");
}

}  // namespace

unsigned default_precision_bits(const CycleConfig& cfg, int m, int n) {
  const EigenTuple& e = cfg.eig;
  double worst = 0.0;
  for (double v : {e.lambda_t, e.sigma_t, e.zeta_t, e.lambda, e.zeta, e.sigma})
    worst = std::max(worst, std::fabs(std::log2(v)));
  return 128u + unsigned(std::ceil((m + n) * worst));
}

unsigned minimum_precision_bits(const CycleConfig& cfg, int m, int n) {
  double scale = 2 * n * std::log2(cfg.eig.sigma) + 2 * m * std::log2(cfg.eig.sigma_t);
  return 64u + unsigned(std::ceil(std::max(0.0, scale)));
}

Point<Real> RenormData::psi(const Point<Real>& p) const { return psi_t(*this, p); }
Point<Real> RenormData::psi_inverse(const Point<Real>& p) const { return psi_inverse_t(*this, p); }

Shifts<Real> RenormData::shifts() const {
  Shifts<Real> s;
  s.mu = mu_vec;
  s.nu = nu_vec;
  return s;
}

RenormData renorm_data(const CycleConfig& cfg, int m, int n, const Real& mu_bar) {
  if (m < 1 || n < 1) throw std::invalid_argument("renormalization needs m, n >= 1");
  unsigned bits = Real::default_precision();
  unsigned need = minimum_precision_bits(cfg, m, n);
  if (bits < need) {
    std::ostringstream os;
    os << "working precision " << bits << " bits is too low for (m, n) = (" << m << ", " << n << "); increase it to at least "
       << need << " bits";
    throw std::range_error(os.str());
  }
  const EigenTuple& e = cfg.eig;
  const TransitionCoeffs& k = cfg.coeffs;
  RenormData d;
  d.m = m;
  d.n = n;
  d.bits = bits;
  Real sn = rpow(e.sigma, -n), stm = rpow(e.sigma_t, -m);
  d.sx = sn * stm;
  d.sy = d.sx * d.sx;
  d.y0 = sn;
  Real ltm = rpow(e.lambda_t, m), ln = rpow(e.lambda, n), zn = rpow(e.zeta, n), ztm = rpow(e.zeta_t, -m);
  d.mu_vec = {-ltm * k.a[0], d.sy * mu_bar + sn - ltm * k.b[0], -ltm * k.c[0]};
  d.nu_vec = {-ln * k.alpha[0] - zn * k.alpha[2], stm - ln * k.beta[0], ztm - ln * k.gamma[0]};
  return d;
}

Point<Real> return_map(const CycleConfig& cfg, int m, int n, double mu_bar, const Point<double>& p_bar, unsigned bits,
                       const OrbitOptions& opt) {
  PrecisionScope scope(bits ? bits : default_precision_bits(cfg, m, n));
  RenormData d = renorm_data(cfg, m, n, Real(mu_bar));
  Point<Real> p{Real(p_bar[0]), Real(p_bar[1]), Real(p_bar[2])};
  OrbitOptions o = opt;
  o.trace = false;
  return d.psi_inverse(compose_return_orbit(cfg, d.shifts(), m, n, d.psi(p), o).point);
}

Point<Jet<Real>> return_map_jet(const CycleConfig& cfg, int m, int n, double mu_bar, const Point<double>& p_bar,
                                unsigned bits) {
  PrecisionScope scope(bits ? bits : default_precision_bits(cfg, m, n));
  RenormData d = renorm_data(cfg, m, n, Real(mu_bar));
  using J = Jet<Real>;
  Point<J> p{J::variable(Real(p_bar[0]), 0), J::variable(Real(p_bar[1]), 1), J::variable(Real(p_bar[2]), 2)};
  OrbitOptions o;
  o.trace = false;
  return psi_inverse_t(d, compose_return_orbit(cfg, d.shifts(), m, n, psi_t(d, p), o).point);
}

Point<Real> return_map_closed_form(const CycleConfig& cfg, int m, int n, const Real& mu_bar, const Point<Real>& p) {
  const EigenTuple& e = cfg.eig;
  const TransitionCoeffs& c = cfg.coeffs;
  Real ln = rpow(e.lambda, n), zn = rpow(e.zeta, n), sn = rpow(e.sigma, n);
  Real ltm = rpow(e.lambda_t, m), stm = rpow(e.sigma_t, m), ztm = rpow(e.zeta_t, m);
  const Real &x = p[0], &y = p[1], &z = p[2];
  const double a1 = c.a[0], a2 = c.a[1], a3 = c.a[2];
  const double b1 = c.b[0], b2 = c.b[1], b3 = c.b[2], b4 = c.b[3];
  const double c1 = c.c[0], c2 = c.c[1], c3 = c.c[2];
  const double al1 = c.alpha[0], al2 = c.alpha[1], al3 = c.alpha[2];
  const double be1 = c.beta[0], be2 = c.beta[1], ga1 = c.gamma[0];

  Point<Real> r;
  r[0] = (ln * ltm * a1 * al1 + ln * stm * a2 * be1 + ln * ztm * a3 * ga1) * x + (ltm / stm * a1 * al2 + a2 * be2) * y +
         ltm * zn * a1 * al3 * z;
  r[1] = mu_bar + ln * ltm * sn * stm * b1 * al1 * x + ltm * sn * b1 * al2 * y + ltm * sn * stm * zn * b1 * al3 * z +
         (ln * ln * stm * stm * be1 * be1 * b2 + ln * ln * ztm * ztm * ga1 * ga1 * b3 + ln * ln * stm * ztm * be1 * ga1 * b4) *
             x * x +
         be2 * be2 * b2 * y * y + (2 * ln * stm * be1 * be2 * b2 + ln * ztm * be2 * ga1 * b4) * x * y;
  // The c3 term vanishes under the standing assumption; kept so the form stays exact otherwise.
  r[2] = (ln * ltm * c1 * al1 + ln * stm * c2 * be1 + ln * ztm * c3 * ga1) * x + (ltm / stm * c1 * al2 + c2 * be2) * y +
         ltm * zn * c1 * al3 * z;
  return r;
}

Kappas kappas(const TransitionCoeffs& k, double xi) {
  check_limit_coeffs(k);
  double r = xi * k.a[1] / k.a[2];
  return {r * r * k.b[2] / k.b[1], r * k.b[3] / k.b[1]};
}

Point<double> limit_map(const TransitionCoeffs& k, double xi, double mu_bar, const Point<double>& p) {
  check_limit_coeffs(k);
  double r = xi / k.a[2], be2 = k.beta[1];
  return {xi * p[0] + k.a[1] * be2 * p[1],
          mu_bar + k.b[2] * r * r * p[0] * p[0] + be2 * be2 * k.b[1] * p[1] * p[1] + r * be2 * k.b[3] * p[0] * p[1],
          k.c[1] * be2 * p[1]};
}

Point<Real> limit_map(const TransitionCoeffs& k, double xi, const Real& mu_bar, const Point<Real>& p) {
  check_limit_coeffs(k);
  Real r = Real(xi) / k.a[2];
  double be2 = k.beta[1];
  return {xi * p[0] + k.a[1] * be2 * p[1],
          mu_bar + k.b[2] * r * r * p[0] * p[0] + be2 * be2 * k.b[1] * p[1] * p[1] + r * be2 * k.b[3] * p[0] * p[1],
          k.c[1] * be2 * p[1]};
}

std::array<Point<double>, 3> limit_jacobian(const TransitionCoeffs& k, double xi, const Point<double>& p) {
  check_limit_coeffs(k);
  double r = xi / k.a[2], be2 = k.beta[1];
  return {Point<double>{xi, k.a[1] * be2, 0.0},
          Point<double>{2 * k.b[2] * r * r * p[0] + r * be2 * k.b[3] * p[1],
                        2 * be2 * be2 * k.b[1] * p[1] + r * be2 * k.b[3] * p[0], 0.0},
          Point<double>{0.0, k.c[1] * be2, 0.0}};
}

Point<double> normal_coordinates(const TransitionCoeffs& k, const Point<double>& p) {
  check_limit_coeffs(k);
  double s = k.beta[1] * k.b[1];
  return {s / k.a[1] * p[0], k.beta[1] * s * p[1], s / k.c[1] * p[2]};
}

double normal_parameter(const TransitionCoeffs& k, double mu_bar) { return k.beta[1] * k.beta[1] * k.b[1] * mu_bar; }

Point<double> normal_form_map(double xi, const Kappas& kp, double mu, const Point<double>& p) {
  return {xi * p[0] + p[1], mu + p[1] * p[1] + kp.kappa1 * p[0] * p[0] + kp.kappa2 * p[0] * p[1], p[1]};
}

ConvergenceReport convergence_report(const CycleConfig& cfg, double xi, const std::vector<NeutralPair>& schedule,
                                     const GridSpec& grid, int order, unsigned bits) {
  if (order < 0 || order > 2) throw std::invalid_argument("derivative order must be 0, 1 or 2");
  if (grid.points_per_axis < 3 || grid.mu_points < 1) throw std::invalid_argument("grid needs >= 3 points per axis");
  ConvergenceReport rep;
  rep.kp = kappas(cfg.coeffs, xi);
  rep.xi = xi;
  rep.order = order;
  const int N = grid.points_per_axis;
  const double h = 2 * grid.radius / (N - 1);
  auto coord = [&](int i) { return -grid.radius + h * i; };
  auto idx = [&](int i, int j, int l) { return (i * N + j) * N + l; };

  for (const NeutralPair& pr : schedule) {
    ConvergenceRow row;
    row.m = pr.m;
    row.n = pr.n;
    row.value = pr.value;
    row.bits = bits ? bits : default_precision_bits(cfg, pr.m, pr.n);
    PrecisionScope scope(row.bits);
    using J = Jet<Real>;
    for (int im = 0; im < grid.mu_points; ++im) {
      double mu = grid.mu_points == 1 ? 0.0 : -grid.radius + 2 * grid.radius * im / (grid.mu_points - 1);
      RenormData d = renorm_data(cfg, pr.m, pr.n, Real(mu));
      Shifts<Real> sh = d.shifts();
      OrbitOptions o;
      o.trace = false;
      // F - G at every grid point, kept for the second differences.
      std::vector<Point<double>> diff(N * N * N);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int l = 0; l < N; ++l) {
            Point<double> pb{coord(i), coord(j), coord(l)};
            Point<Real> g = limit_map(cfg.coeffs, xi, Real(mu), Point<Real>{Real(pb[0]), Real(pb[1]), Real(pb[2])});
            Point<double>& dd = diff[idx(i, j, l)];
            if (order >= 1) {
              Point<J> p{J::variable(Real(pb[0]), 0), J::variable(Real(pb[1]), 1), J::variable(Real(pb[2]), 2)};
              Point<J> f = psi_inverse_t(d, compose_return_orbit(cfg, sh, pr.m, pr.n, psi_t(d, p), o).point);
              auto gj = limit_jacobian(cfg.coeffs, xi, pb);
              for (int c = 0; c < 3; ++c) {
                dd[c] = to_double(Real(f[c].v - g[c]));
                for (int v = 0; v < 3; ++v)
                  row.d1 = std::max(row.d1, std::fabs(to_double(Real(f[c].d[v] - gj[c][v]))));
              }
            } else {
              Point<Real> p{Real(pb[0]), Real(pb[1]), Real(pb[2])};
              Point<Real> f = d.psi_inverse(compose_return_orbit(cfg, sh, pr.m, pr.n, d.psi(p), o).point);
              for (int c = 0; c < 3; ++c) dd[c] = to_double(Real(f[c] - g[c]));
            }
            for (int c = 0; c < 3; ++c) row.d0 = std::max(row.d0, std::fabs(dd[c]));
          }
      if (order < 2) continue;
      // The limit map is quadratic, so its own second differences are exact and
      // the second differences of F - G compare the two directly.
      for (int i = 1; i + 1 < N; ++i)
        for (int j = 1; j + 1 < N; ++j)
          for (int l = 1; l + 1 < N; ++l) {
            auto D = [&](int di, int dj, int dl) -> const Point<double>& { return diff[idx(i + di, j + dj, l + dl)]; };
            for (int a = 0; a < 3; ++a) {
              int ea[3] = {0, 0, 0};
              ea[a] = 1;
              for (int c = 0; c < 3; ++c) {
                double s = D(ea[0], ea[1], ea[2])[c] - 2 * D(0, 0, 0)[c] + D(-ea[0], -ea[1], -ea[2])[c];
                row.d2 = std::max(row.d2, std::fabs(s) / (h * h));
              }
              for (int b = a + 1; b < 3; ++b) {
                int eb[3] = {0, 0, 0};
                eb[b] = 1;
                for (int c = 0; c < 3; ++c) {
                  double s = D(ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2])[c] -
                             D(ea[0] - eb[0], ea[1] - eb[1], ea[2] - eb[2])[c] -
                             D(-ea[0] + eb[0], -ea[1] + eb[1], -ea[2] + eb[2])[c] +
                             D(-ea[0] - eb[0], -ea[1] - eb[1], -ea[2] - eb[2])[c];
                  row.d2 = std::max(row.d2, std::fabs(s) / (4 * h * h));
                }
              }
            }
          }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

Kappas fit_kappas(const CycleConfig& cfg, int m, int n, int points, double radius, unsigned bits) {
  if (points < 3) throw std::invalid_argument("fit needs at least 3 points per axis");
  check_limit_coeffs(cfg.coeffs);
  PrecisionScope scope(bits ? bits : default_precision_bits(cfg, m, n));
  RenormData d = renorm_data(cfg, m, n, Real(0));
  OrbitOptions o;
  o.trace = false;
  Eigen::MatrixXd A(points * points, 6);
  Eigen::VectorXd rhs(points * points);
  int row = 0;
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j) {
      double x = -radius + 2 * radius * i / (points - 1), y = -radius + 2 * radius * j / (points - 1);
      Point<Real> p{Real(x), Real(y), Real(0)};
      Point<Real> f = d.psi_inverse(compose_return_orbit(cfg, d.shifts(), m, n, d.psi(p), o).point);
      A.row(row) << 1, x, y, x * x, y * y, x * y;
      rhs(row) = to_double(f[1]);
      ++row;
    }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
  const TransitionCoeffs& k = cfg.coeffs;
  return {c(3) * k.a[1] * k.a[1] / k.b[1], c(5) * k.a[1] / (k.beta[1] * k.b[1])};
}

std::string convergence_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "m,n,d0,d1,d2,bits\n";
  for (const ConvergenceRow& w : r.rows)
    os << w.m << "," << w.n << "," << w.d0 << "," << w.d1 << "," << w.d2 << "," << w.bits << "\n";
  return os.str();
}

}  // namespace blender

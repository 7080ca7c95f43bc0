#include "blender/henon.hpp"

#include <cmath>
#include <stdexcept>

namespace blender {

void validate(const HenonParams& p) {
  for (double v : {p.mu, p.kappa, p.xi, p.eta})
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite family parameter");
  if (p.form == HenonForm::Conjugate && p.eta != 0.0)
    throw std::invalid_argument("conjugate form has no eta term; use the standard form");
}

std::string form_name(HenonForm f) { return f == HenonForm::Standard ? "standard" : "conjugate"; }

HenonForm parse_form(const std::string& s) {
  if (s == "standard") return HenonForm::Standard;
  if (s == "conjugate") return HenonForm::Conjugate;
  throw std::invalid_argument("unknown form: " + s);
}

Vec3 henon_map(const HenonParams& p, const Vec3& v) {
  validate(p);
  const double x = v[0], y = v[1], z = v[2];
  if (p.form == HenonForm::Standard)
    return {p.xi * x + y, p.mu + y * y + p.kappa * x * x + p.eta * x * y, y};
  return {y, p.mu + y * y + p.kappa * z * z, p.xi * z + y};
}

IVec3 henon_map(const HenonParams& p, const IVec3& v) {
  validate(p);
  const Interval &x = v[0], &y = v[1], &z = v[2];
  if (p.form == HenonForm::Standard)
    return {Interval(p.xi) * x + y, Interval(p.mu) + sqr(y) + Interval(p.kappa) * sqr(x) + Interval(p.eta) * x * y, y};
  return {y, Interval(p.mu) + sqr(y) + Interval(p.kappa) * sqr(z), Interval(p.xi) * z + y};
}

Mat3 henon_jacobian(const HenonParams& p, const Vec3& v) {
  validate(p);
  const double x = v[0], y = v[1], z = v[2];
  if (p.form == HenonForm::Standard)
    return {{{p.xi, 1.0, 0.0}, {2 * p.kappa * x + p.eta * y, 2 * y + p.eta * x, 0.0}, {0.0, 1.0, 0.0}}};
  return {{{0.0, 1.0, 0.0}, {0.0, 2 * y, 2 * p.kappa * z}, {0.0, 1.0, p.xi}}};
}

IMat3 henon_jacobian(const HenonParams& p, const IVec3& v) {
  validate(p);
  const Interval &x = v[0], &y = v[1], &z = v[2];
  const Interval two(2.0);
  if (p.form == HenonForm::Standard)
    return {{{Interval(p.xi), Interval(1.0), Interval(0.0)},
             {two * Interval(p.kappa) * x + Interval(p.eta) * y, two * y + Interval(p.eta) * x, Interval(0.0)},
             {Interval(0.0), Interval(1.0), Interval(0.0)}}};
  return {{{Interval(0.0), Interval(1.0), Interval(0.0)},
           {Interval(0.0), two * y, two * Interval(p.kappa) * z},
           {Interval(0.0), Interval(1.0), Interval(p.xi)}}};
}

Vec3 swap_xz(const Vec3& v) { return {v[2], v[1], v[0]}; }

bool AffinePerturbation::active() const {
  for (double v : offset)
    if (v != 0.0) return true;
  for (const auto& r : linear)
    for (double v : r)
      if (v != 0.0) return true;
  return false;
}

BlenderMap BlenderMap::from(const HenonParams& p) {
  validate(p);
  return BlenderMap{p.mu, p.kappa, p.xi, p.eta, {}};
}

Vec3 BlenderMap::operator()(const Vec3& v) const {
  const double y = v[1], z = v[2];
  Vec3 r{y, mu + y * y + kappa * z * z + eta * y * z, xi * z + y};
  if (pert.active()) {
    Vec3 l = mul(pert.linear, v);
    for (int i = 0; i < 3; ++i) r[i] += pert.offset[i] + l[i];
  }
  return r;
}

IVec3 BlenderMap::operator()(const IVec3& v) const {
  const Interval &y = v[1], &z = v[2];
  IVec3 r{y, Interval(mu) + sqr(y) + Interval(kappa) * sqr(z) + Interval(eta) * y * z, Interval(xi) * z + y};
  if (pert.active()) {
    IVec3 l = mul(to_imat(pert.linear), v);
    for (int i = 0; i < 3; ++i) r[i] = r[i] + Interval(pert.offset[i]) + l[i];
  }
  return r;
}

Mat3 BlenderMap::jacobian(const Vec3& v) const {
  const double y = v[1], z = v[2];
  Mat3 j{{{0.0, 1.0, 0.0}, {0.0, 2 * y + eta * z, 2 * kappa * z + eta * y}, {0.0, 1.0, xi}}};
  if (pert.active())
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) j[i][k] += pert.linear[i][k];
  return j;
}

IMat3 BlenderMap::jacobian(const IVec3& v) const {
  const Interval &y = v[1], &z = v[2];
  const Interval two(2.0), zero(0.0), one(1.0);
  IMat3 j{{{zero, one, zero},
           {zero, two * y + Interval(eta) * z, two * Interval(kappa) * z + Interval(eta) * y},
           {zero, one, Interval(xi)}}};
  if (pert.active())
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) j[i][k] = j[i][k] + Interval(pert.linear[i][k]);
  return j;
}

bool BlenderMap::kernel_along_x() const {
  return pert.linear[0][0] == 0.0 && pert.linear[1][0] == 0.0 && pert.linear[2][0] == 0.0;
}

namespace {

constexpr double kYLow = 2.4, kYHigh = 3.8;

Interval quad(const Interval& a, const Interval& y, double mu) { return a * sqr(y) - y + Interval(mu); }

FixedPoint quadratic_fixed_point(const BlenderMap& f) {
  if (!(f.xi > 1.0)) throw std::domain_error("fixed point search needs xi > 1");
  const Interval s = Interval(f.xi) - Interval(1.0);
  const Interval a = Interval(1.0) + Interval(f.kappa) / sqr(s) - Interval(f.eta) / s;
  if (!a.certainly_pos()) throw std::domain_error("degenerate fixed point quadratic");
  Interval ql = quad(a, Interval(kYLow), f.mu), qh = quad(a, Interval(kYHigh), f.mu);
  if (!(ql.certainly_neg() && qh.certainly_pos()))
    throw std::domain_error("no fixed point with 2.4 < y < 3.8 is bracketed");
  // Bisection in floating point, then interval Newton on a small box.
  double lo = kYLow, hi = kYHigh;
  const double am = a.mid();
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    double m = 0.5 * (lo + hi);
    (am * m * m - m + f.mu < 0 ? lo : hi) = m;
  }
  Interval Y(lo - 1e-9, hi + 1e-9);
  bool validated = false;
  for (int it = 0; it < 60; ++it) {
    double m = Y.mid();
    Interval d = Interval(2.0) * a * Y - Interval(1.0);
    if (d.contains_zero()) break;
    Interval n = Interval(m) - quad(a, Interval(m), f.mu) / d;
    if (n.interior_of(Y)) validated = true;
    if (n.disjoint(Y)) {
      validated = false;
      break;
    }
    Interval next = meet(n, Y);
    if (next.width() >= Y.width()) {
      Y = next;
      break;
    }
    Y = next;
  }
  FixedPoint fp;
  fp.y = Y;
  fp.x = Y;
  fp.z = -Y / s;
  fp.validated = validated && Y.lo() > kYLow && Y.hi() < kYHigh;
  fp.method = "quadratic+interval-newton";
  return fp;
}

Mat3 inverse_point(const Mat3& m) {
  IMat3 inv = inverse(to_imat(m));
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r[i][k] = inv[i][k].mid();
  return r;
}

// Krawczyk operator for g(p) = F(p) - p around a Newton approximation.
FixedPoint krawczyk_fixed_point(const BlenderMap& f) {
  BlenderMap base = f;
  base.pert = {};
  FixedPoint seed = quadratic_fixed_point(base);
  Vec3 p{seed.x.mid(), seed.y.mid(), seed.z.mid()};
  auto jac_g = [&](const Vec3& q) {
    Mat3 j = f.jacobian(q);
    for (int i = 0; i < 3; ++i) j[i][i] -= 1.0;
    return j;
  };
  for (int it = 0; it < 50; ++it) {
    Vec3 g = f(p);
    for (int i = 0; i < 3; ++i) g[i] -= p[i];
    Vec3 d = mul(inverse_point(jac_g(p)), g);
    for (int i = 0; i < 3; ++i) p[i] -= d[i];
    if (star_norm(d) < 1e-15 * (1 + star_norm(p))) break;
  }
  Mat3 c = inverse_point(jac_g(p));
  FixedPoint fp;
  fp.method = "krawczyk";
  for (double r : {1e-12, 1e-10, 1e-8, 1e-6}) {
    IVec3 X{Interval::around(p[0], r), Interval::around(p[1], r), Interval::around(p[2], r)};
    IVec3 gp = f(to_ivec(p));
    for (int i = 0; i < 3; ++i) gp[i] = gp[i] - Interval(p[i]);
    IMat3 jx = f.jacobian(X);
    for (int i = 0; i < 3; ++i) jx[i][i] = jx[i][i] - Interval(1.0);
    IMat3 ic = to_imat(c);
    IMat3 rem;  // I - C J(X)
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        Interval s = Interval(i == k ? 1.0 : 0.0);
        for (int l = 0; l < 3; ++l) s = s - ic[i][l] * jx[l][k];
        rem[i][k] = s;
      }
    IVec3 dx{X[0] - Interval(p[0]), X[1] - Interval(p[1]), X[2] - Interval(p[2])};
    IVec3 cg = mul(ic, gp), rd = mul(rem, dx);
    IVec3 K;
    bool inside = true;
    for (int i = 0; i < 3; ++i) {
      K[i] = Interval(p[i]) - cg[i] + rd[i];
      inside = inside && K[i].interior_of(X[i]);
    }
    if (inside) {
      fp.x = K[0];
      fp.y = K[1];
      fp.z = K[2];
      fp.validated = K[1].lo() > kYLow && K[1].hi() < kYHigh;
      return fp;
    }
  }
  fp.x = Interval(p[0]);
  fp.y = Interval(p[1]);
  fp.z = Interval(p[2]);
  fp.validated = false;
  return fp;
}

}  // namespace

FixedPoint fixed_point_Pstar(const BlenderMap& f) {
  if (f.pert.active()) return krawczyk_fixed_point(f);
  return quadratic_fixed_point(f);
}

FixedPoint fixed_point_Pstar(const HenonParams& p) { return fixed_point_Pstar(BlenderMap::from(p)); }

}  // namespace blender

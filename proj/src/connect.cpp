#include "blender/connect.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace blender {

namespace {

using boost::multiprecision::pow;
using boost::multiprecision::fabs;

Point<double> theta_scale(const TransitionCoeffs& k) {
  double s = k.beta[1] * k.b[1];
  if (k.a[1] == 0 || k.c[1] == 0 || s == 0) throw std::invalid_argument("Phi needs a2, c2, beta2, b2 != 0");
  return {s / k.a[1], k.beta[1] * s, s / k.c[1]};
}

Point<double> to_doubles(const Point<Real>& p) { return {to_double(p[0]), to_double(p[1]), to_double(p[2])}; }

Real max_abs_diff(const Point<Real>& a, const Point<Real>& b) {
  Real r = fabs(a[0] - b[0]);
  for (int c = 1; c < 3; ++c) {
    Real v = fabs(a[c] - b[c]);
    if (v > r) r = v;
  }
  return r;
}

double log10_of(const Real& v) {
  if (v == 0) return -std::numeric_limits<double>::infinity();
  return to_double(Real(boost::multiprecision::log10(v)));
}

}  // namespace

Point<Real> phi_mn(const CycleConfig& cfg, const RenormData& d, const Point<Real>& p) {
  Point<double> s = theta_scale(cfg.coeffs);
  return d.psi({p[2] * s[0], p[1] * s[1], p[0] * s[2]});
}

Point<Real> phi_mn_inverse(const CycleConfig& cfg, const RenormData& d, const Point<Real>& q) {
  Point<double> s = theta_scale(cfg.coeffs);
  Point<Real> b = d.psi_inverse(q);
  return {b[2] / s[2], b[1] / s[1], b[0] / s[0]};
}

SegmentComparison compare_segment_images(const CycleConfig& cfg, int m, int n, const SegmentOptions& opt) {
  if (opt.samples < 3) throw std::invalid_argument("segment comparison needs at least 3 samples");
  PrecisionScope scope(opt.bits ? opt.bits : default_precision_bits(cfg, m, n));
  RenormData d = renorm_data(cfg, m, n, Real(opt.mu_bar));
  Shifts<Real> sh = d.shifts();
  const TransitionCoeffs& k = cfg.coeffs;
  const double tscale = k.beta[1] * k.beta[1] * k.b[1];
  const EigenTuple& e = cfg.eig;

  SegmentComparison out;
  out.m = m;
  out.n = n;
  out.log10_bound = (m * std::log(e.lambda_t) + n * std::log(e.zeta) + 2 * m * std::log(e.sigma_t) +
                     2 * n * std::log(e.sigma)) / std::log(10.0);

  OrbitOptions hat_opt;
  hat_opt.stepwise = true;
  hat_opt.theta_n = opt.theta ? n : 0;
  hat_opt.check_domains = opt.theta;
  OrbitOptions ell_opt = hat_opt;

  Real s_unit = d.sy * pow(Real(e.sigma), n);  // sigma^-n sigma_t^-2m
  std::vector<Point<Real>> diffs;
  Real d0(0);
  out.images_formed = true;
  for (int i = 0; i < opt.samples; ++i) {
    double y = -4.0 + 8.0 * (i + 0.5) / opt.samples;
    double t = tscale * y;

    Point<Real> q_hat = phi_mn(cfg, d, {Real(0), Real(y), Real(0)});
    OrbitResult<Real> r_hat;
    try {
      r_hat = compose_return_orbit(cfg, sh, m, n, q_hat, hat_opt);
    } catch (const DomainError& err) {
      throw DomainError(std::string("ell-hat: ") + err.what());
    }

    // The local unstable arc near X is the y-axis, pushed to x = lambda^n by theta_n.
    Point<Real> q_ell{Real(0), Real(1) + s_unit * t, Real(0)};
    if (opt.theta) q_ell = theta_n_apply(cfg, n, q_ell);
    OrbitResult<Real> r_ell;
    try {
      r_ell = compose_return_orbit(cfg, sh, m, 0, q_ell, ell_opt);
    } catch (const DomainError& err) {
      throw DomainError(std::string("ell: ") + err.what());
    }

    const Point<Real>& pre_hat = r_hat.trace[3].point;  // after the P-chart stage
    const Point<Real>& pre_ell = r_ell.trace[3].point;
    for (int c = 0; c < 3; ++c) {
      Real g = fabs(pre_hat[c] - pre_ell[c]);
      double lg = log10_of(g);
      if (lg > out.log10_pre_return_gap) {
        out.log10_pre_return_gap = lg;
        out.pre_return_gap = to_double(g);
        out.pre_return_axis = c;
      }
    }

    if (!opt.theta) continue;  // without theta_n the second transition is not defined for ell
    Point<Real> fh = d.psi_inverse(r_hat.point), fe = d.psi_inverse(r_ell.point);
    SegmentRow row;
    row.t = t;
    row.ell = to_doubles(fe);
    row.ell_hat = to_doubles(fh);
    Point<Real> diff{Real(fe[0] - fh[0]), Real(fe[1] - fh[1]), Real(fe[2] - fh[2])};
    Real gap = max_abs_diff(fe, fh);
    row.log10_gap = log10_of(gap);
    if (gap > d0) d0 = gap;
    diffs.push_back(diff);
    out.rows.push_back(row);
  }
  if (!opt.theta) {
    out.images_formed = false;
    out.note = "theta_n disabled: ell does not reach the domain of the second transition; only the pre-return gap is measured";
    return out;
  }
  Real dt = Real(tscale) * 8 / opt.samples;
  Real d1(0);
  for (size_t i = 0; i + 1 < diffs.size(); ++i) {
    Real v = max_abs_diff(diffs[i + 1], diffs[i]) / fabs(dt);
    if (v > d1) d1 = v;
  }
  out.log10_d0 = log10_of(d0);
  out.log10_d1 = log10_of(d1);
  out.ratio = std::pow(10.0, out.log10_c1() - out.log10_bound);
  return out;
}

std::string segment_csv(const SegmentComparison& c) {
  std::ostringstream os;
  os.precision(15);
  os << "t,ell_x,ell_y,ell_z,ell_hat_x,ell_hat_y,ell_hat_z,log10_gap\n";
  for (const SegmentRow& r : c.rows)
    os << r.t << "," << r.ell[0] << "," << r.ell[1] << "," << r.ell[2] << "," << r.ell_hat[0] << "," << r.ell_hat[1]
       << "," << r.ell_hat[2] << "," << r.log10_gap << "\n";
  return os.str();
}

HolderReport holder_estimate(const CycleConfig& cfg, int n, double alpha, int samples, uint64_t seed) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (n < 0 || samples < 1) throw std::invalid_argument("bad Holder sampling request");
  const double lambda = cfg.eig.lambda, zeta = cfg.eig.zeta;
  HolderReport r;
  r.n = n;
  r.alpha = alpha;
  r.base = lambda / std::pow(zeta, 1 + alpha);
  r.below_threshold = alpha < std::log(lambda) / std::log(zeta) - 1;

  // d/dx of lambda^k B(p / zeta^k), with k = 0 meaning the unscaled b'(x) b(y) b(z).
  auto dx = [&](int k, const Point<double>& p) {
    if (k > 0) return bump_Bn_dx(cfg, k, p);
    return bump_profile_derivative(cfg.profile, 1.0 / 3.0, 0.5, p[0]) *
           bump_profile(cfg.profile, 1.0 / 3.0, 0.5, p[1]) * bump_profile(cfg.profile, 1.0 / 3.0, 0.5, p[2]);
  };
  auto sup_quotient = [&](int k) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> ramp(1.0 / 3.0, 0.5), box(-0.5, 0.5), unit(-1.0, 1.0), sign(0.0, 1.0);
    const double scales[3] = {1.0, 0.25, 0.0625};
    const double zk = std::pow(zeta, k);
    double best = 0.0;
    for (int i = 0; i < samples; ++i) {
      Point<double> u{ramp(gen) * (sign(gen) < 0.5 ? -1 : 1), box(gen), box(gen)};
      Point<double> v{unit(gen), unit(gen), unit(gen)};
      double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      if (nv == 0) continue;
      double s = scales[i % 3] * 0.5 * (sign(gen) + 1e-3);
      Point<double> p{zk * u[0], zk * u[1], zk * u[2]};
      Point<double> q{p[0] + zk * s * v[0] / nv, p[1] + zk * s * v[1] / nv, p[2] + zk * s * v[2] / nv};
      double h = zk * s;
      best = std::max(best, std::fabs(dx(k, q) - dx(k, p)) / std::pow(h, alpha));
    }
    return best;
  };
  r.estimate = sup_quotient(n);
  r.predicted = sup_quotient(0) * std::pow(r.base, n);
  return r;
}

BoxpertQuotient boxpert_quotient(const CycleConfig& cfg, int m, int n, double z) {
  PrecisionScope scope(128);
  Real s = pow(Real(cfg.eig.sigma), -n) * pow(Real(cfg.eig.sigma_t), -m);
  Real den = 2 * (s * z + 1);
  if (!(den > 0)) throw std::domain_error("box-perturbation quotient: denominator is not positive, box too large for this (m, n)");
  BoxpertQuotient q;
  q.value = to_double(Real(1 / den));
  q.inside = q.value > 0 && q.value < 1;
  return q;
}

NonInterference check_non_interference(const CycleConfig& cfg, int m, int n, int points, uint64_t seed, unsigned bits) {
  PrecisionScope scope(bits ? bits : default_precision_bits(cfg, m, n));
  RenormData d = renorm_data(cfg, m, n, Real(0));
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ux(-4, 4), uy(-4, 4), uz(-40, 0);
  OrbitOptions with, without;
  with.stepwise = without.stepwise = true;
  with.trace = without.trace = false;
  with.theta_n = n;
  NonInterference r;
  for (int i = 0; i < points; ++i) {
    Point<Real> q = phi_mn(cfg, d, {Real(ux(gen)), Real(uy(gen)), Real(uz(gen))});
    Point<Real> a = compose_return_orbit(cfg, d.shifts(), m, n, q, with).point;
    Point<Real> b = compose_return_orbit(cfg, d.shifts(), m, n, q, without).point;
    ++r.points;
    if (a[0] == b[0] && a[1] == b[1] && a[2] == b[2]) ++r.identical;
  }
  return r;
}

}  // namespace blender

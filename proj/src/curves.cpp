#include "blender/curves.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace blender {

namespace {

struct Sample {
  double y, x, z, dx, dz;
};

size_t segment_index(const std::vector<double>& ys, double yq) {
  if (ys.size() < 2) throw std::invalid_argument("curve needs at least two samples");
  if (yq < ys.front() - 1e-12 || yq > ys.back() + 1e-12) throw std::out_of_range("curve evaluated outside its range");
  size_t i = std::upper_bound(ys.begin(), ys.end(), yq) - ys.begin();
  if (i == 0) i = 1;
  if (i >= ys.size()) i = ys.size() - 1;
  return i - 1;
}

double hermite(double y0, double y1, double f0, double f1, double d0, double d1, double yq) {
  double h = y1 - y0, t = (yq - y0) / h;
  double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * d1;
}

Sample sample_at(const VerticalCurve& c, double yq) {
  size_t i = segment_index(c.y, yq);
  double w = (yq - c.y[i]) / (c.y[i + 1] - c.y[i]);
  return {yq, c.x_at(yq), c.z_at(yq), (1 - w) * c.dx[i] + w * c.dx[i + 1], (1 - w) * c.dz[i] + w * c.dz[i + 1]};
}

std::vector<Sample> sub_samples(const VerticalCurve& c, double y_lo, double y_hi) {
  std::vector<Sample> out{sample_at(c, y_lo)};
  for (size_t i = 0; i < c.size(); ++i)
    if (c.y[i] > y_lo && c.y[i] < y_hi) out.push_back({c.y[i], c.x[i], c.z[i], c.dx[i], c.dz[i]});
  out.push_back(sample_at(c, y_hi));
  return out;
}

VerticalCurve resample(const std::vector<Sample>& s, double y0, double y1, int n) {
  VerticalCurve out;
  size_t j = 0;
  for (int k = 0; k < n; ++k) {
    double yq = k == n - 1 ? y1 : y0 + (y1 - y0) * k / (n - 1);
    while (j + 2 < s.size() && s[j + 1].y < yq) ++j;
    const Sample &a = s[j], &b = s[j + 1];
    double w = (yq - a.y) / (b.y - a.y);
    out.y.push_back(yq);
    out.x.push_back(hermite(a.y, b.y, a.x, b.x, a.dx, b.dx, yq));
    out.z.push_back(hermite(a.y, b.y, a.z, b.z, a.dz, b.dz, yq));
    out.dx.push_back((1 - w) * a.dx + w * b.dx);
    out.dz.push_back((1 - w) * a.dz + w * b.dz);
  }
  return out;
}

}  // namespace

VerticalCurve VerticalCurve::line(double x0, double y_ref, double z_ref, double slope, int samples, double y0,
                                  double y1) {
  if (samples < 2) throw std::invalid_argument("curve needs at least two samples");
  VerticalCurve c;
  for (int k = 0; k < samples; ++k) {
    double y = k == samples - 1 ? y1 : y0 + (y1 - y0) * k / (samples - 1);
    c.y.push_back(y);
    c.x.push_back(x0);
    c.z.push_back(z_ref + slope * (y - y_ref));
    c.dx.push_back(0.0);
    c.dz.push_back(slope);
  }
  return c;
}

VerticalCurve VerticalCurve::shifted_z(double d) const {
  VerticalCurve c = *this;
  for (double& v : c.z) v += d;
  return c;
}

double VerticalCurve::z_at(double yq) const {
  size_t i = segment_index(y, yq);
  return hermite(y[i], y[i + 1], z[i], z[i + 1], dz[i], dz[i + 1], yq);
}

double VerticalCurve::x_at(double yq) const {
  size_t i = segment_index(y, yq);
  return hermite(y[i], y[i + 1], x[i], x[i + 1], dx[i], dx[i + 1], yq);
}

void VerticalCurve::check() const {
  size_t n = y.size();
  if (n < 2 || x.size() != n || z.size() != n || dx.size() != n || dz.size() != n)
    throw std::invalid_argument("inconsistent curve samples");
  for (size_t i = 0; i + 1 < n; ++i)
    if (!(y[i] < y[i + 1])) throw std::invalid_argument("curve samples must increase in y");
}

H5Geometry default_geometry(const BlenderMap& f, double theta) {
  H5Geometry g;
  FixedPoint p = fixed_point_Pstar(f);
  g.y_star = p.y.mid();
  g.z_star = p.z.mid();
  g.theta = theta;
  return g;
}

bool right_of_stable_line(const VerticalCurve& c, const H5Geometry& g) {
  if (g.y_star < c.y.front() || g.y_star > c.y.back()) return false;
  return c.z_at(g.y_star) > g.z_star;
}

bool image_piece(const BlenderMap& f, const VerticalCurve& c, double y_lo, double y_hi, const H5Geometry& g,
                 VerticalCurve& out, std::string& reason) {
  std::vector<Sample> img;
  int sign = 0;
  for (const Sample& s : sub_samples(c, y_lo, y_hi)) {
    IVec3 p{Interval(s.x), Interval(s.y), Interval(s.z)};
    IVec3 q = f(p);
    IVec3 t = mul(f.jacobian(p), IVec3{Interval(s.dx), Interval(1.0), Interval(s.dz)});
    int sg = t[1].certainly_pos() ? 1 : t[1].certainly_neg() ? -1 : 0;
    if (sg == 0 || (sign != 0 && sg != sign)) {
      reason = "image tangent loses its y-component";
      return false;
    }
    sign = sg;
    Interval sx = t[0] / t[1], sz = t[2] / t[1];
    if (!((Interval(g.theta) * sqrt(sqr(sx) + sqr(sz))).hi() < 1.0)) {
      reason = "image tangent leaves the strong unstable cone";
      return false;
    }
    img.push_back({q[1].mid(), q[0].mid(), q[2].mid(), sx.mid(), sz.mid()});
  }
  if (sign < 0) std::reverse(img.begin(), img.end());
  for (size_t i = 0; i + 1 < img.size(); ++i)
    if (!(img[i].y < img[i + 1].y)) {
      reason = "image is not a graph over y";
      return false;
    }
  if (img.front().y > g.y_min || img.back().y < g.y_max) {
    std::ostringstream os;
    os << "image y-range [" << img.front().y << ", " << img.back().y << "] does not cross the box";
    reason = os.str();
    return false;
  }
  out = resample(img, g.y_min, g.y_max, g.samples);
  for (size_t i = 0; i < out.size(); ++i)
    if (std::fabs(out.x[i]) > g.x_abs || out.z[i] < g.z_min || out.z[i] > g.z_max) {
      reason = "image leaves the box";
      return false;
    }
  return true;
}

namespace {

CaseCheck check_piece(const BlenderMap& f, const VerticalCurve& c, const PieceBox& pc, const H5Geometry& g,
                      bool avoid_face) {
  CaseCheck r;
  for (const Sample& s : sub_samples(c, pc.y_lo, pc.y_hi)) {
    if (std::fabs(s.x) > pc.x_abs || s.z < pc.z_lo || s.z > pc.z_hi) {
      r.reason = "curve is not inside " + pc.name;
      return r;
    }
    if (g.theta * std::hypot(s.dx, s.dz) > 1.0) {
      r.reason = "curve is not vertical in " + pc.name;
      return r;
    }
  }
  if (!image_piece(f, c, pc.y_lo, pc.y_hi, g, r.image, r.reason)) return r;
  if (!right_of_stable_line(r.image, g)) {
    r.reason = "image is not to the right of the stable line";
    return r;
  }
  for (size_t i = 0; i < r.image.size(); ++i) {
    double y = r.image.y[i], z = r.image.z[i];
    if (avoid_face && z > g.z_max - g.u_plus) {
      r.reason = "image meets the neighbourhood of the face z = 0";
      return r;
    }
    if (!avoid_face && std::fabs(y - g.y_star) < g.u && std::fabs(z - g.z_star) < g.u) {
      r.reason = "image meets the neighbourhood of the stable line";
      return r;
    }
  }
  if (!avoid_face && std::fabs(r.image.z_at(g.y_star) - g.z_star) < g.u) {
    r.reason = "image meets the neighbourhood of the stable line";
    return r;
  }
  r.ok = true;
  return r;
}

}  // namespace

H5CaseResult check_H5_case(const BlenderMap& f, const VerticalCurve& c, const H5Geometry& g) {
  c.check();
  H5CaseResult r;
  r.a = check_piece(f, c, g.a_piece, g, true);
  r.b = check_piece(f, c, g.b_piece, g, false);
  r.chosen = r.a.ok ? 'A' : r.b.ok ? 'B' : '-';
  return r;
}

VerticalCurve ell_hat_image(const BlenderMap& f, const H5Geometry& g) {
  VerticalCurve seg = VerticalCurve::line(0.0, 0.0, 0.0, 0.0, g.samples, g.y_min, g.y_max);
  VerticalCurve out;
  std::string reason;
  // The negative half is the branch whose image stays in the box; stop just
  // after its image leaves through y = y_min, before the tangent degenerates.
  double t_hi = -std::sqrt(std::max(1e-6, g.y_min - 0.01 - f.mu));
  if (!image_piece(f, seg, g.y_min, t_hi, g, out, reason))
    throw std::domain_error("segment image does not cross the box: " + reason);
  return out;
}

std::vector<VerticalCurve> h5_curve_net(const H5Geometry& g, int n_curves) {
  if (n_curves < 1) throw std::invalid_argument("empty curve net");
  const double s = 0.9 / g.theta;
  const double slopes[3] = {-s, 0.0, s};
  const int per_slope = (n_curves + 2) / 3;
  std::vector<VerticalCurve> out;
  for (int k = 0; k < per_slope && (int)out.size() < n_curves; ++k) {
    for (double sl : slopes) {
      if ((int)out.size() >= n_curves) break;
      // Highest offset keeping the whole segment at z <= z_max, lowest just right of z*.
      double top = g.z_max - std::max(sl * (g.y_min - g.y_star), sl * (g.y_max - g.y_star)) - 0.01;
      double bottom = g.z_star + 0.02;
      double z0 = per_slope == 1 ? 0.5 * (top + bottom) : bottom + (top - bottom) * k / (per_slope - 1);
      out.push_back(VerticalCurve::line(0.0, g.y_star, z0, sl, g.samples, g.y_min, g.y_max));
    }
  }
  return out;
}

H5NetResult h5_net(const BlenderMap& f, const H5Geometry& g, int n_curves) {
  H5NetResult r;
  r.samples = g.samples;
  for (const VerticalCurve& c : h5_curve_net(g, n_curves)) {
    H5CaseResult cr = check_H5_case(f, c, g);
    ++r.curves;
    r.cases.push_back(cr.chosen);
    if (cr.chosen != '-') {
      ++r.passed;
    } else if (r.first_failure.empty()) {
      std::ostringstream os;
      os << "curve z(y*)=" << c.z_at(g.y_star) << " slope=" << c.dz[0] << ": A' " << cr.a.reason << "; B' "
         << cr.b.reason;
      r.first_failure = os.str();
    }
  }
  r.ok = r.passed == r.curves;
  return r;
}

}  // namespace blender

#include "blender/geom.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace blender {

std::string Interval::str() const {
  std::ostringstream os;
  os.precision(17);
  os << "[" << lo_ << ", " << hi_ << "]";
  return os.str();
}

bool IBox3::subset_of(const IBox3& o) const {
  for (int i = 0; i < 3; ++i)
    if (!c[i].subset_of(o.c[i])) return false;
  return true;
}

bool IBox3::disjoint(const IBox3& o) const {
  for (int i = 0; i < 3; ++i)
    if (c[i].disjoint(o.c[i])) return true;
  return false;
}

double IBox3::max_width() const {
  return std::max({c[0].width(), c[1].width(), c[2].width()});
}

IBox3 join(const IBox3& a, const IBox3& b) {
  return IBox3::of(join(a[0], b[0]), join(a[1], b[1]), join(a[2], b[2]));
}

IVec3 to_ivec(const Vec3& v) { return {Interval(v[0]), Interval(v[1]), Interval(v[2])}; }

IVec3 mul(const IMat3& m, const IVec3& v) {
  IVec3 r;
  for (int i = 0; i < 3; ++i) r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return r;
}

IMat3 to_imat(const Mat3& m) {
  IMat3 r;
  for (int i = 0; i < 3; ++i) r[i] = to_ivec(m[i]);
  return r;
}

Vec3 mul(const Mat3& m, const Vec3& v) {
  Vec3 r;
  for (int i = 0; i < 3; ++i) r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return r;
}

double star_norm(const Vec3& v) { return std::max(std::fabs(v[0]), std::hypot(v[1], v[2])); }
Interval star_norm(const IVec3& v) { return max(abs(v[0]), sqrt(sqr(v[1]) + sqr(v[2]))); }
double euclid_norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
Interval euclid_norm(const IVec3& v) { return sqrt(sqr(v[0]) + sqr(v[1]) + sqr(v[2])); }

Cone make_cone(ConeKind kind, double theta) {
  if (!std::isfinite(theta) || theta <= 0.0) throw std::invalid_argument("cone aperture must be positive");
  return Cone{kind, theta};
}

std::string cone_name(ConeKind kind) {
  switch (kind) {
    case ConeKind::Unstable: return "u";
    case ConeKind::StrongUnstable: return "uu";
    case ConeKind::Stable: return "s";
  }
  return "?";
}

bool cone_contains(const Cone& cone, const Vec3& v) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("cone_contains: non-finite vector");
  switch (cone.kind) {
    case ConeKind::Unstable: return cone.theta * std::fabs(v[0]) <= std::hypot(v[1], v[2]);
    case ConeKind::StrongUnstable: return cone.theta * std::hypot(v[0], v[2]) <= std::fabs(v[1]);
    case ConeKind::Stable: return cone.theta * std::hypot(v[1], v[2]) <= std::fabs(v[0]);
  }
  return false;
}

bool ivec_in_cone(const Cone& cone, const IVec3& w, double margin) {
  const Interval t(cone.theta + margin);
  Interval lhs, axis;
  switch (cone.kind) {
    case ConeKind::Unstable:
      lhs = t * abs(w[0]);
      axis = sqrt(sqr(w[1]) + sqr(w[2]));
      break;
    case ConeKind::StrongUnstable:
      lhs = t * sqrt(sqr(w[0]) + sqr(w[2]));
      axis = abs(w[1]);
      break;
    case ConeKind::Stable:
      lhs = t * sqrt(sqr(w[1]) + sqr(w[2]));
      axis = abs(w[0]);
      break;
  }
  return axis.lo() > 0.0 && lhs.hi() <= axis.lo();
}

namespace {

// cos and sin over an arc [a, b], enclosed by the midpoint value widened by
// the half-length (both are 1-Lipschitz) plus a few ulps for libm error.
std::pair<Interval, Interval> arc_enclosure(double a, double b) {
  double m = 0.5 * (a + b), h = 0.5 * (b - a);
  double slack = h + 4 * std::numeric_limits<double>::epsilon();
  Interval c = meet(Interval::around(std::cos(m), slack), Interval(-1.0, 1.0));
  Interval s = meet(Interval::around(std::sin(m), slack), Interval(-1.0, 1.0));
  return {c, s};
}

// Sign of the axis coordinate of a convex nappe, or 0 when undecided.
int nappe_sign(const Cone& dst, const IVec3& w) {
  const Interval& a = dst.kind == ConeKind::StrongUnstable ? w[1] : w[0];
  if (a.certainly_pos()) return 1;
  if (a.certainly_neg()) return -1;
  return 0;
}

}  // namespace

std::vector<IVec3> cone_cover(const Cone& cone, const ConeNet& net, bool boundary_only) {
  if (net.directions < 4 || net.slices < 1) throw std::invalid_argument("cone net too coarse");
  const double a = 1.0 / cone.theta;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<IVec3> out;
  for (int k = 0; k < net.directions; ++k) {
    auto [c, s] = arc_enclosure(two_pi * k / net.directions, two_pi * (k + 1) / net.directions);
    if (cone.kind == ConeKind::Unstable) {
      // Band (u, cos, sin), |u| <= a; the cone is not convex so the whole band is covered.
      for (int j = 0; j < net.slices; ++j) {
        Interval u(-a + 2 * a * j / net.slices, -a + 2 * a * (j + 1) / net.slices);
        out.push_back({u, c, s});
      }
    } else {
      std::vector<Interval> radii;
      if (boundary_only) {
        radii.push_back(Interval(a));
      } else {
        for (int j = 0; j < net.slices; ++j) radii.push_back(Interval(a * j / net.slices, a * (j + 1) / net.slices));
      }
      for (const Interval& r : radii) {
        if (cone.kind == ConeKind::StrongUnstable)
          out.push_back({r * c, Interval(1.0), r * s});
        else
          out.push_back({Interval(1.0), r * c, r * s});
      }
    }
  }
  return out;
}

bool cone_mapped_into_interior(const Cone& src, const IMat3& m, const Cone& dst, double margin,
                               const ConeNet& net) {
  if (!(margin > 0.0)) return false;
  const bool convex_src = src.kind != ConeKind::Unstable;
  const bool convex_dst = dst.kind != ConeKind::Unstable;
  // Linear images of a disc are convex hulls of the boundary images, so for
  // convex nappes on both sides the boundary circle decides.
  const bool boundary_only = convex_src && convex_dst;
  int sign = 0;
  for (const IVec3& v : cone_cover(src, net, boundary_only)) {
    IVec3 w = mul(m, v);
    if (!ivec_in_cone(dst, w, margin)) return false;
    if (boundary_only) {
      int s = nappe_sign(dst, w);
      if (s == 0 || (sign != 0 && s != sign)) return false;
      sign = s;
    }
  }
  return true;
}

double cone_min_expansion(const Cone& src, const IMat3& m, const ConeNet& net) {
  double best = std::numeric_limits<double>::infinity();
  for (const IVec3& v : cone_cover(src, net, false)) {
    Interval num = star_norm(mul(m, v));
    Interval den = star_norm(v);
    best = std::min(best, num.lo() / den.hi());
  }
  return best;
}

IMat3 inverse(const IMat3& m) {
  auto cof = [&](int r0, int r1, int c0, int c1) { return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]; };
  IMat3 adj;
  adj[0][0] = cof(1, 2, 1, 2);
  adj[0][1] = -cof(0, 2, 1, 2);
  adj[0][2] = cof(0, 1, 1, 2);
  adj[1][0] = -cof(1, 2, 0, 2);
  adj[1][1] = cof(0, 2, 0, 2);
  adj[1][2] = -cof(0, 1, 0, 2);
  adj[2][0] = cof(1, 2, 0, 1);
  adj[2][1] = -cof(0, 2, 0, 1);
  adj[2][2] = cof(0, 1, 0, 1);
  Interval det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
  if (det.contains_zero()) throw std::domain_error("singular interval matrix");
  for (auto& row : adj)
    for (auto& e : row) e = e / det;
  return adj;
}

SubdivisionResult subdivide(const IBox3& box, const std::function<bool(const IBox3&)>& predicate,
                            int max_depth, std::array<bool, 3> axis_mask) {
  if (max_depth < 0) throw std::invalid_argument("negative subdivision depth");
  SubdivisionResult res;
  struct Item {
    IBox3 b;
    int depth;
  };
  std::vector<Item> stack{{box, 0}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    res.max_depth_reached = std::max(res.max_depth_reached, it.depth);
    if (predicate(it.b)) {
      res.certified.push_back(it.b);
      continue;
    }
    if (it.depth >= max_depth) {
      res.unresolved.push_back(it.b);
      continue;
    }
    std::vector<IBox3> parts{it.b};
    for (int ax = 0; ax < 3; ++ax) {
      if (!axis_mask[ax]) continue;
      std::vector<IBox3> next;
      for (const IBox3& p : parts) {
        double m = p[ax].mid();
        IBox3 lo = p, hi = p;
        lo[ax] = Interval(p[ax].lo(), m);
        hi[ax] = Interval(m, p[ax].hi());
        next.push_back(lo);
        next.push_back(hi);
      }
      parts.swap(next);
    }
    // Reverse so the lowest octant is processed first.
    for (auto p = parts.rbegin(); p != parts.rend(); ++p) stack.push_back({*p, it.depth + 1});
  }
  return res;
}

}  // namespace blender

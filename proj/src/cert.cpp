#include "blender/cert.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace blender {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "CERTIFIED";
    case Verdict::Failed: return "FAILED";
    case Verdict::Unresolved: return "UNRESOLVED";
  }
  return "?";
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Failed || b == Verdict::Failed) return Verdict::Failed;
  if (a == Verdict::Unresolved || b == Verdict::Unresolved) return Verdict::Unresolved;
  return Verdict::Certified;
}

void HReport::add(ClauseReport c) {
  verdict = clauses.empty() ? c.verdict : combine(verdict, c.verdict);
  clauses.push_back(std::move(c));
}

namespace {

constexpr std::array<bool, 3> kYZ{false, true, true};
constexpr std::array<bool, 3> kY{false, true, false};
constexpr std::array<bool, 3> kZ{false, false, true};

IBox3 image(const BlenderMap& f, const IBox3& b) { return IBox3{f(b.c)}; }

IBox3 meet(const IBox3& a, const IBox3& b) {
  return IBox3::of(blender::meet(a[0], b[0]), blender::meet(a[1], b[1]), blender::meet(a[2], b[2]));
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string fmt_point(const Vec3& p) {
  std::ostringstream os;
  os.precision(10);
  os << "(" << p[0] << ", " << p[1] << ", " << p[2] << ")";
  return os.str();
}

ClauseReport clause(const std::string& name, bool failed, size_t unresolved, const std::string& ok_detail,
                    const std::string& fail_detail) {
  ClauseReport c;
  c.name = name;
  if (failed) {
    c.verdict = Verdict::Failed;
    c.detail = fail_detail;
  } else if (unresolved > 0) {
    c.verdict = Verdict::Unresolved;
    c.detail = std::to_string(unresolved) + " unresolved leaves at the depth limit";
  } else {
    c.verdict = Verdict::Certified;
    c.detail = ok_detail;
  }
  return c;
}

struct HalfResult {
  std::vector<IBox3> boxes;
  size_t unresolved = 0;
  int depth = 0;
};

// Encloses F(half) n Delta and checks the strong stable face (and for B the
// face z = 0) on every leaf whose image meets the box.
HalfResult enclose_half(const BlenderMap& f, const IBox3& half, const IBox3& delta, bool is_b, int depth) {
  HalfResult r;
  auto pred = [&](const IBox3& b) {
    IBox3 img = image(f, b);
    if (img.disjoint(delta)) return true;
    if (img[1].width() > 0.25 || img[2].width() > 2.5) return false;
    if (!img[0].interior_of(delta[0])) return false;
    if (is_b && !(img[2].hi() < delta[2].hi())) return false;
    r.boxes.push_back(meet(img, delta));
    return true;
  };
  SubdivisionResult s = subdivide(half, pred, depth, kYZ);
  for (const IBox3& b : s.unresolved) {
    IBox3 img = image(f, b);
    if (!img.disjoint(delta)) r.boxes.push_back(meet(img, delta));
  }
  r.unresolved = s.unresolved.size();
  r.depth = s.max_depth_reached;
  return r;
}

bool meets_any(const IBox3& q, const IBox3& hull, const std::vector<IBox3>& boxes) {
  if (q.disjoint(hull)) return false;
  for (const IBox3& b : boxes)
    if (!q.disjoint(b)) return true;
  return false;
}

struct FaceResult {
  size_t unresolved = 0;
  bool failed = false;
  std::string witness;
};

// Checks F(face) n Delta against a set of boxes. A face point on the side of
// `side` (sign of y) whose image lies in Delta is a point of F(side) n Delta,
// so it is a rigorous counterexample.
FaceResult check_face(const BlenderMap& f, const IBox3& face, const std::array<bool, 3>& mask, const IBox3& delta,
                      const IBox3& hull, const std::vector<IBox3>& boxes, int side, int depth) {
  FaceResult r;
  auto pred = [&](const IBox3& b) {
    IBox3 img = image(f, b);
    if (img.disjoint(delta)) return true;
    if (!meets_any(meet(img, delta), hull, boxes)) return true;
    Vec3 q = b.mid();
    if (side * q[1] >= 0) {
      IBox3 qi = image(f, IBox3::point(q));
      if (qi.subset_of(delta)) {
        r.failed = true;
        r.witness = "F" + fmt_point(q) + " = " + fmt_point(qi.mid()) + " lies in the box";
        return true;
      }
    }
    return false;
  };
  SubdivisionResult s = subdivide(face, pred, depth, mask);
  r.unresolved = s.unresolved.size();
  return r;
}

IBox3 hull_of(const std::vector<IBox3>& boxes, const IBox3& fallback) {
  if (boxes.empty()) return fallback;
  IBox3 h = boxes.front();
  for (const IBox3& b : boxes) h = join(h, b);
  return h;
}

}  // namespace

ABEnclosure compute_AB_enclosures(const BlenderMap& f, const CertConfig& cfg) {
  const BlenderBox& bx = cfg.box;
  const IBox3 delta = bx.box();
  const IBox3 plus = IBox3::of(bx.x, Interval(0.0, bx.y.hi()), bx.z);
  const IBox3 minus = IBox3::of(bx.x, Interval(bx.y.lo(), 0.0), bx.z);

  ABEnclosure r;
  HalfResult a = enclose_half(f, plus, delta, false, cfg.depth);
  HalfResult b = enclose_half(f, minus, delta, true, cfg.depth);
  r.a_boxes = std::move(a.boxes);
  r.b_boxes = std::move(b.boxes);
  r.a_empty = r.a_boxes.empty();
  r.b_empty = r.b_boxes.empty();
  r.a_hull = hull_of(r.a_boxes, delta);
  r.b_hull = hull_of(r.b_boxes, delta);
  r.unresolved = int(a.unresolved + b.unresolved);

  r.h1.name = "H1";
  r.h2.name = "H2";
  auto nonempty = [](const std::string& n, bool empty) {
    ClauseReport c{n + " nonempty", empty ? Verdict::Failed : Verdict::Certified, "", true};
    c.detail = empty ? "no leaf image meets the box" : "some leaf image meets the box";
    // An empty enclosure is a proof that the set is empty.
    return c;
  };
  r.h1.add(nonempty("A", r.a_empty));
  r.h2.add(nonempty("B", r.b_empty));
  r.h1.add(clause("A misses the strong stable faces", false, a.unresolved,
                  "A hull x-range " + r.a_hull[0].str() + " inside the open x-interval", ""));
  r.h2.add(clause("B misses the strong stable faces and z = 0", false, b.unresolved,
                  "B hull x-range " + r.b_hull[0].str() + ", z below " + num(r.b_hull[2].hi()), ""));
  if (!r.a_empty && !r.b_empty)
    r.h1.add({"A and B are separated", r.a_hull.disjoint(r.b_hull) ? Verdict::Certified : Verdict::Unresolved,
              "hulls " + std::string(r.a_hull.disjoint(r.b_hull) ? "disjoint" : "overlap"), true});

  // Faces of Delta. The unstable boundary is the y- and z-faces; the strong
  // unstable boundary the y-faces only.
  struct Face {
    std::string name;
    IBox3 box;
    std::array<bool, 3> mask;
  };
  const std::vector<Face> uu_faces{{"y = " + num(bx.y.hi()), IBox3::of(bx.x, bx.y.hi(), bx.z), kZ},
                                   {"y = " + num(bx.y.lo()), IBox3::of(bx.x, bx.y.lo(), bx.z), kZ}};
  std::vector<Face> u_faces = uu_faces;
  u_faces.push_back({"z = " + num(bx.z.hi()), IBox3::of(bx.x, bx.y, bx.z.hi()), kY});
  u_faces.push_back({"z = " + num(bx.z.lo()), IBox3::of(bx.x, bx.y, bx.z.lo()), kY});

  for (const Face& fc : u_faces) {
    FaceResult fr = check_face(f, fc.box, fc.mask, delta, r.a_hull, r.a_boxes, 1, cfg.depth);
    r.h1.add(clause("A misses F(face " + fc.name + ")", fr.failed, fr.unresolved, "image of the face misses A",
                    fr.witness));
  }
  for (const Face& fc : uu_faces) {
    FaceResult fr = check_face(f, fc.box, fc.mask, delta, r.b_hull, r.b_boxes, -1, cfg.depth);
    r.h2.add(clause("B misses F(face " + fc.name + ")", fr.failed, fr.unresolved, "image of the face misses B",
                    fr.witness));
  }
  return r;
}

namespace {

// A cone vector strictly inside the cone, pointing along the k-th boundary direction.
Vec3 boundary_vector(const Cone& c, int k, int n, double u_frac) {
  const double a = (1.0 - 1e-9) / c.theta;
  const double t = 2.0 * M_PI * k / n;
  switch (c.kind) {
    case ConeKind::Unstable: return {u_frac * a, std::cos(t), std::sin(t)};
    case ConeKind::StrongUnstable: return {a * std::cos(t), 1.0, a * std::sin(t)};
    case ConeKind::Stable: return {1.0, a * std::cos(t), a * std::sin(t)};
  }
  return {0, 0, 0};
}

bool certainly_outside(const Cone& c, const IVec3& w) {
  const Interval t(c.theta);
  switch (c.kind) {
    case ConeKind::Unstable: return (t * abs(w[0])).lo() > sqrt(sqr(w[1]) + sqr(w[2])).hi();
    case ConeKind::StrongUnstable: return (t * sqrt(sqr(w[0]) + sqr(w[2]))).lo() > abs(w[1]).hi();
    case ConeKind::Stable: return (t * sqrt(sqr(w[1]) + sqr(w[2]))).lo() > abs(w[0]).hi();
  }
  return false;
}

// Point Jacobian at p and a cone vector of src whose image is certainly outside dst.
bool cone_witness(const IMat3& jp, const Cone& src, const Cone& dst, int n, Vec3& v_out) {
  // Only the unstable band has a free first coordinate.
  const std::vector<double> fracs = src.kind == ConeKind::Unstable ? std::vector<double>{1.0, -1.0, 0.0}
                                                                    : std::vector<double>{0.0};
  for (double uf : fracs)
    for (int k = 0; k < n; ++k) {
      Vec3 v = boundary_vector(src, k, n, uf);
      if (certainly_outside(dst, mul(jp, to_ivec(v)))) {
        v_out = v;
        return true;
      }
    }
  return false;
}

// Expansion lower bound over a leaf, splitting it while the bound is below
// the target. Sub-leaves inherit cone invariance from the parent enclosure.
double refine_expansion(const BlenderMap& f, const IBox3& b, const Cone& u, const IBox3& delta, const CertConfig& cfg,
                        int levels) {
  if (image(f, b).disjoint(delta)) return std::numeric_limits<double>::infinity();
  double e = cone_min_expansion(u, f.jacobian(b.c), cfg.expansion_net);
  if (e >= cfg.expansion_target || levels == 0) return e;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      IBox3 c = b;
      double my = b[1].mid(), mz = b[2].mid();
      c[1] = i ? Interval(my, b[1].hi()) : Interval(b[1].lo(), my);
      c[2] = k ? Interval(mz, b[2].hi()) : Interval(b[2].lo(), mz);
      best = std::min(best, refine_expansion(f, c, u, delta, cfg, levels - 1));
    }
  // Both bounds are valid for the whole leaf.
  return std::max(e, best);
}

}  // namespace

H3Result check_H3(const BlenderMap& f, const CertConfig& cfg) {
  H3Result r;
  r.report.name = "H3";
  const IBox3 delta = cfg.box.box();
  const Cone u = make_cone(ConeKind::Unstable, cfg.theta);
  const Cone uu = make_cone(ConeKind::StrongUnstable, cfg.theta);
  const Cone s = make_cone(ConeKind::Stable, cfg.theta);
  const bool kernel = f.kernel_along_x();
  const double norm_ratio = std::sqrt(1.0 + 1.0 / (cfg.theta * cfg.theta));

  double c0 = std::numeric_limits<double>::infinity();
  double s_exp = std::numeric_limits<double>::infinity();
  size_t bad[3] = {0, 0, 0};
  std::string witness[3];
  std::string obstruction;
  size_t over_budget = 0;

  // One predicate per leaf checks all three clauses; a leaf whose image misses
  // Delta is outside F^{-1}(A u B) and needs nothing.
  auto pred = [&](const IBox3& b) {
    // One counterexample settles the verdict; stop refining after it.
    if (!witness[0].empty() || !witness[1].empty() || !obstruction.empty()) return true;
    IBox3 img = image(f, b);
    if (img.disjoint(delta)) return true;
    if (r.cone_leaves >= cfg.leaf_budget) {
      ++over_budget;
      return true;
    }
    ++r.cone_leaves;
    IMat3 j = f.jacobian(b.c);
    bool ok_u = cone_mapped_into_interior(u, j, u, cfg.cone_margin, cfg.net);
    double e = ok_u ? cone_min_expansion(u, j, cfg.expansion_net) : 0.0;
    ok_u = ok_u && e > 1.0;
    if (ok_u) e = refine_expansion(f, b, u, delta, cfg, cfg.expansion_refine);
    bool ok_uu = cone_mapped_into_interior(uu, j, uu, cfg.cone_margin, cfg.net);
    bool ok_s = kernel;
    double es = std::numeric_limits<double>::infinity();
    if (!kernel) {
      try {
        IMat3 inv = inverse(j);
        es = cone_min_expansion(s, inv, cfg.net) / norm_ratio;
        ok_s = cone_mapped_into_interior(s, inv, s, cfg.cone_margin, cfg.net) && es > 1.0;
      } catch (const std::domain_error&) {
        ok_s = false;
      }
    }
    if (ok_u && ok_uu && ok_s) {
      c0 = std::min(c0, e);
      s_exp = std::min(s_exp, es);
      return true;
    }
    // Look for a rigorous counterexample at the leaf centre.
    Vec3 p = b.mid();
    IBox3 fp = image(f, IBox3::point(p));
    if (fp.subset_of(delta)) {
      IMat3 jp = f.jacobian(to_ivec(p));
      Vec3 v;
      bool found = false;
      if (!ok_uu && cone_witness(jp, uu, uu, cfg.net.directions, v)) {
        witness[1] = "DF at " + fmt_point(p) + " maps " + fmt_point(v) + " out of the uu cone";
        found = true;
      }
      if (!ok_u && cone_witness(jp, u, u, cfg.net.directions, v)) {
        witness[0] = "DF at " + fmt_point(p) + " maps " + fmt_point(v) + " out of the u cone";
        found = true;
      }
      if (found) return true;
      // One-step contraction at a point cannot be refined away.
      if (!ok_u && cone_mapped_into_interior(u, jp, u, cfg.cone_margin, cfg.net)) {
        const int n = cfg.expansion_net.directions;
        for (int k = 0; k < n && obstruction.empty(); ++k) {
          Vec3 v = boundary_vector(u, k, n, 0.0);
          if (star_norm(mul(jp, to_ivec(v))).hi() <= star_norm(to_ivec(v)).lo())
            obstruction = "DF at " + fmt_point(p) + " does not expand " + fmt_point(v) + " in |.|_*";
        }
        if (!obstruction.empty()) return true;
      }
    }
    return false;
  };
  SubdivisionResult sr = subdivide(delta, pred, cfg.depth, kYZ);
  r.leaves = sr.certified.size() + sr.unresolved.size();
  for (const IBox3& b : sr.unresolved) {
    IMat3 j = f.jacobian(b.c);
    if (!(cone_mapped_into_interior(u, j, u, cfg.cone_margin, cfg.net) &&
          cone_min_expansion(u, j, cfg.expansion_net) > 1.0))
      ++bad[0];
    if (!cone_mapped_into_interior(uu, j, uu, cfg.cone_margin, cfg.net)) ++bad[1];
    if (!kernel) ++bad[2];
  }
  // Leaves skipped after the budget ran out were never checked.
  for (size_t& n : bad) n += over_budget;

  r.c0 = std::isfinite(c0) ? c0 : 0.0;
  if (r.c0 > 1.0) {
    r.ell = 1;
    while (std::pow(r.c0, r.ell) <= std::sqrt(2.0)) ++r.ell;
    r.c = std::pow(r.c0, r.ell) / std::sqrt(2.0);
  }
  r.stable_by_kernel = kernel;

  std::ostringstream d0, d2;
  d0.precision(8);
  d0 << "u-cone invariant with |.|_* expansion c0 = " << r.c0 << ", ell = " << r.ell << ", c = " << r.c;
  ClauseReport ci = clause("H3(i)", !witness[0].empty(), bad[0], d0.str(), witness[0]);
  if (ci.verdict == Verdict::Certified && !obstruction.empty()) ci = {"H3(i)", Verdict::Unresolved, obstruction, true};
  if (ci.verdict == Verdict::Certified && !(r.c0 > 1.0)) ci = {"H3(i)", Verdict::Unresolved, "no leaf meets F^{-1}(Delta)", true};
  r.report.add(ci);
  r.report.add(clause("H3(ii)", !witness[1].empty(), bad[1], "uu-cone mapped into its interior", witness[1]));
  if (kernel) {
    d2 << "first Jacobian column vanishes; the stable direction is the kernel";
  } else {
    d2.precision(8);
    d2 << "inverse maps the s-cone into its interior, Euclidean expansion >= " << s_exp;
  }
  r.report.add(clause("H3(iii)", false, bad[2], d2.str(), ""));
  return r;
}

H4Result check_H4(const BlenderMap& f, const CertConfig& cfg) {
  H4Result r;
  r.report.name = "H4";
  try {
    r.pstar = fixed_point_Pstar(f);
  } catch (const std::domain_error& e) {
    r.report.add({"fixed point", Verdict::Failed, e.what(), false});
    return r;
  }
  const FixedPoint& p = r.pstar;
  r.report.add({"fixed point enclosure", p.validated ? Verdict::Certified : Verdict::Unresolved,
                "y* in " + p.y.str() + ", z* in " + p.z.str() + " (" + p.method + ")", true});
  const Interval zlim(-21.2, -12.6);
  ClauseReport zc{"z* bounds", Verdict::Certified, "z* inside (-21.2, -12.6)", true};
  if (!p.z.interior_of(zlim)) {
    zc.verdict = p.z.disjoint(zlim) ? Verdict::Failed : Verdict::Unresolved;
    zc.detail = "z* enclosure " + p.z.str() + " not inside (-21.2, -12.6)";
  }
  r.report.add(zc);
  // A curve right of the stable line passes y* above z*, and its slope is at
  // most 1/theta, so over the rest of the y-range it stays above this bound.
  const Interval reach = (p.y - Interval(cfg.box.y.lo())) / Interval(cfg.theta);
  const Interval gap = p.z - reach - Interval(cfg.box.z.lo());
  r.margin = gap.lo();
  ClauseReport mc{"right-hand curves avoid U-", Verdict::Certified, "", true};
  std::ostringstream os;
  os.precision(8);
  os << "distance to z = " << cfg.box.z.lo() << " at least " << gap.lo() << " > u- = " << cfg.u_minus;
  if (!(gap.lo() > cfg.u_minus)) {
    mc.verdict = gap.hi() <= cfg.u_minus ? Verdict::Failed : Verdict::Unresolved;
    os.str("");
    os << "a slope-" << 1.0 / cfg.theta << " curve from z* reaches within " << gap.hi() << " of z = "
       << cfg.box.z.lo();
  }
  mc.detail = os.str();
  r.report.add(mc);
  return r;
}

namespace {

// Enclosures of the two end points of the positive (sign = 1) or negative
// slice segment over the level z: roots of y^2 + eta z y + mu + kappa z^2 = -+4.
std::pair<Interval, Interval> slice_ends(const BlenderMap& f, const Interval& z, int sign) {
  const Interval b = Interval(f.eta) * z;
  const Interval c = Interval(f.mu) + Interval(f.kappa) * sqr(z);
  auto root = [&](double level) {
    Interval disc = sqr(b) - Interval(4.0) * (c - Interval(level));
    if (disc.hi() < 0) return Interval(0.0);
    Interval r = (Interval(sign) * sqrt(disc) - b) / Interval(2.0);
    return sign > 0 ? max(r, Interval(0.0)) : -max(-r, Interval(0.0));
  };
  // Inner end (closer to y = 0) at level -4, outer end at +4.
  return {root(-4.0), root(4.0)};
}

// Rigorous bound of min (sign -1: max) over z of g, by branch and bound.
double extreme(const std::function<Interval(const Interval&)>& g, const Interval& zr, bool minimize, double& at) {
  struct Piece {
    Interval z;
    Interval v;
  };
  auto key = [&](const Interval& v) { return minimize ? v.lo() : -v.hi(); };
  std::vector<Piece> pieces;
  const int n0 = 64;
  for (int i = 0; i < n0; ++i) {
    double a = zr.lo() + zr.width() * i / n0, b = i == n0 - 1 ? zr.hi() : zr.lo() + zr.width() * (i + 1) / n0;
    Interval z(a, b);
    pieces.push_back({z, g(z)});
  }
  double best_point = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 4000; ++it) {
    size_t k = 0;
    for (size_t i = 1; i < pieces.size(); ++i)
      if (key(pieces[i].v) < key(pieces[k].v)) k = i;
    Piece p = pieces[k];
    double m = p.z.mid();
    Interval vm = g(Interval(m));
    best_point = std::min(best_point, minimize ? vm.hi() : -vm.lo());
    at = m;
    if (best_point - key(p.v) < 1e-13 || p.z.width() < 1e-12) return minimize ? key(p.v) : -key(p.v);
    pieces.erase(pieces.begin() + k);
    pieces.push_back({Interval(p.z.lo(), m), g(Interval(p.z.lo(), m))});
    pieces.push_back({Interval(m, p.z.hi()), g(Interval(m, p.z.hi()))});
    // Drop pieces that cannot hold the extreme.
    std::vector<Piece> keep;
    for (const Piece& q : pieces)
      if (key(q.v) <= best_point) keep.push_back(q);
    pieces.swap(keep);
  }
  size_t k = 0;
  for (size_t i = 1; i < pieces.size(); ++i)
    if (key(pieces[i].v) < key(pieces[k].v)) k = i;
  return minimize ? key(pieces[k].v) : -key(pieces[k].v);
}

}  // namespace

Interval slice_range_plus(const BlenderMap& f, const Interval& z) {
  auto [inner, outer] = slice_ends(f, z, 1);
  return Interval(inner.lo(), outer.hi());
}

Interval slice_range_minus(const BlenderMap& f, const Interval& z) {
  auto [inner, outer] = slice_ends(f, z, -1);
  return Interval(outer.lo(), inner.hi());
}

SubclaimResult I_plus_subclaim(const BlenderMap& f, const BlenderBox& box) {
  SubclaimResult r;
  auto lower_end = [&](const Interval& z) { return slice_ends(f, z, 1).first; };
  auto upper_end = [&](const Interval& z) { return slice_ends(f, z, 1).second; };
  double z_lo_at = 0, z_hi_at = 0;
  double lo = extreme(lower_end, box.z, true, z_lo_at);
  double hi = extreme(upper_end, box.z, false, z_hi_at);
  Interval lo_all = lower_end(box.z), hi_all = upper_end(box.z);
  r.lower = Interval(lo, std::max(lo, lo_all.hi()));
  r.upper = Interval(std::min(hi, hi_all.lo()), hi);
  r.holds = r.lower.lo() > 2.4 && r.upper.hi() < 3.8;
  const double b = f.eta * z_lo_at, c = f.mu + f.kappa * z_lo_at * z_lo_at;
  r.worst_oracle = 0.5 * (std::sqrt(std::max(0.0, b * b - 4 * (c + 4))) - b);
  return r;
}

std::vector<ScanRow> scan_O(int n_mu, int n_kappa, int n_xi, const std::vector<HenonParams>& probes) {
  if (n_mu < 1 || n_kappa < 1 || n_xi < 1) throw std::invalid_argument("scan grid needs at least one cell per axis");
  std::vector<ScanRow> rows;
  auto run = [&](const HenonParams& p, bool probe) {
    BlenderMap f = BlenderMap::from(HenonParams{HenonForm::Conjugate, p.mu, p.kappa, p.xi, 0.0});
    f.eta = p.eta;
    rows.push_back({p.mu, p.kappa, p.xi, I_plus_subclaim(f), probe});
  };
  for (int i = 0; i < n_mu; ++i)
    for (int j = 0; j < n_kappa; ++j)
      for (int k = 0; k < n_xi; ++k) {
        HenonParams p;
        p.mu = -10.0 + (i + 0.5) / n_mu;
        p.kappa = 1e-4 * (j + 0.5) / n_kappa;
        p.xi = 1.18 + 0.01 * (k + 0.5) / n_xi;
        run(p, false);
      }
  for (const HenonParams& p : probes) run(p, true);
  return rows;
}

Certificate certify(const HenonParams& p, const CertConfig& cfg) {
  validate(p);
  // The standard form is certified in the swapped coordinates, where its eta
  // term becomes eta y z.
  BlenderMap f{p.mu, p.kappa, p.xi, p.eta, {}};
  return certify(f, p, cfg);
}

Certificate certify(const BlenderMap& f, const HenonParams& label, const CertConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Certificate c;
  c.params = label;
  c.cfg = cfg;

  ABEnclosure ab = compute_AB_enclosures(f, cfg);
  c.h1 = ab.h1;
  c.h2 = ab.h2;
  c.h3 = check_H3(f, cfg);
  H4Result h4 = check_H4(f, cfg);
  c.h4 = h4.report;
  c.pstar = h4.pstar;
  c.subclaim = I_plus_subclaim(f, cfg.box);

  c.h5.name = "H5";
  if (h4.report.verdict == Verdict::Failed || h4.pstar.method.empty()) {
    c.h5.add({"curve net", Verdict::Unresolved, "skipped: no usable fixed point geometry", false});
  } else {
    H5Geometry g;
    g.y_star = c.pstar.y.mid();
    g.z_star = c.pstar.z.mid();
    g.theta = cfg.theta;
    g.u = cfg.u_stable;
    g.u_plus = cfg.u_plus;
    g.samples = cfg.h5_samples;
    c.net = h5_net(f, g, cfg.h5_curves);
    std::ostringstream os;
    os << c.net.passed << "/" << c.net.curves << " curves pass (cases " << c.net.cases << ")";
    if (!c.net.ok) os << "; " << c.net.first_failure;
    c.h5.add({"curve net", c.net.ok ? Verdict::Certified : Verdict::Failed, os.str(), false});
    if (cfg.run_strip_game) {
      try {
        c.strip = strip_game(f, g, ell_hat_image(f, g), cfg.strip);
        std::ostringstream ss;
        if (c.strip.reached)
          ss << "strip meets a depth-" << c.strip.hit_depth << " preimage of the stable line at step "
             << c.strip.hit_step << " (itinerary " << c.strip.itinerary << ")";
        else
          ss << "no contact within " << cfg.strip.steps << " steps";
        c.h5.add({"strip game", c.strip.reached ? Verdict::Certified : Verdict::Failed, ss.str(), false});
      } catch (const std::exception& e) {
        c.h5.add({"strip game", Verdict::Failed, e.what(), false});
      }
    }
  }

  c.overall = combine(combine(c.h1.verdict, c.h2.verdict), combine(c.h3.report.verdict, c.h4.verdict));
  c.overall = combine(c.overall, c.h5.verdict);
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

namespace {

nlohmann::json report_json(const HReport& h) {
  nlohmann::json j;
  j["verdict"] = verdict_name(h.verdict);
  j["clauses"] = nlohmann::json::array();
  for (const ClauseReport& c : h.clauses)
    j["clauses"].push_back(
        {{"name", c.name}, {"verdict", verdict_name(c.verdict)}, {"detail", c.detail}, {"rigorous", c.rigorous}});
  return j;
}

nlohmann::json interval_json(const Interval& i) { return nlohmann::json::array({i.lo(), i.hi()}); }

}  // namespace

std::string certificate_json(const Certificate& c) {
  nlohmann::json j;
  j["params"] = {{"form", form_name(c.params.form)},
                 {"mu", c.params.mu},
                 {"kappa", c.params.kappa},
                 {"xi", c.params.xi},
                 {"eta", c.params.eta}};
  j["config"] = {{"depth", c.cfg.depth},
                 {"theta", c.cfg.theta},
                 {"cone_margin", c.cfg.cone_margin},
                 {"cone_net", {{"directions", c.cfg.net.directions}, {"slices", c.cfg.net.slices}}},
                 {"u_minus", c.cfg.u_minus},
                 {"u_plus", c.cfg.u_plus},
                 {"u_stable", c.cfg.u_stable},
                 {"h5_curves", c.cfg.h5_curves},
                 {"h5_samples", c.cfg.h5_samples},
                 {"strip", {{"steps", c.cfg.strip.steps}, {"eps", c.cfg.strip.eps},
                            {"tree_depth", c.cfg.strip.tree_depth}, {"beam", c.cfg.strip.beam}}}};
  j["H1"] = report_json(c.h1);
  j["H2"] = report_json(c.h2);
  j["H3"] = report_json(c.h3.report);
  j["H3"]["c0"] = c.h3.c0;
  j["H3"]["ell"] = c.h3.ell;
  j["H3"]["c"] = c.h3.c;
  j["H3"]["stable_by_kernel"] = c.h3.stable_by_kernel;
  j["H3"]["leaves"] = c.h3.leaves;
  j["H3"]["cone_leaves"] = c.h3.cone_leaves;
  j["H4"] = report_json(c.h4);
  j["H4"]["fixed_point"] = {{"x", interval_json(c.pstar.x)},
                            {"y", interval_json(c.pstar.y)},
                            {"z", interval_json(c.pstar.z)},
                            {"validated", c.pstar.validated}};
  j["H5"] = report_json(c.h5);
  j["H5"]["rigorous"] = false;
  j["H5"]["net"] = {{"curves", c.net.curves}, {"samples", c.net.samples}, {"passed", c.net.passed},
                    {"cases", c.net.cases}};
  j["H5"]["strip_game"] = {{"reached", c.strip.reached}, {"hit_step", c.strip.hit_step},
                           {"hit_depth", c.strip.hit_depth}, {"itinerary", c.strip.itinerary}};
  j["subclaims"] = nlohmann::json::array();
  j["subclaims"].push_back({{"name", "I+ slices inside 2.4 < x < 3.8"},
                            {"verdict", c.subclaim.holds ? "PASSED" : "FAILED"},
                            {"lower_end", interval_json(c.subclaim.lower)},
                            {"upper_end", interval_json(c.subclaim.upper)}});
  j["overall"] = verdict_name(c.overall);
  return j.dump(2);
}

}  // namespace blender

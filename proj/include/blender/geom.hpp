#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "blender/interval.hpp"

namespace blender {

using Vec3 = std::array<double, 3>;
using IVec3 = std::array<Interval, 3>;
using Mat3 = std::array<Vec3, 3>;
using IMat3 = std::array<IVec3, 3>;

struct IBox3 {
  IVec3 c;

  static IBox3 of(Interval x, Interval y, Interval z) { return IBox3{{x, y, z}}; }
  static IBox3 point(const Vec3& p) { return of(p[0], p[1], p[2]); }
  const Interval& operator[](int i) const { return c[i]; }
  Interval& operator[](int i) { return c[i]; }
  Vec3 mid() const { return {c[0].mid(), c[1].mid(), c[2].mid()}; }
  bool subset_of(const IBox3& o) const;
  bool disjoint(const IBox3& o) const;
  double max_width() const;
};

// Smallest box containing both.
IBox3 join(const IBox3& a, const IBox3& b);

IVec3 to_ivec(const Vec3& v);
IVec3 mul(const IMat3& m, const IVec3& v);
IMat3 to_imat(const Mat3& m);
Vec3 mul(const Mat3& m, const Vec3& v);

// |v|_* = max(|u|, sqrt(v^2 + w^2)); the norm the cone estimates are stated in.
double star_norm(const Vec3& v);
Interval star_norm(const IVec3& v);
double euclid_norm(const Vec3& v);
Interval euclid_norm(const IVec3& v);

enum class ConeKind { Unstable, StrongUnstable, Stable };

// Cones around the coordinate axes, theta > 1:
//   Unstable:        theta |u| <= sqrt(v^2 + w^2)
//   StrongUnstable:  theta sqrt(u^2 + w^2) <= |v|
//   Stable:          theta sqrt(v^2 + w^2) <= |u|
struct Cone {
  ConeKind kind;
  double theta;
};

Cone make_cone(ConeKind kind, double theta);
std::string cone_name(ConeKind kind);

bool cone_contains(const Cone& cone, const Vec3& v);

// Rigorous test that every image vector of the enclosure lies in the cone
// with aperture widened to theta + margin (so strictly inside the original).
bool ivec_in_cone(const Cone& cone, const IVec3& w, double margin);

struct ConeNet {
  int directions = 64;  // arcs of the angular parameter
  int slices = 4;       // slices of the radial / axial parameter
};

// Interval cover of the normalized cross-section of a cone.
// boundary_only restricts convex nappes to their boundary circle.
std::vector<IVec3> cone_cover(const Cone& cone, const ConeNet& net, bool boundary_only);

// Checks M(src \ 0) inside the interior of dst for every matrix in M.
bool cone_mapped_into_interior(const Cone& src, const IMat3& m, const Cone& dst, double margin,
                               const ConeNet& net = {});

// Lower bound of |M v|_* / |v|_* over src; a value > 1 certifies expansion.
double cone_min_expansion(const Cone& src, const IMat3& m, const ConeNet& net = {});

// Interval inverse of a 3x3 interval matrix via the adjugate; throws when the
// determinant enclosure contains zero.
IMat3 inverse(const IMat3& m);

enum class LeafStatus { Certified, Unresolved };

struct SubdivisionResult {
  std::vector<IBox3> certified;
  std::vector<IBox3> unresolved;
  int max_depth_reached = 0;
};

// Adaptive bisection. Each level halves every axis enabled in axis_mask
// (an octant split when all three are enabled). A leaf is kept as certified
// as soon as the predicate holds, and as unresolved at max_depth.
SubdivisionResult subdivide(const IBox3& box, const std::function<bool(const IBox3&)>& predicate,
                            int max_depth, std::array<bool, 3> axis_mask = {true, true, true});

}  // namespace blender

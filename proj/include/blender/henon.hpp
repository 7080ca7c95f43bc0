#pragma once

#include <string>

#include "blender/geom.hpp"

namespace blender {

// Standard:  (x, y, z) -> (xi x + y, mu + y^2 + kappa x^2 + eta x y, y)
// Conjugate: (x, y, z) -> (y, mu + y^2 + kappa z^2, xi z + y)
// The two agree under the x <-> z swap when eta = 0.
enum class HenonForm { Standard, Conjugate };

struct HenonParams {
  HenonForm form = HenonForm::Conjugate;
  double mu = -9.9;
  double kappa = 5e-5;
  double xi = 1.185;
  double eta = 0.0;
};

void validate(const HenonParams& p);
std::string form_name(HenonForm f);
HenonForm parse_form(const std::string& s);

Vec3 henon_map(const HenonParams& p, const Vec3& v);
IVec3 henon_map(const HenonParams& p, const IVec3& v);
Mat3 henon_jacobian(const HenonParams& p, const Vec3& v);
IMat3 henon_jacobian(const HenonParams& p, const IVec3& v);

// The x <-> z coordinate swap.
Vec3 swap_xz(const Vec3& v);

// Optional C1-small field added to the map: offset + linear * p.
struct AffinePerturbation {
  Vec3 offset{0, 0, 0};
  Mat3 linear{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
  bool active() const;
};

// The map the blender box is certified for, always in the coordinates of the
// conjugate form: (x, y, z) -> (y, mu + y^2 + kappa z^2 + eta y z, xi z + y) + perturbation.
// A standard-form family with eta != 0 lands here after the coordinate swap.
struct BlenderMap {
  double mu = -9.9, kappa = 5e-5, xi = 1.185, eta = 0.0;
  AffinePerturbation pert;

  static BlenderMap from(const HenonParams& p);

  Vec3 operator()(const Vec3& v) const;
  IVec3 operator()(const IVec3& v) const;
  Mat3 jacobian(const Vec3& v) const;
  IMat3 jacobian(const IVec3& v) const;
  // First Jacobian column vanishes identically (the endomorphism limit).
  bool kernel_along_x() const;
};

struct FixedPoint {
  Interval x, y, z;
  bool validated = false;
  std::string method;
};

// Saddle fixed point inside the box with 2.4 < y < 3.8. For the unperturbed
// family: root of (1 + kappa/(xi-1)^2 - eta/(xi-1)) y^2 - y + mu = 0 by
// bisection, then interval Newton; z = -y/(xi-1), x = y. With a perturbation a
// Krawczyk step on F(p) - p is used instead. Throws if no root is bracketed.
FixedPoint fixed_point_Pstar(const BlenderMap& f);
FixedPoint fixed_point_Pstar(const HenonParams& p);

}  // namespace blender

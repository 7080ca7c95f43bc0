#include <doctest.h>

#include <cmath>
#include <random>

#include "blender/henon.hpp"

using namespace blender;

namespace {

HenonParams conj(double mu, double kappa = 5e-5, double xi = 1.185) {
  return {HenonForm::Conjugate, mu, kappa, xi, 0.0};
}

// y* from the quadratic (1 + kappa/(xi-1)^2) y^2 - y + mu = 0, larger root.
long double quadratic_ystar(long double mu, long double kappa, long double xi) {
  long double a = 1 + kappa / ((xi - 1) * (xi - 1));
  return (1 + std::sqrt(1 - 4 * a * mu)) / (2 * a);
}

}  // namespace

TEST_CASE("map evaluation") {
  Vec3 r = henon_map(conj(-9.5), Vec3{0, 0, 0});
  CHECK(r == Vec3{0, -9.5, 0});
  r = henon_map(conj(-9.5), Vec3{1, 2, -10});
  CHECK(r[0] == doctest::Approx(2));
  CHECK(r[1] == doctest::Approx(-5.495).epsilon(1e-14));
  CHECK(r[2] == doctest::Approx(-9.85).epsilon(1e-14));
  HenonParams s{HenonForm::Standard, -9.5, 5e-5, 1.185, 0.01};
  r = henon_map(s, Vec3{1, 2, 0});
  CHECK(r[0] == doctest::Approx(3.185).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(-5.47995).epsilon(1e-14));
  CHECK(r[2] == doctest::Approx(2));
  HenonParams bad = conj(-9.5);
  bad.eta = 0.1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  CHECK_THROWS_AS(parse_form("sideways"), std::invalid_argument);
}

TEST_CASE("interval evaluation encloses sampled images") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0, 1);
  HenonParams p{HenonForm::Standard, -9.7, 5e-5, 1.185, 0.002};
  for (int trial = 0; trial < 200; ++trial) {
    IVec3 box{Interval::hull(-4 + 8 * u(gen), -4 + 8 * u(gen)), Interval::hull(-4 + 8 * u(gen), -4 + 8 * u(gen)),
              Interval::hull(-40 * u(gen), -40 * u(gen))};
    IVec3 img = henon_map(p, box);
    IMat3 jac = henon_jacobian(p, box);
    for (int k = 0; k < 10; ++k) {
      Vec3 v{box[0].lo() + u(gen) * box[0].width(), box[1].lo() + u(gen) * box[1].width(),
             box[2].lo() + u(gen) * box[2].width()};
      Vec3 w = henon_map(p, v);
      Mat3 j = henon_jacobian(p, v);
      for (int c = 0; c < 3; ++c) {
        CHECK(img[c].contains(w[c]));
        for (int d = 0; d < 3; ++d) CHECK(jac[c][d].contains(j[c][d]));
      }
    }
  }
}

TEST_CASE("Jacobian of the conjugate form") {
  Mat3 j = henon_jacobian(conj(-9.9), Vec3{0.7, 3, -10});
  CHECK(j[0] == Vec3{0, 1, 0});
  CHECK(j[1][0] == 0);
  CHECK(j[1][1] == doctest::Approx(6));
  CHECK(j[1][2] == doctest::Approx(-0.001));
  CHECK(j[2] == Vec3{0, 1, 1.185});
  CHECK(mul(j, Vec3{1, 0, 0}) == Vec3{0, 0, 0});
  Vec3 v = mul(j, Vec3{0, 1, 0});
  CHECK(v[0] == 1);
  CHECK(v[1] == doctest::Approx(6));
  CHECK(v[2] == 1);
  CHECK(BlenderMap::from(conj(-9.9)).kernel_along_x());
}

TEST_CASE("coordinate swap") {
  CHECK(swap_xz({1, 2, 3}) == Vec3{3, 2, 1});
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    Vec3 v{n(gen), n(gen), n(gen)};
    CHECK(swap_xz(swap_xz(v)) == v);
  }
  // With eta = 0 the standard form is the conjugate form seen through the swap.
  HenonParams s{HenonForm::Standard, -9.9, 5e-5, 1.185, 0.0};
  for (int i = 0; i < 100; ++i) {
    Vec3 v{n(gen), n(gen), n(gen)};
    Vec3 a = swap_xz(henon_map(s, swap_xz(v))), b = henon_map(conj(-9.9), v);
    for (int c = 0; c < 3; ++c) CHECK(a[c] == doctest::Approx(b[c]).epsilon(1e-14));
  }
}

TEST_CASE("fixed point P*") {
  FixedPoint fp = fixed_point_Pstar(conj(-9.5, 0.0));
  CHECK(fp.validated);
  CHECK(fp.y.contains(double((1 + std::sqrt(39.0L)) / 2)));
  CHECK(fp.z.mid() == doctest::Approx(-19.5811).epsilon(1e-5));

  fp = fixed_point_Pstar(conj(-9.5));
  long double ys = quadratic_ystar(-9.5L, 5e-5L, 1.185L);
  CHECK(fp.y.mid() == doctest::Approx(3.61943).epsilon(1e-5));
  CHECK(fp.z.mid() == doctest::Approx(-19.5645).epsilon(1e-5));
  CHECK(std::fabs(fp.y.mid() - double(ys)) < 1e-12);
  CHECK(fp.y.width() < 1e-10);
  // x* = y* = mu + y*^2 + kappa z*^2 = (1 - xi) z* as interval identities.
  Interval rhs = Interval(-9.5) + sqr(fp.y) + Interval(5e-5) * sqr(fp.z);
  CHECK_FALSE(rhs.disjoint(fp.y));
  CHECK_FALSE((Interval(1 - 1.185) * fp.z).disjoint(fp.y));
  CHECK_FALSE(fp.x.disjoint(fp.y));

  CHECK_THROWS(fixed_point_Pstar(conj(-20.0)));
}

TEST_CASE("fixed point bounds over the parameter box") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> mu(-10, -9), kappa(0, 1e-4), xi(1.18, 1.19);
  for (int i = 0; i < 100; ++i) {
    FixedPoint fp = fixed_point_Pstar(conj(mu(gen), kappa(gen), xi(gen)));
    CHECK(fp.y.interior_of(Interval(2.4, 3.8)));
    CHECK(fp.z.interior_of(Interval(-21.2, -12.6)));
    CHECK(fp.y.width() < 1e-10);
  }
}

TEST_CASE("perturbed map uses the Krawczyk step") {
  BlenderMap f = BlenderMap::from(conj(-9.9));
  f.pert.offset = {1e-4, -2e-4, 1e-4};
  f.pert.linear[1][2] = 1e-5;
  FixedPoint fp = fixed_point_Pstar(f);
  CHECK(fp.validated);
  Vec3 p{fp.x.mid(), fp.y.mid(), fp.z.mid()};
  Vec3 q = f(p);
  for (int c = 0; c < 3; ++c) CHECK(std::fabs(q[c] - p[c]) < 1e-9);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "blender/renorm.hpp"

using namespace blender;

namespace {

double num(const Real& r) { return to_double(r); }

// Successive drift records of the reference neutral search, last `count` of them.
std::vector<NeutralPair> records(long n0, long nmax, size_t count) {
  NeutralQuery q;
  q.eps = 0.6;
  q.N0 = int(n0);
  q.Nmax = nmax;
  std::vector<NeutralPair> r = neutral_records(q);
  if (r.size() > count) r.erase(r.begin(), r.end() - long(count));
  return r;
}

}  // namespace

TEST_CASE("rescaling data for m = 2, n = 3") {
  CycleConfig cfg;
  PrecisionScope scope(256);
  RenormData d = renorm_data(cfg, 2, 3, Real(0));
  CHECK(num(d.sx) == doctest::Approx(1 / (1.728 * 9)).epsilon(1e-12));
  CHECK(num(d.sx) == doctest::Approx(0.0643004).epsilon(1e-6));
  CHECK(num(d.sy) == doctest::Approx(0.00413454).epsilon(1e-6));
  CHECK(num(d.y0) == doctest::Approx(0.5787037).epsilon(1e-7));
  Point<Real> o = d.psi({Real(0), Real(0), Real(0)});
  CHECK(num(o[0]) == 1.0);
  CHECK(num(o[1]) == doctest::Approx(0.5787037).epsilon(1e-7));
  CHECK(num(o[2]) == 1.0);

  CHECK(num(d.mu_vec[0]) == doctest::Approx(-0.0025));
  CHECK(num(d.mu_vec[1]) == doctest::Approx(0.5762037).epsilon(1e-7));
  CHECK(num(d.mu_vec[2]) == doctest::Approx(-0.0025));
  CHECK(num(d.nu_vec[0]) == doctest::Approx(-0.00398107).epsilon(1e-5));
  CHECK(num(d.nu_vec[1]) == doctest::Approx(1.0 / 9).epsilon(1e-12));
  CHECK(num(d.nu_vec[2]) == doctest::Approx(1.0 / 81 - 0.001).epsilon(1e-12));

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) {
    Point<Real> p{Real(u(gen)), Real(u(gen)), Real(u(gen))};
    Point<Real> back = d.psi_inverse(d.psi(p));
    for (int c = 0; c < 3; ++c) CHECK(num(Real(back[c] - p[c])) == doctest::Approx(0).scale(1e-60));
  }
}

TEST_CASE("precision policy") {
  CycleConfig cfg;
  CHECK(default_precision_bits(cfg, 0, 0) == 128);
  unsigned b = default_precision_bits(cfg, 807, 770);
  CHECK(b == unsigned(128 + std::ceil(1577 * std::log2(20.0))));
  CHECK(minimum_precision_bits(cfg, 807, 770) < b);
  {
    PrecisionScope low(64);
    CHECK_THROWS_AS(renorm_data(cfg, 807, 770, Real(0)), std::range_error);
  }
}

TEST_CASE("orbit composition matches the closed form") {
  CycleConfig cfg;
  for (auto [m, n] : {std::pair{42, 40}, std::pair{64, 61}}) {
    PrecisionScope scope(default_precision_bits(cfg, m, n));
    int count = 0;
    for (double x : {-1.0, -0.3, 0.4, 1.0})
      for (double y : {-1.0, -0.2, 0.5, 0.9, 1.0})
        for (double z : {-1.0, 0.0, 0.6, 1.0})
          for (double mu : {-0.5, 0.5}) {
            if (count >= 100) break;
            Point<Real> a = return_map(cfg, m, n, mu, {x, y, z});
            Point<Real> b = return_map_closed_form(cfg, m, n, Real(mu), {Real(x), Real(y), Real(z)});
            for (int c = 0; c < 3; ++c) CHECK(num(Real(boost::multiprecision::fabs(a[c] - b[c]))) < 1e-20);
            ++count;
          }
    CHECK(count == 100);
  }
}

TEST_CASE("x-coefficient of the return map") {
  CycleConfig cfg;
  cfg.coeffs.alpha[0] = 0.3;
  cfg.coeffs.beta[0] = 0.2;
  const int m = 42, n = 40;
  PrecisionScope scope(default_precision_bits(cfg, m, n));
  Point<Jet<Real>> f = return_map_jet(cfg, m, n, 0.0, {0.1, 0.2, -0.3});
  using boost::multiprecision::pow;
  const EigenTuple& e = cfg.eig;
  const TransitionCoeffs& k = cfg.coeffs;
  Real ln = pow(Real(e.lambda), n);
  Real xi = k.gamma[0] * k.a[2] * ln * pow(Real(e.zeta_t), m);
  Real expect = xi + ln * pow(Real(e.lambda_t), m) * k.a[0] * k.alpha[0] + ln * pow(Real(e.sigma_t), m) * k.a[1] * k.beta[0];
  CHECK(num(Real((f[0].d[0] - expect) / expect)) == doctest::Approx(0).scale(1e-40));
}

TEST_CASE("limit map and normal form") {
  TransitionCoeffs k;
  Point<double> g = limit_map(k, 1.185, -9.5, {1, 1, 0});
  CHECK(g[0] == doctest::Approx(2.185));
  CHECK(g[1] == doctest::Approx(-7.095775).epsilon(1e-12));
  CHECK(g[2] == doctest::Approx(1));
  Kappas kp = kappas(k, 1.185);
  CHECK(std::fabs(kp.kappa1 - 1.404225) < 1e-12);
  CHECK(kp.kappa2 == 0.0);

  TransitionCoeffs unit;
  unit.b[3] = 0.7;
  Kappas ku = kappas(unit, 1.0);
  CHECK(ku.kappa1 == doctest::Approx(1.0));
  CHECK(ku.kappa2 == doctest::Approx(0.7));

  Point<double> o = normal_form_map(1.3, kp, -0.25, {0, 0, 0});
  CHECK(o == Point<double>{0, -0.25, 0});
  CHECK(normal_coordinates(k, {0.3, -0.2, 0.9}) == Point<double>{0.3, -0.2, 0.9});

  TransitionCoeffs zero_a = k;
  zero_a.a[2] = 0;
  CHECK_THROWS_AS(limit_map(zero_a, 1.185, 0.0, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("rescaling conjugates the limit map to the normal form") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> c(0.5, 2.0), u(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    TransitionCoeffs k;
    k.a = {c(gen), c(gen), c(gen)};
    k.b = {c(gen), c(gen), c(gen), u(gen)};
    k.c = {c(gen), c(gen), 0};
    k.beta = {0, c(gen), 0};
    double xi = c(gen), mu = u(gen);
    Point<double> p{u(gen), u(gen), u(gen)};
    Point<double> lhs = normal_coordinates(k, limit_map(k, xi, mu, p));
    Point<double> rhs = normal_form_map(xi, kappas(k, xi), normal_parameter(k, mu), normal_coordinates(k, p));
    for (int i = 0; i < 3; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
  }
}

TEST_CASE("limit Jacobian matches finite differences") {
  TransitionCoeffs k;
  k.b[3] = 0.4;
  Point<double> p{0.3, -0.6, 0.2};
  auto j = limit_jacobian(k, 1.185, p);
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Point<double> a = p, b = p;
    a[i] += h;
    b[i] -= h;
    Point<double> fa = limit_map(k, 1.185, 0.1, a), fb = limit_map(k, 1.185, 0.1, b);
    for (int r = 0; r < 3; ++r) CHECK(j[r][i] == doctest::Approx((fa[r] - fb[r]) / (2 * h)).epsilon(1e-8).scale(1));
  }
}

TEST_CASE("doubling the precision keeps the digits") {
  CycleConfig cfg;
  const int m = 64, n = 61;
  unsigned b = default_precision_bits(cfg, m, n);
  Point<Real> lo = return_map(cfg, m, n, 0.3, {0.2, -0.4, 0.7}, b);
  Point<Real> hi = return_map(cfg, m, n, 0.3, {0.2, -0.4, 0.7}, 2 * b);
  PrecisionScope scope(2 * b);
  for (int c = 0; c < 3; ++c) {
    Real rel = boost::multiprecision::fabs((lo[c] - hi[c]) / hi[c]);
    CHECK(rel < boost::multiprecision::pow(Real(2), -int(b) / 2));
  }
}

TEST_CASE("return map converges to the limit map along neutral records") {
  CycleConfig cfg;
  std::vector<NeutralPair> sched = records(1, 200, 4);
  REQUIRE(sched.size() == 4);
  GridSpec g;
  g.points_per_axis = 5;
  g.mu_points = 3;
  ConvergenceReport r = convergence_report(cfg, 1.185, sched, g);
  REQUIRE(r.rows.size() == 4);
  for (size_t i = 1; i < r.rows.size(); ++i) {
    CHECK(r.rows[i].d0 < r.rows[i - 1].d0);
    CHECK(r.rows[i].d1 < r.rows[i - 1].d1);
  }
  // At the origin the distance is the mismatch of the neutral value: |F(0)| -> |G(0)|.
  for (const ConvergenceRow& row : r.rows) CHECK(row.d0 >= 0.9 * std::fabs(row.value - 1.185));
  CHECK(convergence_csv(r).rfind("m,n,", 0) == 0);
}

TEST_CASE("fitted normal-form coefficients") {
  CycleConfig cfg;
  Kappas fit = fit_kappas(cfg, 807, 770, 5);
  Kappas exact = kappas(cfg.coeffs, 1.185);
  CHECK(fit.kappa1 == doctest::Approx(exact.kappa1).epsilon(1e-3));
  CHECK(std::fabs(fit.kappa2 - exact.kappa2) < 1e-3);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "blender/cycle.hpp"

using namespace blender;

TEST_CASE("reference configuration validates") {
  CycleConfig cfg;
  Diagnostics d = validate_config(cfg);
  CHECK(d.ok());
  CHECK(d.find("ichi")->ok);
  CHECK(d.find("no such check") == nullptr);
  CHECK(cfg.eig.ordered());
}

TEST_CASE("validation failures name the condition") {
  CycleConfig s2;
  s2.eig.sigma = 2.0;
  Diagnostics d = validate_config(s2);
  CHECK_FALSE(d.ok());
  CHECK_FALSE(d.find("ichi")->ok);

  CycleConfig b;
  b.coeffs.beta[1] = 0;
  Diagnostics db = validate_config(b);
  CHECK_FALSE(db.ok());
  CHECK_FALSE(db.find("beta2*gamma1!=0")->ok);
  CHECK(db.summary().find("beta2*gamma1!=0") != std::string::npos);

  CycleConfig g;
  g.coeffs.gamma[1] = 0.5;
  CHECK_FALSE(validate_config(g).find("gamma2=0")->ok);

  CycleConfig r;
  r.rho = 0.6;
  CHECK_FALSE(validate_config(r).ok());

  CycleConfig h;
  h.hot = HigherOrderSpec::small_cubic(1e-3);
  CHECK(validate_config(h).ok());
  h.hot.h_tilde[0].terms.push_back({0.1, 1, 0, 0});  // linear term in a higher-order part
  CHECK_FALSE(validate_config(h).find("higher-order terms")->ok);
}

TEST_CASE("local linear steps") {
  CycleConfig cfg;
  Point<double> q = local_step(Chart::Q, cfg, Point<double>{0.5, 0.5, 0.5});
  CHECK(q[0] == doctest::Approx(0.05));
  CHECK(q[1] == doctest::Approx(0.6));
  CHECK(q[2] == doctest::Approx(0.0792445).epsilon(1e-6));
  CHECK(local_step(Chart::P, cfg, Point<double>{1, 0, 0}) == Point<double>{0.05, 0, 0});
  Point<double> y = local_step(Chart::Q, cfg, Point<double>{0, 1, 0});
  CHECK(y[0] == 0);
  CHECK(y[1] == doctest::Approx(1.2));
  CHECK(y[2] == 0);
}

TEST_CASE("transitions") {
  CycleConfig cfg;
  Point<double> zero{0, 0, 0};
  CHECK(transition(Transition::T1, cfg, Point<double>{0, 1, 0}, zero) == Point<double>{1, 0, 0});
  CHECK(transition(Transition::T2, cfg, Point<double>{0, 1, 1}, zero) == Point<double>{1, 0, 1});
  Point<double> r = transition(Transition::T1, cfg, Point<double>{0.01, 1.02, 0.003}, zero);
  CHECK(r[0] == doctest::Approx(1.023));
  CHECK(r[1] == doctest::Approx(0.02));
  CHECK(r[2] == doctest::Approx(0.01));
  CHECK_THROWS_AS(transition(Transition::T1, cfg, Point<double>{0.2, 1, 0}, zero), DomainError);
  CHECK_NOTHROW(transition(Transition::T1, cfg, Point<double>{0.2, 1, 0}, zero, false));
}

TEST_CASE("transition Jacobians from jets match finite differences") {
  CycleConfig cfg;
  cfg.hot = HigherOrderSpec::small_cubic(0.3);
  PrecisionScope scope(128);
  Point<Real> zero{Real(0), Real(0), Real(0)};
  Point<Real> p{Real(0.01), Real(1.02), Real(-0.015)};
  Point<Jet<Real>> pj;
  for (int i = 0; i < 3; ++i) pj[i] = Jet<Real>::variable(p[i], i);
  Point<Jet<Real>> out = transition(Transition::T1, cfg, pj, zero);
  Real h("1e-20");
  for (int i = 0; i < 3; ++i) {
    Point<Real> a = p, b = p;
    a[i] += h;
    b[i] -= h;
    Point<Real> fa = transition(Transition::T1, cfg, a, zero), fb = transition(Transition::T1, cfg, b, zero);
    for (int c = 0; c < 3; ++c) {
      Real fd = (fa[c] - fb[c]) / (2 * h);
      CHECK(to_double(Real(fd - out[c].d[i])) == doctest::Approx(0).epsilon(1e-12).scale(1));
    }
  }
}

TEST_CASE("bumps") {
  CycleConfig cfg;
  CHECK(bump_B(cfg, {0, 0, 0}) == 1.0);
  CHECK(bump_B(cfg, {0.1, 0, 0}) == 0.0);
  CHECK(bump_B(cfg, {0.0, -0.2, 0}) == 0.0);
  CHECK(bump_B(cfg, {0.04, 0.04, 0.04}) == 1.0);
  CHECK(bump_Bn(cfg, 3, Point<double>{0, 0, 0}) == doctest::Approx(0.001));
  for (BumpProfile k : {BumpProfile::Smooth, BumpProfile::Quintic}) {
    CHECK(parse_profile(profile_name(k)) == k);
    double prev = 1.0;
    for (int i = 0; i <= 100; ++i) {
      double t = 0.5 * i / 100.0;
      double v = bump_profile(k, 1.0 / 3.0, 0.5, t);
      CHECK(v <= prev + 1e-15);
      CHECK(v >= 0.0);
      CHECK(bump_profile(k, 1.0 / 3.0, 0.5, -t) == v);
      prev = v;
      double h = 1e-7;
      if (t > h && t < 0.5 - h) {
        double fd = (bump_profile(k, 1.0 / 3.0, 0.5, t + h) - bump_profile(k, 1.0 / 3.0, 0.5, t - h)) / (2 * h);
        CHECK(bump_profile_derivative(k, 1.0 / 3.0, 0.5, t) == doctest::Approx(fd).epsilon(1e-5).scale(1));
      }
    }
  }
}

TEST_CASE("theta_n") {
  CycleConfig cfg;
  Point<double> x = theta_n_apply(cfg, 3, Point<double>{0, 1, 0});
  CHECK(x[0] == doctest::Approx(0.001));
  CHECK(x[1] == 1);
  CHECK(x[2] == 0);
  double half = 0.5 * std::pow(cfg.eig.zeta, 3);
  Point<double> outside{0, 1, 1.01 * half};
  CHECK(theta_n_apply(cfg, 3, outside) == outside);
  // The local unstable arc inside the plateau moves to x = lambda^n.
  for (int i = -10; i <= 10; ++i) {
    double s = i / 10.0 * std::pow(cfg.eig.zeta, 3) / 3.0 * 0.999;
    Point<double> r = theta_n_apply(cfg, 3, Point<double>{0, 1 + s, 0});
    CHECK(r[0] == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(r[1] == 1 + s);
  }
}

TEST_CASE("orbit composition") {
  CycleConfig cfg;
  PrecisionScope scope(128);
  Shifts<Real> zero;
  OrbitOptions off;
  off.check_domains = false;
  // m = n = 0: just the two transitions.
  Point<Real> p{Real(0.01), Real(1.02), Real(0.003)};
  OrbitResult<Real> r = compose_return_orbit(cfg, zero, 0, 0, p, off);
  Point<Real> t1 = transition(Transition::T1, cfg, p, zero.nu, false);
  Point<Real> t2 = transition(Transition::T2, cfg, t1, zero.mu, false);
  for (int c = 0; c < 3; ++c) CHECK(r.point[c] == t2[c]);
  REQUIRE(r.trace.size() == 5);
  CHECK(r.trace[0].name == "start");

  // Powers and step-by-step iteration agree; stage sizes follow the eigenvalues.
  const int m = 6, n = 5;
  Point<Real> q{Real(0.001), Real(1.0), Real(0.002)};
  OrbitOptions step = off;
  step.stepwise = true;
  OrbitResult<Real> a = compose_return_orbit(cfg, zero, m, n, q, off);
  OrbitResult<Real> b = compose_return_orbit(cfg, zero, m, n, q, step);
  for (int c = 0; c < 3; ++c) CHECK(to_double(Real(a.point[c] - b.point[c])) == doctest::Approx(0).scale(1e-30));
  const Point<Real>& after_q = a.trace[1].point;
  CHECK(to_double(after_q[0]) == doctest::Approx(0.001 * std::pow(0.1, n)));
  CHECK(to_double(after_q[1]) == doctest::Approx(std::pow(1.2, n)));
  CHECK(to_double(after_q[2]) == doctest::Approx(0.002 * std::pow(cfg.eig.zeta, n)));
}

TEST_CASE("orbit reports the failing stage") {
  CycleConfig cfg;
  PrecisionScope scope(128);
  Shifts<Real> zero;
  Point<Real> far{Real(0.5), Real(1.0), Real(0.0)};
  try {
    compose_return_orbit(cfg, zero, 1, 0, far);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("T1") != std::string::npos);
  }
}

TEST_CASE("config JSON round trip and field diagnostics") {
  CycleConfig cfg;
  cfg.hot = HigherOrderSpec::small_cubic(0.01);
  cfg.profile = BumpProfile::Quintic;
  cfg.eig.sigma = 1.25;
  CycleConfig back = config_from_json(config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));

  nlohmann::json j = config_to_json(cfg);
  j["coefficients"]["b"] = {1, 2};
  try {
    config_from_json(j);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("coefficients.b") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"eigenvalues", {{"sigma", "big"}}}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"colour", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), std::invalid_argument);
}

TEST_CASE("precision scope") {
  unsigned before = Real::default_precision();
  {
    PrecisionScope s(300);
    Real x(1);
    CHECK(x.precision() >= 90);  // decimal digits for 300 bits
  }
  CHECK(Real::default_precision() == before);
}

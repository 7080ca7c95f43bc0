#include <doctest.h>

#include <cmath>
#include <random>

#include "blender/search.hpp"

using namespace blender;

TEST_CASE("region products for the reference tuple") {
  EigenTuple e = EigenTuple::reference();
  RegionCheck r = check_region_P(e);
  CHECK(r.inside);
  // Direct evaluation with k = ln 10 / ln 9.
  double k = std::log(10.0) / std::log(9.0);
  CHECK(k == doctest::Approx(1.04795).epsilon(1e-5));
  double ichi = std::pow(3.0 * 9.0, k) * 1.2 * e.zeta * e.zeta;
  double ni = std::pow(9.0 / 27.0, k) / 1.2;
  double san = std::pow(0.05 * 3.0, k) * 1.2;
  CHECK(r.ichi() == doctest::Approx(ichi).epsilon(1e-12));
  CHECK(r.ni() == doctest::Approx(ni).epsilon(1e-12));
  CHECK(r.san() == doctest::Approx(san).epsilon(1e-12));
  CHECK(r.ichi() == doctest::Approx(0.953).epsilon(1e-3));
  CHECK(r.ni() == doctest::Approx(0.263).epsilon(2e-3));
  CHECK(r.san() == doctest::Approx(0.164).epsilon(2e-3));

  e.sigma = 2.0;
  RegionCheck r2 = check_region_P(e);
  CHECK_FALSE(r2.inside);
  CHECK(r2.ichi() == doctest::Approx(1.59).epsilon(1e-2));
}

TEST_CASE("san condition is monotone in lambda_t") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  EigenTuple e = EigenTuple::reference();
  for (int i = 0; i < 200; ++i) {
    double a = u(gen), b = u(gen);
    EigenTuple lo = e, hi = e;
    lo.lambda_t = std::min(a, b);
    hi.lambda_t = std::max(a, b);
    CHECK(check_region_P(lo).log_san <= check_region_P(hi).log_san);
  }
}

TEST_CASE("L and R bounds") {
  LRBounds b = lr_bounds(0.1, 0.15848931924611134, 3.0, 9.0);
  CHECK(b.L == doctest::Approx(-1.1513).epsilon(1e-4));
  CHECK(b.R == doctest::Approx(0.23026).epsilon(1e-4));
  CHECK(std::log(1.2) < b.R);
  // S = 1/3, T = 2/3: R vanishes.
  double lambda = 0.1, zt = 8.0;
  LRBounds c = lr_bounds(lambda, std::pow(lambda, 2.0 / 3.0), std::pow(zt, 1.0 / 3.0), zt);
  CHECK(c.R == doctest::Approx(0).scale(1));
}

TEST_CASE("(ichi) and (ni) agree with L < log sigma < R") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0, 1);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    EigenTuple e;
    e.lambda = 0.01 + 0.9 * u(gen);
    e.zeta = e.lambda + (1 - e.lambda) * u(gen);
    e.zeta_t = 1.5 + 20 * u(gen);
    e.sigma_t = 1 + (e.zeta_t - 1) * u(gen);
    e.sigma = std::exp(2 * u(gen));
    e.lambda_t = u(gen);
    RegionCheck r = check_region_P(e);
    LRBounds b = lr_bounds(e.lambda, e.zeta, e.sigma_t, e.zeta_t);
    double ls = std::log(e.sigma);
    if (std::min({std::fabs(r.log_ichi), std::fabs(r.log_ni), std::fabs(ls - b.L), std::fabs(ls - b.R)}) < 1e-12)
      continue;
    ++checked;
    CHECK((r.log_ichi < 0 && r.log_ni < 0) == (b.L < ls && ls < b.R));
  }
  CHECK(checked > 9900);
}

TEST_CASE("S-T region") {
  CHECK(in_st_region(0.5, 0.8));
  CHECK_FALSE(in_st_region(0.2, 0.5));
  STSample s = sample_ST(200000, 4, 16);
  CHECK(std::fabs(s.area - 1.0 / 6.0) < 4 * s.std_error + 1e-9);
  CHECK(s.T_min > 2.0 / 3.0);
  CHECK(s.T_max < 1.0);
  CHECK(s.inv_T_min > 1.0);
  CHECK(s.inv_T_max < 1.5);
  CHECK(s.grid.size() == 16);
  STSample again = sample_ST(200000, 4, 16);
  CHECK(again.members == s.members);
  CHECK_THROWS(sample_ST(0, 1));
}

TEST_CASE("tuple construction") {
  TupleRequest r;
  r.zeta_t_anchor = 9.0;
  EigenTuple e = tuple_from_ST(r);
  EigenTuple ref = EigenTuple::reference();
  CHECK(e.lambda == ref.lambda);
  CHECK(e.zeta == doctest::Approx(ref.zeta).epsilon(1e-14));
  CHECK(e.sigma_t == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e.sigma == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(e.lambda_t == doctest::Approx(0.05).epsilon(1e-5));
  CHECK(check_region_P(e).inside);

  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  int built = 0;
  while (built < 500) {
    TupleRequest q;
    q.S = u(gen);
    q.T = u(gen);
    if (!in_st_region(q.S, q.T)) {
      CHECK_THROWS_AS(tuple_from_ST(q), std::invalid_argument);
      continue;
    }
    q.sigma_fraction = u(gen);
    q.lambda_t_fraction = u(gen);
    q.lambda_anchor = u(gen);
    q.zeta_t_anchor = 1.5 + 10 * u(gen);
    EigenTuple t = tuple_from_ST(q);
    ++built;
    CHECK(t.ordered());
    CHECK(check_region_P(t).inside);
    double invT = std::log(t.lambda) / std::log(t.zeta);
    CHECK(invT > 1.0);
    CHECK(invT < 1.5);
  }
}

TEST_CASE("neutral pairs") {
  NeutralQuery q;
  NeutralResult r = find_neutral_pairs(q);
  bool found = false;
  for (const NeutralPair& p : r.pairs)
    if (p.m == 42 && p.n == 40) {
      found = true;
      // Oracle: c lambda^n zeta_t^m evaluated directly.
      double v = std::pow(0.1, 40) * std::pow(9.0, 42);
      CHECK(p.value == doctest::Approx(v).epsilon(1e-12));
      CHECK(p.value == doctest::Approx(1.19725).epsilon(1e-5));
      CHECK(std::fabs(p.err - 0.01225) < 1e-5);
      CHECK(p.drift < 1);
    }
  CHECK(found);
  for (size_t i = 1; i < r.pairs.size(); ++i) CHECK(r.pairs[i - 1].err <= r.pairs[i].err);
  for (const NeutralPair& p : r.pairs) CHECK(reverify_pair(p, q));
}

TEST_CASE("rational dependence leaves an error floor") {
  NeutralQuery q;
  q.zeta_t = 10.0;
  q.eps = 0.01;
  q.Nmax = 500;
  NeutralResult r = find_neutral_pairs(q);
  CHECK(r.pairs.empty());
  CHECK(r.best_err == doctest::Approx(0.185).epsilon(1e-9));
  CHECK(r.note.find("rational dependence") != std::string::npos);
}

TEST_CASE("target on the lattice") {
  NeutralQuery q;
  q.xi = std::pow(0.1, 40) * std::pow(9.0, 42);
  q.eps = 1e-6;
  NeutralResult r = find_neutral_pairs(q);
  REQUIRE_FALSE(r.pairs.empty());
  CHECK(r.pairs[0].m == 42);
  CHECK(r.pairs[0].n == 40);
  CHECK(r.pairs[0].err < 1e-12);
}

TEST_CASE("record search matches the brute-force scan") {
  for (double xi : {1.185, 0.7, 2.5}) {
    for (double zt : {9.0, 7.3, 15.0}) {
      NeutralQuery q;
      q.xi = xi;
      q.zeta_t = zt;
      q.eps = xi / 2;
      q.N0 = 5;
      q.Nmax = 20000;
      std::vector<NeutralPair> a = neutral_records(q), b = neutral_records_brute(q);
      REQUIRE(a.size() == b.size());
      for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].n == b[i].n);
        CHECK(a[i].m == b[i].m);
      }
    }
  }
}

TEST_CASE("large search reaches small errors") {
  NeutralQuery q;
  q.Nmax = 10000;
  NeutralResult r = find_neutral_pairs(q);
  CHECK(r.best_err <= 1e-3);
  CHECK(neutral_csv(r.pairs).rfind("n,m,value,err,drift\n", 0) == 0);
}

TEST_CASE("bad neutral queries") {
  NeutralQuery q;
  q.lambda = 1.5;
  CHECK_THROWS_AS(find_neutral_pairs(q), std::invalid_argument);
  NeutralQuery q2;
  q2.Nmax = 0;
  CHECK_THROWS_AS(find_neutral_pairs(q2), std::invalid_argument);
}

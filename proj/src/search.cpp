#include "blender/search.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace blender {

STPoint st_of(const EigenTuple& e) {
  return {std::log(e.sigma_t) / std::log(e.zeta_t), std::log(e.zeta) / std::log(e.lambda)};
}

double sojourn_ratio(double lambda, double zeta_t) { return -std::log(lambda) / std::log(zeta_t); }

double RegionCheck::ichi() const { return std::exp(log_ichi); }
double RegionCheck::ni() const { return std::exp(log_ni); }
double RegionCheck::san() const { return std::exp(log_san); }

RegionCheck check_region_P(const EigenTuple& e) {
  RegionCheck r;
  double k = sojourn_ratio(e.lambda, e.zeta_t);
  double ls = std::log(e.sigma), lst = std::log(e.sigma_t), lzt = std::log(e.zeta_t);
  r.log_ichi = k * (lst + lzt) + ls + 2 * std::log(e.zeta);
  r.log_ni = k * (lzt - 3 * lst) - ls;
  r.log_san = k * (std::log(e.lambda_t) + lst) + ls;
  r.inside = r.log_ichi < 0 && r.log_ni < 0 && r.log_san < 0;
  return r;
}

LRBounds lr_bounds(double lambda, double zeta, double sigma_t, double zeta_t) {
  double ll = std::log(lambda);
  double S = std::log(sigma_t) / std::log(zeta_t), T = std::log(zeta) / ll;
  return {-ll * (1 - 3 * S), ll * (S + 1 - 2 * T)};
}

bool in_st_region(double S, double T) { return T > 1 - S && T > 0.5 * (S + 1); }

STSample sample_ST(size_t samples, uint64_t seed, int grid_cells) {
  if (samples == 0) throw std::invalid_argument("sample_ST needs at least one sample");
  STSample out;
  out.samples = samples;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (size_t i = 0; i < samples; ++i) {
    double S = u(gen), T = u(gen);
    if (!in_st_region(S, T)) continue;
    ++out.members;
    out.T_min = std::min(out.T_min, T);
    out.T_max = std::max(out.T_max, T);
    out.inv_T_min = std::min(out.inv_T_min, 1 / T);
    out.inv_T_max = std::max(out.inv_T_max, 1 / T);
  }
  double p = double(out.members) / double(samples);
  out.area = p;
  out.std_error = std::sqrt(p * (1 - p) / double(samples));
  if (grid_cells > 0) {
    out.grid.assign(grid_cells, std::vector<bool>(grid_cells, false));
    for (int it = 0; it < grid_cells; ++it)
      for (int is = 0; is < grid_cells; ++is)
        out.grid[it][is] = in_st_region((is + 0.5) / grid_cells, (it + 0.5) / grid_cells);
  }
  return out;
}

EigenTuple tuple_from_ST(const TupleRequest& r) {
  if (!(r.S > 0 && r.S < 1 && r.T > 0 && r.T < 1) || !in_st_region(r.S, r.T))
    throw std::invalid_argument("(S, T) lies outside the admissible region");
  if (!(r.lambda_anchor > 0 && r.lambda_anchor < 1)) throw std::invalid_argument("lambda anchor must lie in (0, 1)");
  if (!(r.zeta_t_anchor > 1)) throw std::invalid_argument("zeta_t anchor must exceed 1");
  if (!(r.sigma_fraction > 0 && r.sigma_fraction < 1) || !(r.lambda_t_fraction > 0 && r.lambda_t_fraction < 1))
    throw std::invalid_argument("fractions must lie in (0, 1)");
  EigenTuple e;
  e.lambda = r.lambda_anchor;
  e.zeta = std::pow(e.lambda, r.T);
  e.zeta_t = r.zeta_t_anchor;
  e.sigma_t = std::pow(e.zeta_t, r.S);
  LRBounds b = lr_bounds(e.lambda, e.zeta, e.sigma_t, e.zeta_t);
  double lo = std::max(0.0, b.L);
  e.sigma = std::exp(lo + r.sigma_fraction * (b.R - lo));
  // Third condition: k (log lambda_t + log sigma_t) + log sigma < 0.
  double k = sojourn_ratio(e.lambda, e.zeta_t);
  double log_lt_max = -std::log(e.sigma) / k - std::log(e.sigma_t);
  e.lambda_t = r.lambda_t_fraction * std::exp(log_lt_max);
  return e;
}

namespace {

struct Lattice {
  double k, kt, lz;  // k, k_tilde, log zeta_t
};

Lattice lattice(const NeutralQuery& q) {
  if (!(q.lambda > 0 && q.lambda < 1) || !(q.zeta_t > 1)) throw std::invalid_argument("need 0 < lambda < 1 < zeta_t");
  if (!(q.c > 0) || !(q.xi > 0)) throw std::invalid_argument("need c > 0 and xi > 0");
  if (!(q.eps > 0 && q.eps / q.xi < 1)) throw std::invalid_argument("need 0 < eps < xi");
  if (q.N0 < 0 || q.Nmax <= q.N0) throw std::invalid_argument("need 0 <= N0 < Nmax");
  double lz = std::log(q.zeta_t);
  return {-std::log(q.lambda) / lz, std::log(q.c / q.xi) / lz, lz};
}

// The pair for a given n with m the nearest integer to n k - k_tilde, evaluated in
// long double through the exponent of zeta_t.
NeutralPair pair_for(const NeutralQuery& q, const Lattice& L, long n) {
  long double target = (long double)n * L.k - L.kt;
  long m = std::lround((double)target);
  NeutralPair p;
  p.n = int(n);
  p.m = int(m);
  long double expo = (long double)m - target;  // value / xi = zeta_t^expo
  p.value = double(q.xi * std::exp((long double)L.lz * expo));
  p.err = std::fabs(p.value - q.xi);
  p.drift = double(std::fabs(expo));
  return p;
}

}  // namespace

NeutralResult find_neutral_pairs(const NeutralQuery& q) {
  Lattice L = lattice(q);
  NeutralResult r;
  r.best_err = std::numeric_limits<double>::infinity();
  for (long n = q.N0 + 1; n <= q.Nmax; ++n) {
    NeutralPair p = pair_for(q, L, n);
    if (p.m <= q.N0) continue;
    r.best_err = std::min(r.best_err, p.err);
    if (p.err < q.eps && p.drift < 1) r.pairs.push_back(p);
  }
  std::stable_sort(r.pairs.begin(), r.pairs.end(),
                   [](const NeutralPair& a, const NeutralPair& b) { return a.err < b.err; });
  if (r.pairs.empty()) {
    std::ostringstream os;
    os << "no pair within eps up to n = " << q.Nmax << "; best err " << r.best_err
       << " (possible rational dependence of log lambda and log zeta_t)";
    r.note = os.str();
  }
  return r;
}

std::vector<NeutralPair> neutral_records_brute(const NeutralQuery& q) {
  Lattice L = lattice(q);
  std::vector<NeutralPair> out;
  double best = std::numeric_limits<double>::infinity();
  for (long n = q.N0 + 1; n <= q.Nmax; ++n) {
    NeutralPair p = pair_for(q, L, n);
    if (p.m <= q.N0) continue;
    if (p.drift < best) {
      best = p.drift;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<NeutralPair> neutral_records(const NeutralQuery& q) {
  Lattice L = lattice(q);
  // One-sided best approximations p/d of k: convergents and intermediate
  // fractions, each tagged with the sign of d k - p.
  struct Step {
    long d, p;
    long double e;  // d k - p
  };
  std::vector<Step> steps;
  {
    long double x = L.k;
    long p0 = 1, q0 = 0, p1 = (long)std::floor(x), q1 = 1;
    long double frac = x - std::floor(x);
    steps.push_back({1, p1, L.k - p1});
    for (int it = 0; it < 64 && frac > 1e-18L; ++it) {
      long double inv = 1 / frac;
      long a = (long)std::floor(inv);
      frac = inv - a;
      for (long j = 1; j <= a; ++j) {
        long pq = p0 + j * p1, qq = q0 + j * q1;
        if (qq > q.Nmax) break;
        steps.push_back({qq, pq, (long double)qq * L.k - pq});
      }
      long p2 = p0 + a * p1, q2 = q0 + a * q1;
      p0 = p1;
      q0 = q1;
      p1 = p2;
      q1 = q2;
      if (q1 > q.Nmax) break;
    }
    // Also the trivial approximations of distance frac(k) and 1 - frac(k).
    long f = (long)std::floor(L.k);
    steps.push_back({1, f + 1, L.k - (f + 1)});
    std::sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) { return a.d < b.d; });
  }

  std::vector<NeutralPair> out;
  long n = q.N0 + 1;
  NeutralPair cur = pair_for(q, L, n);
  while (cur.m <= q.N0 && n < q.Nmax) cur = pair_for(q, L, ++n);
  if (cur.m <= q.N0) return out;
  out.push_back(cur);
  for (;;) {
    // Signed offset of the current pair: m - (n k - k_tilde).
    long double delta = (long double)cur.m - ((long double)cur.n * L.k - L.kt);
    // Next record: smallest d whose d k - p lies strictly between 0 and 2 delta,
    // so that |delta - (d k - p)| < |delta|.
    long best_d = -1;
    for (const Step& s : steps) {
      if (cur.n + s.d > q.Nmax) break;
      bool side = delta > 0 ? (s.e > 0 && s.e < 2 * delta) : (s.e < 0 && s.e > 2 * delta);
      if (side) {
        best_d = s.d;
        break;
      }
    }
    if (best_d < 0) {
      // No one-sided approximation fits; fall back to scanning ahead.
      long nn = cur.n + 1;
      for (; nn <= q.Nmax; ++nn) {
        NeutralPair p = pair_for(q, L, nn);
        if (p.drift < cur.drift) break;
      }
      if (nn > q.Nmax) break;
      best_d = nn - cur.n;
    }
    // The smallest d from the list can be beaten by a non-listed d only if the
    // list misses an approximation; confirm on the nearest-integer pair itself.
    NeutralPair next = pair_for(q, L, cur.n + best_d);
    if (!(next.drift < cur.drift)) break;
    cur = next;
    out.push_back(cur);
  }
  return out;
}

bool reverify_pair(const NeutralPair& p, const NeutralQuery& q, unsigned bits) {
  PrecisionScope scope(bits);
  using boost::multiprecision::log;
  using boost::multiprecision::pow;
  using boost::multiprecision::fabs;
  Real lambda(q.lambda), zt(q.zeta_t), c(q.c), xi(q.xi);
  Real value = c * pow(lambda, p.n) * pow(zt, p.m);
  Real err = fabs(value - xi);
  Real k = -log(lambda) / log(zt), kt = log(c / xi) / log(zt);
  Real drift = fabs(Real(p.m) - Real(p.n) * k + kt);
  return err < Real(q.eps) && drift < 1;
}

std::string neutral_csv(const std::vector<NeutralPair>& pairs) {
  std::ostringstream os;
  os.precision(12);
  os << "n,m,value,err,drift\n";
  for (const NeutralPair& p : pairs) os << p.n << "," << p.m << "," << p.value << "," << p.err << "," << p.drift << "\n";
  return os.str();
}

}  // namespace blender

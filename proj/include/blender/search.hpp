#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blender/cycle.hpp"

namespace blender {

struct STPoint {
  double S = 0.0;  // log sigma_t / log zeta_t
  double T = 0.0;  // log zeta / log lambda
};

STPoint st_of(const EigenTuple& e);
// Exponent k = log(1/lambda) / log zeta_t.
double sojourn_ratio(double lambda, double zeta_t);

struct RegionCheck {
  bool inside = false;
  // Logarithms of the three products; each condition holds when its log is negative.
  double log_ichi = 0.0, log_ni = 0.0, log_san = 0.0;
  double ichi() const;
  double ni() const;
  double san() const;
};

RegionCheck check_region_P(const EigenTuple& e);

struct LRBounds {
  double L = 0.0, R = 0.0;
};

// The first two conditions hold iff L < log sigma < R (and log sigma > 0).
LRBounds lr_bounds(double lambda, double zeta, double sigma_t, double zeta_t);

bool in_st_region(double S, double T);

struct STSample {
  size_t samples = 0, members = 0;
  double area = 0.0, std_error = 0.0;
  double T_min = 1.0, T_max = 0.0;          // over members
  double inv_T_min = 1e300, inv_T_max = 0.0;  // 1/T over members
  std::vector<std::vector<bool>> grid;       // optional indicator grid, rows over T
};

// Monte Carlo over (0,1)^2 with a seeded generator; grid_cells > 0 also fills
// a cell-centred indicator grid of that resolution.
STSample sample_ST(size_t samples, uint64_t seed, int grid_cells = 0);

struct TupleRequest {
  double S = 0.5, T = 0.8;
  double sigma_fraction = 0.791813;
  double lambda_t_fraction = 0.178515;
  double lambda_anchor = 0.1;
  double zeta_t_anchor = 2.718281828459045;
};

// Builds a tuple inside the region: lambda = anchor, zeta = lambda^T,
// sigma_t = zeta_t^S, log sigma placed at the given fraction between max(0, L)
// and R, lambda_t the given fraction of the largest value keeping the third
// condition. Throws std::invalid_argument outside the region.
EigenTuple tuple_from_ST(const TupleRequest& r);

struct NeutralPair {
  int m = 0, n = 0;
  double value = 0.0;  // c lambda^n zeta_t^m
  double err = 0.0;    // |value - xi|
  double drift = 0.0;  // |m - n k + k_tilde|
};

struct NeutralQuery {
  double lambda = 0.1, zeta_t = 9.0, c = 1.0, xi = 1.185, eps = 0.02;
  int N0 = 1;
  long Nmax = 50;
};

struct NeutralResult {
  std::vector<NeutralPair> pairs;  // sorted by err
  std::string note;
  double best_err = 0.0;  // over all n searched, accepted or not
};

// Brute force over n in (N0, Nmax] with m the nearest integer to n k - k_tilde.
NeutralResult find_neutral_pairs(const NeutralQuery& q);

// Successive records of |m - n k + k_tilde| over n in (N0, Nmax], found by
// jumping along one-sided best approximations of k instead of visiting every n.
std::vector<NeutralPair> neutral_records(const NeutralQuery& q);
// The same records by visiting every n.
std::vector<NeutralPair> neutral_records_brute(const NeutralQuery& q);

// Recomputes value, err and drift at the given precision and checks err < eps, drift < 1.
bool reverify_pair(const NeutralPair& p, const NeutralQuery& q, unsigned bits = 256);

std::string neutral_csv(const std::vector<NeutralPair>& pairs);

}  // namespace blender

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "blender/renorm.hpp"

namespace blender {

// Phi = Psi o Theta o swap(x, z): from the box coordinates of the Henon-like
// family to the Q-chart. Theta scales by (beta2 b2 / a2, beta2^2 b2, beta2 b2 / c2).
Point<Real> phi_mn(const CycleConfig& cfg, const RenormData& d, const Point<Real>& p);
Point<Real> phi_mn_inverse(const CycleConfig& cfg, const RenormData& d, const Point<Real>& q);

struct SegmentOptions {
  int samples = 65;  // matched parameters on |y| < 4
  double mu_bar = 0.0;
  bool theta = true;  // apply the perturbation theta_n; off also disables the domain checks
  unsigned bits = 0;  // 0 picks the default policy
};

struct SegmentRow {
  double t = 0.0;  // parameter of ell; the ell-hat parameter is t / (beta2^2 b2)
  Point<double> ell, ell_hat;
  double log10_gap = 0.0;
};

struct SegmentComparison {
  int m = 0, n = 0;
  // Distances fall far below the double range along a schedule, so they are
  // kept as log10. -inf means the distance is exactly zero.
  double log10_d0 = 0.0;     // sup distance of matched image points
  double log10_d1 = 0.0;     // sup distance of matched first differences
  double log10_bound = 0.0;  // lambda_t^m zeta^n sigma_t^2m sigma^2n
  double log10_c1() const { return std::max(log10_d0, log10_d1); }
  double ratio = 0.0;        // C1 distance / bound
  // Sup distance of the two orbits just before the second transition, in the
  // P-chart, and the coordinate where it is largest.
  double pre_return_gap = 0.0;
  double log10_pre_return_gap = -std::numeric_limits<double>::infinity();
  int pre_return_axis = -1;
  std::vector<SegmentRow> rows;  // empty when the images are not formed
  bool images_formed = false;
  std::string note;
};

// Images of ell = {(lambda^n, 1 + sigma^-n sigma_t^-2m t, 0)} under the n-free part of
// the return orbit and of ell-hat = Phi(0, y, 0) under the full return orbit, both
// in Psi-coordinates. Throws DomainError naming the segment when a transition check fails.
SegmentComparison compare_segment_images(const CycleConfig& cfg, int m, int n, const SegmentOptions& opt = {});

std::string segment_csv(const SegmentComparison& c);

struct HolderReport {
  int n = 0;
  double alpha = 0.0;
  double estimate = 0.0;   // sup of sampled alpha-Holder quotients of d/dx B_n
  double base = 0.0;       // lambda / zeta^(1 + alpha)
  double predicted = 0.0;  // C base^n with C the n = 0 estimate on the same samples
  bool below_threshold = false;  // alpha < log lambda / log zeta - 1
};

// Samples base points in the ramp of the profile and offsets at scales
// zeta^n {1, 1/4, 1/16}, all from a seeded generator.
HolderReport holder_estimate(const CycleConfig& cfg, int n, double alpha, int samples = 4000, uint64_t seed = 1);

struct BoxpertQuotient {
  double value = 0.0;
  bool inside = false;  // value in (0, 1)
};

// 1 / (2 (sigma^-n sigma_t^-m z + 1)). Throws std::domain_error when the denominator is not positive.
BoxpertQuotient boxpert_quotient(const CycleConfig& cfg, int m, int n, double z);

struct NonInterference {
  int points = 0;
  int identical = 0;  // orbits equal bit for bit with and without theta_n
  bool ok() const { return points > 0 && identical == points; }
};

// Random points of Phi(Delta), Delta = [-4,4] x [-4,4] x [-40,0], iterated step by
// step with and without theta_n.
NonInterference check_non_interference(const CycleConfig& cfg, int m, int n, int points = 64, uint64_t seed = 7,
                                       unsigned bits = 0);

}  // namespace blender

#pragma once

#include <string>
#include <vector>

#include "blender/cycle.hpp"
#include "blender/search.hpp"

namespace blender {

// Default working precision: 128 bits plus (m + n) times the largest |log2| of
// the six eigenvalues.
unsigned default_precision_bits(const CycleConfig& cfg, int m, int n);
// Smallest precision that still resolves the rescaled y-coordinate: log2 of the
// largest Psi scale factor plus 64 guard bits.
unsigned minimum_precision_bits(const CycleConfig& cfg, int m, int n);

// Reals inside are created at the precision active when renorm_data was called.
struct RenormData {
  int m = 0, n = 0;
  Real sx, sy, y0;  // Psi scale factors: sigma^-n sigma_t^-m, sigma^-2n sigma_t^-2m, sigma^-n
  Point<Real> mu_vec, nu_vec;
  unsigned bits = 0;

  Point<Real> psi(const Point<Real>& p) const;
  Point<Real> psi_inverse(const Point<Real>& p) const;
  Shifts<Real> shifts() const;
};

// Throws std::range_error when the active precision is below minimum_precision_bits.
RenormData renorm_data(const CycleConfig& cfg, int m, int n, const Real& mu_bar);

// Return map Psi^-1 o f^{N2+m+N1+n} o Psi by direct orbit composition, at the
// given precision (0 picks the default policy). The result carries that precision.
Point<Real> return_map(const CycleConfig& cfg, int m, int n, double mu_bar, const Point<double>& p_bar,
                       unsigned bits = 0, const OrbitOptions& opt = {});
// Same, with the Jacobian with respect to p_bar.
Point<Jet<Real>> return_map_jet(const CycleConfig& cfg, int m, int n, double mu_bar, const Point<double>& p_bar,
                                unsigned bits = 0);

// Closed-form polynomial of the return map when the higher-order terms vanish,
// evaluated in the active precision.
Point<Real> return_map_closed_form(const CycleConfig& cfg, int m, int n, const Real& mu_bar, const Point<Real>& p);

struct Kappas {
  double kappa1 = 0.0, kappa2 = 0.0;
};

Kappas kappas(const TransitionCoeffs& k, double xi);

// Limit map (x, y, z) -> (xi x + a2 beta2 y, mu + b3 (xi/a3)^2 x^2 + beta2^2 b2 y^2
// + (xi/a3) beta2 b4 x y, c2 beta2 y). Throws std::invalid_argument on a zero divisor.
Point<double> limit_map(const TransitionCoeffs& k, double xi, double mu_bar, const Point<double>& p);
Point<Real> limit_map(const TransitionCoeffs& k, double xi, const Real& mu_bar, const Point<Real>& p);
// Jacobian of the limit map, rows are output components.
std::array<Point<double>, 3> limit_jacobian(const TransitionCoeffs& k, double xi, const Point<double>& p);

// The rescaling that turns the limit map into the normal form below.
Point<double> normal_coordinates(const TransitionCoeffs& k, const Point<double>& p);
double normal_parameter(const TransitionCoeffs& k, double mu_bar);
// (x, y, z) -> (xi x + y, mu + y^2 + kappa1 x^2 + kappa2 x y, y).
Point<double> normal_form_map(double xi, const Kappas& kp, double mu, const Point<double>& p);

struct GridSpec {
  int points_per_axis = 9;  // on K = [-r, r]^3
  int mu_points = 9;        // on I = [-r, r]
  double radius = 1.0;
};

struct ConvergenceRow {
  int m = 0, n = 0;
  double value = 0.0;  // c lambda^n zeta_t^m of the pair
  double d0 = 0.0, d1 = 0.0, d2 = 0.0;
  unsigned bits = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  Kappas kp;
  double xi = 0.0;
  int order = 2;
};

// Sup distances between the return map and the limit map over the grid: values
// (order 0), Jacobians from jets (order 1) and second central differences taken on
// the grid itself (order 2). bits = 0 uses the default policy per pair.
ConvergenceReport convergence_report(const CycleConfig& cfg, double xi, const std::vector<NeutralPair>& schedule,
                                     const GridSpec& grid = {}, int order = 2, unsigned bits = 0);

// Least-squares fit of the y-component of the return map over a planar grid in
// (x, y) at z = 0, mu_bar = 0, converted to normal-form coefficients.
Kappas fit_kappas(const CycleConfig& cfg, int m, int n, int points = 9, double radius = 1.0, unsigned bits = 0);

std::string convergence_csv(const ConvergenceReport& r);

}  // namespace blender

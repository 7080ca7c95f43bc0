#pragma once

#include <string>
#include <vector>

#include "blender/geom.hpp"
#include "blender/henon.hpp"

namespace blender {

// A curve written as a graph over y, sampled at increasing y with the
// derivatives dx/dy and dz/dy. Tangent (dx, 1, dz) must lie in the
// strong unstable cone of aperture theta for the curve to count as vertical.
struct VerticalCurve {
  std::vector<double> y, x, z, dx, dz;

  size_t size() const { return y.size(); }
  // Straight segment through (x0, y_ref, z_ref) with dz/dy = slope, over [y0, y1].
  static VerticalCurve line(double x0, double y_ref, double z_ref, double slope, int samples, double y0 = -4.0,
                            double y1 = 4.0);
  VerticalCurve shifted_z(double dz) const;
  // Cubic Hermite interpolation; y must lie within the sampled range.
  double z_at(double yq) const;
  double x_at(double yq) const;
  void check() const;
};

struct PieceBox {
  std::string name;
  double y_lo, y_hi, z_lo, z_hi, x_abs;
};

struct H5Geometry {
  PieceBox a_piece{"A'", 2.4, 3.8, -22.0, -3.3, 4.0};
  PieceBox b_piece{"B'", -3.8, -2.4, -7.3, 0.0, 4.0};
  double y_star = 0.0, z_star = 0.0;
  double u = 0.25;       // half-size of the tube around the local stable line
  double u_plus = 0.25;  // depth of the neighbourhood of the face z = 0
  double theta = 2.0;
  int samples = 257;
  double y_min = -4.0, y_max = 4.0, z_min = -40.0, z_max = 0.0, x_abs = 4.0;
};

H5Geometry default_geometry(const BlenderMap& f, double theta = 2.0);

// Right of the local stable line: the curve passes the level y* above z*.
bool right_of_stable_line(const VerticalCurve& c, const H5Geometry& g);

struct CaseCheck {
  bool ok = false;
  std::string reason;
  VerticalCurve image;  // image piece resampled over the full y-range
};

struct H5CaseResult {
  CaseCheck a, b;
  char chosen = '-';  // 'A', 'B' or '-'; A' wins ties
};

// Sampled check (not rigorous between samples) of the two alternatives for one
// vertical curve, using interval evaluation at each sample for the map and
// for the pushed-forward tangent.
H5CaseResult check_H5_case(const BlenderMap& f, const VerticalCurve& c, const H5Geometry& g);

// Image of a curve piece over [y_lo, y_hi] resampled as a vertical curve over
// the full y-range; fills reason and returns false when that fails.
bool image_piece(const BlenderMap& f, const VerticalCurve& c, double y_lo, double y_hi, const H5Geometry& g,
                 VerticalCurve& out, std::string& reason);

// The image of the segment {(0, t, 0)} restricted to t < 0, which crosses the box.
VerticalCurve ell_hat_image(const BlenderMap& f, const H5Geometry& g);

struct H5NetResult {
  int curves = 0, samples = 0, passed = 0;
  std::string cases;  // one character per curve
  std::string first_failure;
  bool ok = false;
};

// Net of straight vertical curves to the right of the stable line: several
// offsets at y* times slopes {-0.9/theta, 0, 0.9/theta}.
std::vector<VerticalCurve> h5_curve_net(const H5Geometry& g, int n_curves);
H5NetResult h5_net(const BlenderMap& f, const H5Geometry& g, int n_curves);

struct StripConfig {
  int steps = 50;
  double eps = 1e-6;    // neighbourhood radius and initial strip width
  int tree_depth = 10;  // depth of the preimage tree of the stable line
  int beam = 512;       // frontier cap of the itinerary search
};

struct StripRow {
  int step = 0;
  char cas = '-';
  double width = 0.0;
  double min_distance = 0.0;
};

struct StripTrace {
  std::vector<StripRow> rows;
  bool reached = false;
  int hit_step = -1;   // game steps before the strip meets a preimage
  int hit_depth = -1;  // preimage depth of the point it meets
  std::string itinerary;
  double hit_y = 0.0, hit_z = 0.0;
};

// Points (y, z) of the box mapped onto the local stable line within `depth`
// iterates; depth 0 is (y*, z*) itself. Each entry is {y, z, depth}.
std::vector<std::array<double, 3>> stable_preimage_tree(const BlenderMap& f, const H5Geometry& g, int depth);

// Strip game: the strip between the seed and its eps-translate in z is pushed
// through the A'/B' alternatives (A' listed first) and stops once it comes
// within eps of a point of the preimage tree.
StripTrace strip_game(const BlenderMap& f, const H5Geometry& g, const VerticalCurve& seed, const StripConfig& cfg);

std::string strip_trace_csv(const StripTrace& t);

}  // namespace blender

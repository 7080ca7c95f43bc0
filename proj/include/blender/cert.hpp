#pragma once

#include <string>
#include <vector>

#include "blender/curves.hpp"
#include "blender/geom.hpp"
#include "blender/henon.hpp"

namespace blender {

// Box Delta = I_x x I_y x I_z. Faces: x = +-4 is the strong stable boundary,
// y = +-4 the strong unstable one, and the unstable boundary is the union of
// the y and z faces.
struct BlenderBox {
  Interval x{-4.0, 4.0};
  Interval y{-4.0, 4.0};
  Interval z{-40.0, 0.0};
  IBox3 box() const { return IBox3::of(x, y, z); }
};

enum class Verdict { Certified, Failed, Unresolved };
std::string verdict_name(Verdict v);
// Failed dominates Unresolved dominates Certified.
Verdict combine(Verdict a, Verdict b);

struct ClauseReport {
  std::string name;
  Verdict verdict = Verdict::Unresolved;
  std::string detail;
  bool rigorous = true;
};

struct HReport {
  std::string name;
  Verdict verdict = Verdict::Unresolved;
  std::vector<ClauseReport> clauses;
  void add(ClauseReport c);
};

struct CertConfig {
  BlenderBox box;
  int depth = 12;
  double theta = 2.0;
  double cone_margin = 0.01;
  ConeNet net;
  // Finer net and local refinement used only to sharpen the expansion bound c0.
  ConeNet expansion_net{512, 1};
  double expansion_target = 1.12;
  int expansion_refine = 4;
  // Cap on cone-check leaves; past it the remaining leaves stay unresolved.
  size_t leaf_budget = 200000;
  double u_minus = 0.25;
  double u_plus = 0.25;
  double u_stable = 0.25;
  int h5_curves = 33;
  int h5_samples = 257;
  bool run_strip_game = true;
  StripConfig strip;
};

struct ABEnclosure {
  std::vector<IBox3> a_boxes, b_boxes;
  IBox3 a_hull, b_hull;
  bool a_empty = true, b_empty = true;
  int unresolved = 0;
  HReport h1, h2;
};

// Encloses A = F(Delta+) n Delta and B = F(Delta-) n Delta by adaptive
// subdivision of the two halves and checks the boundary clauses of H1/H2.
ABEnclosure compute_AB_enclosures(const BlenderMap& f, const CertConfig& cfg);

struct H3Result {
  HReport report;
  double c0 = 0.0;     // expansion of the unstable cone in |.|_*
  int ell = 0;         // iterate count for Euclidean expansion
  double c = 0.0;      // c0^ell / sqrt(2)
  bool stable_by_kernel = false;
  size_t leaves = 0, cone_leaves = 0;
};

H3Result check_H3(const BlenderMap& f, const CertConfig& cfg);

struct H4Result {
  HReport report;
  FixedPoint pstar;
  double margin = 0.0;  // distance of right-hand vertical curves to the far face
};

H4Result check_H4(const BlenderMap& f, const CertConfig& cfg);

// x-range of the slice segment of A over the preimage level z:
// [sqrt(-4 - mu - kappa z^2), sqrt(4 - mu - kappa z^2)].
Interval slice_range_plus(const BlenderMap& f, const Interval& z);
Interval slice_range_minus(const BlenderMap& f, const Interval& z);

struct SubclaimResult {
  Interval lower, upper;  // range of the slice endpoints over the whole z-range
  bool holds = false;     // lower > 2.4 and upper < 3.8
  double worst_oracle = 0.0;  // float value of the lower end at the worst slice
};

SubclaimResult I_plus_subclaim(const BlenderMap& f, const BlenderBox& box = {});

struct ScanRow {
  double mu, kappa, xi;
  SubclaimResult sub;
  bool probe = false;
};

// Cell-centred grid over the open parameter set plus explicit probe points.
std::vector<ScanRow> scan_O(int n_mu, int n_kappa, int n_xi, const std::vector<HenonParams>& probes);

struct Certificate {
  HenonParams params;
  CertConfig cfg;
  HReport h1, h2, h4, h5;
  H3Result h3;
  FixedPoint pstar;
  SubclaimResult subclaim;
  H5NetResult net;
  StripTrace strip;
  Verdict overall = Verdict::Unresolved;
  double seconds = 0.0;
};

Certificate certify(const HenonParams& p, const CertConfig& cfg = {});
Certificate certify(const BlenderMap& f, const HenonParams& label, const CertConfig& cfg);

std::string certificate_json(const Certificate& c);

}  // namespace blender

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "blender/curves.hpp"

namespace blender {

namespace {

// Preimage on the branch sign(y) = branch of the point (yt, zt), ignoring any
// perturbation: solves yt = mu + y^2 + kappa z^2 + eta y z with z = (zt - y)/xi.
bool preimage(const BlenderMap& f, double yt, double zt, int branch, double& y, double& z) {
  double r = yt - f.mu;
  if (r < 0) return false;
  y = branch * std::sqrt(r);
  for (int it = 0; it < 60; ++it) {
    z = (zt - y) / f.xi;
    double g = f.mu + y * y + f.kappa * z * z + f.eta * y * z - yt;
    double dz = -1.0 / f.xi;
    double dg = 2 * y + 2 * f.kappa * z * dz + f.eta * (z + y * dz);
    if (dg == 0) return false;
    double step = g / dg;
    y -= step;
    if (std::fabs(step) < 1e-15 * (1 + std::fabs(y))) break;
  }
  z = (zt - y) / f.xi;
  return branch * y > 0;
}

struct Node {
  VerticalCurve left, right;
  std::string itinerary;
  std::vector<StripRow> rows;
};

double strip_width(const VerticalCurve& l, const VerticalCurve& r) {
  double w = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < l.size(); ++i) w = std::min(w, std::hypot(r.z[i] - l.z[i], r.x[i] - l.x[i]));
  return w;
}

struct Hit {
  double distance;
  size_t index;
};

Hit nearest(const Node& n, const std::vector<std::array<double, 3>>& tree) {
  Hit h{std::numeric_limits<double>::infinity(), 0};
  for (size_t i = 0; i < tree.size(); ++i) {
    double zl = n.left.z_at(tree[i][0]), zr = n.right.z_at(tree[i][0]);
    if (zl > zr) std::swap(zl, zr);
    double d = std::max({0.0, zl - tree[i][1], tree[i][1] - zr});
    if (d < h.distance) h = {d, i};
  }
  return h;
}

}  // namespace

std::vector<std::array<double, 3>> stable_preimage_tree(const BlenderMap& f, const H5Geometry& g, int depth) {
  std::vector<std::array<double, 3>> out{{g.y_star, g.z_star, 0.0}};
  std::vector<std::array<double, 2>> level{{g.y_star, g.z_star}};
  for (int d = 1; d <= depth; ++d) {
    std::vector<std::array<double, 2>> next;
    for (const auto& p : level) {
      for (int branch : {1, -1}) {
        double y, z;
        if (!preimage(f, p[0], p[1], branch, y, z)) continue;
        if (y < g.y_min || y > g.y_max || z < g.z_min || z > g.z_max) continue;
        // The fixed point is its own preimage; skip that branch.
        if (std::fabs(y - g.y_star) < 1e-9 && std::fabs(z - g.z_star) < 1e-9) continue;
        next.push_back({y, z});
        out.push_back({y, z, double(d)});
      }
    }
    level.swap(next);
  }
  return out;
}

StripTrace strip_game(const BlenderMap& f, const H5Geometry& g, const VerticalCurve& seed, const StripConfig& cfg) {
  seed.check();
  if (!(cfg.eps > 0) || cfg.steps < 0 || cfg.beam < 1) throw std::invalid_argument("bad strip game configuration");
  const auto tree = stable_preimage_tree(f, g, cfg.tree_depth);
  StripTrace trace;

  Node root{seed, seed.shifted_z(cfg.eps), "", {}};
  std::vector<Node> frontier{root};
  for (int step = 0; step <= cfg.steps; ++step) {
    // Frontier is kept in itinerary order with A' before B', so the first hit wins ties.
    for (Node& n : frontier) {
      Hit h = nearest(n, tree);
      StripRow row{step, step == 0 ? 'S' : n.itinerary.back(), strip_width(n.left, n.right), h.distance};
      n.rows.push_back(row);
      if (h.distance <= cfg.eps) {
        trace.rows = n.rows;
        trace.reached = true;
        trace.hit_step = step;
        trace.hit_depth = int(tree[h.index][2]);
        trace.hit_y = tree[h.index][0];
        trace.hit_z = tree[h.index][1];
        trace.itinerary = n.itinerary;
        return trace;
      }
    }
    if (step == cfg.steps) break;
    std::vector<Node> next;
    for (const Node& n : frontier) {
      H5CaseResult l = check_H5_case(f, n.left, g), r = check_H5_case(f, n.right, g);
      if (l.a.ok && r.a.ok) next.push_back({l.a.image, r.a.image, n.itinerary + 'A', n.rows});
      if (l.b.ok && r.b.ok) next.push_back({l.b.image, r.b.image, n.itinerary + 'B', n.rows});
    }
    if (next.empty()) {
      trace.rows = frontier.front().rows;
      trace.itinerary = frontier.front().itinerary;
      return trace;
    }
    // Drop strips covered by another one at the level y*, then thin evenly.
    std::vector<size_t> order(next.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto lo = [&](size_t i) { return std::min(next[i].left.z_at(g.y_star), next[i].right.z_at(g.y_star)); };
    auto hi = [&](size_t i) { return std::max(next[i].left.z_at(g.y_star), next[i].right.z_at(g.y_star)); };
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return lo(a) < lo(b); });
    std::vector<size_t> kept;
    double cover = -std::numeric_limits<double>::infinity();
    for (size_t i : order)
      if (hi(i) > cover) {
        kept.push_back(i);
        cover = hi(i);
      }
    if ((int)kept.size() > cfg.beam) {
      std::vector<size_t> thin;
      for (int k = 0; k < cfg.beam; ++k) thin.push_back(kept[size_t(double(k) * (kept.size() - 1) / (cfg.beam - 1))]);
      kept.swap(thin);
    }
    std::sort(kept.begin(), kept.end(), [&](size_t a, size_t b) { return next[a].itinerary < next[b].itinerary; });
    std::vector<Node> pruned;
    for (size_t i : kept) pruned.push_back(std::move(next[i]));
    frontier.swap(pruned);
  }
  trace.rows = frontier.front().rows;
  trace.itinerary = frontier.front().itinerary;
  return trace;
}

std::string strip_trace_csv(const StripTrace& t) {
  std::ostringstream os;
  os.precision(12);
  os << "step,case,width,min_distance\n";
  for (const StripRow& r : t.rows) os << r.step << "," << r.cas << "," << r.width << "," << r.min_distance << "\n";
  return os.str();
}

}  // namespace blender

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mpfr.h>
#include <sstream>

#include "blender/cert.hpp"
#include "blender/connect.hpp"
#include "blender/renorm.hpp"
#include "blender/search.hpp"

using namespace blender;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "1.0.0";

// Exit codes: 0 success or CERTIFIED, 2 not certified or an empty result, 1 error.
constexpr int kOk = 0, kError = 1, kEmpty = 2;

struct Common {
  std::string out_dir = "blender_out";
  uint64_t seed = 1;
  unsigned bits = 0;
  std::string config_path;
};

class Output {
 public:
  Output(std::string command, const Common& c) : command_(std::move(command)), common_(c) {
    fs::create_directories(common_.out_dir);
  }
  void param(const std::string& k, json v) { params_[k] = std::move(v); }
  void write(const std::string& name, const std::string& content) {
    std::ofstream f(fs::path(common_.out_dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name);
    f << content;
    files_.push_back(name);
  }
  // The manifest holds nothing that varies between identical runs.
  void finish() {
    json m;
    m["command"] = command_;
    m["parameters"] = params_;
    m["seed"] = common_.seed;
    m["config"] = common_.config_path;
    m["precision_bits"] = common_.bits;
    m["versions"] = {{"tool", kToolVersion},
                     {"boost", BOOST_LIB_VERSION},
                     {"mpfr", mpfr_get_version()},
                     {"compiler", __VERSION__}};
    m["outputs"] = files_;
    std::ofstream f(fs::path(common_.out_dir) / "manifest.json", std::ios::binary);
    f << m.dump(2) << "\n";
  }

 private:
  std::string command_;
  Common common_;
  json params_ = json::object();
  std::vector<std::string> files_;
};

CycleConfig load_cycle_config(const std::string& path) {
  if (path.empty()) return CycleConfig{};
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  CycleConfig cfg;
  try {
    cfg = config_from_json(j);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return cfg;
}

std::vector<NeutralPair> parse_schedule(const std::string& s) {
  std::vector<NeutralPair> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw std::runtime_error("schedule entries are m:n, got '" + item + "'");
    NeutralPair p;
    p.m = std::stoi(item.substr(0, colon));
    p.n = std::stoi(item.substr(colon + 1));
    out.push_back(p);
  }
  return out;
}

// Largest-n records of the neutral search, used when no explicit schedule is given.
std::vector<NeutralPair> auto_schedule(const CycleConfig& cfg, double xi, int pairs, long nmax) {
  NeutralQuery q;
  q.lambda = cfg.eig.lambda;
  q.zeta_t = cfg.eig.zeta_t;
  q.c = cfg.coeffs.gamma[0] * cfg.coeffs.a[2];
  q.xi = xi;
  q.eps = xi / 2;
  q.N0 = 50;
  q.Nmax = nmax;
  std::vector<NeutralPair> rec = neutral_records(q);
  if ((int)rec.size() > pairs) rec.erase(rec.begin(), rec.end() - pairs);
  return rec;
}

HenonParams henon_from(double mu, double kappa, double xi, double eta, const std::string& form) {
  HenonParams p;
  p.form = parse_form(form);
  p.mu = mu;
  p.kappa = kappa;
  p.xi = xi;
  p.eta = eta;
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blender certification and heterodimensional-cycle renormalization toolkit"};
  app.require_subcommand(1);
  Common common;
  if (const char* env = std::getenv("BLENDER_PRECISION")) common.bits = unsigned(std::strtoul(env, nullptr, 10));
  app.add_option("--out", common.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", common.seed, "Random seed")->capture_default_str();
  app.add_option("--bits", common.bits, "Working precision in bits (0: per-pair default; env BLENDER_PRECISION)");

  double mu = -9.9, kappa = 5e-5, xi = 1.185, eta = 0.0;
  std::string form = "conjugate";
  auto add_henon = [&](CLI::App* sc) {
    sc->add_option("--mu", mu)->capture_default_str();
    sc->add_option("--kappa", kappa)->capture_default_str();
    sc->add_option("--xi", xi)->capture_default_str();
    sc->add_option("--eta", eta)->capture_default_str();
    sc->add_option("--form", form, "standard or conjugate")->capture_default_str();
  };

  CertConfig cert_cfg;
  auto* certify_cmd = app.add_subcommand("certify", "Certify the blender hypotheses H1-H5");
  add_henon(certify_cmd);
  certify_cmd->add_option("--depth", cert_cfg.depth, "Subdivision depth")->capture_default_str();
  certify_cmd->add_option("--theta", cert_cfg.theta, "Cone aperture")->capture_default_str();
  certify_cmd->add_option("--strip-steps", cert_cfg.strip.steps)->capture_default_str();

  int n_mu = 16, n_kappa = 8, n_xi = 8;
  std::vector<double> probe_mu;
  auto* scan_cmd = app.add_subcommand("scan-o", "Sweep the parameter box for the I+ slice sub-claim");
  scan_cmd->add_option("--n-mu", n_mu)->capture_default_str();
  scan_cmd->add_option("--n-kappa", n_kappa)->capture_default_str();
  scan_cmd->add_option("--n-xi", n_xi)->capture_default_str();
  scan_cmd->add_option("--probe-mu", probe_mu, "Extra probes at kappa = 5e-5, xi = 1.185");

  size_t st_samples = 1000000;
  int st_grid = 0;
  auto* st_cmd = app.add_subcommand("region-st", "Monte Carlo estimate of the admissible (S, T) region");
  st_cmd->add_option("--samples", st_samples)->capture_default_str();
  st_cmd->add_option("--grid", st_grid, "Indicator grid cells per axis (0: none)")->capture_default_str();

  TupleRequest treq;
  auto* tuple_cmd = app.add_subcommand("tuple", "Build an eigenvalue tuple from an admissible (S, T)");
  tuple_cmd->add_option("-S,--S", treq.S)->capture_default_str();
  tuple_cmd->add_option("-T,--T", treq.T)->capture_default_str();
  tuple_cmd->add_option("--sigma-fraction", treq.sigma_fraction)->capture_default_str();
  tuple_cmd->add_option("--lambda-t-fraction", treq.lambda_t_fraction)->capture_default_str();
  tuple_cmd->add_option("--lambda", treq.lambda_anchor)->capture_default_str();
  tuple_cmd->add_option("--zeta-tilde", treq.zeta_t_anchor)->capture_default_str();

  NeutralQuery nq;
  bool records = false;
  auto* neutral_cmd = app.add_subcommand("neutral", "Search (m, n) with c lambda^n zeta_t^m close to xi");
  neutral_cmd->add_option("--lambda", nq.lambda)->capture_default_str();
  neutral_cmd->add_option("--zeta-tilde", nq.zeta_t)->capture_default_str();
  neutral_cmd->add_option("--c", nq.c)->capture_default_str();
  neutral_cmd->add_option("--xi", nq.xi)->capture_default_str();
  neutral_cmd->add_option("--eps", nq.eps)->capture_default_str();
  neutral_cmd->add_option("--n0", nq.N0)->capture_default_str();
  neutral_cmd->add_option("--nmax", nq.Nmax)->capture_default_str();
  neutral_cmd->add_flag("--records", records, "List successive drift records instead of all pairs within eps");

  std::string schedule;
  int pairs = 4;
  long sched_nmax = 1000;
  GridSpec grid;
  double cycle_xi = 1.185;
  auto add_cycle = [&](CLI::App* sc) {
    sc->add_option("--config", common.config_path, "CycleConfig JSON (default: reference configuration)");
    sc->add_option("--xi", cycle_xi, "Target xi of the neutral schedule")->capture_default_str();
    sc->add_option("--schedule", schedule, "Explicit pairs m:n,m:n,...");
    sc->add_option("--pairs", pairs, "Number of neutral records when no schedule is given")->capture_default_str();
    sc->add_option("--schedule-nmax", sched_nmax)->capture_default_str();
  };
  auto* renorm_cmd = app.add_subcommand("renorm", "Convergence of the renormalized return maps to the limit map");
  add_cycle(renorm_cmd);
  renorm_cmd->add_option("--grid", grid.points_per_axis)->capture_default_str();
  renorm_cmd->add_option("--mu-points", grid.mu_points)->capture_default_str();
  renorm_cmd->add_option("--radius", grid.radius)->capture_default_str();

  SegmentOptions seg;
  bool no_theta = false;
  std::vector<double> alphas{0.2, 0.3};
  std::vector<int> holder_ns{0, 20, 40, 60};
  int holder_samples = 4000;
  auto* connect_cmd = app.add_subcommand("connect", "Segment images, Holder estimates and box non-interference");
  add_cycle(connect_cmd);
  connect_cmd->add_option("--samples", seg.samples)->capture_default_str();
  connect_cmd->add_flag("--no-theta", no_theta, "Disable the perturbation theta_n");
  connect_cmd->add_option("--alpha", alphas)->capture_default_str();
  connect_cmd->add_option("--holder-n", holder_ns)->capture_default_str();
  connect_cmd->add_option("--holder-samples", holder_samples)->capture_default_str();

  StripConfig strip_cfg;
  auto* strip_cmd = app.add_subcommand("strip-game", "Push the l-hat strip until it meets the stable line");
  add_henon(strip_cmd);
  strip_cmd->add_option("--steps", strip_cfg.steps)->capture_default_str();
  strip_cmd->add_option("--eps", strip_cfg.eps)->capture_default_str();
  strip_cmd->add_option("--tree-depth", strip_cfg.tree_depth)->capture_default_str();
  strip_cmd->add_option("--beam", strip_cfg.beam)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (certify_cmd->parsed()) {
      Output out("certify", common);
      HenonParams p = henon_from(mu, kappa, xi, eta, form);
      out.param("henon", {{"form", form}, {"mu", mu}, {"kappa", kappa}, {"xi", xi}, {"eta", eta}});
      out.param("depth", cert_cfg.depth);
      out.param("theta", cert_cfg.theta);
      out.param("strip_steps", cert_cfg.strip.steps);
      Certificate c = certify(p, cert_cfg);
      std::string j = certificate_json(c);
      out.write("certificate.json", j + "\n");
      out.write("strip.csv", strip_trace_csv(c.strip));
      out.finish();
      std::cout << j << "\n";
      return c.overall == Verdict::Certified ? kOk : kEmpty;
    }
    if (scan_cmd->parsed()) {
      Output out("scan-o", common);
      out.param("grid", {n_mu, n_kappa, n_xi});
      out.param("probe_mu", probe_mu);
      std::vector<HenonParams> probes;
      for (double m : probe_mu) probes.push_back(henon_from(m, 5e-5, 1.185, 0.0, "conjugate"));
      std::vector<ScanRow> rows = scan_O(n_mu, n_kappa, n_xi, probes);
      std::ostringstream csv;
      csv.precision(12);
      csv << "mu,kappa,xi,probe,lower_lo,lower_hi,upper_lo,upper_hi,oracle,verdict\n";
      int passed = 0;
      json probe_json = json::array();
      for (const ScanRow& r : rows) {
        passed += r.sub.holds && !r.probe;
        csv << r.mu << "," << r.kappa << "," << r.xi << "," << r.probe << "," << r.sub.lower.lo() << ","
            << r.sub.lower.hi() << "," << r.sub.upper.lo() << "," << r.sub.upper.hi() << "," << r.sub.worst_oracle
            << "," << (r.sub.holds ? "PASSED" : "FAILED") << "\n";
        if (r.probe) probe_json.push_back({{"mu", r.mu}, {"verdict", r.sub.holds ? "PASSED" : "FAILED"}});
      }
      out.write("scan_o.csv", csv.str());
      json s = {{"cells", n_mu * n_kappa * n_xi}, {"passed", passed}, {"probes", probe_json}};
      out.write("scan_o.json", s.dump(2) + "\n");
      out.finish();
      std::cout << s.dump(2) << "\n";
      return passed > 0 ? kOk : kEmpty;
    }
    if (st_cmd->parsed()) {
      Output out("region-st", common);
      out.param("samples", st_samples);
      out.param("grid", st_grid);
      STSample s = sample_ST(st_samples, common.seed, st_grid);
      json j = {{"samples", s.samples},     {"members", s.members}, {"area", s.area},
                {"std_error", s.std_error}, {"T_range", {s.T_min, s.T_max}},
                {"inv_T_range", {s.inv_T_min, s.inv_T_max}}};
      out.write("region_st.json", j.dump(2) + "\n");
      if (st_grid > 0) {
        std::ostringstream g;
        g << "S,T,member\n";
        for (int it = 0; it < st_grid; ++it)
          for (int is = 0; is < st_grid; ++is)
            g << (is + 0.5) / st_grid << "," << (it + 0.5) / st_grid << "," << int(s.grid[it][is]) << "\n";
        out.write("region_st_grid.csv", g.str());
      }
      out.finish();
      std::cout << j.dump(2) << "\n";
      return s.members > 0 ? kOk : kEmpty;
    }
    if (tuple_cmd->parsed()) {
      Output out("tuple", common);
      out.param("S", treq.S);
      out.param("T", treq.T);
      out.param("sigma_fraction", treq.sigma_fraction);
      out.param("lambda_t_fraction", treq.lambda_t_fraction);
      out.param("lambda", treq.lambda_anchor);
      out.param("zeta_tilde", treq.zeta_t_anchor);
      EigenTuple e = tuple_from_ST(treq);
      RegionCheck rc = check_region_P(e);
      LRBounds lr = lr_bounds(e.lambda, e.zeta, e.sigma_t, e.zeta_t);
      json j = {{"tuple",
                 {{"lambda_t", e.lambda_t},
                  {"sigma_t", e.sigma_t},
                  {"zeta_t", e.zeta_t},
                  {"lambda", e.lambda},
                  {"zeta", e.zeta},
                  {"sigma", e.sigma}}},
                {"products", {rc.ichi(), rc.ni(), rc.san()}},
                {"inside", rc.inside},
                {"L", lr.L},
                {"R", lr.R}};
      out.write("tuple.json", j.dump(2) + "\n");
      out.finish();
      std::cout << j.dump(2) << "\n";
      return rc.inside ? kOk : kEmpty;
    }
    if (neutral_cmd->parsed()) {
      Output out("neutral", common);
      out.param("lambda", nq.lambda);
      out.param("zeta_tilde", nq.zeta_t);
      out.param("c", nq.c);
      out.param("xi", nq.xi);
      out.param("eps", nq.eps);
      out.param("n0", nq.N0);
      out.param("nmax", nq.Nmax);
      out.param("records", records);
      std::vector<NeutralPair> list;
      std::string note;
      if (records) {
        list = neutral_records(nq);
      } else {
        NeutralResult r = find_neutral_pairs(nq);
        list = r.pairs;
        note = r.note;
      }
      json verified = json::array();
      for (const NeutralPair& p : list) verified.push_back(reverify_pair(p, nq, 256));
      std::string csv = neutral_csv(list);
      out.write("neutral.csv", csv);
      out.write("neutral.json", json({{"count", list.size()}, {"reverified_256", verified}, {"note", note}}).dump(2) + "\n");
      out.finish();
      std::cout << csv;
      if (!note.empty()) std::cerr << note << "\n";
      return list.empty() ? kEmpty : kOk;
    }
    if (renorm_cmd->parsed() || connect_cmd->parsed()) {
      CycleConfig cfg = load_cycle_config(common.config_path);
      Diagnostics diag = validate_config(cfg);
      if (!diag.ok()) throw std::runtime_error("configuration rejected:\n" + diag.summary());
      std::vector<NeutralPair> sched =
          schedule.empty() ? auto_schedule(cfg, cycle_xi, pairs, sched_nmax) : parse_schedule(schedule);
      for (NeutralPair& p : sched) {
        // gamma1 a3 lambda^n zeta_t^m, the neutral value the pair approximates xi with.
        p.value = cfg.coeffs.gamma[0] * cfg.coeffs.a[2] *
                  std::exp(p.n * std::log(cfg.eig.lambda) + p.m * std::log(cfg.eig.zeta_t));
        p.err = std::fabs(p.value - cycle_xi);
      }
      json sched_json = json::array();
      for (const NeutralPair& p : sched) sched_json.push_back({p.m, p.n});

      if (renorm_cmd->parsed()) {
        Output out("renorm", common);
        out.param("config", config_to_json(cfg));
        out.param("xi", cycle_xi);
        out.param("schedule", sched_json);
        out.param("grid", {grid.points_per_axis, grid.mu_points, grid.radius});
        ConvergenceReport r = convergence_report(cfg, cycle_xi, sched, grid, 2, common.bits);
        Kappas fit = fit_kappas(cfg, sched.back().m, sched.back().n, 9, 1.0, common.bits);
        out.write("convergence.csv", convergence_csv(r));
        json j = {{"kappa1", r.kp.kappa1},  {"kappa2", r.kp.kappa2},   {"fit_kappa1", fit.kappa1},
                  {"fit_kappa2", fit.kappa2}, {"schedule", sched_json}};
        json rows = json::array();
        for (const ConvergenceRow& row : r.rows)
          rows.push_back({{"m", row.m}, {"n", row.n}, {"d0", row.d0}, {"d1", row.d1}, {"d2", row.d2}, {"bits", row.bits}});
        j["rows"] = rows;
        out.write("renorm.json", j.dump(2) + "\n");
        out.finish();
        std::cout << j.dump(2) << "\n";
        return r.rows.empty() ? kEmpty : kOk;
      }

      Output out("connect", common);
      out.param("config", config_to_json(cfg));
      out.param("schedule", sched_json);
      out.param("samples", seg.samples);
      out.param("theta", !no_theta);
      out.param("alpha", alphas);
      out.param("holder_n", holder_ns);
      out.param("holder_samples", holder_samples);
      seg.theta = !no_theta;
      seg.bits = common.bits;
      json segs = json::array();
      std::ostringstream summary;
      summary << "m,n,log10_d0,log10_d1,log10_bound,ratio,pre_return_gap,log10_pre_return_gap,axis\n";
      summary.precision(12);
      for (const NeutralPair& p : sched) {
        SegmentComparison c = compare_segment_images(cfg, p.m, p.n, seg);
        summary << c.m << "," << c.n << "," << c.log10_d0 << "," << c.log10_d1 << "," << c.log10_bound << ","
                << c.ratio << "," << c.pre_return_gap << "," << c.log10_pre_return_gap << "," << c.pre_return_axis
                << "\n";
        if (c.images_formed)
          out.write("segments_" + std::to_string(p.m) + "_" + std::to_string(p.n) + ".csv", segment_csv(c));
        NonInterference ni = check_non_interference(cfg, p.m, p.n, 16, common.seed, common.bits);
        BoxpertQuotient lo = boxpert_quotient(cfg, p.m, p.n, -40), hi = boxpert_quotient(cfg, p.m, p.n, 40);
        segs.push_back({{"m", c.m},
                        {"n", c.n},
                        {"images_formed", c.images_formed},
                        {"log10_c1", c.images_formed ? json(c.log10_c1()) : json(nullptr)},
                        {"ratio", c.images_formed ? json(c.ratio) : json(nullptr)},
                        {"pre_return_gap", c.pre_return_gap},
                        {"log10_pre_return_gap", c.log10_pre_return_gap},
                        {"boxpert_z_pm40", {lo.value, hi.value}},
                        {"non_interference", {ni.identical, ni.points}},
                        {"note", c.note}});
      }
      out.write("segments_summary.csv", summary.str());
      json holder = json::array();
      std::ostringstream hcsv;
      hcsv.precision(12);
      hcsv << "alpha,n,estimate,predicted,base\n";
      for (double a : alphas)
        for (int n : holder_ns) {
          HolderReport h = holder_estimate(cfg, n, a, holder_samples, common.seed);
          hcsv << a << "," << n << "," << h.estimate << "," << h.predicted << "," << h.base << "\n";
          holder.push_back({{"alpha", a}, {"n", n}, {"estimate", h.estimate}, {"predicted", h.predicted},
                            {"below_threshold", h.below_threshold}});
        }
      out.write("holder.csv", hcsv.str());
      json j = {{"segments", segs}, {"holder", holder}};
      out.write("connect.json", j.dump(2) + "\n");
      out.finish();
      std::cout << j.dump(2) << "\n";
      return sched.empty() ? kEmpty : kOk;
    }
    if (strip_cmd->parsed()) {
      Output out("strip-game", common);
      out.param("henon", {{"form", form}, {"mu", mu}, {"kappa", kappa}, {"xi", xi}, {"eta", eta}});
      out.param("steps", strip_cfg.steps);
      out.param("eps", strip_cfg.eps);
      out.param("tree_depth", strip_cfg.tree_depth);
      out.param("beam", strip_cfg.beam);
      HenonParams p = henon_from(mu, kappa, xi, eta, form);
      validate(p);
      BlenderMap f = BlenderMap::from(p);
      FixedPoint fp = fixed_point_Pstar(f);
      H5Geometry g = default_geometry(f);
      g.y_star = fp.y.mid();
      g.z_star = fp.z.mid();
      StripTrace t = strip_game(f, g, ell_hat_image(f, g), strip_cfg);
      out.write("strip.csv", strip_trace_csv(t));
      json j = {{"reached", t.reached}, {"hit_step", t.hit_step}, {"hit_depth", t.hit_depth},
                {"itinerary", t.itinerary}, {"hit", {t.hit_y, t.hit_z}}};
      out.write("strip.json", j.dump(2) + "\n");
      out.finish();
      std::cout << j.dump(2) << "\n";
      return t.reached ? kOk : kEmpty;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

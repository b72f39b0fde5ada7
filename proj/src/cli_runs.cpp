#include "crlab/cli/runs.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "crlab/embed/sections.hpp"
#include "crlab/embed/sphere_structure.hpp"
#include "crlab/fill/ambient.hpp"
#include "crlab/flow/flow.hpp"
#include "crlab/geom/catalog.hpp"
#include "crlab/geom/identities.hpp"
#include "crlab/io/serialize.hpp"
#include "crlab/ops/operators.hpp"

namespace crlab {

json RunConfig::to_json() const {
  json j;
  j["subcommand"] = subcommand;
  j["geometry"] = geometry;
  j["res"] = res;
  j["dt"] = dt;
  j["t_end"] = t_end;
  j["steps"] = steps;
  j["flow_kind"] = flow_kind;
  j["slices"] = slices;
  j["delta"] = delta;
  j["check"] = check;
  j["samples"] = samples;
  j["snapshot_every"] = snapshot_every;
  j["seed"] = seed;
  return j;
}

void RunConfig::apply_json(const json& j) {
  if (j.contains("geometry")) geometry = j["geometry"];
  if (j.contains("res")) res = j["res"];
  if (j.contains("dt")) dt = j["dt"];
  if (j.contains("t_end")) t_end = j["t_end"];
  if (j.contains("steps")) steps = j["steps"];
  if (j.contains("flow_kind")) flow_kind = j["flow_kind"];
  if (j.contains("slices")) slices = j["slices"];
  if (j.contains("delta")) delta = j["delta"];
  if (j.contains("check")) check = j["check"];
  if (j.contains("samples")) samples = j["samples"];
  if (j.contains("snapshot_every")) snapshot_every = j["snapshot_every"];
  if (j.contains("seed")) seed = j["seed"];
  if (j.contains("outdir")) outdir = j["outdir"];
}

void RunConfig::validate() const {
  if (res < 8 || res > 128 || (res & (res - 1)) != 0)
    throw Error("resolution must be a power of two between 8 and 128");
  if (delta <= 0) throw Error("tolerances must be positive");
}

std::uint64_t config_hash(const RunConfig& c) {
  std::string s = c.to_json().dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

json tolerance_set() {
  json t;
  t["catalog_rel"] = 1e-6;
  t["flat_sphere"] = 1e-8;
  t["identities"] = 1e-6;
  t["duality_rel"] = 1e-6;
  t["transport_order"] = 1.8;
  t["two_re_frakd"] = 1e-7;
  t["torsion_preservation_normA"] = 1e-6;
  t["certificate_u"] = 1e-7;
  t["fill_residual"] = 1e-6;
  t["fill_negative_control"] = 1e-3;
  t["jet_residual"] = 1e-12;
  t["cr_identity_closed"] = 1e-5;
  t["cr_identity_fallback"] = 1e-3;
  t["kernel_witness"] = 1e-6;
  t["nonzero_witness"] = 0.1;
  t["route"] = 1e-5;
  return t;
}

// ---- geometry spec mini-grammar: name:key=value,...[@NxN[xN]] -----------------

struct GeoSpec {
  std::string name;
  std::map<std::string, std::string> kv;
  std::vector<int> dims;
};

static GeoSpec parse_geometry(const std::string& spec) {
  GeoSpec g;
  std::string body = spec;
  auto at = body.find('@');
  if (at != std::string::npos) {
    std::string d = body.substr(at + 1);
    body = body.substr(0, at);
    size_t pos = 0;
    while (pos < d.size()) {
      size_t x = d.find('x', pos);
      std::string tok = d.substr(pos, x == std::string::npos ? x : x - pos);
      g.dims.push_back(std::stoi(tok));
      if (x == std::string::npos) break;
      pos = x + 1;
    }
  }
  auto colon = body.find(':');
  g.name = body.substr(0, colon);
  if (colon != std::string::npos) {
    std::string rest = body.substr(colon + 1);
    size_t pos = 0;
    while (pos < rest.size()) {
      size_t comma = rest.find(',', pos);
      std::string item = rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
      auto eq = item.find('=');
      if (eq == std::string::npos) throw Error("bad geometry parameter: " + item);
      g.kv[item.substr(0, eq)] = item.substr(eq + 1);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  return g;
}

// beta expressions of the form A*exp(i*x), A*exp(i*(2*x+3*y)), or 0
static Field parse_beta(ChartPtr chart, std::string expr) {
  std::string s;
  for (char c : expr)
    if (!std::isspace((unsigned char)c)) s.push_back(c);
  if (s == "0" || s.empty()) return constant<cplx>(chart, 0.0);
  auto star = s.find("*exp(i*");
  if (star == std::string::npos)
    throw Error("beta grammar: A*exp(i*<mx>*x[+<my>*y]) or 0, got " + expr);
  double amp = std::stod(s.substr(0, star));
  std::string inner = s.substr(star + 7);
  if (inner.empty() || inner.back() != ')') throw Error("beta grammar: missing )");
  inner.pop_back();
  if (!inner.empty() && inner.front() == '(') {
    if (inner.back() != ')') throw Error("beta grammar: unbalanced (");
    inner = inner.substr(1, inner.size() - 2);
  }
  int mx = 0, my = 0;
  size_t pos = 0;
  while (pos < inner.size()) {
    size_t plus = inner.find('+', pos + 1);
    std::string term = inner.substr(pos, plus == std::string::npos ? plus : plus - pos);
    int coef = 1;
    auto star2 = term.find('*');
    std::string var = term;
    if (star2 != std::string::npos) {
      coef = std::stoi(term.substr(0, star2));
      var = term.substr(star2 + 1);
    }
    if (var == "x") mx = coef;
    else if (var == "y") my = coef;
    else throw Error("beta grammar: unknown variable " + var);
    if (plus == std::string::npos) break;
    pos = plus;
    ++pos;
  }
  return beta_mode(chart, amp, mx, my);
}

struct BuiltGeometry {
  std::string kind;                 // "grid", "points", "surface"
  Structure grid;                   // solved structure for grid geometries
  JetStructure points;              // heis-flat / sphere as jets
  Hypersurface surface = make_sphere();
};

static BuiltGeometry build_geometry(const RunConfig& c) {
  GeoSpec g = parse_geometry(c.geometry);
  BuiltGeometry out;
  int res = c.res;
  if (!g.dims.empty()) res = g.dims[0];

  if (g.name == "t3-roto") {
    int n = g.kv.count("n") ? std::stoi(g.kv.at("n")) : 1;
    auto gg = catalog_t3_roto(n, {res, res, res});
    auto adm = admissible_coframe(gg.theta, gg.theta1_raw);
    out.kind = "grid";
    out.grid = solve_structure(gg.theta, adm.theta1);
  } else if (g.name == "nil-invariant") {
    auto base = catalog_nil_base(res, res);
    Field beta = parse_beta(base.chart, g.kv.count("beta") ? g.kv.at("beta") : "0");
    Field alpha = deformation_alpha(beta);
    out.kind = "grid";
    out.grid = solve_structure(base.theta, deformed_coframe(base.theta1, alpha, beta));
  } else if (g.name == "heis-flat") {
    int pts = g.kv.count("pts") ? std::stoi(g.kv.at("pts")) : 32;
    auto gg = catalog_heis_flat(pts);
    auto adm = admissible_coframe(gg.theta, gg.theta1_raw);
    out.kind = "points";
    out.points = solve_structure(gg.theta, adm.theta1);
  } else if (g.name == "sphere") {
    out.kind = "surface";
    out.surface = make_sphere();
    out.points = sphere_structure(std::min(c.samples, 96), 6, c.seed);
  } else if (g.name == "ellipsoid") {
    out.kind = "surface";
    out.surface = make_ellipsoid();
  } else if (g.name == "sphere-perturbed" || g.name == "perturbed") {
    double eps = g.kv.count("eps") ? std::stod(g.kv.at("eps")) : 0.01;
    int mode = g.kv.count("mode") ? std::stoi(g.kv.at("mode")) : 1;
    out.kind = "surface";
    out.surface = make_perturbed_sphere(eps, mode);
  } else {
    throw Error("unknown geometry name: " + g.name);
  }
  return out;
}

void write_output(const RunConfig& c, const json& summary, const std::string& name) {
  std::string outdir = c.outdir;
  if (const char* env = std::getenv("CRLAB_OUTDIR")) outdir = env;
  std::filesystem::create_directories(outdir);
  std::ofstream f(outdir + "/" + name);
  f << summary.dump(2) << "\n";
}

static json base_summary(const RunConfig& c) {
  json j;
  j["schema"] = 1;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)config_hash(c));
  j["config_hash"] = buf;
  j["config"] = c.to_json();
  j["tolerances"] = tolerance_set();
  j["seed"] = c.seed;
  return j;
}

json run_invariants(const RunConfig& c) {
  json j = base_summary(c);
  auto g = build_geometry(c);
  if (g.kind == "grid" || g.kind == "points") {
    auto fill = [&](auto& st) {
      j["W_max"] = max_abs(st.W);
      j["normA"] = max_abs(st.A11);
      j["normQ"] = max_abs(cartan_tensor(st));
      j["res_normalization"] = st.res.normalization;
      j["res_structure_eq"] = st.res.structure_eq;
      j["res_curvature_eq"] = st.res.curvature_eq;
      j["imW"] = st.res.imW;
    };
    if (g.kind == "grid") {
      fill(g.grid);
      j["energy"] = action_energy(g.grid);
    } else {
      fill(g.points);
    }
  } else if (g.kind == "surface") {
    auto pts = sample_surface(g.surface, std::min(c.samples, 100), c.seed);
    double worstA = 0;
    for (auto& p : pts) {
      auto conn = connection_at(g.surface, p[0], p[1]);
      worstA = std::max(worstA, std::abs(conn.A));
    }
    j["normA_surface"] = worstA;
    j["derivative_path"] = g.surface.derivative_path();
    if (!g.points.theta.c.empty()) {  // intrinsic jets available (round sphere)
      j["W_max"] = max_abs(g.points.W);
      j["normA"] = max_abs(g.points.A11);
      j["normQ"] = max_abs(cartan_tensor(g.points));
    }
  }
  write_output(c, j, "invariants.json");
  return j;
}

static FlowKind parse_kind(const std::string& s) {
  if (s == "torsion") return FlowKind::torsion;
  if (s == "cartan") return FlowKind::cartan;
  if (s == "gauge-fixed") return FlowKind::gauge_fixed;
  if (s == "coupled-torsion") return FlowKind::coupled_torsion;
  throw Error("unknown flow kind: " + s);
}

static void write_history_csv(const RunConfig& c, const std::vector<DiagnosticsRecord>& hist) {
  std::string outdir = c.outdir;
  if (const char* env = std::getenv("CRLAB_OUTDIR")) outdir = env;
  std::filesystem::create_directories(outdir);
  std::ofstream f(outdir + "/history.csv");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)config_hash(c));
  f << "# schema=1 config_hash=" << buf << " tolerances=" << tolerance_set().dump() << "\n";
  f << "t,normA,normQ,energy,res21,res24,extra\n";
  f.setf(std::ios::scientific);
  f.precision(17);
  for (const auto& r : hist)
    f << r.t << "," << r.normA << "," << r.normQ << "," << r.energy << ","
      << r.res21 << "," << r.res24 << "," << r.extra << "\n";
}

json run_flow_cmd(const RunConfig& c) {
  json j = base_summary(c);
  auto g = build_geometry(c);
  if (g.kind != "grid") throw Error("flow runs need a grid geometry");
  FlowKind kind = parse_kind(c.flow_kind);

  auto s = make_flow_state(g.grid);
  if (kind == FlowKind::gauge_fixed) freeze_reference(s);

  double dt = c.dt > 0 ? c.dt : max_stable_dt(*g.grid.chart, kind);
  if (dt > max_stable_dt(*g.grid.chart, kind))
    throw Error("dt violates the step-size guard for this flow kind");
  int steps = c.steps > 0 ? c.steps : std::max(1, int(c.t_end / dt));

  auto res = run_flow(s, kind, dt, steps, c.snapshot_every);
  write_history_csv(c, s.history);

  if (c.snapshot_every > 0) {
    std::string outdir = c.outdir;
    if (const char* env = std::getenv("CRLAB_OUTDIR")) outdir = env;
    json snaps;
    snaps["schema"] = 1;
    char hb[32];
    std::snprintf(hb, sizeof(hb), "%016llx", (unsigned long long)config_hash(c));
    snaps["config_hash"] = hb;
    snaps["tolerances"] = tolerance_set();
    for (size_t k = 0; k < res.slices.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof(name), "snapshot_%03zu", k);
      save_structure(res.slices[k], outdir + "/" + name);
      json row;
      row["t"] = res.slice_times[k];
      row["dir"] = name;
      snaps["slices"].push_back(row);
    }
    std::ofstream sf(outdir + "/snapshots.json");
    sf << snaps.dump(2) << "\n";
  }

  j["kind"] = flow_kind_name(kind);
  j["dt"] = dt;
  j["steps_requested"] = steps;
  j["steps_completed"] = int(s.history.size());
  j["termination"] = res.termination;
  if (res.termination != "completed") {
    // persist the last healthy state alongside the diagnostics
    std::string outdir = c.outdir;
    if (const char* env = std::getenv("CRLAB_OUTDIR")) outdir = env;
    save_structure(assemble_structure(s), outdir + "/last_state");
    j["last_state"] = "last_state";
  }
  if (!s.history.empty()) {
    j["final_t"] = s.history.back().t;
    j["final_normA"] = s.history.back().normA;
    j["final_normQ"] = s.history.back().normQ;
    j["final_energy"] = s.history.back().energy;
  }
  write_output(c, j, "flow.json");
  return j;
}

json run_fill(const RunConfig& c) {
  json j = base_summary(c);
  auto g = build_geometry(c);
  if (g.kind != "grid") throw Error("fill runs need a grid geometry");
  FlowKind kind = parse_kind(c.flow_kind);

  auto s = make_flow_state(g.grid);
  if (kind == FlowKind::gauge_fixed) freeze_reference(s);
  int per = 5;
  int steps = per * (c.slices - 1);
  double dt = c.dt > 0 ? c.dt : std::min(c.t_end / std::max(steps, 1),
                                         max_stable_dt(*g.grid.chart, kind));
  auto hist = run_flow(s, kind, dt, steps, per);
  if (hist.termination != "completed") {
    j["termination"] = hist.termination;
    write_output(c, j, "fill.json");
    return j;
  }

  std::vector<Field> us;
  json per_slice = json::array();
  double margin = 1e300;
  for (size_t k = 0; k < hist.slices.size(); ++k) {
    const Structure& sl = hist.slices[k];
    FlowRhs<cplx> rhs = flow_rhs(sl, kind, s.has_K ? &s.Kmat : nullptr);
    auto cert = solve_certificate(sl, rhs.E.e11);
    json row;
    row["t"] = hist.slice_times[k];
    row["residual_l2"] = cert.residual_l2;
    row["residual_max"] = cert.residual_max;
    row["margin"] = cert.margin;
    row["iterations"] = cert.iterations;
    per_slice.push_back(row);
    margin = std::min(margin, cert.margin);
    us.push_back(cert.u);
  }
  j["certificates"] = per_slice;
  j["margin"] = margin;

  if (margin >= c.delta) {
    auto amb = build_ambient(hist.slice_times, hist.slices, us, {c.delta});
    auto [r1, r2] = integrability_residuals(amb);
    j["r1"] = r1;
    j["r2"] = r2;
  } else {
    j["note"] = "certificate margin below delta; ambient structure not built";
  }
  write_output(c, j, "fill.json");
  return j;
}

json run_embed(const RunConfig& c) {
  json j = base_summary(c);
  auto g = build_geometry(c);
  if (g.kind != "surface") throw Error("embed runs need a hypersurface geometry");
  auto pts = sample_surface(g.surface, c.samples, c.seed);

  Poly f = poly_z1() * poly_z2b();  // default test function
  std::vector<double> vals;
  vals.reserve(pts.size());
  if (c.check == "lemma62") {
    for (auto& p : pts) vals.push_back(dbar_b_check(g.surface, f, p[0], p[1]).lemma62);
  } else if (c.check == "chi") {
    Poly w = (poly_z1b() * poly_z1b() + poly_z1() * poly_z2()) * cplx(0.05);
    for (auto& p : pts) vals.push_back(chi_embedding(g.surface, w, p[0], p[1]).cr_defect);
  } else if (c.check == "tangency") {
    Poly w = poly_z1b() * poly_z1b() * cplx(0.5);
    for (auto& p : pts) vals.push_back(tangency_residual(g.surface, w, p[0], p[1], 1e-2));
  } else {
    throw Error("unknown embed check: " + c.check);
  }
  std::sort(vals.begin(), vals.end());
  double mean = 0;
  for (double v : vals) mean += v;
  mean /= double(vals.size());
  j["check"] = c.check;
  j["samples"] = int(vals.size());
  j["max"] = vals.back();
  j["mean"] = mean;
  j["q50"] = vals[vals.size() / 2];
  j["q90"] = vals[(vals.size() * 9) / 10];
  j["derivative_path"] = g.surface.derivative_path();
  write_output(c, j, "embed.json");
  return j;
}

} // namespace crlab

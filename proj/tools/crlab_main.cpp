// crlab: a numerical laboratory for 3-dimensional pseudohermitian geometry.
// Subcommands: invariants, flow, fill, embed, selftest.

#include <omp.h>

#include <cstdio>
#include <fstream>

#include <CLI11.hpp>

#include "crlab/cli/runs.hpp"
#include "crlab/cli/selftest.hpp"
#include "crlab/flow/flow.hpp"

using namespace crlab;

static void add_common(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file; flags override its values");
  cmd->add_option("--geometry", cfg.geometry,
                  "geometry spec: name:key=value,...[@dims]. Names: t3-roto(n), "
                  "nil-invariant(beta=A*exp(i*x) style), heis-flat(pts), sphere, "
                  "sphere-perturbed(eps,mode)");
  cmd->add_option("--res", cfg.res, "grid resolution (power of two, 8..128)");
  cmd->add_option("--seed", cfg.seed, "random seed, recorded in every output");
  cmd->add_option("--out", cfg.outdir, "output directory (env CRLAB_OUTDIR overrides)");
}

int main(int argc, char** argv) {
  if (const char* th = std::getenv("CRLAB_THREADS")) {
    int n = std::atoi(th);
    if (n > 0) omp_set_num_threads(n);
  }

  CLI::App app{"pseudohermitian geometry laboratory"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  auto* inv = app.add_subcommand("invariants", "solve a catalog geometry and report its invariants");
  add_common(inv, cfg, config_path);

  auto* flow = app.add_subcommand("flow", "integrate a geometric flow and emit diagnostics");
  add_common(flow, cfg, config_path);
  flow->add_option("--kind", cfg.flow_kind, "torsion | cartan | gauge-fixed | coupled-torsion");
  flow->add_option("--dt", cfg.dt, "time step (default: the step-size guard)");
  flow->add_option("--steps", cfg.steps, "number of steps (default from --t-end)");
  flow->add_option("--t-end", cfg.t_end, "horizon when --steps is not given");
  flow->add_option("--snap-every", cfg.snapshot_every, "save field snapshots every N steps");

  auto* fill = app.add_subcommand("fill", "certificates along a flow and the ambient residuals");
  add_common(fill, cfg, config_path);
  fill->add_option("--flow,--rhs", cfg.flow_kind, "torsion | cartan | gauge-fixed");
  fill->add_option("--slices", cfg.slices, "number of equally spaced slices (>= 5)");
  fill->add_option("--delta", cfg.delta, "certificate margin floor");
  fill->add_option("--t-end", cfg.t_end, "flow horizon");
  fill->add_option("--dt", cfg.dt, "time step override");

  auto* embed = app.add_subcommand("embed", "pointwise hypersurface checks");
  add_common(embed, cfg, config_path);
  embed->add_option("--gamma", cfg.geometry,
                    "defining function: sphere | ellipsoid | perturbed:eps=...,mode=...");
  embed->add_option("--check", cfg.check, "lemma62 | chi | tangency");
  embed->add_option("--samples", cfg.samples, "number of surface samples");

  auto* self = app.add_subcommand("selftest", "run the acceptance suite");
  self->add_option("--seed", cfg.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
  }

  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw Error("cannot open config " + config_path);
      json j;
      f >> j;
      CLI::App* active = app.get_subcommands().front();
      auto keep_flag = [&](const char* name) {
        auto* opt = active->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
      };
      RunConfig merged;  // defaults, then file, then explicit flags
      merged.apply_json(j);
      merged.outdir = keep_flag("--out") ? cfg.outdir : merged.outdir;
      if (keep_flag("--geometry") || keep_flag("--gamma")) merged.geometry = cfg.geometry;
      if (keep_flag("--res")) merged.res = cfg.res;
      if (keep_flag("--seed")) merged.seed = cfg.seed;
      if (keep_flag("--kind") || keep_flag("--flow")) merged.flow_kind = cfg.flow_kind;
      if (keep_flag("--dt")) merged.dt = cfg.dt;
      if (keep_flag("--steps")) merged.steps = cfg.steps;
      if (keep_flag("--t-end")) merged.t_end = cfg.t_end;
      if (keep_flag("--snap-every")) merged.snapshot_every = cfg.snapshot_every;
      if (keep_flag("--slices")) merged.slices = cfg.slices;
      if (keep_flag("--delta")) merged.delta = cfg.delta;
      if (keep_flag("--check")) merged.check = cfg.check;
      if (keep_flag("--samples")) merged.samples = cfg.samples;
      cfg = merged;
    }

    if (app.got_subcommand(self)) {
      auto results = run_acceptance(cfg.seed);
      bool ok = print_acceptance(results);
      return ok ? 0 : 2;
    }

    cfg.validate();
    json out;
    if (app.got_subcommand(inv)) {
      cfg.subcommand = "invariants";
      out = run_invariants(cfg);
    } else if (app.got_subcommand(flow)) {
      cfg.subcommand = "flow";
      out = run_flow_cmd(cfg);
      if (out.contains("termination") && out["termination"] != "completed") {
        std::fprintf(stderr, "flow aborted: %s\n",
                     out["termination"].get<std::string>().c_str());
        std::printf("%s\n", out.dump(2).c_str());
        return 3;
      }
    } else if (app.got_subcommand(fill)) {
      cfg.subcommand = "fill";
      out = run_fill(cfg);
      if (out.contains("termination") && out["termination"] != "completed") return 3;
    } else if (app.got_subcommand(embed)) {
      cfg.subcommand = "embed";
      out = run_embed(cfg);
    }
    std::printf("%s\n", out.dump(2).c_str());
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

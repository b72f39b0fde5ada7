#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "crlab/fields/chart.hpp"

namespace crlab {

using json = nlohmann::json;

// Run configuration shared by the CLI subcommands. Flags override values read
// from a JSON config file; every output embeds the canonical hash and the
// tolerance set in use.
struct RunConfig {
  std::string subcommand;
  std::string geometry = "t3-roto:n=1";
  int res = 32;
  double dt = 0.0;          // 0: derived from the step-size guard
  double t_end = 0.1;
  int steps = 0;            // 0: derived from t_end / dt
  std::string flow_kind = "torsion";
  int slices = 9;
  double delta = 1e-3;      // certificate margin floor
  std::string check = "lemma62";
  int samples = 200;
  int snapshot_every = 0;
  std::string outdir = "out";
  std::uint64_t seed = 1;

  json to_json() const;
  void apply_json(const json& j);
  void validate() const;
};

std::uint64_t config_hash(const RunConfig& c);

json run_invariants(const RunConfig& c);
json run_flow_cmd(const RunConfig& c);   // also writes history.csv + snapshots
json run_fill(const RunConfig& c);
json run_embed(const RunConfig& c);

// tolerances pinned for the acceptance gate, embedded into outputs
json tolerance_set();

void write_output(const RunConfig& c, const json& summary, const std::string& name);

} // namespace crlab

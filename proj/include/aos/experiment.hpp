#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aos/baselines.hpp"
#include "aos/config.hpp"
#include "aos/dataset.hpp"
#include "aos/env.hpp"

namespace aos {

struct EvalStats {
  double mean_u = 0, mean_aos = 0, mean_energy = 0;
  long slots = 0;
};

struct TraceRow {
  long slot = 0;
  int c = 0, n = 0, m = 0;
  double p_w = 0, energy_j = 0;
  bool delivered = false;
  double u = 0;
};

// Frozen-policy rollout on a fresh environment; the policy's action draws use
// a stream separate from the environment's own randomness.
EvalStats evaluate_policy(const EnvContext& ctx, const PolicyFn& policy,
                          long horizon, std::uint64_t seed,
                          std::vector<TraceRow>* trace = nullptr);

Dataset collect_experience(Env& env, const PolicyFn& policy, long count,
                           Rng& action_rng, DatasetMeta meta);

// Scheme identifiers accepted by the drivers and written to CSV:
//   random, a2c, online-ac, offline-ac-expert, offline-ac-random,
//   offline-ac-mixed, cql-expert, cql-random, cql-mixed
const std::vector<std::string>& known_schemes();

struct SchemeRequest {
  std::string scheme;
  double xi = 1.0;  // expert share of the training data for the mixed schemes
};

struct ResultRow {
  std::string scheme;
  double chi = 0, varphi = 0;
  std::optional<double> xi;  // empty when the scheme has no dataset
  int irs_elements = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  EvalStats stats;
};

struct CurveRow {
  std::string scheme;
  double chi = 0, varphi = 0;
  std::optional<double> xi;
  int irs_elements = 0;
  std::uint64_t seed = 0;
  long iter = 0;
  double eval_mean_u = 0;
};

struct SeedTask {
  RunConfig cfg;  // already specialized to its grid point
  int seed_index = 0;
  std::vector<SchemeRequest> schemes;
  bool curves = false;
};

struct SeedRows {
  std::vector<ResultRow> results;
  std::vector<CurveRow> curves;
};

// Trains and evaluates every requested scheme for one seed. Expensive shared
// pieces (the behavior actor, the expert and random datasets) are built once
// and reused across schemes.
SeedRows run_seed(const SeedTask& task);

struct SweepSpec {
  std::string param;  // "", "chi", "varphi", "irs_elements", "xi"
  std::vector<double> values;
  std::vector<SchemeRequest> schemes;
  bool curves = false;
};

struct SweepOutput {
  std::vector<ResultRow> results;
  std::vector<CurveRow> curves;
};

// Grid x seeds, fanned out over a worker pool, merged in task order so the
// output is independent of scheduling.
SweepOutput run_sweep(const RunConfig& base, const SweepSpec& spec);

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path);
void write_curves_csv(const std::vector<CurveRow>& rows, const std::string& path);
void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& path);

}  // namespace aos

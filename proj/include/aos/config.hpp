#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aos/common.hpp"

namespace aos {

// Power-bearing fields are stored in watts; the JSON surface takes dBm / dB
// and conversion happens once at parse time.
struct RadioConfig {
  double bandwidth_hz = 1e7;
  double noise_psd_w_hz = 3.9810717055349565e-21;  // -174 dBm/Hz
  double payload_bits = 6.2e6;
  double slot_s = 0.1;
  double handover_s = 1e-3;
  double zeta = 1.0;      // IRS reflection amplitude coefficient
  double max_power_w = 1.0;  // 30 dBm transmit cap, shared by SN and relays
};

struct TopologyConfig {
  int irs_elements = 75;
  int relays = 5;
  double pathloss_exponent = 2.5;
  double ref_gain_db = -30.0;  // channel gain at 1 m
  double rician_k = 10.0;      // K-factor for IRS-assisted links
  double sn_irs_m = 35.0;
  double irs_dest_m = 35.0;
  std::vector<double> sn_rs_m = {150, 200, 250, 300, 350};
  std::vector<double> rs_dest_m = {350, 300, 250, 200, 150};
  std::vector<double> rs_irs_m = {60, 55, 50, 55, 60};
};

struct ProcessConfig {
  int states = 9;        // observed process alphabet size
  double chi = 0.5;      // probability the process holds its value for a slot
  double varphi = 0.5;   // probability a fresh update is inferred correctly
  int aos_cap = 30;
};

struct UtilityConfig {
  double kappa = 0.05;          // age weight
  double vartheta = 1.0;        // energy weight
  double sampling_cost_j = 0.01;
};

struct OnlineAcConfig {
  int hidden = 64;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  int target_reset_slots = 100;
  long slots = 60000;
  int metrics_window = 1000;
};

struct OfflineAcConfig {
  int hidden = 64;
  double actor_lr = 1e-2;
  double critic_lr = 1e-2;
  double rho = 5e-4;   // conservatism weight
  double nu = 1.0;     // ranking margin
  int batch = 1000;
  int target_reset_iters = 10;
  long iters = 1000;
  int eval_every = 25;
};

struct A2cConfig {
  int hidden = 64;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  double entropy_bonus = 1e-3;
  long slots = 60000;
  int metrics_window = 1000;
};

struct CqlConfig {
  int hidden = 64;
  double lr = 3e-4;
  double rho = 5e-4;  // logsumexp regularizer weight
  int batch = 1000;
  int target_reset_iters = 10;
  long iters = 1000;
};

struct ExperimentConfig {
  long dataset_size = 20000;
  long eval_horizon = 10000;
  int seeds = 5;
  int workers = 0;  // 0 = hardware concurrency
  double expert_fraction = 1.0;  // share of expert tuples when mixing datasets
};

struct RunConfig {
  RadioConfig radio;
  TopologyConfig topo;
  ProcessConfig process;
  UtilityConfig util;
  double gamma = 0.9;
  double alpha = 1e-4;  // entropy temperature shared by both actor-critic schemes
  OnlineAcConfig online;
  OfflineAcConfig offline;
  A2cConfig a2c;
  CqlConfig cql;
  ExperimentConfig experiment;
  std::uint64_t seed = 1;

  int action_count() const { return topo.relays + 1; }
  void validate() const;           // throws ConfigError
  void apply_full_scale();        // larger budgets for full-fidelity runs
};

// Strict JSON loading: unknown keys and out-of-domain values raise ConfigError.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);
std::string dump_run_config(const RunConfig& c);  // canonical form, sorted keys
std::string config_hash_hex(const RunConfig& c);

}  // namespace aos

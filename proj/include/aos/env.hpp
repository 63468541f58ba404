#pragma once

#include <span>
#include <vector>

#include "aos/channel.hpp"
#include "aos/common.hpp"
#include "aos/config.hpp"

namespace aos {

// Simulator state. `c` is the age of semantics tracked by the destination;
// `x` / `xhat` are the true process value and the destination's inference,
// carried so transitions can be sampled (policies never see them directly).
// `y` is the relay currently associated with the source, 0-based.
struct SystemState {
  int c = 0;
  int x = 0;
  int xhat = 0;
  int y = 0;
  ChannelProfile chan;
};

struct SlotInfo {
  double utility = 0.0;
  double aos = 0.0;      // age at the start of the slot
  double energy_j = 0.0;
  double power_w = 0.0;  // source transmit power actually used
  double tau1 = 0.0;
  double tau2 = 0.0;
  bool sampled = false;
  bool delivered = false;
  bool handover = false;
  int relay = -1;  // 0-based relay index, -1 when idle
};

// Standardizes the log-magnitude channel features. Fitted once per topology
// from a fixed-seed warmup so every run of a given config sees identical
// feature geometry regardless of the user seed.
struct FeatureScaler {
  std::vector<double> mean, sd;  // one pair per relay and hop (2K entries)
  static FeatureScaler fit(const TopologyConfig& topo, const RadioConfig& radio,
                           int draws);
};

struct EnvContext {
  RadioConfig radio;
  TopologyConfig topo;
  ProcessConfig process;
  UtilityConfig util;
  FeatureScaler scaler;
};

EnvContext make_env_context(const RunConfig& cfg);

int feature_length(const TopologyConfig& topo);  // 1 + 3K

int aos_update(int c, bool match, int cap);

double slot_utility(int c, double energy_j, const UtilityConfig& util);

// Action 0 idles; action k in 1..K samples and routes through relay k-1.
// Advances the state in place and reports the slot outcome.
SlotInfo env_step(SystemState& s, int action, const EnvContext& ctx,
                  Rng& process_rng, Rng& channel_rng);

SystemState initial_state(const EnvContext& ctx, Rng& channel_rng);

void encode_features(const SystemState& s, const EnvContext& ctx,
                     std::vector<double>& out);

// Minimal environment surface the trainers and evaluators run against.
class Env {
 public:
  virtual ~Env() = default;
  virtual int action_count() const = 0;
  virtual int feature_len() const = 0;
  virtual std::span<const double> features() const = 0;
  virtual SlotInfo step(int action) = 0;
};

class AosEnv : public Env {
 public:
  AosEnv(EnvContext ctx, std::uint64_t seed);
  AosEnv(const RunConfig& cfg, std::uint64_t seed);

  int action_count() const override;
  int feature_len() const override;
  std::span<const double> features() const override;
  SlotInfo step(int action) override;

  const SystemState& state() const { return s_; }
  const EnvContext& context() const { return ctx_; }

 private:
  EnvContext ctx_;
  SystemState s_;
  Rng process_rng_;
  Rng channel_rng_;
  std::vector<double> feat_;
};

}  // namespace aos

#include "aos/env.hpp"

#include <algorithm>
#include <cmath>

namespace aos {
namespace {

// Warmup stream for the feature scaler; independent of the user seed on
// purpose so identical configs map states to identical feature vectors.
constexpr std::uint64_t kScalerSeed = 0x5ca1ab1e0ddba11ULL;

double safe_log10(double v) { return std::log10(std::max(v, 1e-300)); }

// Uniform draw over {0, ..., n-1} \ {skip}.
int draw_other(Rng& rng, int n, int skip) {
  std::uniform_int_distribution<int> d(0, n - 2);
  int v = d(rng);
  return v >= skip ? v + 1 : v;
}

}  // namespace

FeatureScaler FeatureScaler::fit(const TopologyConfig& topo,
                                 const RadioConfig& radio, int draws) {
  if (draws < 2) throw StructuralError("scaler warmup needs at least 2 draws");
  const int K = topo.relays;
  Rng rng(kScalerSeed);
  std::vector<double> sum(2 * K, 0.0), sumsq(2 * K, 0.0);
  for (int d = 0; d < draws; ++d) {
    ChannelProfile p = sample_channel_profile(rng, topo, radio);
    for (int k = 0; k < K; ++k) {
      double a = safe_log10(p.amp_sn[k]);
      double b = safe_log10(p.amp_rs[k]);
      sum[k] += a;
      sumsq[k] += a * a;
      sum[K + k] += b;
      sumsq[K + k] += b * b;
    }
  }
  FeatureScaler s;
  s.mean.resize(2 * K);
  s.sd.resize(2 * K);
  for (int i = 0; i < 2 * K; ++i) {
    s.mean[i] = sum[i] / draws;
    double var = sumsq[i] / draws - s.mean[i] * s.mean[i];
    s.sd[i] = std::max(std::sqrt(std::max(var, 0.0)), 1e-9);
  }
  return s;
}

EnvContext make_env_context(const RunConfig& cfg) {
  EnvContext ctx{cfg.radio, cfg.topo, cfg.process, cfg.util,
                 FeatureScaler::fit(cfg.topo, cfg.radio, 10000)};
  return ctx;
}

int feature_length(const TopologyConfig& topo) { return 1 + 3 * topo.relays; }

int aos_update(int c, bool match, int cap) {
  if (c < 0 || cap < 1) throw StructuralError("bad age arguments");
  return match ? 0 : std::min(c + 1, cap);
}

double slot_utility(int c, double energy_j, const UtilityConfig& util) {
  if (c < 0 || energy_j < 0) throw StructuralError("bad utility arguments");
  return std::exp(-(util.kappa * c + util.vartheta * energy_j));
}

SystemState initial_state(const EnvContext& ctx, Rng& channel_rng) {
  SystemState s;
  s.chan = sample_channel_profile(channel_rng, ctx.topo, ctx.radio);
  return s;
}

SlotInfo env_step(SystemState& s, int action, const EnvContext& ctx,
                  Rng& process_rng, Rng& channel_rng) {
  const int K = ctx.topo.relays;
  if (action < 0 || action > K) throw StructuralError("action out of range");

  SlotInfo info;
  info.aos = s.c;
  const int pre_c = s.c;

  if (action > 0) {
    const int m = action - 1;
    info.sampled = true;
    info.relay = m;
    info.handover = (m != s.y);
    Subslots sub = subslot_durations(s.chan.amp_rs[m], ctx.radio, info.handover);
    info.tau1 = sub.tau1;
    info.tau2 = sub.tau2;
    info.energy_j = ctx.util.sampling_cost_j;
    auto p_req = required_power(s.chan.amp_sn[m], sub.tau1, ctx.radio);
    if (p_req && *p_req <= ctx.radio.max_power_w) {
      info.delivered = true;
      info.power_w = *p_req;
      info.energy_j += *p_req * sub.tau1;
    } else if (p_req) {
      // The cap binds: the source transmits the whole window at the cap and
      // the payload does not complete.
      info.power_w = ctx.radio.max_power_w;
      info.energy_j += ctx.radio.max_power_w * sub.tau1;
    }
    s.y = m;  // the relay was engaged either way
  }

  info.utility = slot_utility(pre_c, info.energy_j, ctx.util);

  if (info.delivered) {
    std::bernoulli_distribution ok(ctx.process.varphi);
    s.xhat = ok(process_rng) ? s.x : draw_other(process_rng, ctx.process.states, s.x);
  }

  std::bernoulli_distribution hold(ctx.process.chi);
  if (!hold(process_rng)) s.x = draw_other(process_rng, ctx.process.states, s.x);

  s.c = aos_update(pre_c, s.xhat == s.x, ctx.process.aos_cap);
  s.chan = sample_channel_profile(channel_rng, ctx.topo, ctx.radio);
  return info;
}

void encode_features(const SystemState& s, const EnvContext& ctx,
                     std::vector<double>& out) {
  const int K = ctx.topo.relays;
  out.assign(feature_length(ctx.topo), 0.0);
  out[0] = static_cast<double>(s.c) / ctx.process.aos_cap;
  out[1 + s.y] = 1.0;
  for (int k = 0; k < K; ++k) {
    out[1 + K + k] =
        (safe_log10(s.chan.amp_sn[k]) - ctx.scaler.mean[k]) / ctx.scaler.sd[k];
    out[1 + 2 * K + k] = (safe_log10(s.chan.amp_rs[k]) - ctx.scaler.mean[K + k]) /
                         ctx.scaler.sd[K + k];
  }
}

AosEnv::AosEnv(EnvContext ctx, std::uint64_t seed)
    : ctx_(std::move(ctx)),
      process_rng_(make_rng(seed, 0x22)),
      channel_rng_(make_rng(seed, 0x11)) {
  s_ = initial_state(ctx_, channel_rng_);
  encode_features(s_, ctx_, feat_);
}

AosEnv::AosEnv(const RunConfig& cfg, std::uint64_t seed)
    : AosEnv(make_env_context(cfg), seed) {}

int AosEnv::action_count() const { return ctx_.topo.relays + 1; }

int AosEnv::feature_len() const { return feature_length(ctx_.topo); }

std::span<const double> AosEnv::features() const { return feat_; }

SlotInfo AosEnv::step(int action) {
  SlotInfo info = env_step(s_, action, ctx_, process_rng_, channel_rng_);
  encode_features(s_, ctx_, feat_);
  return info;
}

}  // namespace aos

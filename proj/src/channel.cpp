#include "aos/channel.hpp"

#include <cmath>

namespace aos {

double pathloss_gain(double dist_m, double exponent, double ref_gain_db) {
  if (dist_m <= 0) throw StructuralError("pathloss distance must be positive");
  return db_to_linear(ref_gain_db) * std::pow(dist_m, -exponent);
}

std::complex<double> draw_rayleigh(Rng& rng, double gain) {
  std::normal_distribution<double> nd(0.0, 1.0);
  double re = nd(rng);
  double im = nd(rng);
  double s = std::sqrt(gain / 2.0);
  return {s * re, s * im};
}

std::complex<double> draw_rician(Rng& rng, double gain, double k_factor) {
  std::normal_distribution<double> nd(0.0, 1.0);
  double re = nd(rng);
  double im = nd(rng);
  // Only magnitudes feed the rate formulas and the scatter term is circularly
  // symmetric, so the specular component can sit on the real axis.
  double los = std::sqrt(gain * k_factor / (k_factor + 1.0));
  double s = std::sqrt(gain / (2.0 * (k_factor + 1.0)));
  return {los + s * re, s * im};
}

double effective_amplitude(double direct_mag, std::span<const double> casc_a,
                           std::span<const double> casc_b, double zeta) {
  if (casc_a.size() != casc_b.size())
    throw StructuralError("cascade hop magnitude lists differ in length");
  if (direct_mag < 0) throw StructuralError("direct magnitude must be nonnegative");
  double sum = 0.0;
  for (std::size_t i = 0; i < casc_a.size(); ++i) {
    if (casc_a[i] < 0 || casc_b[i] < 0)
      throw StructuralError("cascade magnitudes must be nonnegative");
    sum += casc_a[i] * casc_b[i];
  }
  return direct_mag + zeta * sum;
}

double achievable_rate(double power_w, double amp, const RadioConfig& radio) {
  if (power_w < 0) throw StructuralError("power must be nonnegative");
  double noise = radio.bandwidth_hz * radio.noise_psd_w_hz;
  double snr = power_w * amp * amp / noise;
  return radio.bandwidth_hz * std::log2(1.0 + snr);
}

Subslots subslot_durations(double amp_rs_hop, const RadioConfig& radio, bool handover) {
  double r2 = achievable_rate(radio.max_power_w, amp_rs_hop, radio);
  double tau2 = r2 > 0 ? radio.payload_bits / r2
                       : std::numeric_limits<double>::infinity();
  double tau1 = radio.slot_s - tau2 - (handover ? radio.handover_s : 0.0);
  return {tau1, tau2};
}

std::optional<double> required_power(double amp, double tau1, const RadioConfig& radio) {
  if (amp <= 0 || tau1 <= 0) return std::nullopt;
  double spectral = radio.payload_bits / (tau1 * radio.bandwidth_hz);
  double noise = radio.bandwidth_hz * radio.noise_psd_w_hz;
  double p = noise / (amp * amp) * (std::exp2(spectral) - 1.0);
  if (!std::isfinite(p)) return std::nullopt;
  return p;
}

ChannelProfile sample_channel_profile(Rng& rng, const TopologyConfig& topo,
                                      const RadioConfig& radio) {
  const int I = topo.irs_elements;
  const int K = topo.relays;
  const double ex = topo.pathloss_exponent;
  const double ref = topo.ref_gain_db;

  double g_sn_irs = pathloss_gain(topo.sn_irs_m, ex, ref);
  double g_irs_d = pathloss_gain(topo.irs_dest_m, ex, ref);

  std::vector<double> sn_irs(I), irs_d(I);
  for (int i = 0; i < I; ++i) sn_irs[i] = std::abs(draw_rician(rng, g_sn_irs, topo.rician_k));
  for (int i = 0; i < I; ++i) irs_d[i] = std::abs(draw_rician(rng, g_irs_d, topo.rician_k));

  ChannelProfile prof;
  prof.amp_sn.resize(K);
  prof.amp_rs.resize(K);
  std::vector<double> rs_irs(I);
  for (int k = 0; k < K; ++k) {
    double g_sn_rs = pathloss_gain(topo.sn_rs_m[k], ex, ref);
    double g_rs_d = pathloss_gain(topo.rs_dest_m[k], ex, ref);
    double g_rs_irs = pathloss_gain(topo.rs_irs_m[k], ex, ref);
    double d_sn = std::abs(draw_rayleigh(rng, g_sn_rs));
    double d_rs = std::abs(draw_rayleigh(rng, g_rs_d));
    // One draw per element serves both hops within the slot (reciprocity).
    for (int i = 0; i < I; ++i)
      rs_irs[i] = std::abs(draw_rician(rng, g_rs_irs, topo.rician_k));
    prof.amp_sn[k] = effective_amplitude(d_sn, sn_irs, rs_irs, radio.zeta);
    prof.amp_rs[k] = effective_amplitude(d_rs, rs_irs, irs_d, radio.zeta);
  }
  return prof;
}

}  // namespace aos

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "aos/common.hpp"
#include "aos/config.hpp"

namespace aos {

// Per-slot fading snapshot: one effective amplitude per relay and hop, with the
// reflect-path element products already folded in.
struct ChannelProfile {
  std::vector<double> amp_sn;  // source -> relay k, IRS assisted
  std::vector<double> amp_rs;  // relay k -> destination, IRS assisted
};

struct Subslots {
  double tau1;  // source -> relay transmission window
  double tau2;  // relay -> destination transmission window
};

double pathloss_gain(double dist_m, double exponent, double ref_gain_db);

// Fading draws are unit-mean-square scaled by `gain`: E|h|^2 == gain exactly.
std::complex<double> draw_rayleigh(Rng& rng, double gain);
std::complex<double> draw_rician(Rng& rng, double gain, double k_factor);

// Combined direct plus reflected amplitude. `casc_a` and `casc_b` carry the
// per-element magnitudes of the two cascade hops and must be equally sized.
double effective_amplitude(double direct_mag, std::span<const double> casc_a,
                           std::span<const double> casc_b, double zeta);

double achievable_rate(double power_w, double amp, const RadioConfig& radio);

// tau2 is fixed by the relay hop at the power cap; tau1 is what remains of the
// slot after tau2 and an optional handover gap. tau1 <= 0 marks an infeasible
// slot and is legal output.
Subslots subslot_durations(double amp_rs_hop, const RadioConfig& radio, bool handover);

// Smallest source power that moves the payload within tau1. Empty when the
// geometry admits no transmission (zero amplitude or nonpositive window).
std::optional<double> required_power(double amp, double tau1, const RadioConfig& radio);

// One slot's channel draw for every relay, in a fixed order so a seeded stream
// reproduces byte-identical profiles.
ChannelProfile sample_channel_profile(Rng& rng, const TopologyConfig& topo,
                                      const RadioConfig& radio);

}  // namespace aos

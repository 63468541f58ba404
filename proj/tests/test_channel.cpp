#include "aos/channel.hpp"

#include <cmath>

#include "doctest.h"

using namespace aos;

namespace {

RadioConfig unit_noise_radio() {
  // bandwidth * noise density == 1 W so SNR == p * amp^2.
  RadioConfig r;
  r.bandwidth_hz = 1e7;
  r.noise_psd_w_hz = 1e-7;
  r.payload_bits = 6.2e6;
  r.slot_s = 0.1;
  r.handover_s = 1e-3;
  r.zeta = 1.0;
  r.max_power_w = 1.0;
  return r;
}

}  // namespace

TEST_CASE("pathloss gain follows the log-distance law") {
  CHECK(pathloss_gain(1.0, 2.5, -30.0) == doctest::Approx(1e-3).epsilon(1e-12));
  // 100^2.5 == 1e5
  CHECK(pathloss_gain(100.0, 2.5, -30.0) == doctest::Approx(1e-8).epsilon(1e-12));
  CHECK(pathloss_gain(10.0, 2.0, -30.0) == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK_THROWS_AS(pathloss_gain(0.0, 2.5, -30.0), StructuralError);
}

TEST_CASE("fading draws have the configured mean square power") {
  Rng rng(123);
  const double gain = 2.5e-9;
  double acc = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += std::norm(draw_rayleigh(rng, gain));
  CHECK(acc / n == doctest::Approx(gain).epsilon(0.02));

  acc = 0;
  double re = 0, im = 0;
  for (int i = 0; i < n; ++i) {
    auto h = draw_rician(rng, gain, 10.0);
    acc += std::norm(h);
    re += h.real();
    im += h.imag();
  }
  CHECK(acc / n == doctest::Approx(gain).epsilon(0.02));
  // Real line-of-sight component: E[h] = sqrt(gain K/(K+1)) + 0i.
  CHECK(re / n == doctest::Approx(std::sqrt(gain * 10.0 / 11.0)).epsilon(0.02));
  CHECK(std::abs(im / n) < 0.02 * std::sqrt(gain));
}

TEST_CASE("effective amplitude sums the direct and reflected magnitudes") {
  std::vector<double> a{1.0, 2.0};
  std::vector<double> b{0.5, 0.25};
  CHECK(effective_amplitude(0.5, a, b, 1.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(effective_amplitude(0.5, a, b, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(effective_amplitude(0.5, {}, {}, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  std::vector<double> short_b{0.5};
  CHECK_THROWS_AS(effective_amplitude(0.5, a, short_b, 1.0), StructuralError);
  CHECK_THROWS_AS(effective_amplitude(-0.1, a, b, 1.0), StructuralError);
}

TEST_CASE("achievable rate at unit SNR equals the bandwidth") {
  RadioConfig r = unit_noise_radio();
  CHECK(achievable_rate(1.0, 1.0, r) == doctest::Approx(1e7).epsilon(1e-12));
  CHECK(achievable_rate(3.0, 1.0, r) == doctest::Approx(2e7).epsilon(1e-12));
  CHECK(achievable_rate(0.0, 1.0, r) == 0.0);
}

TEST_CASE("subslot split leaves the slot remainder for the first hop") {
  RadioConfig r = unit_noise_radio();
  // Relay amplitude chosen so the relay hop at the cap runs at 1.24e8 bit/s
  // and takes exactly 0.05 s for the payload.
  double amp = std::sqrt(std::pow(2.0, 12.4) - 1.0);
  Subslots sub = subslot_durations(amp, r, false);
  CHECK(sub.tau2 == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(sub.tau1 == doctest::Approx(0.05).epsilon(1e-12));
  Subslots ho = subslot_durations(amp, r, true);
  CHECK(ho.tau2 == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(ho.tau1 == doctest::Approx(0.049).epsilon(1e-12));
  CHECK(sub.tau1 + sub.tau2 == r.slot_s);
  CHECK(ho.tau1 + ho.tau2 + r.handover_s == r.slot_s);
}

TEST_CASE("weak relay hop eats the whole slot") {
  RadioConfig r = unit_noise_radio();
  Subslots sub = subslot_durations(1e-9, r, false);
  CHECK(sub.tau1 < 0.0);
}

TEST_CASE("required power reproduces the payload rate exactly") {
  RadioConfig r = unit_noise_radio();
  Rng rng(2024);
  std::uniform_real_distribution<double> amp_d(1e-4, 10.0);
  std::uniform_real_distribution<double> t_d(0.005, 0.099);
  for (int i = 0; i < 1000; ++i) {
    double amp = amp_d(rng);
    double tau1 = t_d(rng);
    auto p = required_power(amp, tau1, r);
    REQUIRE(p.has_value());
    CHECK(*p > 0.0);
    double rate = achievable_rate(*p, amp, r);
    CHECK(rate * tau1 == doctest::Approx(r.payload_bits).epsilon(1e-9));
  }
}

TEST_CASE("required power is empty when no transmission can happen") {
  RadioConfig r = unit_noise_radio();
  CHECK_FALSE(required_power(1.0, 0.0, r).has_value());
  CHECK_FALSE(required_power(1.0, -0.01, r).has_value());
  CHECK_FALSE(required_power(0.0, 0.05, r).has_value());
}

TEST_CASE("adding reflect elements never raises the required power") {
  RadioConfig r = unit_noise_radio();
  Rng rng(7);
  std::uniform_real_distribution<double> d(0.0, 1e-3);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> a(75), b(75);
    for (int i = 0; i < 75; ++i) {
      a[i] = d(rng);
      b[i] = d(rng);
    }
    double direct = d(rng);
    double prev_amp = 0;
    double prev_p = 1e300;
    for (int n : {25, 50, 75}) {
      std::span<const double> sa(a.data(), n), sb(b.data(), n);
      double amp = effective_amplitude(direct, sa, sb, 1.0);
      CHECK(amp >= prev_amp);
      auto p = required_power(amp, 0.05, r);
      REQUIRE(p.has_value());
      CHECK(*p <= prev_p);
      prev_amp = amp;
      prev_p = *p;
    }
  }
}

TEST_CASE("channel profiles are seeded and positive") {
  TopologyConfig topo;
  RadioConfig radio;
  Rng r1(42), r2(42), r3(43);
  ChannelProfile p1 = sample_channel_profile(r1, topo, radio);
  ChannelProfile p2 = sample_channel_profile(r2, topo, radio);
  ChannelProfile p3 = sample_channel_profile(r3, topo, radio);
  REQUIRE(p1.amp_sn.size() == 5);
  REQUIRE(p1.amp_rs.size() == 5);
  CHECK(p1.amp_sn == p2.amp_sn);
  CHECK(p1.amp_rs == p2.amp_rs);
  CHECK(p1.amp_sn != p3.amp_sn);
  for (int k = 0; k < 5; ++k) {
    CHECK(p1.amp_sn[k] > 0.0);
    CHECK(p1.amp_rs[k] > 0.0);
  }
}

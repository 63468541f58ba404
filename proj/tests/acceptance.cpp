// Acceptance gate for the workbench. Each criterion prints one PASS/FAIL line
// with its timing; the exit code is the number of failed criteria. argv[1]
// must point at the command line binary (used by the repeatability check).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aos/baselines.hpp"
#include "aos/channel.hpp"
#include "aos/common.hpp"
#include "aos/config.hpp"
#include "aos/dataset.hpp"
#include "aos/env.hpp"
#include "aos/experiment.hpp"
#include "aos/offline_ac.hpp"
#include "aos/online_ac.hpp"
#include "aos/tabular.hpp"
#include "fd_util.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int num, bool pass, double secs, const std::string& detail) {
  std::ostringstream line;
  line << "criterion " << num << ": " << (pass ? "PASS" : "FAIL") << " ("
       << std::fixed;
  line.precision(1);
  line << secs << " s) " << detail;
  std::cout << line.str() << "\n" << std::flush;
  if (!pass) ++failures;
}

struct PairedStats {
  double mean = 0, se = 0;
  int n = 0;
};

PairedStats paired(const std::map<std::uint64_t, double>& a,
                   const std::map<std::uint64_t, double>& b) {
  std::vector<double> d;
  for (const auto& [seed, va] : a) {
    auto it = b.find(seed);
    if (it != b.end()) d.push_back(va - it->second);
  }
  PairedStats st;
  st.n = static_cast<int>(d.size());
  if (st.n == 0) return st;
  for (double v : d) st.mean += v;
  st.mean /= st.n;
  if (st.n > 1) {
    double var = 0;
    for (double v : d) var += (v - st.mean) * (v - st.mean);
    var /= (st.n - 1);
    st.se = std::sqrt(var / st.n);
  }
  return st;
}

std::map<std::uint64_t, double> pick(const std::vector<aos::ResultRow>& rows,
                                     const std::string& scheme,
                                     double (*field)(const aos::EvalStats&),
                                     std::optional<double> chi = std::nullopt) {
  std::map<std::uint64_t, double> out;
  for (const auto& r : rows)
    if (r.scheme == scheme && (!chi || r.chi == *chi)) out[r.seed] = field(r.stats);
  return out;
}

double f_mean_u(const aos::EvalStats& s) { return s.mean_u; }
double f_mean_aos(const aos::EvalStats& s) { return s.mean_aos; }
double f_mean_energy(const aos::EvalStats& s) { return s.mean_energy; }

std::string fmt(double v) { return aos::fmt_double(v); }

void criterion_1_2() {
  aos::TabularMdp mdp = aos::TabularMdp::random_dense(6, 3, 0.9, 7);
  aos::TabularPolicy pi = aos::TabularPolicy::random(6, 3, 11);

  auto t0 = Clock::now();
  aos::BoundCheckOptions known;
  known.mode = aos::FqiMode::KnownModel;
  known.dataset_size = 2000;
  known.n_seeds = 100;
  known.rho = 5e-4;
  aos::BoundReport rk = aos::verify_value_lower_bound(mdp, pi, known, 1);
  double tk = seconds_since(t0);
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& s : rk.seeds) min_slack = std::min(min_slack, s.min_slack);
  bool p1 = rk.total_violations == 0 && rk.total_assertions > 0 && tk < 10.0;
  report(1, p1, tk,
         "known-model bound: " + std::to_string(rk.total_violations) +
             " violations in " + std::to_string(rk.total_assertions) +
             " assertions over 100 seeds, min slack " + fmt(min_slack));

  t0 = Clock::now();
  aos::BoundCheckOptions sampled;
  sampled.mode = aos::FqiMode::Sampled;
  sampled.dataset_size = 2000;
  sampled.n_seeds = 100;
  sampled.epsilon = 0.05;
  aos::BoundReport rs = aos::verify_value_lower_bound(mdp, pi, sampled, 1);
  double ts = seconds_since(t0);
  bool p2 = rs.violation_rate <= 0.05 && rs.total_assertions > 0 && ts < 60.0;
  report(2, p2, ts,
         "sampled bound: violation rate " + fmt(rs.violation_rate) + " over " +
             std::to_string(rs.total_assertions) + " assertions (budget 0.05)");
}

void criterion_3() {
  auto t0 = Clock::now();
  aos::Rng rng = aos::make_rng(1, 0x3A3);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  const int A = 6;
  long argmax_bad = 0, inconsistent = 0;
  for (int row = 0; row < 1000; ++row) {
    std::vector<double> q(A);
    for (double& v : q) v = ud(rng);
    auto sc = aos::ranking_scores(q);
    int bq = static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
    int bs = static_cast<int>(std::max_element(sc.begin(), sc.end()) - sc.begin());
    if (bq != bs) ++argmax_bad;
    if (!aos::ranking_consistent(q)) ++inconsistent;
  }

  // Hinge mass reaches zero exactly when the taken action dominates every
  // other action by at least nu, and zero hinge mass certifies that margin.
  const double nu = 1.0;
  long hinge_bad = 0;
  for (int row = 0; row < 1000; ++row) {
    std::vector<double> q(A);
    for (double& v : q) v = ud(rng);
    int a = row % A;
    if (row % 2 == 0) {
      double best = -1e300;
      for (int b = 0; b < A; ++b)
        if (b != a) best = std::max(best, q[b]);
      q[a] = best + nu + 0.01 + (row % 7) * 0.1;  // dominant by more than nu
    }
    double z = aos::OfflineActorCritic::conservative_penalty(q, a, nu) -
               aos::logsumexp(q);
    bool dom = true;
    for (int b = 0; b < A; ++b)
      if (b != a && !(q[a] >= q[b] + nu - 1e-12)) dom = false;
    if (z <= 1e-12 && !dom) ++hinge_bad;  // zero hinge must certify the margin
    if (dom && z > 1e-12) ++hinge_bad;    // the margin must zero the hinge
    if (row % 2 == 0 && z > 1e-12) ++hinge_bad;
  }
  double t = seconds_since(t0);
  bool pass = argmax_bad == 0 && inconsistent == 0 && hinge_bad == 0 && t < 5.0;
  report(3, pass, t,
         "ranking argmax mismatches " + std::to_string(argmax_bad) +
             "/1000, inconsistent rows " + std::to_string(inconsistent) +
             ", hinge margin failures " + std::to_string(hinge_bad));
}

void criterion_4() {
  auto t0 = Clock::now();
  const int F = 16, A = 6;
  double worst = 0;
  auto track = [&](double e) { worst = std::max(worst, e); };

  for (int d = 0; d < 10; ++d) {
    aos::Rng rng(500 + d);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> s(F), s2(F);
    for (double& v : s) v = nd(rng);
    for (double& v : s2) v = nd(rng);
    int a = d % A;
    double tgt = nd(rng);
    double q_sa = nd(rng);

    aos::OnlineAcConfig ocfg;
    ocfg.hidden = 24;
    aos::OnlineActorCritic online(F, A, ocfg, 0.9, 1e-4, 100 + d);
    aos::Tensors g1 = aos::Tensors::zeros(online.critic().shape);
    online.critic_backward(s, a, tgt, g1);
    track(aos::fd_max_rel_err(online.mutable_critic().p, g1,
                              [&] { return online.critic_loss(s, a, tgt); }));
    aos::Tensors g2 = aos::Tensors::zeros(online.actor().shape);
    online.actor_backward(s, a, q_sa, g2);
    track(aos::fd_max_rel_err(online.mutable_actor().p, g2,
                              [&] { return online.actor_score(s, a, q_sa); }));

    aos::A2cConfig acfg;
    acfg.hidden = 24;
    aos::A2cTrainer a2c(F, A, acfg, 0.9, 200 + d);
    aos::Tensors g3 = aos::Tensors::zeros(a2c.critic().shape);
    a2c.critic_backward(s, tgt, g3);
    track(aos::fd_max_rel_err(a2c.mutable_critic().p, g3,
                              [&] { return a2c.critic_loss(s, tgt); }));
    aos::Tensors g4 = aos::Tensors::zeros(a2c.actor().shape);
    a2c.actor_backward(s, a, q_sa, g4);
    track(aos::fd_max_rel_err(a2c.mutable_actor().p, g4,
                              [&] { return a2c.actor_score(s, a, q_sa); }));

    aos::DatasetMeta meta;
    meta.scheme = "synthetic";
    meta.feature_len = F;
    meta.actions = A;
    aos::Dataset ds(meta);
    aos::Rng drng(300 + d);
    std::uniform_real_distribution<double> uu(0.05, 1.0);
    std::uniform_int_distribution<int> ua(0, A - 1);
    std::vector<double> rs(F), rs2(F);
    for (int i = 0; i < 24; ++i) {
      for (double& v : rs) v = nd(drng);
      for (double& v : rs2) v = nd(drng);
      int act = ua(drng);
      ds.add(rs, act == 0 ? 0 : 1, act, uu(drng), rs2);
    }
    std::vector<std::uint32_t> idx(24);
    for (int i = 0; i < 24; ++i) idx[i] = i;

    aos::OfflineAcConfig fcfg;
    fcfg.hidden = 24;
    fcfg.rho = 0.05;
    aos::OfflineActorCritic off(F, A, fcfg, 0.9, 1e-2, 400 + d);
    aos::Tensors g5 = aos::Tensors::zeros(off.critic().shape);
    off.critic_backward(ds, idx, g5);
    track(aos::fd_max_rel_err(off.mutable_critic().p, g5,
                              [&] { return off.critic_eval(ds, idx).loss; }));
    aos::Tensors g6 = aos::Tensors::zeros(off.actor().shape);
    off.actor_backward(ds, idx, g6);
    track(aos::fd_max_rel_err(off.mutable_actor().p, g6,
                              [&] { return off.actor_objective(ds, idx); }));

    aos::CqlConfig ccfg;
    ccfg.hidden = 24;
    ccfg.rho = 0.05;
    aos::CqlTrainer cql(F, A, ccfg, 0.9, 600 + d);
    aos::Tensors g7 = aos::Tensors::zeros(cql.q().shape);
    cql.backward(ds, idx, g7);
    track(aos::fd_max_rel_err(cql.mutable_q().p, g7,
                              [&] { return cql.loss(ds, idx); }));
  }
  double t = seconds_since(t0);
  bool pass = worst <= 1e-4 && t < 30.0;
  report(4, pass, t,
         "finite differences on 7 losses x 10 draws, max rel err " + fmt(worst) +
             " (bound 0.0001)");
}

void criterion_5() {
  auto t0 = Clock::now();
  aos::RunConfig cfg;
  const aos::RadioConfig& radio = cfg.radio;
  aos::Rng rng = aos::make_rng(1, 0x5C5);

  long decomp_bad = 0, trip_checked = 0, trip_bad = 0;
  long draw = 0;
  while (trip_checked < 10000) {
    aos::ChannelProfile prof = aos::sample_channel_profile(rng, cfg.topo, radio);
    bool handover = (draw % 2) == 1;
    ++draw;
    for (int k = 0; k < cfg.topo.relays; ++k) {
      aos::Subslots st = aos::subslot_durations(prof.amp_rs[k], radio, handover);
      double want_tau2 =
          radio.payload_bits / aos::achievable_rate(radio.max_power_w,
                                                    prof.amp_rs[k], radio);
      double want_tau1 =
          radio.slot_s - st.tau2 - (handover ? radio.handover_s : 0.0);
      if (st.tau2 != want_tau2 || st.tau1 != want_tau1) ++decomp_bad;

      if (st.tau1 > 0 && trip_checked < 10000) {
        auto p = aos::required_power(prof.amp_sn[k], st.tau1, radio);
        if (p) {
          ++trip_checked;
          double back = aos::achievable_rate(*p, prof.amp_sn[k], radio) * st.tau1;
          if (std::abs(back - radio.payload_bits) >
              1e-9 * radio.payload_bits)
            ++trip_bad;
        }
      }
    }
  }

  // Wider reflect arrays only add nonnegative cascade terms, so with common
  // element draws the required source power cannot rise from 25 to 75 elements.
  long mono_bad = 0;
  double g_sn_irs = aos::pathloss_gain(cfg.topo.sn_irs_m, cfg.topo.pathloss_exponent,
                                       cfg.topo.ref_gain_db);
  double g_rs_irs = aos::pathloss_gain(cfg.topo.rs_irs_m[0], cfg.topo.pathloss_exponent,
                                       cfg.topo.ref_gain_db);
  double g_sn_rs = aos::pathloss_gain(cfg.topo.sn_rs_m[0], cfg.topo.pathloss_exponent,
                                      cfg.topo.ref_gain_db);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> ea(75), eb(75);
    for (int i = 0; i < 75; ++i) ea[i] = std::abs(aos::draw_rician(rng, g_sn_irs, cfg.topo.rician_k));
    for (int i = 0; i < 75; ++i) eb[i] = std::abs(aos::draw_rician(rng, g_rs_irs, cfg.topo.rician_k));
    double direct = std::abs(aos::draw_rayleigh(rng, g_sn_rs));
    double prev = std::numeric_limits<double>::infinity();
    for (int count : {25, 50, 75}) {
      double amp = aos::effective_amplitude(
          direct, std::span(ea.data(), count), std::span(eb.data(), count),
          radio.zeta);
      auto p = aos::required_power(amp, 0.05, radio);
      if (!p || *p > prev + 1e-15) ++mono_bad;
      if (p) prev = *p;
    }
  }
  double t = seconds_since(t0);
  bool pass = decomp_bad == 0 && trip_bad == 0 && mono_bad == 0;
  report(5, pass, t,
         "subslot identity failures " + std::to_string(decomp_bad) +
             ", power round trip failures " + std::to_string(trip_bad) + "/" +
             std::to_string(trip_checked) + ", power monotonicity failures " +
             std::to_string(mono_bad));
}

void criterion_6_7() {
  aos::RunConfig cfg;
  aos::SweepSpec spec;
  spec.curves = true;
  for (const char* s : {"random", "a2c", "online-ac", "offline-ac-expert",
                        "offline-ac-random", "cql-random"})
    spec.schemes.push_back({s, 1.0});

  auto t0 = Clock::now();
  aos::SweepOutput out = aos::run_sweep(cfg, spec);
  double t = seconds_since(t0);

  // Convergence speed of the expert-data scheme, averaged across seeds.
  std::map<std::uint64_t, std::map<long, double>> curves;
  for (const auto& c : out.curves)
    if (c.scheme == "offline-ac-expert") curves[c.seed][c.iter] = c.eval_mean_u;
  double sum600 = 0, sumfin = 0;
  int nseeds = 0;
  bool have600 = !curves.empty();
  for (const auto& [seed, pts] : curves) {
    auto it600 = pts.find(600);
    if (it600 == pts.end() || pts.empty()) {
      have600 = false;
      break;
    }
    sum600 += it600->second;
    sumfin += pts.rbegin()->second;
    ++nseeds;
  }
  double ratio = (have600 && sumfin > 0) ? sum600 / sumfin : 0.0;
  bool p6 = have600 && ratio >= 0.95 && t < 1200.0;
  report(6, p6, t,
         "expert-data convergence: mean utility at iteration 600 is " +
             fmt(ratio) + " of final across " + std::to_string(nseeds) +
             " seeds (needs >= 0.95)");

  auto u_off_e = pick(out.results, "offline-ac-expert", f_mean_u);
  auto u_off_r = pick(out.results, "offline-ac-random", f_mean_u);
  auto u_a2c = pick(out.results, "a2c", f_mean_u);
  auto u_onl = pick(out.results, "online-ac", f_mean_u);
  auto u_cql_r = pick(out.results, "cql-random", f_mean_u);
  auto u_rand = pick(out.results, "random", f_mean_u);

  PairedStats oe_a = paired(u_off_e, u_a2c);
  PairedStats or_o = paired(u_off_r, u_onl);
  PairedStats on_a = paired(u_onl, u_a2c);
  PairedStats cq_r = paired(u_cql_r, u_rand);
  bool ordering = oe_a.n == 5 && or_o.n == 5 && on_a.n == 5 && cq_r.n == 5 &&
                  oe_a.mean >= 0 && or_o.mean >= 0 && on_a.mean <= 0;
  bool cql_near_random =
      cq_r.se > 0 ? std::abs(cq_r.mean) <= 2.0 * cq_r.se : cq_r.mean == 0;
  bool p7 = ordering && cql_near_random && t < 7200.0;
  report(7, p7, t,
         "paired means: offline(expert)-a2c " + fmt(oe_a.mean) +
             ", offline(random)-online " + fmt(or_o.mean) + ", online-a2c " +
             fmt(on_a.mean) + ", |cql(random)-random| " + fmt(std::abs(cq_r.mean)) +
             " vs 2se " + fmt(2.0 * cq_r.se));
}

void criterion_8() {
  aos::RunConfig cfg;
  aos::SweepSpec spec;
  spec.param = "chi";
  spec.values = {0.3, 0.5, 0.8};
  for (const char* s : {"a2c", "offline-ac-expert", "random"})
    spec.schemes.push_back({s, 1.0});

  auto t0 = Clock::now();
  aos::SweepOutput out = aos::run_sweep(cfg, spec);
  double t = seconds_since(t0);

  bool aos_decreasing = true;
  std::string aos_detail;
  for (const char* s : {"a2c", "offline-ac-expert"}) {
    double prev = std::numeric_limits<double>::infinity();
    aos_detail += std::string(s) + " aos";
    for (double chi : spec.values) {
      auto m = pick(out.results, s, f_mean_aos, chi);
      double mean = 0;
      for (const auto& [seed, v] : m) mean += v;
      mean /= m.empty() ? 1 : static_cast<double>(m.size());
      aos_detail += " " + fmt(mean);
      if (mean >= prev || m.size() != 5) aos_decreasing = false;
      prev = mean;
    }
    aos_detail += "; ";
  }

  double emin = std::numeric_limits<double>::infinity(), emax = 0, worst_se = 0;
  for (double chi : spec.values) {
    auto m = pick(out.results, "random", f_mean_energy, chi);
    double mean = 0;
    for (const auto& [seed, v] : m) mean += v;
    mean /= m.empty() ? 1 : static_cast<double>(m.size());
    double var = 0;
    for (const auto& [seed, v] : m) var += (v - mean) * (v - mean);
    if (m.size() > 1) var /= (m.size() - 1);
    worst_se = std::max(worst_se, std::sqrt(var / (m.empty() ? 1 : m.size())));
    emin = std::min(emin, mean);
    emax = std::max(emax, mean);
  }
  double spread = emax - emin;
  bool energy_flat = spread <= std::max(2.0 * worst_se, 1e-12);

  bool pass = aos_decreasing && energy_flat && t < 3600.0;
  report(8, pass, t,
         aos_detail + "random energy spread across chi " + fmt(spread) +
             " vs allowance " + fmt(std::max(2.0 * worst_se, 1e-12)));
}

void criterion_9() {
  aos::RunConfig cfg;
  auto t0 = Clock::now();

  aos::SweepSpec lean;
  lean.schemes.push_back({"offline-ac-mixed", 0.05});
  aos::SweepOutput lean_out = aos::run_sweep(cfg, lean);

  aos::SweepSpec rich;
  rich.schemes.push_back({"cql-mixed", 0.25});
  aos::SweepOutput rich_out = aos::run_sweep(cfg, rich);
  double t = seconds_since(t0);

  auto u_off = pick(lean_out.results, "offline-ac-mixed", f_mean_u);
  auto u_cql = pick(rich_out.results, "cql-mixed", f_mean_u);
  PairedStats d = paired(u_off, u_cql);
  double tstat = d.se > 0 ? d.mean / d.se
                          : (d.mean > 0 ? std::numeric_limits<double>::infinity()
                                        : 0.0);
  const double t_crit = 2.131846786;  // one-sided 5%, 4 degrees of freedom
  bool pass = d.n == 5 && tstat >= t_crit;
  report(9, pass, t,
         "offline at 5% expert share vs cql at 25%: paired mean " + fmt(d.mean) +
             ", t " + fmt(tstat) + " (needs >= " + fmt(t_crit) + ")");
}

bool run_cmd(const std::string& cmd) { return std::system(cmd.c_str()) == 0; }

std::optional<std::string> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_10(const std::string& cli) {
  auto t0 = Clock::now();
  fs::path base = fs::absolute("acceptance_c10");
  std::error_code ec;
  fs::remove_all(base, ec);
  fs::create_directories(base);

  fs::path cfg_path = base / "config.json";
  {
    std::ofstream out(cfg_path);
    out << R"({
  "seed": 5,
  "experiment": {"dataset_size": 2000, "eval_horizon": 2000, "seeds": 3},
  "online": {"slots": 3000},
  "a2c": {"slots": 3000},
  "offline": {"iters": 50, "batch": 200, "eval_every": 10},
  "cql": {"iters": 50, "batch": 200}
}
)";
  }

  auto run_all = [&](const fs::path& dir) {
    fs::create_directories(dir);
    std::string c = "\"" + cli + "\" --config \"" + cfg_path.string() + "\"";
    std::string log = " >> \"" + (dir / "log.txt").string() + "\" 2>&1";
    auto at = [&](const std::string& sub) {
      return c + " --out-dir \"" + (dir / sub).string() + "\" ";
    };
    bool ok = true;
    ok = ok && run_cmd(at(".") + "gen-data --behavior random --out data.bin" + log);
    std::string data = (dir / "data.bin").string();
    ok = ok && run_cmd(at("off") + "train-offline --data \"" + data + "\" --eval" + log);
    ok = ok && run_cmd(at("a2c") + "train-a2c" + log);
    ok = ok && run_cmd(at("on") + "train-online" + log);
    ok = ok && run_cmd(at("cql") + "train-cql --data \"" + data + "\"" + log);
    ok = ok && run_cmd(at("ev") + "evaluate --actor \"" +
                       (dir / "off" / "actor.ckpt").string() +
                       "\" --horizon 500 --trace trace.csv" + log);
    ok = ok && run_cmd(at("th") + "verify-theory --check-seeds 3 --dataset-size 500" + log);
    ok = ok && run_cmd(at("sw") + "sweep --schemes random,cql-random" + log);
    return ok;
  };

  bool ran = run_all(base / "runA") && run_all(base / "runB");

  const char* files[] = {
      "data.bin",        "off/metrics.csv", "off/actor.ckpt", "off/critic.ckpt",
      "a2c/metrics.csv", "a2c/actor.ckpt",  "a2c/critic.ckpt", "on/metrics.csv",
      "on/actor.ckpt",   "on/critic.ckpt",  "cql/metrics.csv", "cql/q.ckpt",
      "ev/eval.json",    "ev/trace.csv",    "th/theory.json",  "sw/results.csv",
  };
  long mismatched = 0, missing = 0;
  std::string first_bad;
  for (const char* f : files) {
    auto a = slurp(base / "runA" / f);
    auto b = slurp(base / "runB" / f);
    if (!a || !b) {
      ++missing;
      if (first_bad.empty()) first_bad = f;
    } else if (*a != *b) {
      ++mismatched;
      if (first_bad.empty()) first_bad = f;
    }
  }
  double t = seconds_since(t0);
  bool pass = ran && mismatched == 0 && missing == 0;
  std::string detail = "repeat runs compared on 16 outputs: " +
                       std::to_string(mismatched) + " differing, " +
                       std::to_string(missing) + " missing";
  if (!ran) detail += "; a command exited nonzero (see log.txt)";
  if (!first_bad.empty()) detail += "; first problem: " + first_bad;
  report(10, pass, t, detail);
  if (pass) fs::remove_all(base, ec);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: aos_acceptance <path-to-cli>\n";
    return 64;
  }
  std::cout << "acceptance suite (10 criteria)\n" << std::flush;
  try {
    criterion_1_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6_7();
    criterion_8();
    criterion_9();
    criterion_10(argv[1]);
  } catch (const std::exception& e) {
    std::cerr << "acceptance aborted: " << e.what() << "\n";
    return 99;
  }
  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criteria failed")
            << "\n";
  return failures;
}

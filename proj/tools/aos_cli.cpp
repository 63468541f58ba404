// Command line workbench for the relay status-update simulator: dataset
// generation, the four trainers, policy evaluation, the tabular bound checks,
// and parameter sweeps. Every command is deterministic given (config, seed).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aos/baselines.hpp"
#include "aos/common.hpp"
#include "aos/config.hpp"
#include "aos/dataset.hpp"
#include "aos/env.hpp"
#include "aos/experiment.hpp"
#include "aos/neural.hpp"
#include "aos/offline_ac.hpp"
#include "aos/online_ac.hpp"
#include "aos/tabular.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool full_scale = false;
};

aos::RunConfig load_cfg(const GlobalOpts& g) {
  aos::RunConfig cfg;
  if (!g.config_path.empty()) cfg = aos::load_run_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (g.full_scale) cfg.apply_full_scale();
  cfg.validate();
  return cfg;
}

std::string out_path(const GlobalOpts& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return (fs::path(g.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw aos::IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw aos::IoError("short write: " + path);
}

aos::Mlp train_behavior_actor(const aos::RunConfig& cfg, const aos::EnvContext& ctx,
                              std::uint64_t base) {
  aos::AosEnv env(ctx, aos::derive_seed(base, aos::fnv1a64("a2c-env")));
  aos::Rng action_rng = aos::make_rng(base, aos::fnv1a64("a2c-act"));
  aos::A2cTrainer t(env.feature_len(), env.action_count(), cfg.a2c, cfg.gamma,
                    aos::derive_seed(base, aos::fnv1a64("a2c-init")));
  t.run(env, cfg.a2c.slots, action_rng);
  return t.actor();
}

void write_online_metrics(const std::vector<aos::OnlineMetricsRow>& rows,
                          const std::string& path) {
  std::string buf = "slot,window_mean_utility,window_mean_aos,window_mean_energy_j\n";
  for (const auto& r : rows)
    buf += std::to_string(r.slot) + "," + aos::fmt_double(r.mean_u) + "," +
           aos::fmt_double(r.mean_aos) + "," + aos::fmt_double(r.mean_energy) + "\n";
  write_text(path, buf);
}

int cmd_gen_data(const GlobalOpts& g, const std::string& behavior, long count,
                 const std::string& out_name) {
  aos::RunConfig cfg = load_cfg(g);
  if (count > 0) cfg.experiment.dataset_size = count;
  aos::EnvContext ctx = aos::make_env_context(cfg);
  std::uint64_t base = aos::derive_seed(cfg.seed, 0xC11);

  aos::PolicyFn policy;
  if (behavior == "random") {
    policy = aos::uniform_policy(cfg.action_count());
  } else if (behavior == "expert") {
    std::cout << "training behavior actor (" << cfg.a2c.slots << " slots)\n";
    policy = aos::actor_policy(train_behavior_actor(cfg, ctx, base));
  } else {
    throw aos::ConfigError("behavior must be 'expert' or 'random'");
  }

  aos::AosEnv env(ctx, aos::derive_seed(base, aos::fnv1a64(behavior + "-env")));
  aos::Rng action_rng = aos::make_rng(base, aos::fnv1a64(behavior + "-act"));
  aos::DatasetMeta meta;
  meta.scheme = behavior;
  meta.config_hash = aos::config_hash_hex(cfg);
  meta.seed = cfg.seed;
  meta.scaler_mean = ctx.scaler.mean;
  meta.scaler_sd = ctx.scaler.sd;
  aos::Dataset ds = aos::collect_experience(env, policy,
                                            cfg.experiment.dataset_size,
                                            action_rng, meta);
  std::string path = out_path(g, out_name);
  aos::save_dataset(ds, path);
  std::cout << "wrote " << ds.size() << " tuples to " << path << "\n";
  return 0;
}

int cmd_mix_data(const GlobalOpts& g, const std::string& expert_path,
                 const std::string& random_path, double fraction, long size,
                 const std::string& out_name) {
  aos::RunConfig cfg = load_cfg(g);
  aos::Dataset expert = aos::load_dataset(expert_path);
  aos::Dataset filler = aos::load_dataset(random_path);
  if (size <= 0) size = std::min(expert.size(), filler.size());
  aos::Rng rng = aos::make_rng(cfg.seed, 0x317);
  aos::Dataset mixed = aos::mix_datasets(expert, filler, fraction, size, rng);
  std::string path = out_path(g, out_name);
  aos::save_dataset(mixed, path);
  std::cout << "wrote " << mixed.size() << " tuples (" << aos::fmt_double(fraction)
            << " expert share) to " << path << "\n";
  return 0;
}

int cmd_train_online(const GlobalOpts& g) {
  aos::RunConfig cfg = load_cfg(g);
  aos::EnvContext ctx = aos::make_env_context(cfg);
  std::uint64_t base = aos::derive_seed(cfg.seed, 0x0A1);
  aos::AosEnv env(ctx, aos::derive_seed(base, aos::fnv1a64("online-env")));
  aos::Rng action_rng = aos::make_rng(base, aos::fnv1a64("online-act"));
  aos::OnlineActorCritic t(env.feature_len(), env.action_count(), cfg.online,
                           cfg.gamma, cfg.alpha,
                           aos::derive_seed(base, aos::fnv1a64("online-ac")));
  auto rows = t.run(env, cfg.online.slots, action_rng);
  write_online_metrics(rows, out_path(g, "metrics.csv"));
  aos::save_checkpoint(t.actor(), "actor", cfg.seed, cfg.online.slots,
                       out_path(g, "actor.ckpt"));
  aos::save_checkpoint(t.critic(), "critic", cfg.seed, cfg.online.slots,
                       out_path(g, "critic.ckpt"));
  std::cout << "trained online actor-critic for " << cfg.online.slots
            << " slots; final window utility "
            << (rows.empty() ? 0.0 : rows.back().mean_u) << "\n";
  return 0;
}

int cmd_train_a2c(const GlobalOpts& g) {
  aos::RunConfig cfg = load_cfg(g);
  aos::EnvContext ctx = aos::make_env_context(cfg);
  std::uint64_t base = aos::derive_seed(cfg.seed, 0xA2C);
  aos::AosEnv env(ctx, aos::derive_seed(base, aos::fnv1a64("a2c-env")));
  aos::Rng action_rng = aos::make_rng(base, aos::fnv1a64("a2c-act"));
  aos::A2cTrainer t(env.feature_len(), env.action_count(), cfg.a2c, cfg.gamma,
                    aos::derive_seed(base, aos::fnv1a64("a2c-init")));
  auto rows = t.run(env, cfg.a2c.slots, action_rng);
  write_online_metrics(rows, out_path(g, "metrics.csv"));
  aos::save_checkpoint(t.actor(), "actor", cfg.seed, cfg.a2c.slots,
                       out_path(g, "actor.ckpt"));
  aos::save_checkpoint(t.critic(), "critic", cfg.seed, cfg.a2c.slots,
                       out_path(g, "critic.ckpt"));
  std::cout << "trained advantage actor-critic for " << cfg.a2c.slots
            << " slots; final window utility "
            << (rows.empty() ? 0.0 : rows.back().mean_u) << "\n";
  return 0;
}

int cmd_train_offline(const GlobalOpts& g, const std::string& data_path,
                      bool with_eval) {
  aos::RunConfig cfg = load_cfg(g);
  aos::Dataset ds = aos::load_dataset(data_path);
  aos::EnvContext ctx = aos::make_env_context(cfg);
  std::uint64_t base = aos::derive_seed(cfg.seed, 0x0FF);
  aos::OfflineActorCritic t(ds.feature_len(), ds.meta().actions, cfg.offline,
                            cfg.gamma, cfg.alpha,
                            aos::derive_seed(base, aos::fnv1a64("offline-ac")));
  aos::Rng batch_rng = aos::make_rng(base, aos::fnv1a64("offline-batch"));
  aos::OfflineActorCritic::EvalHook hook;
  if (with_eval)
    hook = [&](const aos::Mlp& actor) {
      return aos::evaluate_policy(ctx, aos::actor_policy(actor),
                                  cfg.experiment.eval_horizon,
                                  aos::derive_seed(base, aos::fnv1a64("eval")))
          .mean_u;
    };
  auto rows = t.train(ds, batch_rng, hook);

  std::string buf = "iter,critic_loss,penalty_mean,actor_objective";
  if (with_eval) buf += ",eval_mean_utility";
  buf += "\n";
  for (const auto& r : rows) {
    buf += std::to_string(r.iter) + "," + aos::fmt_double(r.critic_loss) + "," +
           aos::fmt_double(r.penalty_mean) + "," + aos::fmt_double(r.actor_objective);
    if (with_eval) {
      buf += ",";
      if (r.evaluated) buf += aos::fmt_double(r.eval_mean_u);
    }
    buf += "\n";
  }
  write_text(out_path(g, "metrics.csv"), buf);
  aos::save_checkpoint(t.actor(), "actor", cfg.seed, cfg.offline.iters,
                       out_path(g, "actor.ckpt"));
  aos::save_checkpoint(t.critic(), "critic", cfg.seed, cfg.offline.iters,
                       out_path(g, "critic.ckpt"));
  std::cout << "trained conservative actor-critic for " << cfg.offline.iters
            << " iterations on " << ds.size() << " tuples\n";
  return 0;
}

int cmd_train_cql(const GlobalOpts& g, const std::string& data_path) {
  aos::RunConfig cfg = load_cfg(g);
  aos::Dataset ds = aos::load_dataset(data_path);
  std::uint64_t base = aos::derive_seed(cfg.seed, 0xC41);
  aos::CqlTrainer t(ds.feature_len(), ds.meta().actions, cfg.cql, cfg.gamma,
                    aos::derive_seed(base, aos::fnv1a64("cql")));
  aos::Rng batch_rng = aos::make_rng(base, aos::fnv1a64("cql-batch"));
  auto rows = t.train(ds, batch_rng);
  std::string buf = "iter,loss\n";
  for (const auto& r : rows)
    buf += std::to_string(r.iter) + "," + aos::fmt_double(r.loss) + "\n";
  write_text(out_path(g, "metrics.csv"), buf);
  aos::save_checkpoint(t.q(), "q", cfg.seed, cfg.cql.iters, out_path(g, "q.ckpt"));
  std::cout << "trained batch Q-learner for " << cfg.cql.iters << " iterations on "
            << ds.size() << " tuples\n";
  return 0;
}

int cmd_evaluate(const GlobalOpts& g, const std::string& actor_path,
                 const std::string& q_path, bool random_policy, long horizon,
                 const std::string& trace_name) {
  aos::RunConfig cfg = load_cfg(g);
  aos::EnvContext ctx = aos::make_env_context(cfg);
  int picks = (actor_path.empty() ? 0 : 1) + (q_path.empty() ? 0 : 1) +
              (random_policy ? 1 : 0);
  if (picks != 1)
    throw aos::ConfigError("pick exactly one of --actor, --q, --random");

  aos::PolicyFn policy;
  if (random_policy) {
    policy = aos::uniform_policy(cfg.action_count());
  } else if (!actor_path.empty()) {
    aos::Checkpoint ck = aos::load_checkpoint(actor_path);
    policy = aos::actor_policy(std::move(ck.net));
  } else {
    aos::Checkpoint ck = aos::load_checkpoint(q_path);
    policy = aos::greedy_q_policy(std::move(ck.net));
  }

  if (horizon <= 0) horizon = cfg.experiment.eval_horizon;
  std::vector<aos::TraceRow> trace;
  aos::EvalStats st =
      aos::evaluate_policy(ctx, policy, horizon, aos::derive_seed(cfg.seed, 0xE7A),
                           trace_name.empty() ? nullptr : &trace);
  if (!trace_name.empty()) aos::write_trace_csv(trace, out_path(g, trace_name));

  json rep;
  rep["mean_utility"] = st.mean_u;
  rep["mean_aos"] = st.mean_aos;
  rep["mean_energy_j"] = st.mean_energy;
  rep["slots"] = st.slots;
  rep["config_hash"] = aos::config_hash_hex(cfg);
  std::string text = rep.dump(2) + "\n";
  write_text(out_path(g, "eval.json"), text);
  std::cout << text;
  return 0;
}

int cmd_verify_theory(const GlobalOpts& g, const std::string& mode, int S, int A,
                      std::uint64_t mdp_seed, std::uint64_t policy_seed,
                      long dataset_size, int check_seeds, double rho, double eps,
                      double nu, long ranking_rows) {
  aos::RunConfig cfg = load_cfg(g);
  aos::TabularMdp mdp = aos::TabularMdp::random_dense(S, A, cfg.gamma, mdp_seed);
  aos::TabularPolicy target = aos::TabularPolicy::random(S, A, policy_seed);

  json rep;
  rep["model"] = {{"states", S}, {"actions", A}, {"gamma", cfg.gamma},
                  {"mdp_seed", mdp_seed}, {"policy_seed", policy_seed}};

  auto run_mode = [&](aos::FqiMode m) {
    aos::BoundCheckOptions opt;
    opt.mode = m;
    opt.dataset_size = dataset_size;
    opt.n_seeds = check_seeds;
    opt.rho = rho;
    opt.epsilon = eps;
    opt.nu = nu;
    aos::BoundReport br = aos::verify_value_lower_bound(mdp, target, opt, cfg.seed);
    json jm;
    jm["seeds"] = check_seeds;
    jm["dataset_size"] = dataset_size;
    jm["assertions"] = br.total_assertions;
    jm["violations"] = br.total_violations;
    jm["violation_rate"] = br.violation_rate;
    double min_slack = std::numeric_limits<double>::infinity();
    double max_rho = 0;
    long excluded = 0;
    for (const auto& s : br.seeds) {
      min_slack = std::min(min_slack, s.min_slack);
      max_rho = std::max(max_rho, s.rho);
      excluded += s.excluded_states;
    }
    jm["min_slack"] = min_slack;
    jm["excluded_states"] = excluded;
    if (m == aos::FqiMode::KnownModel) {
      jm["rho"] = rho;
    } else {
      jm["psi"] = br.psi;
      jm["epsilon"] = eps;
      jm["max_rho"] = max_rho;
    }
    return jm;
  };

  if (mode == "known" || mode == "both") rep["known"] = run_mode(aos::FqiMode::KnownModel);
  if (mode == "sampled" || mode == "both") rep["sampled"] = run_mode(aos::FqiMode::Sampled);
  if (mode != "known" && mode != "sampled" && mode != "both")
    throw aos::ConfigError("mode must be known, sampled, or both");

  if (ranking_rows > 0) {
    aos::Rng rng = aos::make_rng(cfg.seed, 0x4A4E4B);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    long bad = 0;
    for (long i = 0; i < ranking_rows; ++i) {
      std::vector<double> q(A);
      for (double& v : q) v = d(rng);
      if (!aos::ranking_consistent(q)) ++bad;
    }
    rep["ranking"] = {{"rows", ranking_rows}, {"inconsistent", bad}};
  }

  std::string text = rep.dump(2) + "\n";
  write_text(out_path(g, "theory.json"), text);
  std::cout << text;
  bool ok = true;
  if (rep.contains("known") && rep["known"]["violations"].get<long>() != 0) ok = false;
  if (rep.contains("ranking") && rep["ranking"]["inconsistent"].get<long>() != 0)
    ok = false;
  return ok ? 0 : 3;
}

int cmd_sweep(const GlobalOpts& g, const std::string& param,
              const std::vector<double>& values,
              const std::vector<std::string>& schemes, double xi, bool curves) {
  aos::RunConfig cfg = load_cfg(g);
  aos::SweepSpec spec;
  spec.param = param;
  spec.values = values;
  spec.curves = curves;
  for (const std::string& s : schemes) {
    bool known = false;
    for (const std::string& k : aos::known_schemes()) known |= (k == s);
    if (!known) throw aos::ConfigError("unknown scheme: " + s);
    spec.schemes.push_back({s, xi});
  }
  if (spec.schemes.empty()) throw aos::ConfigError("no schemes requested");
  if (!param.empty() && values.empty())
    throw aos::ConfigError("sweep parameter given without values");

  aos::SweepOutput out = aos::run_sweep(cfg, spec);
  aos::write_results_csv(out.results, out_path(g, "results.csv"));
  if (curves) aos::write_curves_csv(out.curves, out_path(g, "convergence.csv"));
  std::cout << "wrote " << out.results.size() << " result rows";
  if (curves) std::cout << " and " << out.curves.size() << " curve rows";
  std::cout << " to " << g.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay status-update workbench: simulate, train, verify"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--seed", g.seed, "override the config seed");
  app.add_option("--out-dir", g.out_dir, "directory for outputs");
  app.add_flag("--full-scale", g.full_scale,
               "full-fidelity budgets (larger datasets and training runs)");

  auto* gen = app.add_subcommand("gen-data", "collect an experience dataset");
  std::string behavior = "random";
  long gen_count = 0;
  std::string gen_out = "data.bin";
  gen->add_option("--behavior", behavior, "expert|random")->required();
  gen->add_option("--count", gen_count, "tuples to collect (default from config)");
  gen->add_option("--out", gen_out, "output file name");

  auto* mix = app.add_subcommand("mix-data", "blend expert and random datasets");
  std::string mix_expert, mix_random, mix_out = "mixed.bin";
  double mix_fraction = 0.5;
  long mix_size = 0;
  mix->add_option("--expert", mix_expert)->required();
  mix->add_option("--random", mix_random)->required();
  mix->add_option("--fraction", mix_fraction, "expert share in [0,1]")->required();
  mix->add_option("--size", mix_size, "output tuples (default: min of inputs)");
  mix->add_option("--out", mix_out);

  auto* online = app.add_subcommand("train-online", "online actor-critic");
  auto* a2c = app.add_subcommand("train-a2c", "advantage actor-critic");
  auto* offline =
      app.add_subcommand("train-offline", "conservative actor-critic from data");
  std::string offline_data;
  bool offline_eval = false;
  offline->add_option("--data", offline_data)->required();
  offline->add_flag("--eval", offline_eval, "evaluate the actor periodically");
  auto* cql = app.add_subcommand("train-cql", "batch Q-learning from data");
  std::string cql_data;
  cql->add_option("--data", cql_data)->required();

  auto* eval = app.add_subcommand("evaluate", "roll out a frozen policy");
  std::string eval_actor, eval_q, eval_trace;
  bool eval_random = false;
  long eval_horizon = 0;
  eval->add_option("--actor", eval_actor, "actor checkpoint");
  eval->add_option("--q", eval_q, "value checkpoint, acts greedily");
  eval->add_flag("--random", eval_random, "uniform random policy");
  eval->add_option("--horizon", eval_horizon);
  eval->add_option("--trace", eval_trace, "per-slot trace CSV file name");

  auto* verify = app.add_subcommand("verify-theory", "tabular bound checks");
  std::string v_mode = "both";
  int v_states = 6, v_actions = 3, v_seeds = 1;
  std::uint64_t v_mdp_seed = 7, v_policy_seed = 11;
  long v_data = 2000, v_ranking = 1000;
  double v_rho = 5e-4, v_eps = 0.05, v_nu = 1.0;
  verify->add_option("--mode", v_mode, "known|sampled|both");
  verify->add_option("--states", v_states);
  verify->add_option("--actions", v_actions);
  verify->add_option("--mdp-seed", v_mdp_seed);
  verify->add_option("--policy-seed", v_policy_seed);
  verify->add_option("--dataset-size", v_data);
  verify->add_option("--check-seeds", v_seeds);
  verify->add_option("--rho", v_rho, "penalty weight for the known-model check");
  verify->add_option("--epsilon", v_eps, "failure budget for the sampled check");
  verify->add_option("--nu", v_nu);
  verify->add_option("--ranking-rows", v_ranking);

  auto* sweep = app.add_subcommand("sweep", "train schemes over a parameter grid");
  std::string sw_param;
  std::vector<double> sw_values;
  std::vector<std::string> sw_schemes;
  double sw_xi = -1;
  bool sw_curves = false;
  sweep->add_option("--param", sw_param, "chi|varphi|irs_elements|xi");
  sweep->add_option("--values", sw_values)->delimiter(',');
  sweep->add_option("--schemes", sw_schemes)->delimiter(',')->required();
  sweep->add_option("--xi", sw_xi, "expert share for the mixed schemes");
  sweep->add_flag("--curves", sw_curves, "write per-iteration evaluation curves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(g, behavior, gen_count, gen_out);
    if (mix->parsed())
      return cmd_mix_data(g, mix_expert, mix_random, mix_fraction, mix_size, mix_out);
    if (online->parsed()) return cmd_train_online(g);
    if (a2c->parsed()) return cmd_train_a2c(g);
    if (offline->parsed()) return cmd_train_offline(g, offline_data, offline_eval);
    if (cql->parsed()) return cmd_train_cql(g, cql_data);
    if (eval->parsed())
      return cmd_evaluate(g, eval_actor, eval_q, eval_random, eval_horizon,
                          eval_trace);
    if (verify->parsed())
      return cmd_verify_theory(g, v_mode, v_states, v_actions, v_mdp_seed,
                               v_policy_seed, v_data, v_seeds, v_rho, v_eps, v_nu,
                               v_ranking);
    if (sweep->parsed()) {
      aos::RunConfig probe = load_cfg(g);
      double xi = sw_xi >= 0 ? sw_xi : probe.experiment.expert_fraction;
      return cmd_sweep(g, sw_param, sw_values, sw_schemes, xi, sw_curves);
    }
  } catch (const aos::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

#include "aos/experiment.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "aos/offline_ac.hpp"
#include "aos/online_ac.hpp"

namespace aos {

EvalStats evaluate_policy(const EnvContext& ctx, const PolicyFn& policy,
                          long horizon, std::uint64_t seed,
                          std::vector<TraceRow>* trace) {
  AosEnv env(ctx, derive_seed(seed, 0xE7A1));
  Rng action_rng = make_rng(seed, 0xAC7);
  std::vector<double> probs;
  EvalStats st;
  for (long t = 0; t < horizon; ++t) {
    policy(env.features(), probs);
    int a = sample_from(probs, action_rng);
    SlotInfo info = env.step(a);
    st.mean_u += info.utility;
    st.mean_aos += info.aos;
    st.mean_energy += info.energy_j;
    if (trace)
      trace->push_back({t + 1, static_cast<int>(info.aos), info.sampled ? 1 : 0,
                        info.sampled ? info.relay + 1 : 0, info.power_w,
                        info.energy_j, info.delivered, info.utility});
  }
  st.slots = horizon;
  st.mean_u /= horizon;
  st.mean_aos /= horizon;
  st.mean_energy /= horizon;
  return st;
}

Dataset collect_experience(Env& env, const PolicyFn& policy, long count,
                           Rng& action_rng, DatasetMeta meta) {
  meta.feature_len = env.feature_len();
  meta.actions = env.action_count();
  Dataset ds(meta);
  std::vector<double> probs;
  std::vector<double> s_feat(env.features().begin(), env.features().end());
  for (long i = 0; i < count; ++i) {
    policy(s_feat, probs);
    int a = sample_from(probs, action_rng);
    SlotInfo info = env.step(a);
    ds.add(s_feat, a > 0 ? 1 : 0, a, info.utility, env.features());
    s_feat.assign(env.features().begin(), env.features().end());
  }
  return ds;
}

const std::vector<std::string>& known_schemes() {
  static const std::vector<std::string> k = {
      "random",         "a2c",          "online-ac",
      "offline-ac-expert", "offline-ac-random", "offline-ac-mixed",
      "cql-expert",     "cql-random",   "cql-mixed"};
  return k;
}

namespace {

bool needs_a2c(const std::string& s) {
  return s == "a2c" || s.find("expert") != std::string::npos ||
         s.find("mixed") != std::string::npos;
}

bool needs_random_data(const std::string& s) {
  return (s.find("random") != std::string::npos && s != "random") ||
         s.find("mixed") != std::string::npos;
}

bool needs_expert_data(const std::string& s) {
  return s.find("expert") != std::string::npos ||
         s.find("mixed") != std::string::npos;
}

struct SharedPieces {
  std::optional<Mlp> a2c_actor;
  std::optional<Dataset> expert_ds, random_ds;
};

Dataset behavior_dataset(const RunConfig& cfg, const EnvContext& ctx,
                         const PolicyFn& policy, const std::string& scheme,
                         std::uint64_t base) {
  AosEnv env(ctx, derive_seed(base, fnv1a64(scheme + "-env")));
  Rng action_rng = make_rng(base, fnv1a64(scheme + "-act"));
  DatasetMeta meta;
  meta.scheme = scheme;
  meta.config_hash = config_hash_hex(cfg);
  meta.seed = base;
  meta.scaler_mean = ctx.scaler.mean;
  meta.scaler_sd = ctx.scaler.sd;
  return collect_experience(env, policy, cfg.experiment.dataset_size, action_rng,
                            meta);
}

void ensure_shared(const RunConfig& cfg, const EnvContext& ctx,
                   const std::vector<SchemeRequest>& reqs, std::uint64_t base,
                   SharedPieces& shared) {
  bool want_a2c = false, want_expert = false, want_random = false;
  for (const SchemeRequest& r : reqs) {
    want_a2c |= needs_a2c(r.scheme);
    want_expert |= needs_expert_data(r.scheme);
    want_random |= needs_random_data(r.scheme);
  }
  if (want_a2c && !shared.a2c_actor) {
    AosEnv env(ctx, derive_seed(base, fnv1a64("a2c-env")));
    Rng action_rng = make_rng(base, fnv1a64("a2c-act"));
    A2cTrainer t(env.feature_len(), env.action_count(), cfg.a2c, cfg.gamma,
                 derive_seed(base, fnv1a64("a2c-init")));
    t.run(env, cfg.a2c.slots, action_rng);
    shared.a2c_actor = t.actor();
  }
  if (want_expert && !shared.expert_ds)
    shared.expert_ds = behavior_dataset(cfg, ctx, actor_policy(*shared.a2c_actor),
                                        "expert", base);
  if (want_random && !shared.random_ds)
    shared.random_ds = behavior_dataset(
        cfg, ctx, uniform_policy(cfg.action_count()), "random", base);
}

struct TrainedScheme {
  PolicyFn policy;
  std::vector<OfflineIterRow> curve;
};

TrainedScheme train_scheme(const RunConfig& cfg, const EnvContext& ctx,
                           const SchemeRequest& req, std::uint64_t base,
                           SharedPieces& shared, bool curves) {
  const std::string& s = req.scheme;
  const int F = feature_length(ctx.topo);
  const int A = cfg.action_count();
  std::uint64_t tag = fnv1a64(s);

  if (s == "random") return {uniform_policy(A), {}};
  if (s == "a2c") return {actor_policy(*shared.a2c_actor), {}};
  if (s == "online-ac") {
    AosEnv env(ctx, derive_seed(base, fnv1a64("online-env")));
    Rng action_rng = make_rng(base, fnv1a64("online-act"));
    OnlineActorCritic t(F, A, cfg.online, cfg.gamma, cfg.alpha,
                        derive_seed(base, tag));
    t.run(env, cfg.online.slots, action_rng);
    return {actor_policy(t.actor()), {}};
  }

  const Dataset* ds = nullptr;
  Dataset mixed;
  if (s.ends_with("expert")) {
    if (!shared.expert_ds) throw StructuralError("expert dataset was not built");
    ds = &*shared.expert_ds;
  } else if (s.ends_with("random")) {
    if (!shared.random_ds) throw StructuralError("random dataset was not built");
    ds = &*shared.random_ds;
  } else if (s.ends_with("mixed")) {
    if (!shared.expert_ds || !shared.random_ds)
      throw StructuralError("mixing needs both source datasets");
    Rng mix_rng = make_rng(base, fnv1a64(s + "-mix"));
    mixed = mix_datasets(*shared.expert_ds, *shared.random_ds, req.xi,
                         cfg.experiment.dataset_size, mix_rng);
    ds = &mixed;
  } else {
    throw ConfigError("unknown scheme: " + s);
  }

  Rng batch_rng = make_rng(base, tag + 0xBA7C);
  if (s.starts_with("offline-ac")) {
    OfflineActorCritic t(F, A, cfg.offline, cfg.gamma, cfg.alpha,
                         derive_seed(base, tag));
    OfflineActorCritic::EvalHook hook;
    if (curves)
      hook = [&](const Mlp& actor) {
        return evaluate_policy(ctx, actor_policy(actor),
                               cfg.experiment.eval_horizon,
                               derive_seed(base, tag + 0xC0E))
            .mean_u;
      };
    auto rows = t.train(*ds, batch_rng, hook);
    return {actor_policy(t.actor()), rows};
  }
  if (s.starts_with("cql")) {
    CqlTrainer t(F, A, cfg.cql, cfg.gamma, derive_seed(base, tag));
    t.train(*ds, batch_rng);
    return {greedy_q_policy(t.q()), {}};
  }
  throw ConfigError("unknown scheme: " + s);
}

std::optional<double> scheme_xi(const SchemeRequest& r) {
  if (r.scheme.ends_with("mixed")) return r.xi;
  if (r.scheme.ends_with("expert")) return 1.0;
  if (r.scheme == "offline-ac-random" || r.scheme == "cql-random") return 0.0;
  return std::nullopt;
}

void parallel_tasks(int workers, int n, const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto body = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int count = std::min(workers, n);
  pool.reserve(count);
  for (int i = 0; i < count; ++i) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

SeedRows run_seed(const SeedTask& task) {
  const RunConfig& cfg = task.cfg;
  EnvContext ctx = make_env_context(cfg);
  std::uint64_t base = derive_seed(cfg.seed, 0xABC000 + task.seed_index);
  std::string hash = config_hash_hex(cfg);

  SharedPieces shared;
  ensure_shared(cfg, ctx, task.schemes, base, shared);

  SeedRows out;
  for (const SchemeRequest& req : task.schemes) {
    TrainedScheme trained = train_scheme(cfg, ctx, req, base, shared, task.curves);
    EvalStats st = evaluate_policy(ctx, trained.policy, cfg.experiment.eval_horizon,
                                   derive_seed(base, fnv1a64("eval")));
    ResultRow row;
    row.scheme = req.scheme;
    row.chi = cfg.process.chi;
    row.varphi = cfg.process.varphi;
    row.xi = scheme_xi(req);
    row.irs_elements = cfg.topo.irs_elements;
    row.seed = task.seed_index;
    row.config_hash = hash;
    row.stats = st;
    out.results.push_back(std::move(row));
    for (const OfflineIterRow& r : trained.curve) {
      if (!r.evaluated) continue;
      out.curves.push_back({req.scheme, cfg.process.chi, cfg.process.varphi,
                            scheme_xi(req), cfg.topo.irs_elements,
                            static_cast<std::uint64_t>(task.seed_index), r.iter,
                            r.eval_mean_u});
    }
  }
  return out;
}

SweepOutput run_sweep(const RunConfig& base, const SweepSpec& spec) {
  std::vector<RunConfig> grid;
  if (spec.param.empty()) {
    grid.push_back(base);
  } else {
    for (double v : spec.values) {
      RunConfig c = base;
      if (spec.param == "chi") c.process.chi = v;
      else if (spec.param == "varphi") c.process.varphi = v;
      else if (spec.param == "irs_elements") c.topo.irs_elements = static_cast<int>(v);
      else if (spec.param == "xi") c.experiment.expert_fraction = v;
      else throw ConfigError("unknown sweep parameter: " + spec.param);
      c.validate();
      grid.push_back(c);
    }
  }

  std::vector<SeedTask> tasks;
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (int s = 0; s < base.experiment.seeds; ++s) {
      SeedTask t;
      t.cfg = grid[g];
      t.seed_index = s;
      t.schemes = spec.schemes;
      if (spec.param == "xi")
        for (SchemeRequest& r : t.schemes) r.xi = grid[g].experiment.expert_fraction;
      t.curves = spec.curves;
      tasks.push_back(std::move(t));
    }

  std::vector<SeedRows> rows(tasks.size());
  int workers = base.experiment.workers > 0
                    ? base.experiment.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  parallel_tasks(workers, static_cast<int>(tasks.size()),
                 [&](int i) { rows[i] = run_seed(tasks[i]); });

  SweepOutput out;
  for (SeedRows& r : rows) {
    out.results.insert(out.results.end(), r.results.begin(), r.results.end());
    out.curves.insert(out.curves.end(), r.curves.begin(), r.curves.end());
  }
  return out;
}

namespace {

std::string opt_str(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

}  // namespace

void write_results_csv(const std::vector<ResultRow>& rows,
                       const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open results file: " + path);
  out << "scheme,chi,varphi,xi,irs_elements,seed,config_hash,mean_utility,"
         "mean_aos,mean_energy_j\n";
  for (const ResultRow& r : rows)
    out << r.scheme << ',' << fmt_double(r.chi) << ',' << fmt_double(r.varphi)
        << ',' << opt_str(r.xi) << ',' << r.irs_elements << ',' << r.seed << ','
        << r.config_hash << ',' << fmt_double(r.stats.mean_u) << ','
        << fmt_double(r.stats.mean_aos) << ',' << fmt_double(r.stats.mean_energy)
        << '\n';
  if (!out) throw IoError("short write on results file: " + path);
}

void write_curves_csv(const std::vector<CurveRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open curves file: " + path);
  out << "scheme,chi,varphi,xi,irs_elements,seed,iter,eval_mean_utility\n";
  for (const CurveRow& r : rows)
    out << r.scheme << ',' << fmt_double(r.chi) << ',' << fmt_double(r.varphi)
        << ',' << opt_str(r.xi) << ',' << r.irs_elements << ',' << r.seed << ','
        << r.iter << ',' << fmt_double(r.eval_mean_u) << '\n';
  if (!out) throw IoError("short write on curves file: " + path);
}

void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open trace file: " + path);
  out << "slot,c,n,m,p_w,energy_j,feasible,u\n";
  for (const TraceRow& r : rows)
    out << r.slot << ',' << r.c << ',' << r.n << ',' << r.m << ','
        << fmt_double(r.p_w) << ',' << fmt_double(r.energy_j) << ','
        << (r.delivered ? 1 : 0) << ',' << fmt_double(r.u) << '\n';
  if (!out) throw IoError("short write on trace file: " + path);
}

}  // namespace aos

#include "aos/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aos {
namespace {

using nlohmann::json;

double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

void expect_keys(const json& obj, const char* section,
                 std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known) bad(std::string("unknown key '") + it.key() + "' in " + section);
  }
}

double get_num(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

long get_int(const json& obj, const char* key, long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad(std::string("'") + key + "' must be an integer");
  return v.get<long>();
}

std::vector<double> get_vec(const json& obj, const char* key,
                            const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) bad(std::string("'") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) bad(std::string("'") + key + "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void parse_radio(const json& j, RadioConfig& r) {
  expect_keys(j, "radio",
              {"bandwidth_hz", "noise_psd_dbm_hz", "payload_bits", "slot_s",
               "handover_s", "zeta", "max_power_dbm"});
  r.bandwidth_hz = get_num(j, "bandwidth_hz", r.bandwidth_hz);
  if (j.contains("noise_psd_dbm_hz"))
    r.noise_psd_w_hz = dbm_to_watt(get_num(j, "noise_psd_dbm_hz", 0));
  r.payload_bits = get_num(j, "payload_bits", r.payload_bits);
  r.slot_s = get_num(j, "slot_s", r.slot_s);
  r.handover_s = get_num(j, "handover_s", r.handover_s);
  r.zeta = get_num(j, "zeta", r.zeta);
  if (j.contains("max_power_dbm"))
    r.max_power_w = dbm_to_watt(get_num(j, "max_power_dbm", 0));
}

void parse_topology(const json& j, TopologyConfig& t) {
  expect_keys(j, "topology",
              {"irs_elements", "relays", "pathloss_exponent", "ref_gain_db",
               "rician_k", "sn_irs_m", "irs_dest_m", "sn_rs_m", "rs_dest_m",
               "rs_irs_m"});
  t.irs_elements = static_cast<int>(get_int(j, "irs_elements", t.irs_elements));
  t.relays = static_cast<int>(get_int(j, "relays", t.relays));
  t.pathloss_exponent = get_num(j, "pathloss_exponent", t.pathloss_exponent);
  t.ref_gain_db = get_num(j, "ref_gain_db", t.ref_gain_db);
  t.rician_k = get_num(j, "rician_k", t.rician_k);
  t.sn_irs_m = get_num(j, "sn_irs_m", t.sn_irs_m);
  t.irs_dest_m = get_num(j, "irs_dest_m", t.irs_dest_m);
  t.sn_rs_m = get_vec(j, "sn_rs_m", t.sn_rs_m);
  t.rs_dest_m = get_vec(j, "rs_dest_m", t.rs_dest_m);
  t.rs_irs_m = get_vec(j, "rs_irs_m", t.rs_irs_m);
}

void parse_process(const json& j, ProcessConfig& p) {
  expect_keys(j, "process", {"states", "chi", "varphi", "aos_cap"});
  p.states = static_cast<int>(get_int(j, "states", p.states));
  p.chi = get_num(j, "chi", p.chi);
  p.varphi = get_num(j, "varphi", p.varphi);
  p.aos_cap = static_cast<int>(get_int(j, "aos_cap", p.aos_cap));
}

void parse_utility(const json& j, UtilityConfig& u) {
  expect_keys(j, "utility", {"kappa", "vartheta", "sampling_cost_j"});
  u.kappa = get_num(j, "kappa", u.kappa);
  u.vartheta = get_num(j, "vartheta", u.vartheta);
  u.sampling_cost_j = get_num(j, "sampling_cost_j", u.sampling_cost_j);
}

void parse_online(const json& j, OnlineAcConfig& c) {
  expect_keys(j, "online",
              {"hidden", "actor_lr", "critic_lr", "target_reset_slots", "slots",
               "metrics_window"});
  c.hidden = static_cast<int>(get_int(j, "hidden", c.hidden));
  c.actor_lr = get_num(j, "actor_lr", c.actor_lr);
  c.critic_lr = get_num(j, "critic_lr", c.critic_lr);
  c.target_reset_slots =
      static_cast<int>(get_int(j, "target_reset_slots", c.target_reset_slots));
  c.slots = get_int(j, "slots", c.slots);
  c.metrics_window = static_cast<int>(get_int(j, "metrics_window", c.metrics_window));
}

void parse_offline(const json& j, OfflineAcConfig& c) {
  expect_keys(j, "offline",
              {"hidden", "actor_lr", "critic_lr", "rho", "nu", "batch",
               "target_reset_iters", "iters", "eval_every"});
  c.hidden = static_cast<int>(get_int(j, "hidden", c.hidden));
  c.actor_lr = get_num(j, "actor_lr", c.actor_lr);
  c.critic_lr = get_num(j, "critic_lr", c.critic_lr);
  c.rho = get_num(j, "rho", c.rho);
  c.nu = get_num(j, "nu", c.nu);
  c.batch = static_cast<int>(get_int(j, "batch", c.batch));
  c.target_reset_iters =
      static_cast<int>(get_int(j, "target_reset_iters", c.target_reset_iters));
  c.iters = get_int(j, "iters", c.iters);
  c.eval_every = static_cast<int>(get_int(j, "eval_every", c.eval_every));
}

void parse_a2c(const json& j, A2cConfig& c) {
  expect_keys(j, "a2c",
              {"hidden", "actor_lr", "critic_lr", "entropy_bonus", "slots",
               "metrics_window"});
  c.hidden = static_cast<int>(get_int(j, "hidden", c.hidden));
  c.actor_lr = get_num(j, "actor_lr", c.actor_lr);
  c.critic_lr = get_num(j, "critic_lr", c.critic_lr);
  c.entropy_bonus = get_num(j, "entropy_bonus", c.entropy_bonus);
  c.slots = get_int(j, "slots", c.slots);
  c.metrics_window = static_cast<int>(get_int(j, "metrics_window", c.metrics_window));
}

void parse_cql(const json& j, CqlConfig& c) {
  expect_keys(j, "cql", {"hidden", "lr", "rho", "batch", "target_reset_iters", "iters"});
  c.hidden = static_cast<int>(get_int(j, "hidden", c.hidden));
  c.lr = get_num(j, "lr", c.lr);
  c.rho = get_num(j, "rho", c.rho);
  c.batch = static_cast<int>(get_int(j, "batch", c.batch));
  c.target_reset_iters =
      static_cast<int>(get_int(j, "target_reset_iters", c.target_reset_iters));
  c.iters = get_int(j, "iters", c.iters);
}

void parse_experiment(const json& j, ExperimentConfig& c) {
  expect_keys(j, "experiment",
              {"dataset_size", "eval_horizon", "seeds", "workers",
               "expert_fraction"});
  c.dataset_size = get_int(j, "dataset_size", c.dataset_size);
  c.eval_horizon = get_int(j, "eval_horizon", c.eval_horizon);
  c.seeds = static_cast<int>(get_int(j, "seeds", c.seeds));
  c.workers = static_cast<int>(get_int(j, "workers", c.workers));
  c.expert_fraction = get_num(j, "expert_fraction", c.expert_fraction);
}

}  // namespace

void RunConfig::validate() const {
  if (radio.bandwidth_hz <= 0) bad("bandwidth_hz must be positive");
  if (radio.noise_psd_w_hz <= 0) bad("noise power density must be positive");
  if (radio.payload_bits <= 0) bad("payload_bits must be positive");
  if (radio.slot_s <= 0) bad("slot_s must be positive");
  if (radio.handover_s < 0 || radio.handover_s >= radio.slot_s)
    bad("handover_s must lie in [0, slot_s)");
  if (radio.zeta < 0 || radio.zeta > 1) bad("zeta must lie in [0,1]");
  if (radio.max_power_w <= 0) bad("max transmit power must be positive");
  if (topo.irs_elements < 0) bad("irs_elements must be nonnegative");
  if (topo.relays < 1) bad("relays must be at least 1");
  if (topo.pathloss_exponent <= 0) bad("pathloss_exponent must be positive");
  if (topo.rician_k < 0) bad("rician_k must be nonnegative");
  if (topo.sn_irs_m <= 0 || topo.irs_dest_m <= 0) bad("distances must be positive");
  auto check_dists = [&](const std::vector<double>& v, const char* name) {
    if (static_cast<int>(v.size()) != topo.relays)
      bad(std::string(name) + " must have one entry per relay");
    for (double d : v)
      if (d <= 0) bad(std::string(name) + " entries must be positive");
  };
  check_dists(topo.sn_rs_m, "sn_rs_m");
  check_dists(topo.rs_dest_m, "rs_dest_m");
  check_dists(topo.rs_irs_m, "rs_irs_m");
  if (process.states < 2) bad("process states must be at least 2");
  if (process.chi < 0 || process.chi > 1) bad("chi must lie in [0,1]");
  if (process.varphi < 0 || process.varphi > 1) bad("varphi must lie in [0,1]");
  if (process.aos_cap < 1) bad("aos_cap must be at least 1");
  if (util.kappa < 0 || util.vartheta < 0) bad("utility weights must be nonnegative");
  if (util.sampling_cost_j < 0) bad("sampling_cost_j must be nonnegative");
  if (gamma <= 0 || gamma >= 1) bad("gamma must lie in (0,1)");
  if (alpha < 0) bad("alpha must be nonnegative");
  auto pos = [](double v, const char* n) {
    if (v <= 0) bad(std::string(n) + " must be positive");
  };
  pos(online.actor_lr, "online.actor_lr");
  pos(online.critic_lr, "online.critic_lr");
  pos(offline.actor_lr, "offline.actor_lr");
  pos(offline.critic_lr, "offline.critic_lr");
  pos(a2c.actor_lr, "a2c.actor_lr");
  pos(a2c.critic_lr, "a2c.critic_lr");
  pos(cql.lr, "cql.lr");
  if (online.hidden < 1 || offline.hidden < 1 || a2c.hidden < 1 || cql.hidden < 1)
    bad("hidden layer width must be at least 1");
  if (offline.rho < 0 || cql.rho < 0) bad("conservatism weights must be nonnegative");
  if (offline.nu < 0) bad("nu must be nonnegative");
  if (offline.batch < 1 || cql.batch < 1) bad("batch must be at least 1");
  if (online.target_reset_slots < 1 || offline.target_reset_iters < 1 ||
      cql.target_reset_iters < 1)
    bad("target reset period must be at least 1");
  if (online.slots < 1 || a2c.slots < 1 || offline.iters < 1 || cql.iters < 1)
    bad("training budgets must be at least 1");
  if (online.metrics_window < 1 || a2c.metrics_window < 1)
    bad("metrics_window must be at least 1");
  if (offline.eval_every < 1) bad("eval_every must be at least 1");
  if (experiment.dataset_size < 1) bad("dataset_size must be at least 1");
  if (experiment.eval_horizon < 1) bad("eval_horizon must be at least 1");
  if (experiment.seeds < 1) bad("seeds must be at least 1");
  if (experiment.workers < 0) bad("workers must be nonnegative");
  if (experiment.expert_fraction < 0 || experiment.expert_fraction > 1)
    bad("expert_fraction must lie in [0,1]");
}

void RunConfig::apply_full_scale() {
  experiment.dataset_size = 200000;
  experiment.eval_horizon = 100000;
  offline.iters = 5000;
  cql.iters = 5000;
  online.slots = 200000;
  a2c.slots = 200000;
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("config root must be a JSON object");
  expect_keys(j, "config root",
              {"seed", "gamma", "alpha", "radio", "topology", "process",
               "utility", "online", "offline", "a2c", "cql", "experiment"});
  RunConfig c;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
      bad("'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.gamma = get_num(j, "gamma", c.gamma);
  c.alpha = get_num(j, "alpha", c.alpha);
  if (j.contains("radio")) parse_radio(j.at("radio"), c.radio);
  if (j.contains("topology")) parse_topology(j.at("topology"), c.topo);
  if (j.contains("process")) parse_process(j.at("process"), c.process);
  if (j.contains("utility")) parse_utility(j.at("utility"), c.util);
  if (j.contains("online")) parse_online(j.at("online"), c.online);
  if (j.contains("offline")) parse_offline(j.at("offline"), c.offline);
  if (j.contains("a2c")) parse_a2c(j.at("a2c"), c.a2c);
  if (j.contains("cql")) parse_cql(j.at("cql"), c.cql);
  if (j.contains("experiment")) parse_experiment(j.at("experiment"), c.experiment);
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string dump_run_config(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["gamma"] = c.gamma;
  j["alpha"] = c.alpha;
  j["radio"] = {{"bandwidth_hz", c.radio.bandwidth_hz},
                {"noise_psd_dbm_hz", watt_to_dbm(c.radio.noise_psd_w_hz)},
                {"payload_bits", c.radio.payload_bits},
                {"slot_s", c.radio.slot_s},
                {"handover_s", c.radio.handover_s},
                {"zeta", c.radio.zeta},
                {"max_power_dbm", watt_to_dbm(c.radio.max_power_w)}};
  j["topology"] = {{"irs_elements", c.topo.irs_elements},
                   {"relays", c.topo.relays},
                   {"pathloss_exponent", c.topo.pathloss_exponent},
                   {"ref_gain_db", c.topo.ref_gain_db},
                   {"rician_k", c.topo.rician_k},
                   {"sn_irs_m", c.topo.sn_irs_m},
                   {"irs_dest_m", c.topo.irs_dest_m},
                   {"sn_rs_m", c.topo.sn_rs_m},
                   {"rs_dest_m", c.topo.rs_dest_m},
                   {"rs_irs_m", c.topo.rs_irs_m}};
  j["process"] = {{"states", c.process.states},
                  {"chi", c.process.chi},
                  {"varphi", c.process.varphi},
                  {"aos_cap", c.process.aos_cap}};
  j["utility"] = {{"kappa", c.util.kappa},
                  {"vartheta", c.util.vartheta},
                  {"sampling_cost_j", c.util.sampling_cost_j}};
  j["online"] = {{"hidden", c.online.hidden},
                 {"actor_lr", c.online.actor_lr},
                 {"critic_lr", c.online.critic_lr},
                 {"target_reset_slots", c.online.target_reset_slots},
                 {"slots", c.online.slots},
                 {"metrics_window", c.online.metrics_window}};
  j["offline"] = {{"hidden", c.offline.hidden},
                  {"actor_lr", c.offline.actor_lr},
                  {"critic_lr", c.offline.critic_lr},
                  {"rho", c.offline.rho},
                  {"nu", c.offline.nu},
                  {"batch", c.offline.batch},
                  {"target_reset_iters", c.offline.target_reset_iters},
                  {"iters", c.offline.iters},
                  {"eval_every", c.offline.eval_every}};
  j["a2c"] = {{"hidden", c.a2c.hidden},
              {"actor_lr", c.a2c.actor_lr},
              {"critic_lr", c.a2c.critic_lr},
              {"entropy_bonus", c.a2c.entropy_bonus},
              {"slots", c.a2c.slots},
              {"metrics_window", c.a2c.metrics_window}};
  j["cql"] = {{"hidden", c.cql.hidden},
              {"lr", c.cql.lr},
              {"rho", c.cql.rho},
              {"batch", c.cql.batch},
              {"target_reset_iters", c.cql.target_reset_iters},
              {"iters", c.cql.iters}};
  j["experiment"] = {{"dataset_size", c.experiment.dataset_size},
                     {"eval_horizon", c.experiment.eval_horizon},
                     {"seeds", c.experiment.seeds},
                     {"workers", c.experiment.workers},
                     {"expert_fraction", c.experiment.expert_fraction}};
  return j.dump();
}

std::string config_hash_hex(const RunConfig& c) {
  std::uint64_t h = fnv1a64(dump_run_config(c));
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[15 - i] = hex[(h >> (4 * i)) & 0xf];
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace aos

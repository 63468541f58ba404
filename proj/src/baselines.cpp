#include "aos/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace aos {

PolicyFn uniform_policy(int actions) {
  return [actions](std::span<const double>, std::vector<double>& probs) {
    probs.assign(actions, 1.0 / actions);
  };
}

PolicyFn actor_policy(Mlp actor) {
  return [net = std::move(actor)](std::span<const double> feat,
                                  std::vector<double>& probs) {
    actor_probs(net, feat, probs);
  };
}

PolicyFn greedy_q_policy(Mlp critic) {
  return [net = std::move(critic)](std::span<const double> feat,
                                   std::vector<double>& probs) {
    static thread_local std::vector<double> q;
    forward(net, feat, q);
    std::size_t best = 0;
    for (std::size_t i = 1; i < q.size(); ++i)
      if (q[i] > q[best]) best = i;
    probs.assign(q.size(), 0.0);
    probs[best] = 1.0;
  };
}

A2cTrainer::A2cTrainer(int feature_len, int actions, const A2cConfig& cfg,
                       double gamma, std::uint64_t seed)
    : cfg_(cfg),
      gamma_(gamma),
      actor_(Mlp::init({feature_len, cfg.hidden, actions}, derive_seed(seed, 5))),
      critic_(Mlp::init({feature_len, cfg.hidden, 1}, derive_seed(seed, 6))),
      actor_opt_(actor_.shape, AdamConfig{cfg.actor_lr}),
      critic_opt_(critic_.shape, AdamConfig{cfg.critic_lr}),
      grads_(Tensors::zeros(actor_.shape)) {}

void A2cTrainer::update(std::span<const double> s_feat, int a, double u,
                        std::span<const double> s2_feat) {
  forward(critic_, s2_feat, v_);
  double target = (1.0 - gamma_) * u + gamma_ * v_[0];
  forward(critic_, s_feat, v_, &cache_);
  double adv = target - v_[0];

  upstream_.assign(1, -adv);  // descend half the squared advantage
  grads_ = Tensors::zeros(critic_.shape);
  backprop(critic_, cache_, upstream_, grads_);
  adam_step(critic_.p, grads_, critic_opt_, /*maximize=*/false);

  actor_probs(actor_, s_feat, probs_, &cache_);
  double h = policy_entropy(probs_);
  upstream_.assign(probs_.size(), 0.0);
  for (std::size_t b = 0; b < probs_.size(); ++b) {
    double lp = safe_log(probs_[b]);
    upstream_[b] = adv * ((static_cast<int>(b) == a ? 1.0 : 0.0) - probs_[b]) -
                   cfg_.entropy_bonus * probs_[b] * (lp + h);
  }
  grads_ = Tensors::zeros(actor_.shape);
  backprop(actor_, cache_, upstream_, grads_);
  adam_step(actor_.p, grads_, actor_opt_, /*maximize=*/true);
}

double A2cTrainer::critic_value(std::span<const double> s_feat) {
  forward(critic_, s_feat, v_);
  return v_[0];
}

double A2cTrainer::critic_loss(std::span<const double> s_feat, double tgt) {
  forward(critic_, s_feat, v_);
  double diff = v_[0] - tgt;
  return 0.5 * diff * diff;
}

void A2cTrainer::critic_backward(std::span<const double> s_feat, double tgt,
                                 Tensors& grads) {
  forward(critic_, s_feat, v_, &cache_);
  upstream_.assign(1, v_[0] - tgt);
  grads.zero();
  backprop(critic_, cache_, upstream_, grads);
}

double A2cTrainer::actor_score(std::span<const double> s_feat, int a, double adv) {
  actor_probs(actor_, s_feat, probs_);
  return adv * safe_log(probs_[a]) + cfg_.entropy_bonus * policy_entropy(probs_);
}

void A2cTrainer::actor_backward(std::span<const double> s_feat, int a, double adv,
                                Tensors& grads) {
  actor_probs(actor_, s_feat, probs_, &cache_);
  double h = policy_entropy(probs_);
  upstream_.assign(probs_.size(), 0.0);
  for (std::size_t b = 0; b < probs_.size(); ++b) {
    double lp = safe_log(probs_[b]);
    upstream_[b] = adv * ((static_cast<int>(b) == a ? 1.0 : 0.0) - probs_[b]) -
                   cfg_.entropy_bonus * probs_[b] * (lp + h);
  }
  grads.zero();
  backprop(actor_, cache_, upstream_, grads);
}

std::vector<OnlineMetricsRow> A2cTrainer::run(Env& env, long slots,
                                              Rng& action_rng) {
  std::vector<OnlineMetricsRow> rows;
  std::vector<double> s_feat(env.features().begin(), env.features().end());
  std::vector<double> pi;
  double win_u = 0, win_c = 0, win_e = 0;
  long win_n = 0;
  for (long t = 0; t < slots; ++t) {
    actor_probs(actor_, s_feat, pi);
    int a = sample_from(pi, action_rng);
    SlotInfo info = env.step(a);
    std::span<const double> s2 = env.features();
    update(s_feat, a, info.utility, s2);
    s_feat.assign(s2.begin(), s2.end());

    win_u += info.utility;
    win_c += info.aos;
    win_e += info.energy_j;
    ++win_n;
    if (win_n == cfg_.metrics_window) {
      rows.push_back({t + 1, win_u / win_n, win_c / win_n, win_e / win_n});
      win_u = win_c = win_e = 0;
      win_n = 0;
    }
  }
  if (win_n > 0)
    rows.push_back({slots, win_u / win_n, win_c / win_n, win_e / win_n});
  return rows;
}

CqlTrainer::CqlTrainer(int feature_len, int actions, const CqlConfig& cfg,
                       double gamma, std::uint64_t seed)
    : cfg_(cfg),
      gamma_(gamma),
      q_(Mlp::init({feature_len, cfg.hidden, actions}, derive_seed(seed, 7))),
      target_(q_),
      opt_(q_.shape, AdamConfig{cfg.lr}),
      grads_(Tensors::zeros(q_.shape)) {}

void CqlTrainer::reset_target() { target_ = q_; }

double CqlTrainer::pass(const Dataset& ds, std::span<const std::uint32_t> idx,
                        Tensors* grads) {
  const double inv = 1.0 / static_cast<double>(idx.size());
  double loss = 0.0;
  if (grads) grads->zero();
  std::vector<double> sm;
  for (std::uint32_t i : idx) {
    int a = ds.action(i);
    forward(target_, ds.s2(i), q2_);
    double best = *std::max_element(q2_.begin(), q2_.end());
    double tgt = (1.0 - gamma_) * ds.u(i) + gamma_ * best;
    forward(q_, ds.s(i), qv_, grads ? &cache_ : nullptr);
    double diff = qv_[a] - tgt;
    double lse = logsumexp(qv_);
    loss += (0.5 * diff * diff + cfg_.rho * (lse - qv_[a])) * inv;
    if (!grads) continue;
    softmax(qv_, sm);
    upstream_.assign(qv_.size(), 0.0);
    upstream_[a] += diff - cfg_.rho;
    for (std::size_t b = 0; b < qv_.size(); ++b) upstream_[b] += cfg_.rho * sm[b];
    for (double& v : upstream_) v *= inv;
    backprop(q_, cache_, upstream_, *grads);
  }
  return loss;
}

double CqlTrainer::loss(const Dataset& ds, std::span<const std::uint32_t> idx) {
  return pass(ds, idx, nullptr);
}

double CqlTrainer::step(const Dataset& ds, std::span<const std::uint32_t> idx) {
  double loss = pass(ds, idx, &grads_);
  adam_step(q_.p, grads_, opt_, /*maximize=*/false);
  return loss;
}

double CqlTrainer::backward(const Dataset& ds, std::span<const std::uint32_t> idx,
                            Tensors& grads) {
  return pass(ds, idx, &grads);
}

std::vector<CqlTrainer::IterRow> CqlTrainer::train(const Dataset& ds,
                                                   Rng& batch_rng) {
  if (ds.size() < cfg_.batch)
    throw StructuralError("dataset smaller than one batch");
  std::vector<IterRow> rows;
  rows.reserve(cfg_.iters);
  for (long j = 0; j < cfg_.iters; ++j) {
    if (j % cfg_.target_reset_iters == 0) reset_target();
    auto idx = sample_without_replacement(ds.size(), cfg_.batch, batch_rng);
    rows.push_back({j + 1, step(ds, idx)});
  }
  return rows;
}

}  // namespace aos

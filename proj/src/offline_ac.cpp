#include "aos/offline_ac.hpp"

#include <cmath>

#include "aos/online_ac.hpp"

namespace aos {

OfflineActorCritic::OfflineActorCritic(int feature_len, int actions,
                                       const OfflineAcConfig& cfg, double gamma,
                                       double alpha, std::uint64_t seed)
    : cfg_(cfg),
      gamma_(gamma),
      alpha_(alpha),
      actor_(Mlp::init({feature_len, cfg.hidden, actions}, derive_seed(seed, 3))),
      critic_(Mlp::init({feature_len, cfg.hidden, actions}, derive_seed(seed, 4))),
      target_(critic_),
      actor_opt_(actor_.shape, AdamConfig{cfg.actor_lr}),
      critic_opt_(critic_.shape, AdamConfig{cfg.critic_lr}),
      grads_(Tensors::zeros(actor_.shape)) {}

void OfflineActorCritic::reset_target() { target_ = critic_; }

double OfflineActorCritic::td_target(double u, std::span<const double> s2_feat) {
  forward(target_, s2_feat, q2_);
  actor_probs(actor_, s2_feat, probs_);
  double v = 0.0;
  for (std::size_t b = 0; b < probs_.size(); ++b) v += probs_[b] * q2_[b];
  return (1.0 - gamma_) * u + gamma_ * v;
}

double OfflineActorCritic::conservative_penalty(std::span<const double> q, int a,
                                                double nu) {
  double pen = logsumexp(q);
  for (std::size_t b = 0; b < q.size(); ++b) {
    if (static_cast<int>(b) == a) continue;
    pen += std::max(0.0, nu + q[b] - q[a]);
  }
  return pen;
}

OfflineActorCritic::CriticStats OfflineActorCritic::critic_pass(
    const Dataset& ds, std::span<const std::uint32_t> idx, Tensors* grads) {
  const double inv = 1.0 / static_cast<double>(idx.size());
  CriticStats stats;
  if (grads) grads->zero();
  std::vector<double> sm;
  for (std::uint32_t i : idx) {
    int a = ds.action(i);
    double tgt = td_target(ds.u(i), ds.s2(i));
    forward(critic_, ds.s(i), q_, grads ? &cache_ : nullptr);
    double diff = q_[a] - tgt;
    double pen = conservative_penalty(q_, a, cfg_.nu);
    stats.loss += (0.5 * diff * diff + cfg_.rho * pen) * inv;
    stats.penalty += pen * inv;
    if (!grads) continue;
    softmax(q_, sm);
    upstream_.assign(q_.size(), 0.0);
    upstream_[a] += diff;
    for (std::size_t b = 0; b < q_.size(); ++b) {
      upstream_[b] += cfg_.rho * sm[b];
      if (static_cast<int>(b) != a && cfg_.nu + q_[b] - q_[a] > 0.0) {
        upstream_[b] += cfg_.rho;
        upstream_[a] -= cfg_.rho;
      }
    }
    for (double& v : upstream_) v *= inv;
    backprop(critic_, cache_, upstream_, *grads);
  }
  return stats;
}

double OfflineActorCritic::actor_pass(const Dataset& ds,
                                      std::span<const std::uint32_t> idx,
                                      Tensors* grads) {
  const double inv = 1.0 / static_cast<double>(idx.size());
  double objective = 0.0;
  if (grads) grads->zero();
  for (std::uint32_t i : idx) {
    forward(critic_, ds.s(i), q_);
    actor_probs(actor_, ds.s(i), probs_, grads ? &cache_ : nullptr);
    double f = 0.0;
    for (std::size_t b = 0; b < probs_.size(); ++b)
      f += probs_[b] * (q_[b] - alpha_ * safe_log(probs_[b]));
    objective += f * inv;
    if (!grads) continue;
    upstream_.assign(probs_.size(), 0.0);
    for (std::size_t b = 0; b < probs_.size(); ++b)
      upstream_[b] = probs_[b] * (q_[b] - alpha_ * safe_log(probs_[b]) - f) * inv;
    backprop(actor_, cache_, upstream_, *grads);
  }
  return objective;
}

OfflineActorCritic::CriticStats OfflineActorCritic::critic_step(
    const Dataset& ds, std::span<const std::uint32_t> idx) {
  CriticStats stats = critic_pass(ds, idx, &grads_);
  adam_step(critic_.p, grads_, critic_opt_, /*maximize=*/false);
  return stats;
}

double OfflineActorCritic::actor_step(const Dataset& ds,
                                      std::span<const std::uint32_t> idx) {
  double objective = actor_pass(ds, idx, &grads_);
  adam_step(actor_.p, grads_, actor_opt_, /*maximize=*/true);
  return objective;
}

OfflineActorCritic::CriticStats OfflineActorCritic::critic_eval(
    const Dataset& ds, std::span<const std::uint32_t> idx) {
  return critic_pass(ds, idx, nullptr);
}

double OfflineActorCritic::actor_objective(const Dataset& ds,
                                           std::span<const std::uint32_t> idx) {
  return actor_pass(ds, idx, nullptr);
}

OfflineActorCritic::CriticStats OfflineActorCritic::critic_backward(
    const Dataset& ds, std::span<const std::uint32_t> idx, Tensors& grads) {
  return critic_pass(ds, idx, &grads);
}

double OfflineActorCritic::actor_backward(const Dataset& ds,
                                          std::span<const std::uint32_t> idx,
                                          Tensors& grads) {
  return actor_pass(ds, idx, &grads);
}

std::vector<OfflineIterRow> OfflineActorCritic::train(const Dataset& ds,
                                                      Rng& batch_rng,
                                                      const EvalHook& hook) {
  if (ds.size() < cfg_.batch)
    throw StructuralError("dataset smaller than one batch");
  std::vector<OfflineIterRow> rows;
  rows.reserve(cfg_.iters);
  for (long j = 0; j < cfg_.iters; ++j) {
    if (j % cfg_.target_reset_iters == 0) reset_target();
    auto idx = sample_without_replacement(ds.size(), cfg_.batch, batch_rng);
    CriticStats cs = critic_step(ds, idx);
    double ao = actor_step(ds, idx);
    OfflineIterRow row{j + 1, cs.loss, cs.penalty, ao, false, 0.0};
    if (hook && ((j + 1) % cfg_.eval_every == 0 || j + 1 == cfg_.iters)) {
      row.evaluated = true;
      row.eval_mean_u = hook(actor_);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace aos

#include "aos/online_ac.hpp"

#include <cmath>

namespace aos {

double policy_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

int sample_from(std::span<const double> probs, Rng& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  double r = d(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (r < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

OnlineActorCritic::OnlineActorCritic(int feature_len, int actions,
                                     const OnlineAcConfig& cfg, double gamma,
                                     double alpha, std::uint64_t seed)
    : cfg_(cfg),
      gamma_(gamma),
      alpha_(alpha),
      actor_(Mlp::init({feature_len, cfg.hidden, actions}, derive_seed(seed, 1))),
      critic_(Mlp::init({feature_len, cfg.hidden, actions}, derive_seed(seed, 2))),
      target_(critic_),
      actor_opt_(actor_.shape, AdamConfig{cfg.actor_lr}),
      critic_opt_(critic_.shape, AdamConfig{cfg.critic_lr}),
      grads_(Tensors::zeros(actor_.shape)) {}

void OnlineActorCritic::reset_target() { target_ = critic_; }

double OnlineActorCritic::td_error(double u, std::span<const double> s_feat, int a,
                                   std::span<const double> s2_feat, int a2) {
  forward(critic_, s_feat, q_);
  double q_sa = q_[a];
  forward(target_, s2_feat, q_);
  double q_next = q_[a2];
  actor_probs(actor_, s2_feat, probs_);
  double lp_next = safe_log(probs_[a2]);
  return (1.0 - gamma_) * u + gamma_ * (q_next - alpha_ * (1.0 - gamma_) * lp_next) -
         q_sa;
}

void OnlineActorCritic::critic_update(std::span<const double> s_feat, int a,
                                      double delta) {
  forward(critic_, s_feat, q_, &cache_);
  grads_.zero();
  upstream_.assign(q_.size(), 0.0);
  upstream_[a] = -delta;  // d(half delta^2)/dQ(s,a)
  backprop(critic_, cache_, upstream_, grads_);
  adam_step(critic_.p, grads_, critic_opt_, /*maximize=*/false);
}

void OnlineActorCritic::actor_update(std::span<const double> s_feat, int a) {
  forward(critic_, s_feat, q_);
  double q_sa = q_[a];
  actor_probs(actor_, s_feat, probs_, &cache_);
  double lp = safe_log(probs_[a]);
  double coeff = q_sa - 2.0 * alpha_ * (1.0 - gamma_) * lp;
  upstream_.assign(probs_.size(), 0.0);
  for (std::size_t b = 0; b < probs_.size(); ++b)
    upstream_[b] = coeff * ((static_cast<int>(b) == a ? 1.0 : 0.0) - probs_[b]);
  grads_.zero();
  backprop(actor_, cache_, upstream_, grads_);
  adam_step(actor_.p, grads_, actor_opt_, /*maximize=*/true);
}

double OnlineActorCritic::critic_loss(std::span<const double> s_feat, int a,
                                      double tgt) {
  forward(critic_, s_feat, q_);
  double diff = q_[a] - tgt;
  return 0.5 * diff * diff;
}

void OnlineActorCritic::critic_backward(std::span<const double> s_feat, int a,
                                        double tgt, Tensors& grads) {
  forward(critic_, s_feat, q_, &cache_);
  upstream_.assign(q_.size(), 0.0);
  upstream_[a] = q_[a] - tgt;
  grads.zero();
  backprop(critic_, cache_, upstream_, grads);
}

double OnlineActorCritic::actor_score(std::span<const double> s_feat, int a,
                                      double q_sa) {
  actor_probs(actor_, s_feat, probs_);
  double lp = safe_log(probs_[a]);
  return lp * (q_sa - alpha_ * (1.0 - gamma_) * lp);
}

void OnlineActorCritic::actor_backward(std::span<const double> s_feat, int a,
                                       double q_sa, Tensors& grads) {
  actor_probs(actor_, s_feat, probs_, &cache_);
  double lp = safe_log(probs_[a]);
  double coeff = q_sa - 2.0 * alpha_ * (1.0 - gamma_) * lp;
  upstream_.assign(probs_.size(), 0.0);
  for (std::size_t b = 0; b < probs_.size(); ++b)
    upstream_[b] = coeff * ((static_cast<int>(b) == a ? 1.0 : 0.0) - probs_[b]);
  grads.zero();
  backprop(actor_, cache_, upstream_, grads);
}

std::vector<OnlineMetricsRow> OnlineActorCritic::run(Env& env, long slots,
                                                     Rng& action_rng) {
  std::vector<OnlineMetricsRow> rows;
  std::vector<double> s_feat(env.features().begin(), env.features().end());
  std::vector<double> pi;
  actor_probs(actor_, s_feat, pi);
  int a = sample_from(pi, action_rng);

  double win_u = 0, win_c = 0, win_e = 0;
  long win_n = 0;
  for (long t = 0; t < slots; ++t) {
    if (t % cfg_.target_reset_slots == 0) reset_target();
    SlotInfo info = env.step(a);
    std::span<const double> s2 = env.features();
    actor_probs(actor_, s2, pi);
    int a2 = sample_from(pi, action_rng);

    double delta = td_error(info.utility, s_feat, a, s2, a2);
    critic_update(s_feat, a, delta);
    actor_update(s_feat, a);

    s_feat.assign(s2.begin(), s2.end());
    a = a2;

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

}  // namespace aos

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aos/config.hpp"
#include "aos/dataset.hpp"
#include "aos/env.hpp"
#include "aos/neural.hpp"
#include "aos/online_ac.hpp"

namespace aos {

using PolicyFn =
    std::function<void(std::span<const double> features, std::vector<double>& probs)>;

PolicyFn uniform_policy(int actions);
PolicyFn actor_policy(Mlp actor);     // softmax over the network's logits
PolicyFn greedy_q_policy(Mlp critic); // one-hot argmax, lowest index on ties

// On-policy advantage actor-critic with a scalar state-value critic and an
// entropy bonus. Serves both as a comparison scheme and as the behavior used
// to collect expert datasets.
class A2cTrainer {
 public:
  A2cTrainer(int feature_len, int actions, const A2cConfig& cfg, double gamma,
             std::uint64_t seed);

  std::vector<OnlineMetricsRow> run(Env& env, long slots, Rng& action_rng);

  // One update from a single transition; exposed for gradient checks.
  void update(std::span<const double> s_feat, int a, double u,
              std::span<const double> s2_feat);

  // Loss pieces with the bootstrap target and advantage frozen, so finite
  // differences over the parameters are well defined.
  double critic_value(std::span<const double> s_feat);
  double critic_loss(std::span<const double> s_feat, double tgt);
  void critic_backward(std::span<const double> s_feat, double tgt, Tensors& grads);
  double actor_score(std::span<const double> s_feat, int a, double adv);
  void actor_backward(std::span<const double> s_feat, int a, double adv,
                      Tensors& grads);

  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  Mlp& mutable_actor() { return actor_; }
  Mlp& mutable_critic() { return critic_; }

 private:
  A2cConfig cfg_;
  double gamma_;
  Mlp actor_, critic_;
  AdamState actor_opt_, critic_opt_;
  std::vector<double> probs_, v_, upstream_;
  ForwardCache cache_;
  Tensors grads_;
};

// Batch Q-learning from a stored dataset with a softmax overestimation
// regularizer; acts greedily at evaluation time.
class CqlTrainer {
 public:
  CqlTrainer(int feature_len, int actions, const CqlConfig& cfg, double gamma,
             std::uint64_t seed);

  struct IterRow {
    long iter = 0;
    double loss = 0;
  };

  double loss(const Dataset& ds, std::span<const std::uint32_t> idx);
  double step(const Dataset& ds, std::span<const std::uint32_t> idx);  // returns pre-step loss
  double backward(const Dataset& ds, std::span<const std::uint32_t> idx,
                  Tensors& grads);  // batch gradient, no optimizer step
  std::vector<IterRow> train(const Dataset& ds, Rng& batch_rng);
  void reset_target();

  const Mlp& q() const { return q_; }
  Mlp& mutable_q() { return q_; }

 private:
  double pass(const Dataset& ds, std::span<const std::uint32_t> idx, Tensors* grads);

  CqlConfig cfg_;
  double gamma_;
  Mlp q_, target_;
  AdamState opt_;
  std::vector<double> qv_, q2_, upstream_;
  ForwardCache cache_;
  Tensors grads_;
};

}  // namespace aos

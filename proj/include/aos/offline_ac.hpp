#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aos/config.hpp"
#include "aos/dataset.hpp"
#include "aos/neural.hpp"

namespace aos {

struct OfflineIterRow {
  long iter = 0;  // 1-based
  double critic_loss = 0;      // squared error plus weighted penalty, batch mean
  double penalty_mean = 0;     // unweighted conservative term, batch mean
  double actor_objective = 0;  // entropy-regularized expected value, batch mean
  bool evaluated = false;
  double eval_mean_u = 0;
};

// Batch actor-critic trained purely from a stored dataset. The critic keeps
// its value estimates pessimistic on actions the dataset does not support via
// a softmax mass term plus a ranking margin; the actor maximizes the
// entropy-regularized expected critic value under its own distribution.
class OfflineActorCritic {
 public:
  OfflineActorCritic(int feature_len, int actions, const OfflineAcConfig& cfg,
                     double gamma, double alpha, std::uint64_t seed);

  // Bootstrap target: (1-gamma)u + gamma E_{a'~pi(s')} Qtarget(s',a').
  double td_target(double u, std::span<const double> s2_feat);

  // logsumexp(q) + sum of hinge margins against the taken action; the
  // conservatism weight is applied by the caller.
  static double conservative_penalty(std::span<const double> q, int a, double nu);

  struct CriticStats {
    double loss = 0;
    double penalty = 0;
  };
  CriticStats critic_step(const Dataset& ds, std::span<const std::uint32_t> idx);
  double actor_step(const Dataset& ds, std::span<const std::uint32_t> idx);

  // Loss and objective values without touching parameters, for tests.
  CriticStats critic_eval(const Dataset& ds, std::span<const std::uint32_t> idx);
  double actor_objective(const Dataset& ds, std::span<const std::uint32_t> idx);

  // Batch gradients without an optimizer step. The bootstrap targets come from
  // the frozen critic copy, so finite differences over the live parameters are
  // well defined.
  CriticStats critic_backward(const Dataset& ds, std::span<const std::uint32_t> idx,
                              Tensors& grads);
  double actor_backward(const Dataset& ds, std::span<const std::uint32_t> idx,
                        Tensors& grads);

  void reset_target();

  using EvalHook = std::function<double(const Mlp& actor)>;
  std::vector<OfflineIterRow> train(const Dataset& ds, Rng& batch_rng,
                                    const EvalHook& hook = nullptr);

  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  Mlp& mutable_critic() { return critic_; }
  Mlp& mutable_actor() { return actor_; }

 private:
  CriticStats critic_pass(const Dataset& ds, std::span<const std::uint32_t> idx,
                          Tensors* grads);
  double actor_pass(const Dataset& ds, std::span<const std::uint32_t> idx,
                    Tensors* grads);

  OfflineAcConfig cfg_;
  double gamma_, alpha_;
  Mlp actor_, critic_, target_;
  AdamState actor_opt_, critic_opt_;
  std::vector<double> probs_, q_, q2_, upstream_;
  ForwardCache cache_;
  Tensors grads_;
};

}  // namespace aos

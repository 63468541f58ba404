#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aos/config.hpp"
#include "aos/env.hpp"
#include "aos/neural.hpp"

namespace aos {

double policy_entropy(std::span<const double> probs);

int sample_from(std::span<const double> probs, Rng& rng);

struct OnlineMetricsRow {
  long slot = 0;  // last slot of the window, 1-based
  double mean_u = 0, mean_aos = 0, mean_energy = 0;
};

// Single-stream actor-critic on the entropy-regularized normalized value.
// The critic chases a frozen copy of itself that is refreshed periodically;
// the actor follows the critic's current estimate.
class OnlineActorCritic {
 public:
  OnlineActorCritic(int feature_len, int actions, const OnlineAcConfig& cfg,
                    double gamma, double alpha, std::uint64_t seed);

  // (1-gamma)u + gamma(Qtarget(s',a') - alpha(1-gamma)ln pi(s',a')) - Q(s,a)
  double td_error(double u, std::span<const double> s_feat, int a,
                  std::span<const double> s2_feat, int a2);

  // Descends half the squared TD error, the bootstrap target held fixed.
  void critic_update(std::span<const double> s_feat, int a, double delta);

  // Ascends (Q(s,a) - alpha(1-gamma)ln pi(a|s)) ln pi(a|s) in the actor
  // parameters; both log-probability factors carry gradient.
  void actor_update(std::span<const double> s_feat, int a);

  void reset_target();

  std::vector<OnlineMetricsRow> run(Env& env, long slots, Rng& action_rng);

  // Loss values and analytic gradients with the bootstrap quantities frozen,
  // so finite differences over the parameters are well defined.
  double critic_loss(std::span<const double> s_feat, int a, double tgt);
  void critic_backward(std::span<const double> s_feat, int a, double tgt,
                       Tensors& grads);
  double actor_score(std::span<const double> s_feat, int a, double q_sa);
  void actor_backward(std::span<const double> s_feat, int a, double q_sa,
                      Tensors& grads);

  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  Mlp& mutable_actor() { return actor_; }
  Mlp& mutable_critic() { return critic_; }

 private:
  OnlineAcConfig cfg_;
  double gamma_, alpha_;
  Mlp actor_, critic_, target_;
  AdamState actor_opt_, critic_opt_;
  std::vector<double> probs_, q_, upstream_;
  ForwardCache cache_;
  Tensors grads_;
};

}  // namespace aos

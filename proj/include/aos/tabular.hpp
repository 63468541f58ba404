#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aos/common.hpp"
#include "aos/env.hpp"

namespace aos {

// Small dense MDP with utilities in (0,1], used to check the pessimism
// guarantees of the offline update against exact linear-algebra values.
struct TabularMdp {
  int S = 0, A = 0;
  double gamma = 0.9;
  std::vector<double> kernel;  // S*A*S, rows sum to 1
  std::vector<double> util;    // S*A

  double phi(int s, int a, int s2) const {
    return kernel[(static_cast<std::size_t>(s) * A + a) * S + s2];
  }
  double u(int s, int a) const { return util[static_cast<std::size_t>(s) * A + a]; }
  void validate() const;
  static TabularMdp random_dense(int S, int A, double gamma, std::uint64_t seed);
};

struct TabularPolicy {
  int S = 0, A = 0;
  std::vector<double> p;  // S*A, rows sum to 1

  double at(int s, int a) const { return p[static_cast<std::size_t>(s) * A + a]; }
  void validate() const;
  static TabularPolicy uniform(int S, int A);
  static TabularPolicy random(int S, int A, std::uint64_t seed);
};

struct TabularTransition {
  int s = 0, a = 0, s2 = 0;
  double u = 0;
};

std::vector<TabularTransition> roll_tabular(const TabularMdp& mdp,
                                            const TabularPolicy& behavior,
                                            long count, Rng& rng);

// One application of the policy Bellman operator on normalized values:
// (TQ)(s,a) = (1-gamma)u(s,a) + gamma sum_s' phi sum_a' pi Q(s',a').
std::vector<double> bellman_apply(const TabularMdp& mdp, const TabularPolicy& pi,
                                  std::span<const double> q);

// Exact normalized state values via the linear system (I - gamma Phi^pi) v =
// (1-gamma) u^pi.
std::vector<double> exact_policy_values(const TabularMdp& mdp,
                                        const TabularPolicy& pi);

std::vector<double> q_from_values(const TabularMdp& mdp, std::span<const double> v);

struct EmpiricalModel {
  int S = 0, A = 0;
  std::vector<long> count;       // S*A visit counts
  std::vector<long> state_count; // S
  std::vector<double> pi_d;      // empirical behavior, uniform where unseen
  std::vector<double> trans;     // empirical kernel on covered pairs
  std::vector<double> mean_u;    // empirical utility on covered pairs
};

EmpiricalModel build_empirical(const std::vector<TabularTransition>& data, int S,
                               int A);

// Data-policy row reweighted by exp(Q-1); the weighting that the pessimism
// penalty divides through the empirical policy.
std::vector<double> sharpened_policy_row(std::span<const double> pi_d_row,
                                         std::span<const double> q_row);

// Hoeffding radius for [0,1]-bounded residuals at failure budget eps shared
// across S*A pairs.
double hoeffding_psi(int S, int A, double eps);

// Smallest penalty weight that keeps the pessimism argument valid, maximized
// over covered pairs: psi/sqrt(cnt) * pi_d / (omega+1).
double min_penalty_weight(double psi, std::span<const long> counts,
                          std::span<const double> pi_d,
                          std::span<const double> omega);

// Pairwise-sigmoid ranking scores: score(a) = prod_{b != a} sigma(q_a - q_b).
std::vector<double> ranking_scores(std::span<const double> q_row);

// The ranking scores must order actions exactly as the inputs do.
bool ranking_consistent(std::span<const double> q_row);

enum class FqiMode { KnownModel, Sampled };

struct FqiOptions {
  FqiMode mode = FqiMode::KnownModel;
  double rho = 5e-4;
  double nu = 1.0;   // unused by the value bound, kept for report completeness
  double tol = 1e-12;
  long max_sweeps = 200000;
};

struct FqiResult {
  std::vector<double> q_hat;         // S*A
  std::vector<double> v_hat;         // S
  std::vector<bool> pair_covered;    // S*A
  std::vector<bool> state_covered;   // every pi-supported action has data
  long sweeps = 0;
  double final_delta = 0;
};

// Penalized fixed-point iteration. Covered pairs back up through the model
// (exact kernel or the empirical one depending on mode) minus
// rho*(omega+1)/pi_d with omega recomputed from the current iterate;
// uncovered pairs take the plain exact backup in KnownModel mode and the
// exact action values in Sampled mode. Sampled-mode states that are not fully
// covered bootstrap from their exact state value.
FqiResult conservative_fqi(const TabularMdp& mdp, const EmpiricalModel& emp,
                           const TabularPolicy& pi_target, const FqiOptions& opt);

struct BoundSeedResult {
  std::uint64_t seed = 0;
  double rho = 0;
  int dataset_states = 0;   // states visited by the dataset
  int asserted_states = 0;  // dataset states included in the check
  int excluded_states = 0;
  int violations = 0;       // asserted states with v_hat > v
  double min_slack = 0;     // min over asserted states of v - v_hat
};

struct BoundReport {
  FqiMode mode = FqiMode::KnownModel;
  double epsilon = 0;
  double psi = 0;
  std::vector<BoundSeedResult> seeds;
  long total_assertions = 0;
  long total_violations = 0;
  double violation_rate = 0;
};

struct BoundCheckOptions {
  FqiMode mode = FqiMode::KnownModel;
  long dataset_size = 2000;
  int n_seeds = 1;
  double rho = 5e-4;     // KnownModel weight
  double epsilon = 0.05; // Sampled-mode failure budget, sets rho per dataset
  double nu = 1.0;
};

// Rolls datasets under the uniform behavior, runs the penalized update, and
// checks v_hat <= v on covered dataset states against the exact values.
BoundReport verify_value_lower_bound(const TabularMdp& mdp,
                                     const TabularPolicy& pi_target,
                                     const BoundCheckOptions& opt,
                                     std::uint64_t base_seed);

// Finite tabular environment behind the common Env interface, for trainer
// tests against exact values. Features are one-hot states.
class TabularEnv : public Env {
 public:
  TabularEnv(TabularMdp mdp, std::uint64_t seed);

  int action_count() const override { return mdp_.A; }
  int feature_len() const override { return mdp_.S; }
  std::span<const double> features() const override { return feat_; }
  SlotInfo step(int action) override;

  int state() const { return s_; }

 private:
  TabularMdp mdp_;
  int s_ = 0;
  Rng rng_;
  std::vector<double> feat_;
};

}  // namespace aos

#include "aos/tabular.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace aos {

void TabularMdp::validate() const {
  if (S < 1 || A < 1) throw StructuralError("empty tabular model");
  if (kernel.size() != static_cast<std::size_t>(S) * A * S ||
      util.size() != static_cast<std::size_t>(S) * A)
    throw StructuralError("tabular model arrays have wrong size");
  if (gamma <= 0 || gamma >= 1) throw StructuralError("gamma must lie in (0,1)");
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double sum = 0;
      for (int s2 = 0; s2 < S; ++s2) {
        double p = phi(s, a, s2);
        if (p < 0) throw StructuralError("negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw StructuralError("transition row does not sum to 1");
      if (!(u(s, a) > 0 && u(s, a) <= 1))
        throw StructuralError("utility outside (0,1]");
    }
}

TabularMdp TabularMdp::random_dense(int S, int A, double gamma,
                                    std::uint64_t seed) {
  TabularMdp m;
  m.S = S;
  m.A = A;
  m.gamma = gamma;
  m.kernel.resize(static_cast<std::size_t>(S) * A * S);
  m.util.resize(static_cast<std::size_t>(S) * A);
  Rng rng(derive_seed(seed, 0x7AB));
  std::uniform_real_distribution<double> mass(0.1, 1.0);
  std::uniform_real_distribution<double> ud(0.05, 1.0);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double sum = 0;
      for (int s2 = 0; s2 < S; ++s2) {
        double w = mass(rng);
        m.kernel[(static_cast<std::size_t>(s) * A + a) * S + s2] = w;
        sum += w;
      }
      for (int s2 = 0; s2 < S; ++s2)
        m.kernel[(static_cast<std::size_t>(s) * A + a) * S + s2] /= sum;
      m.util[static_cast<std::size_t>(s) * A + a] = ud(rng);
    }
  m.validate();
  return m;
}

void TabularPolicy::validate() const {
  if (p.size() != static_cast<std::size_t>(S) * A)
    throw StructuralError("policy array has wrong size");
  for (int s = 0; s < S; ++s) {
    double sum = 0;
    for (int a = 0; a < A; ++a) {
      if (at(s, a) < 0) throw StructuralError("negative policy mass");
      sum += at(s, a);
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw StructuralError("policy row does not sum to 1");
  }
}

TabularPolicy TabularPolicy::uniform(int S, int A) {
  TabularPolicy pi;
  pi.S = S;
  pi.A = A;
  pi.p.assign(static_cast<std::size_t>(S) * A, 1.0 / A);
  return pi;
}

TabularPolicy TabularPolicy::random(int S, int A, std::uint64_t seed) {
  TabularPolicy pi;
  pi.S = S;
  pi.A = A;
  pi.p.resize(static_cast<std::size_t>(S) * A);
  Rng rng(derive_seed(seed, 0x9013));
  std::uniform_real_distribution<double> d(0.1, 1.0);
  for (int s = 0; s < S; ++s) {
    double sum = 0;
    for (int a = 0; a < A; ++a) {
      double w = d(rng);
      pi.p[static_cast<std::size_t>(s) * A + a] = w;
      sum += w;
    }
    for (int a = 0; a < A; ++a) pi.p[static_cast<std::size_t>(s) * A + a] /= sum;
  }
  return pi;
}

namespace {

int draw_categorical(std::span<const double> probs, Rng& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  double r = d(rng);
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (r < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

std::vector<TabularTransition> roll_tabular(const TabularMdp& mdp,
                                            const TabularPolicy& behavior,
                                            long count, Rng& rng) {
  std::vector<TabularTransition> out;
  out.reserve(count);
  std::uniform_int_distribution<int> s0(0, mdp.S - 1);
  int s = s0(rng);
  for (long i = 0; i < count; ++i) {
    std::span<const double> pr(behavior.p.data() + static_cast<std::size_t>(s) * mdp.A,
                               static_cast<std::size_t>(mdp.A));
    int a = draw_categorical(pr, rng);
    std::span<const double> row(
        mdp.kernel.data() + (static_cast<std::size_t>(s) * mdp.A + a) * mdp.S,
        static_cast<std::size_t>(mdp.S));
    int s2 = draw_categorical(row, rng);
    out.push_back({s, a, s2, mdp.u(s, a)});
    s = s2;
  }
  return out;
}

std::vector<double> bellman_apply(const TabularMdp& mdp, const TabularPolicy& pi,
                                  std::span<const double> q) {
  if (q.size() != static_cast<std::size_t>(mdp.S) * mdp.A)
    throw StructuralError("value table has wrong size");
  std::vector<double> v(mdp.S, 0.0);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a)
      v[s] += pi.at(s, a) * q[static_cast<std::size_t>(s) * mdp.A + a];
  std::vector<double> out(q.size());
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a) {
      double exp_v = 0;
      for (int s2 = 0; s2 < mdp.S; ++s2) exp_v += mdp.phi(s, a, s2) * v[s2];
      out[static_cast<std::size_t>(s) * mdp.A + a] =
          (1.0 - mdp.gamma) * mdp.u(s, a) + mdp.gamma * exp_v;
    }
  return out;
}

std::vector<double> exact_policy_values(const TabularMdp& mdp,
                                        const TabularPolicy& pi) {
  const int S = mdp.S, A = mdp.A;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(S, S);
  Eigen::VectorXd b(S);
  for (int s = 0; s < S; ++s) {
    double u_pi = 0;
    for (int a = 0; a < A; ++a) {
      u_pi += pi.at(s, a) * mdp.u(s, a);
      for (int s2 = 0; s2 < S; ++s2)
        M(s, s2) -= mdp.gamma * pi.at(s, a) * mdp.phi(s, a, s2);
    }
    b(s) = (1.0 - mdp.gamma) * u_pi;
  }
  Eigen::VectorXd v = M.partialPivLu().solve(b);
  if (!v.allFinite()) throw NumericalError("policy evaluation solve failed");
  return std::vector<double>(v.data(), v.data() + S);
}

std::vector<double> q_from_values(const TabularMdp& mdp,
                                  std::span<const double> v) {
  if (v.size() != static_cast<std::size_t>(mdp.S))
    throw StructuralError("state value table has wrong size");
  std::vector<double> q(static_cast<std::size_t>(mdp.S) * mdp.A);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a) {
      double exp_v = 0;
      for (int s2 = 0; s2 < mdp.S; ++s2) exp_v += mdp.phi(s, a, s2) * v[s2];
      q[static_cast<std::size_t>(s) * mdp.A + a] =
          (1.0 - mdp.gamma) * mdp.u(s, a) + mdp.gamma * exp_v;
    }
  return q;
}

EmpiricalModel build_empirical(const std::vector<TabularTransition>& data, int S,
                               int A) {
  EmpiricalModel e;
  e.S = S;
  e.A = A;
  e.count.assign(static_cast<std::size_t>(S) * A, 0);
  e.state_count.assign(S, 0);
  e.pi_d.assign(static_cast<std::size_t>(S) * A, 1.0 / A);
  e.trans.assign(static_cast<std::size_t>(S) * A * S, 0.0);
  e.mean_u.assign(static_cast<std::size_t>(S) * A, 0.0);
  for (const TabularTransition& t : data) {
    if (t.s < 0 || t.s >= S || t.a < 0 || t.a >= A || t.s2 < 0 || t.s2 >= S)
      throw StructuralError("transition outside the model");
    std::size_t sa = static_cast<std::size_t>(t.s) * A + t.a;
    e.count[sa] += 1;
    e.state_count[t.s] += 1;
    e.trans[sa * S + t.s2] += 1.0;
    e.mean_u[sa] += t.u;
  }
  for (int s = 0; s < S; ++s) {
    if (e.state_count[s] == 0) continue;
    for (int a = 0; a < A; ++a) {
      std::size_t sa = static_cast<std::size_t>(s) * A + a;
      e.pi_d[sa] = static_cast<double>(e.count[sa]) / e.state_count[s];
      if (e.count[sa] == 0) continue;
      for (int s2 = 0; s2 < S; ++s2) e.trans[sa * S + s2] /= e.count[sa];
      e.mean_u[sa] /= e.count[sa];
    }
  }
  return e;
}

std::vector<double> sharpened_policy_row(std::span<const double> pi_d_row,
                                         std::span<const double> q_row) {
  if (pi_d_row.size() != q_row.size())
    throw StructuralError("policy and value rows differ in length");
  std::vector<double> w(q_row.size());
  for (std::size_t a = 0; a < q_row.size(); ++a)
    w[a] = pi_d_row[a] * std::exp(q_row[a] - 1.0);
  return w;
}

double hoeffding_psi(int S, int A, double eps) {
  if (eps <= 0 || eps >= 1) throw StructuralError("eps must lie in (0,1)");
  return std::sqrt(std::log(2.0 * S * A / eps) / 2.0);
}

double min_penalty_weight(double psi, std::span<const long> counts,
                          std::span<const double> pi_d,
                          std::span<const double> omega) {
  if (counts.size() != pi_d.size() || counts.size() != omega.size())
    throw StructuralError("bound inputs differ in length");
  double best = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1) continue;
    double v = psi / std::sqrt(static_cast<double>(counts[i])) * pi_d[i] /
               (omega[i] + 1.0);
    best = std::max(best, v);
  }
  return best;
}

std::vector<double> ranking_scores(std::span<const double> q_row) {
  auto sigma = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  std::vector<double> score(q_row.size(), 1.0);
  for (std::size_t a = 0; a < q_row.size(); ++a)
    for (std::size_t b = 0; b < q_row.size(); ++b) {
      if (a == b) continue;
      score[a] *= sigma(q_row[a] - q_row[b]);
    }
  return score;
}

bool ranking_consistent(std::span<const double> q_row) {
  std::vector<double> score = ranking_scores(q_row);
  for (std::size_t a = 0; a < q_row.size(); ++a)
    for (std::size_t b = 0; b < q_row.size(); ++b) {
      if (q_row[a] > q_row[b] && !(score[a] > score[b])) return false;
      if (q_row[a] == q_row[b] && score[a] != score[b]) return false;
    }
  return true;
}

FqiResult conservative_fqi(const TabularMdp& mdp, const EmpiricalModel& emp,
                           const TabularPolicy& pi_target,
                           const FqiOptions& opt) {
  const int S = mdp.S, A = mdp.A;
  if (emp.S != S || emp.A != A || pi_target.S != S || pi_target.A != A)
    throw StructuralError("model, data, and policy disagree on dimensions");

  FqiResult res;
  res.pair_covered.assign(static_cast<std::size_t>(S) * A, false);
  res.state_covered.assign(S, false);
  for (int s = 0; s < S; ++s) {
    bool all = true;
    for (int a = 0; a < A; ++a) {
      std::size_t sa = static_cast<std::size_t>(s) * A + a;
      res.pair_covered[sa] = emp.count[sa] > 0;
      if (pi_target.at(s, a) > 1e-12 && !res.pair_covered[sa]) all = false;
    }
    res.state_covered[s] = all;
  }

  std::vector<double> v_exact;
  std::vector<double> q_exact;
  if (opt.mode == FqiMode::Sampled) {
    v_exact = exact_policy_values(mdp, pi_target);
    q_exact = q_from_values(mdp, v_exact);
  }

  std::vector<double> q(static_cast<std::size_t>(S) * A, 0.0);
  if (opt.mode == FqiMode::Sampled)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        std::size_t sa = static_cast<std::size_t>(s) * A + a;
        if (!res.pair_covered[sa]) q[sa] = q_exact[sa];
      }

  std::vector<double> v(S, 0.0), q_new(q.size());
  double delta = 0;
  long sweep = 0;
  for (; sweep < opt.max_sweeps; ++sweep) {
    for (int s = 0; s < S; ++s) {
      double acc = 0;
      for (int a = 0; a < A; ++a)
        acc += pi_target.at(s, a) * q[static_cast<std::size_t>(s) * A + a];
      v[s] = acc;
      if (opt.mode == FqiMode::Sampled && !res.state_covered[s]) v[s] = v_exact[s];
    }
    delta = 0;
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        std::size_t sa = static_cast<std::size_t>(s) * A + a;
        double backup;
        if (opt.mode == FqiMode::KnownModel) {
          double exp_v = 0;
          for (int s2 = 0; s2 < S; ++s2) exp_v += mdp.phi(s, a, s2) * v[s2];
          backup = (1.0 - mdp.gamma) * mdp.u(s, a) + mdp.gamma * exp_v;
        } else if (res.pair_covered[sa]) {
          double exp_v = 0;
          for (int s2 = 0; s2 < S; ++s2)
            exp_v += emp.trans[sa * static_cast<std::size_t>(S) + s2] * v[s2];
          backup = (1.0 - mdp.gamma) * emp.mean_u[sa] + mdp.gamma * exp_v;
        } else {
          q_new[sa] = q[sa];  // frozen at the exact action value
          continue;
        }
        if (res.pair_covered[sa]) {
          double omega = emp.pi_d[sa] * std::exp(q[sa] - 1.0);
          backup -= opt.rho * (omega + 1.0) / emp.pi_d[sa];
        }
        q_new[sa] = backup;
        delta = std::max(delta, std::abs(backup - q[sa]));
      }
    q.swap(q_new);
    if (delta < opt.tol) break;
  }
  if (delta >= opt.tol)
    throw NumericalError("penalized fixed point did not converge");

  res.q_hat = q;
  res.v_hat.assign(S, 0.0);
  for (int s = 0; s < S; ++s) {
    if (opt.mode == FqiMode::Sampled && !res.state_covered[s]) {
      res.v_hat[s] = v_exact[s];
      continue;
    }
    double acc = 0;
    for (int a = 0; a < A; ++a)
      acc += pi_target.at(s, a) * q[static_cast<std::size_t>(s) * A + a];
    res.v_hat[s] = acc;
  }
  res.sweeps = sweep + 1;
  res.final_delta = delta;
  return res;
}

BoundReport verify_value_lower_bound(const TabularMdp& mdp,
                                     const TabularPolicy& pi_target,
                                     const BoundCheckOptions& opt,
                                     std::uint64_t base_seed) {
  mdp.validate();
  pi_target.validate();
  BoundReport rep;
  rep.mode = opt.mode;
  rep.epsilon = opt.epsilon;
  rep.psi = opt.mode == FqiMode::Sampled ? hoeffding_psi(mdp.S, mdp.A, opt.epsilon)
                                         : 0.0;
  std::vector<double> v_exact = exact_policy_values(mdp, pi_target);
  TabularPolicy behavior = TabularPolicy::uniform(mdp.S, mdp.A);

  for (int i = 0; i < opt.n_seeds; ++i) {
    Rng rng = make_rng(base_seed, static_cast<std::uint64_t>(i) + 1000);
    auto data = roll_tabular(mdp, behavior, opt.dataset_size, rng);
    EmpiricalModel emp = build_empirical(data, mdp.S, mdp.A);

    FqiOptions fo;
    fo.mode = opt.mode;
    fo.nu = opt.nu;
    if (opt.mode == FqiMode::KnownModel) {
      fo.rho = opt.rho;
    } else {
      // Worst-case weight over omega >= 0; satisfies the bound for the final
      // iterate whatever omega it induces.
      double rho = 0;
      for (std::size_t sa = 0; sa < emp.count.size(); ++sa) {
        if (emp.count[sa] < 1) continue;
        rho = std::max(rho, rep.psi / std::sqrt(static_cast<double>(emp.count[sa])) *
                                emp.pi_d[sa]);
      }
      fo.rho = rho;
    }
    FqiResult fqi = conservative_fqi(mdp, emp, pi_target, fo);

    BoundSeedResult sr;
    sr.seed = derive_seed(base_seed, static_cast<std::uint64_t>(i) + 1000);
    sr.rho = fo.rho;
    sr.min_slack = std::numeric_limits<double>::infinity();
    for (int s = 0; s < mdp.S; ++s) {
      if (emp.state_count[s] == 0) continue;
      sr.dataset_states += 1;
      if (opt.mode == FqiMode::Sampled && !fqi.state_covered[s]) {
        sr.excluded_states += 1;
        continue;
      }
      sr.asserted_states += 1;
      double slack = v_exact[s] - fqi.v_hat[s];
      sr.min_slack = std::min(sr.min_slack, slack);
      if (slack < -1e-9) sr.violations += 1;
    }
    if (sr.asserted_states == 0) sr.min_slack = 0;
    rep.total_assertions += sr.asserted_states;
    rep.total_violations += sr.violations;
    rep.seeds.push_back(sr);
  }
  rep.violation_rate =
      rep.total_assertions > 0
          ? static_cast<double>(rep.total_violations) / rep.total_assertions
          : 0.0;
  return rep;
}

TabularEnv::TabularEnv(TabularMdp mdp, std::uint64_t seed)
    : mdp_(std::move(mdp)), rng_(make_rng(seed, 0x7E)) {
  mdp_.validate();
  feat_.assign(mdp_.S, 0.0);
  feat_[s_] = 1.0;
}

SlotInfo TabularEnv::step(int action) {
  if (action < 0 || action >= mdp_.A) throw StructuralError("action out of range");
  SlotInfo info;
  info.utility = mdp_.u(s_, action);
  std::span<const double> row(
      mdp_.kernel.data() + (static_cast<std::size_t>(s_) * mdp_.A + action) * mdp_.S,
      static_cast<std::size_t>(mdp_.S));
  int s2 = draw_categorical(row, rng_);
  feat_[s_] = 0.0;
  s_ = s2;
  feat_[s_] = 1.0;
  return info;
}

}  // namespace aos

#include "psurr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace psurr {

namespace {

Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

std::vector<std::vector<std::size_t>> shuffled_minibatches(std::size_t n, int minibatch_size, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t m = static_cast<std::size_t>(std::max(1, minibatch_size));
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < n; i += m) {
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(n, i + m)));
  }
  return out;
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}

}  // namespace

void TrainerConfig::validate() const {
  try {
    psurr::validate(surrogate);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("surrogate: ") + e.what());
  }
  try {
    gae.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("gae: ") + e.what());
  }
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate", "must be positive");
  require(value_learning_rate > 0.0 && std::isfinite(value_learning_rate), "value_learning_rate", "must be positive");
  require(rollout_len > 0, "rollout_len", "must be positive");
  require(epochs_per_rollout > 0, "epochs_per_rollout", "must be positive");
  require(minibatch_size > 0, "minibatch_size", "must be positive");
  require(minibatch_size <= rollout_len, "minibatch_size", "must not exceed rollout_len");
  require(total_steps >= 0, "total_steps", "must be non-negative");
  require(entropy_gain >= 0.0, "entropy_gain", "must be non-negative");
  require(eval_every >= 0, "eval_every", "must be non-negative");
  require(eval_episodes > 0, "eval_episodes", "must be positive");
  require(!hidden.empty() && std::all_of(hidden.begin(), hidden.end(), [](int h) { return h > 0; }),
          "hidden", "must be a non-empty list of positive sizes");
  require(init_log_std >= kLogStdMin && init_log_std <= kLogStdMax, "init_log_std", "must lie in [-5, 2]");
  require(grad_clip >= 0.0, "grad_clip", "must be non-negative");
  require(max_ratio > 1.0, "max_ratio", "must exceed 1");
  require(td_gain == 0.0, "td_gain", "TD regularization is not supported; must be 0");
  require(env.max_steps >= 1, "env", "max_steps must be >= 1");
}

PolicyConfig TrainerConfig::policy_config() const {
  PolicyConfig pc;
  pc.state_dim = env.state_dim;
  pc.action_dim = env.action_dim;
  pc.hidden = hidden;
  pc.activation = activation;
  pc.state_dependent_std = state_dependent_std;
  pc.init_log_std = init_log_std;
  return pc;
}

TransitionBatch collect_rollout(const PolicySnapshot& baseline, Env& env, int rollout_len, Rng& rng,
                                std::vector<double>* finished_returns) {
  if (rollout_len <= 0) throw std::invalid_argument("collect_rollout: rollout_len must be positive");
  TransitionBatch b;
  const auto n = static_cast<std::size_t>(rollout_len);
  b.states.reserve(n);
  b.actions.reserve(n);
  b.next_states.reserve(n);
  b.rewards.reserve(n);
  b.dones.reserve(n);
  b.truncated.reserve(n);
  b.base_log_probs.reserve(n);

  Vector obs = env.observation();
  for (std::size_t i = 0; i < n; ++i) {
    const ActionSample a = sample(forward(baseline.policy(), obs), rng);
    Transition tr = env.step(a.action);
    b.states.push_back(std::move(tr.state));
    b.actions.push_back(std::move(tr.action));
    b.next_states.push_back(tr.next_state);
    b.rewards.push_back(tr.reward);
    b.dones.push_back(tr.done ? 1 : 0);
    b.truncated.push_back(tr.truncated ? 1 : 0);
    b.base_log_probs.push_back(a.log_prob);
    if (tr.done || tr.truncated) {
      if (finished_returns) finished_returns->push_back(env.episode_return());
      obs = env.reset();
    } else {
      obs = std::move(tr.next_state);
    }
  }
  return b;
}

SurrogateGradient surrogate_gradient(const GaussianPolicy& policy, const TransitionBatch& batch,
                                     std::span<const std::size_t> indices, const SurrogateSpec& spec,
                                     double entropy_gain, double max_ratio) {
  if (batch.advantages.size() != batch.size()) throw std::invalid_argument("surrogate_gradient: advantages not populated");
  SurrogateGradient out;
  out.grad = Vector::Zero(static_cast<Eigen::Index>(policy.param_count()));
  if (indices.empty()) return out;
  const double inv_m = 1.0 / static_cast<double>(indices.size());
  for (std::size_t idx : indices) {
    const PolicyPass pass = policy_forward(policy, batch.states[idx], batch.actions[idx]);
    const DensityRatio rho = density_ratio(pass.terms.log_prob, batch.base_log_probs[idx], max_ratio);
    const SurrogateEval ev = evaluate(rho.value, batch.advantages[idx], spec);
    // d loss / d theta = d loss / d rho * rho * grad ln pi
    policy_backward(policy, pass, ev.dloss_drho * rho.value * inv_m, -entropy_gain * inv_m, out.grad);
    out.loss += ev.loss_term;
    out.ratio += rho.value;
    out.regularization_amount += ev.regularization_amount;
    out.entropy += pass.terms.entropy;
    out.clamped += rho.clamped ? 1 : 0;
  }
  return out;
}

UpdateStats policy_update(GaussianPolicy& policy, const TransitionBatch& batch, const SurrogateSpec& spec,
                          AdamState& optimizer, const UpdateOptions& opts, Rng& rng) {
  batch.validate();
  validate(spec);
  if (batch.advantages.size() != batch.size()) throw std::invalid_argument("policy_update: advantages not populated");
  UpdateStats st;
  if (batch.size() == 0) return st;
  Vector theta = policy.flat_params();
  double samples = 0.0;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    for (const auto& mb : shuffled_minibatches(batch.size(), opts.minibatch_size, rng)) {
      SurrogateGradient g = surrogate_gradient(policy, batch, mb, spec, opts.entropy_gain, opts.max_ratio);
      st.surrogate_loss += g.loss;
      st.mean_ratio += g.ratio;
      st.mean_regularization_amount += g.regularization_amount;
      st.entropy += g.entropy;
      st.clamped_ratios += g.clamped;
      samples += static_cast<double>(mb.size());

      const double norm = g.grad.norm();
      if (!std::isfinite(norm)) {
        ++st.skipped_updates;
        continue;
      }
      st.grad_norm += norm;
      ++st.updates;
      if (opts.grad_clip > 0.0 && norm > opts.grad_clip) g.grad *= opts.grad_clip / norm;
      adaptive_sgd_step(optimizer, theta, g.grad, opts.learning_rate);
      policy.set_flat_params(theta);
    }
  }
  if (samples > 0.0) {
    st.surrogate_loss /= samples;
    st.mean_ratio /= samples;
    st.mean_regularization_amount /= samples;
    st.entropy /= samples;
  }
  if (st.updates > 0) st.grad_norm /= static_cast<double>(st.updates);
  return st;
}

ValueUpdateStats value_update(ValueParams& vparams, ValueParams& target, const TransitionBatch& batch,
                              AdamState& optimizer, double lr, int epochs, int minibatch_size,
                              double polyak_tau, Rng& rng) {
  if (batch.value_targets.size() != batch.size()) throw std::invalid_argument("value_update: targets not populated");
  ValueUpdateStats st;
  std::vector<Vector> states;
  std::vector<double> targets;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (const auto& mb : shuffled_minibatches(batch.size(), minibatch_size, rng)) {
      states.clear();
      targets.clear();
      for (std::size_t i : mb) {
        states.push_back(batch.states[i]);
        targets.push_back(batch.value_targets[i]);
      }
      const ValueLossGrad lg = value_loss_grad(vparams, states, targets);
      if (!lg.grad.allFinite()) continue;
      adaptive_sgd_step(optimizer, vparams.values, lg.grad, lr);
      soft_update(target, vparams, polyak_tau);
      st.loss += lg.loss;
      ++st.updates;
    }
  }
  if (st.updates > 0) st.loss /= static_cast<double>(st.updates);
  return st;
}

TrainResult train(const TrainerConfig& config, const MetricsCallback& on_metrics) {
  config.validate();
  Rng init_rng = derived_rng(config.seed, 0);
  Rng sample_rng = derived_rng(config.seed, 1);
  Rng shuffle_rng = derived_rng(config.seed, 2);

  TrainResult res;
  res.policy = GaussianPolicy::init(config.policy_config(), init_rng);
  res.value = make_value_params(config.env.state_dim, config.hidden, config.activation, init_rng);
  res.target_value = res.value;

  AdamState policy_opt = AdamState::for_size(static_cast<Eigen::Index>(res.policy.param_count()));
  AdamState value_opt = AdamState::for_size(res.value.values.size());
  Env env(config.env, config.seed);

  UpdateOptions opts;
  opts.learning_rate = config.learning_rate;
  opts.epochs = config.epochs_per_rollout;
  opts.entropy_gain = config.entropy_gain;
  opts.grad_clip = config.grad_clip;
  opts.max_ratio = config.max_ratio;

  const std::uint64_t eval_seed = config.seed + 1000003ULL;
  long long steps = 0;
  long long skipped = 0;
  long long next_eval = config.eval_every;
  double last_return = 0.0;
  bool have_return = false;

  while (steps < config.total_steps) {
    const int len = static_cast<int>(std::min<long long>(config.rollout_len, config.total_steps - steps));
    const PolicySnapshot baseline = snapshot(res.policy);
    std::vector<double> finished;
    TransitionBatch batch = collect_rollout(baseline, env, len, sample_rng, &finished);
    steps += len;

    batch.advantages = advantage_estimates(batch, res.value, res.target_value, config.gae);
    batch.value_targets.resize(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      batch.value_targets[i] = batch.advantages[i] + value_of(res.value, batch.states[i]);
    }
    if (config.normalize_advantages) normalize_advantages(batch.advantages);

    opts.minibatch_size = std::min(config.minibatch_size, len);
    const UpdateStats ps = policy_update(res.policy, batch, config.surrogate, policy_opt, opts, shuffle_rng);
    const ValueUpdateStats vs = value_update(res.value, res.target_value, batch, value_opt,
                                             config.value_learning_rate, config.epochs_per_rollout,
                                             opts.minibatch_size, config.gae.polyak_tau, shuffle_rng);
    skipped += ps.skipped_updates;

    if (!finished.empty()) {
      last_return = std::accumulate(finished.begin(), finished.end(), 0.0) / static_cast<double>(finished.size());
      have_return = true;
    }
    StepMetrics m;
    m.step = steps;
    m.episode_return = have_return ? last_return : env.episode_return();
    m.surrogate_loss = ps.surrogate_loss;
    m.value_loss = vs.loss;
    m.mean_ratio = ps.mean_ratio;
    m.mean_regularization_amount = ps.mean_regularization_amount;
    m.entropy = ps.entropy;
    m.grad_norm = ps.grad_norm;
    m.skipped_updates = skipped;
    res.metrics.push_back(m);
    if (on_metrics) on_metrics(m);

    if (config.eval_every > 0 && steps >= next_eval) {
      res.evals.push_back({steps, evaluate_policy(config.env, res.policy, config.eval_episodes, eval_seed)});
      while (next_eval <= steps) next_eval += config.eval_every;
    }
  }
  return res;
}

}  // namespace psurr

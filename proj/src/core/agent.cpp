#include "core/agent.hpp"

#include <cmath>
#include <ostream>

#include "core/errors.hpp"
#include "core/eval.hpp"
#include "core/text.hpp"

namespace rq::agent {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay buffer capacity must be >= 1");
}

void ReplayBuffer::push(const Transition& t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(t);
  } else {
    storage_[write_] = t;
  }
  write_ = (write_ + 1) % capacity_;
}

std::vector<std::uint32_t> ReplayBuffer::sample_indices(int count, Rng& rng) const {
  if (storage_.empty()) throw UsageError("cannot sample from an empty replay buffer");
  std::vector<std::uint32_t> idx(static_cast<size_t>(count));
  for (auto& i : idx) i = static_cast<std::uint32_t>(rng.below(storage_.size()));
  return idx;
}

std::vector<Transition> buffer_sample(const ReplayBuffer& buf, int count, Rng& rng) {
  const auto idx = buf.sample_indices(count, rng);
  std::vector<Transition> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(buf[i]);
  return out;
}

Vec4 ou_sample(OuNoise& noise, double dt, Rng& rng) {
  const double sdt = std::sqrt(dt);
  for (int i = 0; i < 4; ++i)
    noise.value[i] += noise.theta * (0.0 - noise.value[i]) * dt +
                      noise.sigma * sdt * rng.normal();
  return noise.value;
}

Vec4 mixed_action(std::span<const double> obs, const nn::Mlp& actor,
                  const nn::Mlp* adversary, double alpha, Rng& rng) {
  const bool pick_adversary = rng.bernoulli(alpha);
  if (pick_adversary && !adversary)
    throw ConfigError("mixed_action: adversary selected but not provided");
  const nn::Mlp& net = pick_adversary ? *adversary : actor;
  const auto out = nn::mlp_forward(net, obs);
  return {out[0], out[1], out[2], out[3]};
}

Batch assemble_batch(const ReplayBuffer& buf, const std::vector<std::uint32_t>& idx) {
  const int b = static_cast<int>(idx.size());
  Batch batch;
  batch.states = nn::Matrix(b, env::kObsDim);
  batch.actions = nn::Matrix(b, env::kActionDim);
  batch.next_states = nn::Matrix(b, env::kObsDim);
  batch.rewards.resize(static_cast<size_t>(b));
  batch.done.resize(static_cast<size_t>(b));
  for (int i = 0; i < b; ++i) {
    const Transition& t = buf[idx[static_cast<size_t>(i)]];
    for (int k = 0; k < env::kObsDim; ++k) {
      batch.states(i, k) = t.s[static_cast<size_t>(k)];
      batch.next_states(i, k) = t.s_next[static_cast<size_t>(k)];
    }
    for (int k = 0; k < env::kActionDim; ++k) batch.actions(i, k) = t.a[static_cast<size_t>(k)];
    batch.rewards[static_cast<size_t>(i)] = t.r;
    batch.done[static_cast<size_t>(i)] = t.done ? 1 : 0;
  }
  return batch;
}

namespace {

nn::Matrix concat_cols(const nn::Matrix& a, const nn::Matrix& b) {
  nn::Matrix out(a.rows, a.cols + b.cols);
  for (int i = 0; i < a.rows; ++i) {
    double* r = out.row(i);
    const double* ra = a.row(i);
    const double* rb = b.row(i);
    for (int j = 0; j < a.cols; ++j) r[j] = ra[j];
    for (int j = 0; j < b.cols; ++j) r[a.cols + j] = rb[j];
  }
  return out;
}

}  // namespace

std::vector<double> critic_target(const Batch& batch, const nn::Mlp& actor_target,
                                  const nn::Mlp* adversary_target,
                                  const nn::Mlp& critic_target_net, double alpha,
                                  double gamma) {
  const int b = batch.size();
  const nn::Matrix actor_actions = mlp_forward_batch(actor_target, batch.next_states);
  const nn::Matrix q_actor =
      mlp_forward_batch(critic_target_net, concat_cols(batch.next_states, actor_actions));

  const bool mix = alpha != 0.0 && adversary_target != nullptr;
  nn::Matrix q_adv;
  if (mix) {
    const nn::Matrix adv_actions = mlp_forward_batch(*adversary_target, batch.next_states);
    q_adv = mlp_forward_batch(critic_target_net, concat_cols(batch.next_states, adv_actions));
  }

  std::vector<double> y(static_cast<size_t>(b));
  for (int i = 0; i < b; ++i) {
    if (batch.done[static_cast<size_t>(i)]) {
      y[static_cast<size_t>(i)] = batch.rewards[static_cast<size_t>(i)];
    } else if (mix) {
      y[static_cast<size_t>(i)] =
          batch.rewards[static_cast<size_t>(i)] +
          gamma * ((1.0 - alpha) * q_actor(i, 0) + alpha * q_adv(i, 0));
    } else {
      y[static_cast<size_t>(i)] =
          batch.rewards[static_cast<size_t>(i)] + gamma * q_actor(i, 0);
    }
  }
  return y;
}

double critic_update(nn::Mlp& critic, const Batch& batch,
                     const std::vector<double>& targets, double lr,
                     nn::AdamState& adam) {
  const int b = batch.size();
  if (static_cast<int>(targets.size()) != b)
    throw ConfigError("critic_update: batch and target sizes differ");
  nn::BatchCache cache;
  const nn::Matrix inputs = concat_cols(batch.states, batch.actions);
  const nn::Matrix q = mlp_forward_batch(critic, inputs, &cache);

  double loss = 0.0;
  nn::Matrix dq(b, 1);
  for (int i = 0; i < b; ++i) {
    const double diff = q(i, 0) - targets[static_cast<size_t>(i)];
    loss += diff * diff;
    dq(i, 0) = 2.0 * diff / b;
  }
  loss /= b;
  if (!std::isfinite(loss)) throw DivergenceError("critic loss is not finite");

  nn::MlpGrads grads = nn::MlpGrads::zeros_like(critic);
  mlp_backward_batch(critic, cache, dq, &grads);
  adam_step(critic, grads, adam, lr);
  return loss;
}

void CriticQ::eval(const nn::Matrix& states, const nn::Matrix& actions,
                   std::vector<double>& q, nn::Matrix& dq_da) const {
  nn::BatchCache cache;
  const nn::Matrix inputs = concat_cols(states, actions);
  const nn::Matrix out = mlp_forward_batch(*critic_, inputs, &cache);
  const int b = states.rows;
  q.resize(static_cast<size_t>(b));
  for (int i = 0; i < b; ++i) q[static_cast<size_t>(i)] = out(i, 0);

  nn::Matrix ones(b, 1);
  ones.fill(1.0);
  // Critic parameters stay untouched; only the input gradient is needed.
  const nn::Matrix dinputs = mlp_backward_batch(*critic_, cache, ones, nullptr);
  dq_da = nn::Matrix(b, actions.cols);
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < actions.cols; ++j) dq_da(i, j) = dinputs(i, states.cols + j);
}

namespace {

nn::MlpGrads policy_gradient(const nn::Mlp& policy, const QFunction& q,
                             const nn::Matrix& states, double dq_scale,
                             double* mean_q) {
  nn::BatchCache cache;
  const nn::Matrix actions = mlp_forward_batch(policy, states, &cache);
  std::vector<double> qv;
  nn::Matrix dq_da;
  q.eval(states, actions, qv, dq_da);
  double sum = 0.0;
  for (double v : qv) sum += v;
  if (mean_q) *mean_q = sum / states.rows;

  nn::Matrix dactions = dq_da;
  for (double& v : dactions.a) v *= dq_scale;
  nn::MlpGrads grads = nn::MlpGrads::zeros_like(policy);
  mlp_backward_batch(policy, cache, dactions, &grads);
  return grads;
}

}  // namespace

nn::MlpGrads actor_gradient(const nn::Mlp& actor, const QFunction& q,
                            const nn::Matrix& states, double alpha,
                            double* mean_q) {
  // Ascent on (1-alpha) * mean Q, expressed as descent on its negation.
  return policy_gradient(actor, q, states, -(1.0 - alpha) / states.rows, mean_q);
}

nn::MlpGrads adversary_gradient(const nn::Mlp& adversary, const QFunction& q,
                                const nn::Matrix& states, double alpha,
                                double* mean_q) {
  return policy_gradient(adversary, q, states, alpha / states.rows, mean_q);
}

double actor_update(nn::Mlp& actor, const nn::Mlp& critic, const nn::Matrix& states,
                    double alpha, double lr, nn::AdamState& adam) {
  const CriticQ q(critic);
  double mean_q = 0.0;
  nn::MlpGrads grads = actor_gradient(actor, q, states, alpha, &mean_q);
  adam_step(actor, grads, adam, lr);
  return (1.0 - alpha) * mean_q;
}

double adversary_update(nn::Mlp& adversary, const nn::Mlp& critic,
                        const nn::Matrix& states, double alpha, double lr,
                        nn::AdamState& adam) {
  const CriticQ q(critic);
  double mean_q = 0.0;
  nn::MlpGrads grads = adversary_gradient(adversary, q, states, alpha, &mean_q);
  adam_step(adversary, grads, adam, lr);
  return alpha * mean_q;
}

namespace {

void validate(const TrainSetup& setup) {
  const Hyperparams& hp = setup.hp;
  if (hp.gamma < 0.0 || hp.gamma >= 1.0)
    throw ConfigError("hp.gamma must be in [0, 1)");
  if (hp.alpha < 0.0 || hp.alpha > 1.0)
    throw ConfigError("hp.alpha must be in [0, 1]");
  if (hp.tau <= 0.0 || hp.tau > 1.0) throw ConfigError("hp.tau must be in (0, 1]");
  if (hp.batch_size < 1) throw ConfigError("hp.batch_size must be >= 1");
  if (hp.policy_steps < 1) throw ConfigError("hp.policy_steps must be >= 1");
  if (hp.babble_episodes < 0) throw ConfigError("hp.babble_episodes must be >= 0");
  if (hp.total_iterations < 1) throw ConfigError("hp.total_iterations must be >= 1");
  for (int h : setup.hidden)
    if (h < 1) throw ConfigError("nn.hidden widths must be >= 1");
}

struct EpisodeAccum {
  double critic_loss = 0.0;
  double actor_obj = 0.0;
  double adversary_obj = 0.0;
  int critic_updates = 0;
  int actor_updates = 0;
  int adversary_updates = 0;

  void clear() { *this = EpisodeAccum{}; }
};

void write_train_row(std::ostream* os, std::uint64_t step, std::uint64_t episode,
                     double ep_return, const EpisodeAccum& acc) {
  if (!os) return;
  const double closs = acc.critic_updates ? acc.critic_loss / acc.critic_updates : 0.0;
  const double aobj = acc.actor_updates ? acc.actor_obj / acc.actor_updates : 0.0;
  const double vobj =
      acc.adversary_updates ? acc.adversary_obj / acc.adversary_updates : 0.0;
  *os << step << "," << episode << "," << format_double(ep_return) << ","
      << format_double(closs) << "," << format_double(aobj) << ","
      << format_double(vobj) << "\n";
}

}  // namespace

TrainResult train(const TrainSetup& setup, const TrainSinks& sinks) {
  validate(setup);
  const Hyperparams& hp = setup.hp;
  const env::World& world = setup.world;
  const double alpha = setup.use_adversary ? hp.alpha : 0.0;

  std::vector<int> actor_dims = {env::kObsDim};
  std::vector<int> critic_dims = {env::kObsDim + env::kActionDim};
  for (int h : setup.hidden) {
    actor_dims.push_back(h);
    critic_dims.push_back(h);
  }
  actor_dims.push_back(env::kActionDim);
  critic_dims.push_back(1);

  // Independent streams per consumer: dropping the adversary must not shift
  // any other stream, so DDPG and AR-DDPG with alpha=0 walk identical paths.
  Rng rng_actor_init = Rng::derive(hp.seed, {stream::kActorInit});
  Rng rng_adversary_init = Rng::derive(hp.seed, {stream::kAdversaryInit});
  Rng rng_critic_init = Rng::derive(hp.seed, {stream::kCriticInit});
  Rng rng_env = Rng::derive(hp.seed, {stream::kTrainEnv});
  Rng rng_explore = Rng::derive(hp.seed, {stream::kExplore});
  Rng rng_sample = Rng::derive(hp.seed, {stream::kReplaySample});

  nn::Mlp actor = nn::mlp_init(actor_dims, nn::Activation::Tanh,
                               nn::Activation::Tanh, rng_actor_init, 1e-3);
  nn::Mlp adversary;
  if (setup.use_adversary)
    adversary = nn::mlp_init(actor_dims, nn::Activation::Tanh,
                             nn::Activation::Tanh, rng_adversary_init, 1e-3);
  nn::Mlp critic = nn::mlp_init(critic_dims, nn::Activation::Tanh,
                                nn::Activation::Linear, rng_critic_init);
  nn::Mlp actor_t = actor;
  nn::Mlp adversary_t = adversary;
  nn::Mlp critic_t = critic;
  const nn::Mlp* adversary_t_ptr = setup.use_adversary ? &adversary_t : nullptr;

  nn::AdamState adam_actor =
      nn::AdamState::zeros_like(actor, hp.adam_beta1, hp.adam_beta2, hp.adam_eps);
  nn::AdamState adam_adversary =
      setup.use_adversary
          ? nn::AdamState::zeros_like(adversary, hp.adam_beta1, hp.adam_beta2, hp.adam_eps)
          : nn::AdamState{};
  nn::AdamState adam_critic =
      nn::AdamState::zeros_like(critic, hp.adam_beta1, hp.adam_beta2, hp.adam_eps);

  ReplayBuffer buffer(hp.buffer_capacity);
  env::Episode episode(world);
  const env::PerturbConfig nominal{1.0, 0.0};

  if (sinks.train_log)
    *sinks.train_log << "step,episode,return,critic_loss,actor_objective,adversary_objective\n";
  if (sinks.eval_log) *sinks.eval_log << "step,episode,return\n";

  TrainResult result;
  std::uint64_t env_steps = 0;
  std::uint64_t train_steps = 0;
  std::uint64_t episodes = 0;
  double babble_return_sum = 0.0;

  auto notify = [&](double last_return, double eval_return, bool has_eval) {
    if (!sinks.progress) return;
    TrainProgress p;
    p.step = train_steps;
    p.total_steps = hp.total_iterations;
    p.episode = episodes;
    p.last_episode_return = last_return;
    p.last_eval_return = eval_return;
    p.has_eval = has_eval;
    sinks.progress(p);
  };

  // Babbling: uniform random actions seed the replay buffer before any
  // gradient step. No exploration noise on top, no updates.
  for (int e = 0; e < hp.babble_episodes; ++e) {
    episode.reset(rng_env);
    while (!episode.done()) {
      Vec4 a;
      for (auto& v : a) v = rng_explore.uniform(-1.0, 1.0);
      Transition t;
      t.s = episode.observation().v;
      const env::StepResult res = episode.step(a, nominal, rng_env);
      t.a = a;
      t.s_next = res.obs.v;
      t.r = res.reward;
      t.done = res.done;
      buffer.push(t);
      ++env_steps;
    }
    babble_return_sum += episode.undiscounted_return();
    write_train_row(sinks.train_log, env_steps, episodes, episode.undiscounted_return(),
                    EpisodeAccum{});
    ++episodes;
  }
  result.babble_mean_return =
      hp.babble_episodes > 0 ? babble_return_sum / hp.babble_episodes : 0.0;

  OuNoise ou;
  ou.theta = hp.ou_theta;
  ou.sigma = hp.ou_sigma;

  double last_eval_mean = 0.0;
  bool has_eval = false;

  auto eval_point = [&]() {
    if (!sinks.eval_log && !sinks.progress) return;
    double sum = 0.0;
    for (int j = 0; j < hp.eval_episodes; ++j) {
      Rng rng = Rng::derive(hp.seed, {stream::kTrainEval, train_steps,
                                      static_cast<std::uint64_t>(j)});
      const double ret = eval::episode_return(actor, nominal, world, rng);
      sum += ret;
      if (sinks.eval_log)
        *sinks.eval_log << train_steps << "," << j << "," << format_double(ret) << "\n";
    }
    if (hp.eval_episodes > 0) {
      last_eval_mean = sum / hp.eval_episodes;
      has_eval = true;
    }
  };

  EpisodeAccum acc;
  while (train_steps < hp.total_iterations) {
    episode.reset(rng_env);
    ou.reset();
    acc.clear();
    while (!episode.done() && train_steps < hp.total_iterations) {
      // Linear noise anneal across the training budget.
      const double frac = static_cast<double>(train_steps) /
                          static_cast<double>(hp.total_iterations);
      ou.sigma = hp.ou_sigma + (hp.ou_sigma_final - hp.ou_sigma) * frac;

      Transition t;
      t.s = episode.observation().v;
      const Vec4 chosen =
          mixed_action(episode.observation().v, actor,
                       setup.use_adversary ? &adversary : nullptr, alpha, rng_explore);
      const Vec4 noise = ou_sample(ou, world.params.dt, rng_explore);
      Vec4 executed;
      for (int i = 0; i < 4; ++i) executed[i] = clamp(chosen[i] + noise[i], -1.0, 1.0);

      const env::StepResult res = episode.step(executed, nominal, rng_env);
      t.a = executed;
      t.s_next = res.obs.v;
      t.r = res.reward;
      t.done = res.done;
      buffer.push(t);
      ++env_steps;

      for (int i = 0; i < hp.policy_steps; ++i) {
        const Batch batch =
            assemble_batch(buffer, buffer.sample_indices(hp.batch_size, rng_sample));
        acc.actor_obj +=
            actor_update(actor, critic, batch.states, alpha, hp.lr_actor, adam_actor);
        ++acc.actor_updates;
        const std::vector<double> y =
            critic_target(batch, actor_t, adversary_t_ptr, critic_t, alpha, hp.gamma);
        acc.critic_loss += critic_update(critic, batch, y, hp.lr_critic, adam_critic);
        ++acc.critic_updates;
      }

      const Batch batch2 =
          assemble_batch(buffer, buffer.sample_indices(hp.batch_size, rng_sample));
      if (setup.use_adversary && alpha != 0.0) {
        acc.adversary_obj += adversary_update(adversary, critic, batch2.states, alpha,
                                              hp.lr_actor, adam_adversary);
        ++acc.adversary_updates;
      }
      if (hp.second_critic_update) {
        const std::vector<double> y2 =
            critic_target(batch2, actor_t, adversary_t_ptr, critic_t, alpha, hp.gamma);
        acc.critic_loss += critic_update(critic, batch2, y2, hp.lr_critic, adam_critic);
        ++acc.critic_updates;
      }

      soft_update(actor_t, actor, hp.tau);
      if (setup.use_adversary) soft_update(adversary_t, adversary, hp.tau);
      soft_update(critic_t, critic, hp.tau);
      ++train_steps;

      if (hp.eval_interval > 0 && train_steps % static_cast<std::uint64_t>(hp.eval_interval) == 0) {
        eval_point();
        notify(episode.undiscounted_return(), last_eval_mean, has_eval);
      }
      if (train_steps % 4096 == 0) {
        if (!actor.finite() || !critic.finite() ||
            (setup.use_adversary && !adversary.finite()))
          throw DivergenceError("network parameters diverged at step " +
                                std::to_string(train_steps));
      }
    }
    write_train_row(sinks.train_log, env_steps, episodes, episode.undiscounted_return(), acc);
    ++episodes;
    notify(episode.undiscounted_return(), last_eval_mean, has_eval);
  }

  if (!actor.finite() || !critic.finite() ||
      (setup.use_adversary && !adversary.finite()))
    throw DivergenceError("network parameters diverged");

  result.checkpoint.nets.push_back({nn::Role::Actor, std::move(actor)});
  if (setup.use_adversary)
    result.checkpoint.nets.push_back({nn::Role::Adversary, std::move(adversary)});
  result.checkpoint.nets.push_back({nn::Role::Critic, std::move(critic)});
  result.checkpoint.nets.push_back({nn::Role::ActorTarget, std::move(actor_t)});
  if (setup.use_adversary)
    result.checkpoint.nets.push_back({nn::Role::AdversaryTarget, std::move(adversary_t)});
  result.checkpoint.nets.push_back({nn::Role::CriticTarget, std::move(critic_t)});
  result.env_steps = env_steps;
  result.train_steps = train_steps;
  result.episodes = episodes;
  result.counters = episode.counters();
  return result;
}

}  // namespace rq::agent

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/env.hpp"
#include "core/nn.hpp"
#include "core/rng.hpp"

namespace rq::agent {

struct Transition {
  std::array<double, env::kObsDim> s;
  Vec4 a;  // executed action, clamped to [-1,1]^4
  std::array<double, env::kObsDim> s_next;
  double r = 0.0;
  bool done = false;
};

// Fixed-capacity ring. Grows lazily up to capacity, then overwrites the
// oldest entries in insertion order.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  const Transition& operator[](std::size_t i) const { return storage_[i]; }
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }

  // count independent uniform-with-replacement draws. Throws UsageError on
  // an empty buffer.
  std::vector<std::uint32_t> sample_indices(int count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t write_ = 0;
  std::vector<Transition> storage_;
};

std::vector<Transition> buffer_sample(const ReplayBuffer& buf, int count, Rng& rng);

// Mean-reverting exploration noise, one value per action component.
struct OuNoise {
  double theta = 0.15;
  double sigma = 0.2;
  Vec4 value{};

  void reset() { value = {}; }
};

// value += theta * (0 - value) * dt + sigma * sqrt(dt) * N(0, I); returns
// the updated value. Consumes exactly four normal draws.
Vec4 ou_sample(OuNoise& noise, double dt, Rng& rng);

struct Hyperparams {
  std::uint64_t total_iterations = 2'000'000;  // environment steps after babbling
  double lr_actor = 2e-5;   // shared by actor and adversary
  double lr_critic = 2e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double gamma = 0.95;
  int batch_size = 64;
  double alpha = 0.1;       // adversary action probability
  std::size_t buffer_capacity = 800'000;
  int policy_steps = 20;    // inner update iterations per environment step
  double tau = 0.005;
  int babble_episodes = 500;
  double ou_theta = 0.15;
  double ou_sigma = 0.2;
  double ou_sigma_final = 0.05;  // linear anneal target over total_iterations
  bool second_critic_update = true;  // extra critic update in the adversary phase
  int eval_interval = 5000;  // environment steps between evaluation points
  int eval_episodes = 5;
  std::uint64_t seed = 1;
};

// Actor action with probability (1 - alpha), adversary action otherwise.
// Draws one Bernoulli per call; only the selected network is evaluated, so
// a null adversary is fine whenever alpha == 0.
Vec4 mixed_action(std::span<const double> obs, const nn::Mlp& actor,
                  const nn::Mlp* adversary, double alpha, Rng& rng);

struct Batch {
  nn::Matrix states;       // B x 18
  nn::Matrix actions;      // B x 4
  nn::Matrix next_states;  // B x 18
  std::vector<double> rewards;
  std::vector<std::uint8_t> done;

  int size() const { return states.rows; }
};

Batch assemble_batch(const ReplayBuffer& buf, const std::vector<std::uint32_t>& idx);

// Bootstrapped targets, evaluated with target networks only:
//   q_mix = (1-alpha) * Q(s', actor_t(s')) + alpha * Q(s', adversary_t(s'))
//   y = r                     when done
//   y = r + gamma * q_mix     otherwise
// With alpha == 0 (or a null adversary) the adversary path is skipped and
// the result is the plain DDPG target.
std::vector<double> critic_target(const Batch& batch, const nn::Mlp& actor_target,
                                  const nn::Mlp* adversary_target,
                                  const nn::Mlp& critic_target_net, double alpha,
                                  double gamma);

// One Adam step on the mean squared error between Q(s,a) and y. Returns the
// pre-update loss.
double critic_update(nn::Mlp& critic, const Batch& batch,
                     const std::vector<double>& targets, double lr,
                     nn::AdamState& adam);

// Differentiable action-value used by the policy updates. The production
// implementation wraps the critic network; tests may substitute analytic
// surrogates.
class QFunction {
 public:
  virtual ~QFunction() = default;
  // Fills q (batch) and dq_da (B x action_dim), the gradient of each q with
  // respect to its action.
  virtual void eval(const nn::Matrix& states, const nn::Matrix& actions,
                    std::vector<double>& q, nn::Matrix& dq_da) const = 0;
};

class CriticQ : public QFunction {
 public:
  explicit CriticQ(const nn::Mlp& critic) : critic_(&critic) {}
  void eval(const nn::Matrix& states, const nn::Matrix& actions,
            std::vector<double>& q, nn::Matrix& dq_da) const override;

 private:
  const nn::Mlp* critic_;
};

// Gradient of the batch objective for gradient ASCENT on
// (1/B) * (1-alpha) * sum Q(s, actor(s)), returned as the gradient of its
// negation (the minimization direction Adam expects). mean_q receives the
// mean action value under the current actor.
nn::MlpGrads actor_gradient(const nn::Mlp& actor, const QFunction& q,
                            const nn::Matrix& states, double alpha,
                            double* mean_q = nullptr);

// Gradient for gradient DESCENT on (1/B) * alpha * sum Q(s, adversary(s)).
nn::MlpGrads adversary_gradient(const nn::Mlp& adversary, const QFunction& q,
                                const nn::Matrix& states, double alpha,
                                double* mean_q = nullptr);

// Apply one Adam step along the gradients above. Return the objective value
// ((1-alpha) * mean Q for the actor, alpha * mean Q for the adversary).
double actor_update(nn::Mlp& actor, const nn::Mlp& critic, const nn::Matrix& states,
                    double alpha, double lr, nn::AdamState& adam);
double adversary_update(nn::Mlp& adversary, const nn::Mlp& critic,
                        const nn::Matrix& states, double alpha, double lr,
                        nn::AdamState& adam);

struct TrainSetup {
  env::World world;
  Hyperparams hp;
  std::vector<int> hidden = {64, 64};
  bool use_adversary = true;  // false trains plain DDPG (alpha forced to 0)
};

struct TrainProgress {
  std::uint64_t step = 0;
  std::uint64_t total_steps = 0;
  std::uint64_t episode = 0;
  double last_episode_return = 0.0;
  double last_eval_return = 0.0;
  bool has_eval = false;
};

struct TrainSinks {
  std::ostream* train_log = nullptr;  // header: step,episode,return,critic_loss,actor_objective,adversary_objective
  std::ostream* eval_log = nullptr;   // header: step,episode,return
  std::function<void(const TrainProgress&)> progress;
};

struct TrainResult {
  nn::Checkpoint checkpoint;
  std::uint64_t env_steps = 0;       // including babbling
  std::uint64_t train_steps = 0;     // gradient-bearing steps
  std::uint64_t episodes = 0;
  double babble_mean_return = 0.0;
  env::EnvCounters counters;
};

// Runs warm-up babbling followed by the full training loop and returns the
// final networks. Fully deterministic for a fixed setup. Throws
// DivergenceError when parameters or losses stop being finite.
TrainResult train(const TrainSetup& setup, const TrainSinks& sinks);

}  // namespace rq::agent

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oran/allocation.hpp"
#include "oran/nn.hpp"
#include "oran/power_grid.hpp"

namespace oran {

struct RewardWeights {
  double theta_r = 1.0;      // weight on the objective, > 0
  double theta_const = -1.0; // per-violation penalty, <= 0
  double theta_bias = 0.0;
};

// theta_r * weighted objective + theta_const * violation count + theta_bias.
double reward(double weighted_objective, size_t violation_count,
              const RewardWeights& w);

// One grant decision: UE u gets PRB m of RU b at power level `level`
// (level 0 clears the slot).
struct ActionSpec {
  int u = 0, b = 0, m = 0, level = 0;
};

struct EnvStepResult {
  double reward = 0.0;
  bool done = false;
};

// Deterministic environment over one channel draw. Episodes build an
// allocation one grant per step; action masking keeps the structural
// constraints and the RU power/fronthaul caps satisfied at every step, so
// only rate/delay requirements can be unmet mid-episode.
class DqnEnv {
 public:
  DqnEnv(const NetworkConfig& cfg, const ChannelTensor& h, const PowerGrid& grid,
         const RewardWeights& rw, int horizon);

  void reset();

  int action_count() const { return U_ * B_ * M_ * P_; }
  // State vector encoding (documented, fixed length 2U): per-UE rate
  // satisfaction bit, then per-UE last power level index / (P-1).
  int state_dim() const { return 2 * U_; }

  ActionSpec decode(int idx) const;
  int encode(const ActionSpec& a) const;

  std::vector<uint8_t> legal_mask() const;
  bool legal(const ActionSpec& a) const;

  // Throws ConfigError on an unmasked-illegal action (caller bug).
  EnvStepResult step(int action_idx);

  std::vector<double> state_vec() const;
  const Allocation& allocation() const { return alloc_; }
  double current_objective() const { return last_objective_; }
  size_t current_violations() const { return last_violations_; }
  int steps_taken() const { return step_count_; }
  int horizon() const { return horizon_; }

 private:
  void refresh_metrics();
  double slot_power_contribution(int b) const;

  const NetworkConfig& cfg_;
  const ChannelTensor& h_;
  const PowerGrid& grid_;
  RewardWeights rw_;
  int U_, B_, M_, S_, P_;
  int horizon_;
  double fh_cap_w_;

  Allocation alloc_;
  std::vector<int> assoc_;
  std::vector<int> grants_per_ue_;
  std::vector<int> level_idx_;
  std::vector<uint8_t> satisfied_;
  int step_count_ = 0;
  double last_objective_ = 0.0;
  size_t last_violations_ = 0;
};

// Masked epsilon-greedy: argmax over legal Q-values with probability 1-eps
// (ties to the lowest index), uniform over legal actions otherwise. Throws
// ConfigError when everything is masked.
int epsilon_greedy(const DenseNet& qnet, const std::vector<double>& state, double eps,
                   const std::vector<uint8_t>& mask, Rng& rng);

struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

// FIFO ring buffer.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}
  void push(Transition t);
  size_t size() const { return buf_.size(); }
  const Transition& sample(Rng& rng) const;

 private:
  size_t capacity_;
  size_t next_ = 0;
  std::vector<Transition> buf_;
};

struct DqnHyper {
  int episodes = 250;
  int steps_per_episode = 50;
  double gamma = 0.9;
  double eps_start = 1.0;
  double eps_final = 0.1;
  double eps_decay = 0.9995;  // per step
  int replay_capacity = 400;
  int batch_size = 32;
  int target_sync_every = 100;  // steps; the paper leaves this open
  double lr = 1e-3;
  double adam_beta1 = 0.99;
  double adam_beta2 = 0.99;
  std::vector<int> hidden{64, 64};
  double huber_delta = 1.0;
  RewardWeights reward_weights;
  uint64_t seed = 1;

  void apply_override(const std::string& key, const std::string& value);
};

struct EpisodeStats {
  int episode = 0;
  double total_reward = 0.0;
  double eps_end = 0.0;
  double mean_loss = 0.0;
};

struct DqnTrainResult {
  DenseNet qnet;
  std::vector<EpisodeStats> history;
  long long env_steps = 0;
  long long optimizer_steps = 0;
};

DqnTrainResult train_dqn(const NetworkConfig& cfg, const ChannelTensor& h,
                         const PowerGrid& grid, const DqnHyper& hyper);

// eps = 0 rollout from a fresh episode; returns the final allocation.
Allocation greedy_rollout(const DenseNet& qnet, DqnEnv& env);

void save_dqn_checkpoint(const std::string& path, const DenseNet& qnet,
                         int grid_levels, long long adam_step);
DenseNet load_dqn_checkpoint(const std::string& path, int* grid_levels);

}  // namespace oran

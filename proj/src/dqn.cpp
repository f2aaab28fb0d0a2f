#include "oran/dqn.hpp"

#include <cmath>
#include <fstream>

#include "oran/errors.hpp"

namespace oran {

double reward(double weighted_objective, size_t violation_count,
              const RewardWeights& w) {
  return w.theta_r * weighted_objective +
         w.theta_const * static_cast<double>(violation_count) + w.theta_bias;
}

DqnEnv::DqnEnv(const NetworkConfig& cfg, const ChannelTensor& h, const PowerGrid& grid,
               const RewardWeights& rw, int horizon)
    : cfg_(cfg),
      h_(h),
      grid_(grid),
      rw_(rw),
      U_(cfg.num_ues()),
      B_(cfg.num_rus),
      M_(cfg.num_prbs),
      S_(cfg.num_slices()),
      P_(grid.p_levels),
      horizon_(horizon) {
  if (!h.dims_match(cfg)) throw ConfigError("DqnEnv: channel dims mismatch");
  grid.validate(cfg);
  fh_cap_w_ = cfg.quant_noise_w * std::exp2(cfg.c_fh_max);
  reset();
}

void DqnEnv::reset() {
  alloc_ = Allocation::zero(cfg_);
  assoc_.assign(U_, 0);
  grants_per_ue_.assign(U_, 0);
  level_idx_.assign(U_, 0);
  satisfied_.assign(U_, 0);
  step_count_ = 0;

  // Start every UE on the RU with the best mean gain over its slice's PRBs,
  // so the single-association constraint holds from step zero. Actions can
  // move a UE while it holds no grants.
  for (int u = 0; u < U_; ++u) {
    int su = cfg_.slice_of_ue(u);
    int best_b = 0;
    double best_gain = -1.0;
    for (int b = 0; b < B_; ++b) {
      double acc = 0.0;
      for (int m = 0; m < M_; ++m) acc += h_.gain(u, b, m, su);
      if (acc > best_gain) {
        best_gain = acc;
        best_b = b;
      }
    }
    assoc_[u] = best_b;
    alloc_.a(u, best_b, su) = 1;
  }
  refresh_metrics();
}

ActionSpec DqnEnv::decode(int idx) const {
  ActionSpec a;
  a.level = idx % P_;
  idx /= P_;
  a.m = idx % M_;
  idx /= M_;
  a.b = idx % B_;
  idx /= B_;
  a.u = idx;
  return a;
}

int DqnEnv::encode(const ActionSpec& a) const {
  return ((a.u * B_ + a.b) * M_ + a.m) * P_ + a.level;
}

double DqnEnv::slot_power_contribution(int b) const {
  double acc = 0.0;
  for (int u = 0; u < U_; ++u) {
    int su = cfg_.slice_of_ue(u);
    if (!alloc_.a(u, b, su)) continue;
    for (int m = 0; m < M_; ++m) acc += h_.gain(u, b, m, su) * alloc_.p(u, b, m, su);
  }
  return acc;
}

bool DqnEnv::legal(const ActionSpec& a) const {
  if (a.u < 0 || a.u >= U_ || a.b < 0 || a.b >= B_ || a.m < 0 || a.m >= M_ ||
      a.level < 0 || a.level >= P_)
    return false;
  int su = cfg_.slice_of_ue(a.u);
  // Association moves only while the UE holds no grants.
  if (a.b != assoc_[a.u] && grants_per_ue_[a.u] > 0) return false;
  // Slot exclusivity: (b, m, s) may be held by a.u or free.
  for (int u2 = 0; u2 < U_; ++u2) {
    if (u2 == a.u) continue;
    if (cfg_.slice_of_ue(u2) != su) continue;
    if (alloc_.bt(u2, a.b, a.m, su)) return false;
  }
  if (a.level > 0) {
    // Keep the RU power and fronthaul caps invariant under masking.
    double p_new = grid_.level(su, a.level);
    double contrib_old =
        alloc_.bt(a.u, a.b, a.m, su) ? h_.gain(a.u, a.b, a.m, su) * alloc_.p(a.u, a.b, a.m, su)
                                     : 0.0;
    double base = slot_power_contribution(a.b);
    if (a.b != assoc_[a.u]) contrib_old = 0.0;  // moving in: nothing to subtract
    double p_b = base - contrib_old + h_.gain(a.u, a.b, a.m, su) * p_new +
                 cfg_.quant_noise_w;
    if (p_b > cfg_.p_ru_max_w || p_b > fh_cap_w_) return false;
  }
  return true;
}

std::vector<uint8_t> DqnEnv::legal_mask() const {
  std::vector<uint8_t> mask(action_count(), 0);
  for (int idx = 0; idx < action_count(); ++idx)
    mask[idx] = legal(decode(idx)) ? 1 : 0;
  return mask;
}

EnvStepResult DqnEnv::step(int action_idx) {
  ActionSpec a = decode(action_idx);
  if (!legal(a))
    throw ConfigError("DqnEnv::step: illegal action " + std::to_string(action_idx));
  int su = cfg_.slice_of_ue(a.u);

  if (a.b != assoc_[a.u]) {
    alloc_.a(a.u, assoc_[a.u], su) = 0;
    alloc_.a(a.u, a.b, su) = 1;
    assoc_[a.u] = a.b;
  }

  bool had = alloc_.bt(a.u, a.b, a.m, su);
  if (a.level == 0) {
    if (had) --grants_per_ue_[a.u];
    alloc_.bt(a.u, a.b, a.m, su) = 0;
    alloc_.p(a.u, a.b, a.m, su) = 0.0;
  } else {
    if (!had) ++grants_per_ue_[a.u];
    alloc_.bt(a.u, a.b, a.m, su) = 1;
    alloc_.p(a.u, a.b, a.m, su) = grid_.level(su, a.level);
  }
  level_idx_[a.u] = a.level;

  refresh_metrics();
  ++step_count_;
  return {reward(last_objective_, last_violations_, rw_), step_count_ >= horizon_};
}

void DqnEnv::refresh_metrics() {
  RateReport rep = compute_report(h_, alloc_, cfg_);
  last_objective_ = rep.objective;
  for (int u = 0; u < U_; ++u) {
    int su = cfg_.slice_of_ue(u);
    satisfied_[u] = rep.rate(u, su) >= cfg_.r_min[su] ? 1 : 0;
  }
  last_violations_ = check_feasible(h_, alloc_, cfg_).size();
}

std::vector<double> DqnEnv::state_vec() const {
  std::vector<double> v;
  v.reserve(2 * U_);
  for (int u = 0; u < U_; ++u) v.push_back(satisfied_[u]);
  double denom = P_ > 1 ? static_cast<double>(P_ - 1) : 1.0;
  for (int u = 0; u < U_; ++u) v.push_back(level_idx_[u] / denom);
  return v;
}

int epsilon_greedy(const DenseNet& qnet, const std::vector<double>& state, double eps,
                   const std::vector<uint8_t>& mask, Rng& rng) {
  std::vector<int> legal;
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) legal.push_back(static_cast<int>(i));
  if (legal.empty()) throw ConfigError("epsilon_greedy: all actions masked");
  if (eps > 0.0 && rng.uniform() < eps)
    return legal[rng.uniform_int(legal.size())];

  Tensor2 x(1, static_cast<int>(state.size()));
  x.data = state;
  Tensor2 q = forward(qnet, x, false, 0.0, nullptr, nullptr);
  int best = legal[0];
  double best_q = q.at(0, legal[0]);
  for (int idx : legal)
    if (q.at(0, idx) > best_q) {
      best_q = q.at(0, idx);
      best = idx;
    }
  return best;
}

void ReplayBuffer::push(Transition t) {
  if (buf_.size() < capacity_) {
    buf_.push_back(std::move(t));
  } else {
    buf_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
  return buf_[rng.uniform_int(buf_.size())];
}

void DqnHyper::apply_override(const std::string& key, const std::string& value) {
  auto as_int = [&]() { return std::stoi(value); };
  auto as_double = [&]() { return std::stod(value); };
  if (key == "episodes") episodes = as_int();
  else if (key == "steps_per_episode") steps_per_episode = as_int();
  else if (key == "gamma") gamma = as_double();
  else if (key == "eps_start") eps_start = as_double();
  else if (key == "eps_final") eps_final = as_double();
  else if (key == "eps_decay") eps_decay = as_double();
  else if (key == "replay_capacity") replay_capacity = as_int();
  else if (key == "batch_size") batch_size = as_int();
  else if (key == "target_sync_every") target_sync_every = as_int();
  else if (key == "lr") lr = as_double();
  else if (key == "theta_r") reward_weights.theta_r = as_double();
  else if (key == "theta_const") reward_weights.theta_const = as_double();
  else if (key == "theta_bias") reward_weights.theta_bias = as_double();
  else if (key == "huber_delta") huber_delta = as_double();
  else if (key == "seed") seed = std::stoull(value);
  else throw ConfigError("unknown hyper key '" + key + "'");
}

DqnTrainResult train_dqn(const NetworkConfig& cfg, const ChannelTensor& h,
                         const PowerGrid& grid, const DqnHyper& hyper) {
  Rng rng(hyper.seed);
  DqnEnv env(cfg, h, grid, hyper.reward_weights, hyper.steps_per_episode);

  std::vector<int> dims{env.state_dim()};
  for (int w : hyper.hidden) dims.push_back(w);
  dims.push_back(env.action_count());
  std::vector<Activation> acts(dims.size() - 1, Activation::Relu);
  acts.back() = Activation::Linear;

  DenseNet qnet = DenseNet::make(dims, acts, rng);
  DenseNet target = qnet;
  AdamConfig ac;
  ac.lr = hyper.lr;
  ac.beta1 = hyper.adam_beta1;
  ac.beta2 = hyper.adam_beta2;
  AdamState adam = AdamState::init(qnet, ac);
  ReplayBuffer buffer(hyper.replay_capacity);

  DqnTrainResult result;
  double eps = hyper.eps_start;
  long long global_step = 0;

  for (int ep = 0; ep < hyper.episodes; ++ep) {
    env.reset();
    double ep_reward = 0.0;
    double loss_sum = 0.0;
    int loss_count = 0;

    for (int t = 0; t < hyper.steps_per_episode; ++t) {
      std::vector<double> state = env.state_vec();
      std::vector<uint8_t> mask = env.legal_mask();
      int action = epsilon_greedy(qnet, state, eps, mask, rng);
      EnvStepResult sr = env.step(action);
      ep_reward += sr.reward;
      buffer.push({state, action, sr.reward, env.state_vec(), sr.done});
      eps = std::max(hyper.eps_final, eps * hyper.eps_decay);
      ++global_step;

      if (static_cast<int>(buffer.size()) >= hyper.batch_size) {
        // Assemble the minibatch.
        int bs = hyper.batch_size;
        Tensor2 xs(bs, env.state_dim());
        Tensor2 xs_next(bs, env.state_dim());
        std::vector<int> acts_taken(bs);
        std::vector<double> rewards(bs);
        std::vector<uint8_t> dones(bs);
        for (int i = 0; i < bs; ++i) {
          const Transition& tr = buffer.sample(rng);
          for (int c = 0; c < env.state_dim(); ++c) {
            xs.at(i, c) = tr.state[c];
            xs_next.at(i, c) = tr.next_state[c];
          }
          acts_taken[i] = tr.action;
          rewards[i] = tr.reward;
          dones[i] = tr.done ? 1 : 0;
        }

        // Bootstrap targets come from the frozen target net only.
        Tensor2 q_next = forward(target, xs_next, false, 0.0, nullptr, nullptr);
        ForwardCache cache;
        Tensor2 q = forward(qnet, xs, false, 0.0, nullptr, &cache);

        Tensor2 dLdy(bs, env.action_count());
        double loss = 0.0;
        for (int i = 0; i < bs; ++i) {
          double max_next = q_next.at(i, 0);
          for (int a2 = 1; a2 < env.action_count(); ++a2)
            max_next = std::max(max_next, q_next.at(i, a2));
          double y = rewards[i] + (dones[i] ? 0.0 : hyper.gamma * max_next);
          double delta = q.at(i, acts_taken[i]) - y;
          double ad = std::fabs(delta);
          if (ad <= hyper.huber_delta) {
            loss += 0.5 * delta * delta;
            dLdy.at(i, acts_taken[i]) = delta / bs;
          } else {
            loss += hyper.huber_delta * (ad - 0.5 * hyper.huber_delta);
            dLdy.at(i, acts_taken[i]) =
                (delta > 0 ? hyper.huber_delta : -hyper.huber_delta) / bs;
          }
        }
        loss /= bs;
        NetGrads grads = backward(qnet, cache, dLdy);
        adam_step(adam, qnet, grads);
        ++result.optimizer_steps;
        loss_sum += loss;
        ++loss_count;
      }

      if (hyper.target_sync_every > 0 && global_step % hyper.target_sync_every == 0)
        target = qnet;
    }

    result.history.push_back(
        {ep, ep_reward, eps, loss_count ? loss_sum / loss_count : 0.0});
  }
  result.env_steps = global_step;
  result.qnet = std::move(qnet);
  return result;
}

Allocation greedy_rollout(const DenseNet& qnet, DqnEnv& env) {
  env.reset();
  Rng rng(0);  // eps = 0: never consulted for exploration
  for (int t = 0; t < env.horizon(); ++t) {
    std::vector<double> state = env.state_vec();
    std::vector<uint8_t> mask = env.legal_mask();
    int action = epsilon_greedy(qnet, state, 0.0, mask, rng);
    env.step(action);
  }
  return env.allocation();
}

void save_dqn_checkpoint(const std::string& path, const DenseNet& qnet,
                         int grid_levels, long long adam_step) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << "oran-dqn 1\n";
  out << "grid_levels " << grid_levels << "\n";
  write_net(out, qnet, adam_step);
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

DenseNet load_dqn_checkpoint(const std::string& path, int* grid_levels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "oran-dqn" || version != 1)
    throw CheckpointError("bad dqn checkpoint header: " + path);
  std::string tok;
  int gl = 0;
  in >> tok >> gl;
  if (tok != "grid_levels") throw CheckpointError("bad dqn checkpoint: grid_levels");
  if (grid_levels) *grid_levels = gl;
  return read_net(in, nullptr);
}

}  // namespace oran

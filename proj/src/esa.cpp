#include "oran/esa.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "oran/errors.hpp"

namespace oran {

namespace {

using u128 = unsigned __int128;
constexpr u128 kU128Max = ~static_cast<u128>(0);

u128 mul_sat(u128 a, u128 b, bool& sat) {
  if (a == 0 || b == 0) return 0;
  if (a > kU128Max / b) {
    sat = true;
    return kU128Max;
  }
  return a * b;
}

u128 add_sat(u128 a, u128 b, bool& sat) {
  if (kU128Max - a < b) {
    sat = true;
    return kU128Max;
  }
  return a + b;
}

u128 pow_sat(u128 base, int exp, bool& sat) {
  u128 r = 1;
  for (int i = 0; i < exp; ++i) r = mul_sat(r, base, sat);
  return r;
}

u128 factorial_sat(int n, bool& sat) {
  u128 r = 1;
  for (int i = 2; i <= n; ++i) r = mul_sat(r, static_cast<u128>(i), sat);
  return r;
}

// Sum over all assignments of `ues` UEs of one slice to B RUs of
// prod_b slot_options(n_b)^M, where slot_options(n) = 1 + n*(P-1).
// Assignments with the same occupancy vector contribute multinomially.
u128 slice_lattice_sum(int ues, int rus, int prbs, int active_levels, bool& sat) {
  std::vector<int> occupancy(rus, 0);
  u128 total = 0;
  u128 ues_fact = factorial_sat(ues, sat);

  // Recursive composition walk over occupancy vectors.
  std::function<void(int, int)> walk = [&](int b, int remaining) {
    if (b == rus - 1) {
      occupancy[b] = remaining;
      u128 ways = ues_fact;
      bool local_sat = false;
      u128 denom = 1;
      for (int x : occupancy) denom = mul_sat(denom, factorial_sat(x, local_sat), local_sat);
      ways = ways / denom;  // exact: multinomial divides factorial
      u128 prod = ways;
      for (int x : occupancy) {
        u128 f = 1 + static_cast<u128>(x) * active_levels;
        prod = mul_sat(prod, pow_sat(f, prbs, local_sat), local_sat);
      }
      if (local_sat) sat = true;
      total = add_sat(total, prod, sat);
      return;
    }
    for (int n = 0; n <= remaining; ++n) {
      occupancy[b] = n;
      walk(b + 1, remaining - n);
    }
  };
  walk(0, ues);
  return total;
}

}  // namespace

std::string u128_to_string(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v > 0) {
    out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return out;
}

std::string StructuralCount::exact_str() const {
  return exact_saturated ? ">=" + u128_to_string(exact) : u128_to_string(exact);
}
std::string StructuralCount::paper_str() const {
  return paper_saturated ? ">=" + u128_to_string(paper_formula)
                         : u128_to_string(paper_formula);
}

StructuralCount structural_count(const NetworkConfig& cfg, const PowerGrid& grid) {
  StructuralCount sc;
  const int S = cfg.num_slices();
  const int active = grid.active_levels();

  // Exact lattice: slices are independent once UE membership is fixed.
  sc.exact = 1;
  for (int s = 0; s < S; ++s) {
    int ues_in_slice = 0;
    for (int u = 0; u < cfg.num_ues(); ++u)
      if (cfg.slice_of_ue(u) == s) ++ues_in_slice;
    u128 part = slice_lattice_sum(ues_in_slice, cfg.num_rus, cfg.num_prbs, active,
                                  sc.exact_saturated);
    sc.exact = mul_sat(sc.exact, part, sc.exact_saturated);
  }

  // Published cost expression, reported verbatim next to the exact count.
  sc.paper_formula = mul_sat(
      static_cast<u128>(cfg.num_ues()) * static_cast<u128>(cfg.num_rus),
      factorial_sat(cfg.num_prbs + 1, sc.paper_saturated), sc.paper_saturated);
  sc.paper_formula = mul_sat(sc.paper_formula, static_cast<u128>(grid.p_levels),
                             sc.paper_saturated);
  return sc;
}

namespace {

// Shared recursive walk over the decision lattice. kSolve adds incremental
// rate/power bookkeeping, feasibility checks, and best tracking; the stream
// variant materializes each allocation for the visitor.
template <bool kSolve>
class Walker {
 public:
  Walker(const NetworkConfig& cfg, const PowerGrid& grid, const ChannelTensor* h,
         const EsaOptions& opts,
         const std::function<bool(const Allocation&)>* visitor)
      : cfg_(cfg),
        grid_(grid),
        h_(h),
        opts_(opts),
        visitor_(visitor),
        U_(cfg.num_ues()),
        B_(cfg.num_rus),
        M_(cfg.num_prbs),
        S_(cfg.num_slices()),
        P_(grid.p_levels),
        GS_(B_ * S_),
        K_(M_ * B_ * S_) {
    slice_of_.resize(U_);
    for (int u = 0; u < U_; ++u) slice_of_[u] = cfg.slice_of_ue(u);
    assoc_.assign(U_, 0);
    elig_.assign(GS_, {});
    opts_per_group_.assign(GS_, 1);
    suffix_.assign(K_ + 1, 1);
    grant_u_.assign(K_, -1);
    grant_p_.assign(K_, 0.0);
    if constexpr (kSolve) {
      ru_hp_.assign(B_, 0.0);
      rate_u_.assign(U_, 0.0);
      best_value_ = -std::numeric_limits<double>::infinity();
      best_assoc_.assign(U_, 0);
      best_grant_u_.assign(K_, -1);
      best_grant_p_.assign(K_, 0.0);
      // C_b <= C_b^max rewritten as P_b <= sigma1^2 * 2^C_b^max to keep the
      // per-leaf check log2-free.
      fh_cap_w_ = cfg.quant_noise_w * std::exp2(cfg.c_fh_max);
    }
  }

  void run() {
    while (true) {
      setup_association();
      descend(0);
      if (stopped_) return;
      // Odometer: UE 0 is the most significant digit.
      int u = U_ - 1;
      while (u >= 0) {
        if (++assoc_[u] < B_) break;
        assoc_[u] = 0;
        --u;
      }
      if (u < 0) return;
    }
  }

  unsigned long long covered = 0;
  unsigned long long feasible = 0;
  bool found_ = false;
  double best_value_ = 0.0;
  std::vector<int> best_assoc_, best_grant_u_;
  std::vector<double> best_grant_p_;

  Allocation materialize(const std::vector<int>& assoc, const std::vector<int>& gu,
                         const std::vector<double>& gp) const {
    Allocation a = Allocation::zero(cfg_);
    for (int u = 0; u < U_; ++u) a.a(u, assoc[u], slice_of_[u]) = 1;
    for (int k = 0; k < K_; ++k) {
      if (gu[k] < 0) continue;
      int g = k % GS_;
      int b = g / S_;
      int s = g % S_;
      int m = k / GS_;
      a.bt(gu[k], b, m, s) = 1;
      a.p(gu[k], b, m, s) = gp[k];
    }
    return a;
  }

  const std::vector<int>& assoc() const { return assoc_; }

 private:
  void setup_association() {
    for (auto& v : elig_) v.clear();
    for (int u = 0; u < U_; ++u)
      elig_[assoc_[u] * S_ + slice_of_[u]].push_back(u);
    for (int g = 0; g < GS_; ++g)
      opts_per_group_[g] = 1 + static_cast<int>(elig_[g].size()) * (P_ - 1);
    suffix_[K_] = 1;
    for (int k = K_ - 1; k >= 0; --k)
      suffix_[k] = suffix_[k + 1] * static_cast<unsigned long long>(opts_per_group_[k % GS_]);
  }

  void descend(int k) {
    if (stopped_) return;
    if (k == K_) {
      at_leaf();
      return;
    }
    const int g = k % GS_;
    const int b = g / S_;
    const int s = g % S_;
    const int m = k / GS_;

    grant_u_[k] = -1;
    grant_p_[k] = 0.0;
    step_into(k, m);

    for (int u : elig_[g]) {
      if (stopped_) break;
      double hg = 0.0;
      if constexpr (kSolve) hg = h_->gain(u, b, m, s);
      for (int lvl = 1; lvl < P_; ++lvl) {
        double p = grid_.levels[s][lvl];
        double saved_hp = 0.0;
        if constexpr (kSolve) {
          double add = hg * p;
          saved_hp = ru_hp_[b];
          if (opts_.prune_power_cap &&
              saved_hp + add + cfg_.quant_noise_w > cfg_.p_ru_max_w) {
            // Levels ascend, so every remaining level for this UE is dead too.
            covered += static_cast<unsigned long long>(P_ - lvl) * suffix_[k + 1];
            break;
          }
          ru_hp_[b] = saved_hp + add;
        }
        grant_u_[k] = u;
        grant_p_[k] = p;
        step_into(k, m);
        if constexpr (kSolve) ru_hp_[b] = saved_hp;
        if (stopped_) break;
      }
    }
    grant_u_[k] = -1;
    grant_p_[k] = 0.0;
  }

  void step_into(int k, int m) {
    const bool group_done = ((k + 1) % GS_ == 0);
    if constexpr (kSolve) {
      if (group_done) {
        size_t mark = rate_stack_.size();
        double obj_saved = obj_acc_;
        complete_prb(m);
        descend(k + 1);
        while (rate_stack_.size() > mark) {
          rate_u_[rate_stack_.back().first] = rate_stack_.back().second;
          rate_stack_.pop_back();
        }
        obj_acc_ = obj_saved;
        return;
      }
    }
    descend(k + 1);
  }

  // Rates on PRB m are final once all its slots are assigned: interference
  // never crosses PRBs.
  void complete_prb(int m) {
    const int base = m * GS_;
    for (int g = 0; g < GS_; ++g) {
      int u = grant_u_[base + g];
      if (u < 0) continue;
      int b = g / S_;
      int s = g % S_;
      double desired = h_->gain(u, b, m, s) * grant_p_[base + g];
      double interf = 0.0;
      for (int g2 = 0; g2 < GS_; ++g2) {
        int u2 = grant_u_[base + g2];
        if (u2 < 0) continue;
        int b2 = g2 / S_;
        int s2 = g2 % S_;
        if (b2 == b || s2 == s || u2 == u) continue;
        interf += h_->gain(u2, b2, m, s2) * grant_p_[base + g2];
      }
      double r = std::log2(1.0 + desired / (interf + cfg_.noise_power_w));
      rate_stack_.emplace_back(u, rate_u_[u]);
      rate_u_[u] += r;
      obj_acc_ += cfg_.slice_weights[s] * r;
    }
  }

  void at_leaf() {
    ++covered;
    if constexpr (!kSolve) {
      Allocation a = materialize(assoc_, grant_u_, grant_p_);
      if (!(*visitor_)(a)) stopped_ = true;
      return;
    } else {
      for (int b = 0; b < B_; ++b) {
        double p_b = ru_hp_[b] + cfg_.quant_noise_w;
        if (!opts_.prune_power_cap && p_b > cfg_.p_ru_max_w) return;
        if (p_b > fh_cap_w_) return;
      }
      const double prop = cfg_.link_length_m / cfg_.prop_speed_mps;
      for (int u = 0; u < U_; ++u) {
        int s = slice_of_[u];
        double r = rate_u_[u];
        if (r < cfg_.r_min[s]) return;
        double d = r > 0.0 ? prop + cfg_.mean_packet_bits / r : kInfiniteDelay;
        if (!(d <= cfg_.d_max_s)) return;
      }
      ++feasible;
      if (!found_ || obj_acc_ > best_value_) {
        found_ = true;
        best_value_ = obj_acc_;
        best_assoc_ = assoc_;
        best_grant_u_ = grant_u_;
        best_grant_p_ = grant_p_;
      }
    }
  }

  const NetworkConfig& cfg_;
  const PowerGrid& grid_;
  const ChannelTensor* h_;
  const EsaOptions opts_;
  const std::function<bool(const Allocation&)>* visitor_;
  const int U_, B_, M_, S_, P_, GS_, K_;

  std::vector<int> slice_of_;
  std::vector<int> assoc_;
  std::vector<std::vector<int>> elig_;
  std::vector<int> opts_per_group_;
  std::vector<unsigned long long> suffix_;
  std::vector<int> grant_u_;
  std::vector<double> grant_p_;

  std::vector<double> ru_hp_;
  std::vector<double> rate_u_;
  std::vector<std::pair<int, double>> rate_stack_;
  double obj_acc_ = 0.0;
  double fh_cap_w_ = 0.0;
  bool stopped_ = false;
};

void check_budget(const NetworkConfig& cfg, const PowerGrid& grid,
                  unsigned long long budget) {
  StructuralCount sc = structural_count(cfg, grid);
  if (sc.exact_saturated || sc.exact > static_cast<u128>(budget))
    throw BudgetError("lattice size " + sc.exact_str() + " exceeds budget " +
                          std::to_string(budget),
                      sc.exact_str());
}

}  // namespace

void enumerate_allocations(const NetworkConfig& cfg, const PowerGrid& grid,
                           unsigned long long budget,
                           const std::function<bool(const Allocation&)>& visitor) {
  grid.validate(cfg);
  check_budget(cfg, grid, budget);
  Walker<false> w(cfg, grid, nullptr, {}, &visitor);
  w.run();
}

SolveResult solve_esa(const ChannelTensor& h, const NetworkConfig& cfg,
                      const PowerGrid& grid, const EsaOptions& opts) {
  grid.validate(cfg);
  if (!h.dims_match(cfg)) throw ConfigError("channel tensor dims do not match config");
  check_budget(cfg, grid, opts.budget);

  auto t0 = std::chrono::steady_clock::now();
  Walker<true> w(cfg, grid, &h, opts, nullptr);
  w.run();

  SolveResult res;
  res.evaluated_count = w.covered;
  res.feasible_count = w.feasible;
  if (w.found_) {
    res.best_alloc = w.materialize(w.best_assoc_, w.best_grant_u_, w.best_grant_p_);
    res.best_value = w.best_value_;
  } else {
    res.best_alloc = Allocation::zero(cfg);
    res.best_value = 0.0;
  }
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace oran

#include <doctest.h>

#include "naive_oracle.hpp"
#include "oran/dataset.hpp"
#include "oran/errors.hpp"
#include "oran/esa.hpp"
#include "test_util.hpp"

#include <fstream>
#include <sstream>

using namespace oran;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NetworkConfig random_small_cfg(Rng& rng) {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.num_rus = 1 + static_cast<int>(rng.uniform_int(2));
  cfg.num_ues_embb = 1 + static_cast<int>(rng.uniform_int(2));
  cfg.num_ues_urllc = 1 + static_cast<int>(rng.uniform_int(2));
  cfg.num_prbs = 1 + static_cast<int>(rng.uniform_int(2));
  cfg.seed = rng.next_u64();
  // occasionally tighten QoS so infeasible lattices show up too
  if (rng.uniform() < 0.3) cfg.r_min = {3.0, 3.0};
  if (rng.uniform() < 0.3) cfg.p_ru_max_w = 0.2 + 0.3 * rng.uniform();
  return cfg;
}

}  // namespace

TEST_CASE("minimal lattice: single UE, single PRB, two levels") {
  NetworkConfig cfg = testutil::unit_cfg();  // B=1, U=1, M=1, S=1
  PowerGrid grid = PowerGrid::uniform(cfg, 2);
  std::vector<Allocation> all;
  enumerate_allocations(cfg, grid, 1000, [&](const Allocation& a) {
    all.push_back(a);
    return true;
  });
  REQUIRE(all.size() == 2);
  // option order: no grant first, then the active level
  CHECK(all[0].bt(0, 0, 0, 0) == 0);
  CHECK(all[1].bt(0, 0, 0, 0) == 1);
  CHECK(all[1].p(0, 0, 0, 0) == doctest::Approx(1.0));
  for (const auto& a : all) CHECK(a.a(0, 0, 0) == 1);
}

TEST_CASE("budget guard reports the exact count before enumerating") {
  NetworkConfig cfg = testutil::desk_cfg();
  PowerGrid grid = PowerGrid::uniform(cfg, 3);
  StructuralCount sc = structural_count(cfg, grid);
  bool hit = false;
  try {
    enumerate_allocations(cfg, grid, 1000, [](const Allocation&) { return true; });
  } catch (const BudgetError& e) {
    hit = true;
    CHECK(e.count == sc.exact_str());
  }
  CHECK(hit);
}

TEST_CASE("enumeration order is deterministic") {
  NetworkConfig cfg = testutil::tiny_cfg();
  PowerGrid grid = PowerGrid::uniform(cfg, 3);
  auto collect = [&]() {
    std::vector<std::vector<double>> rows;
    enumerate_allocations(cfg, grid, 100000, [&](const Allocation& a) {
      rows.push_back(a.power);
      return true;
    });
    return rows;
  };
  CHECK(collect() == collect());
}

TEST_CASE("paper cost formula: U=2 B=2 M=2 P=3 gives 72") {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.num_rus = 2;
  cfg.num_prbs = 2;
  PowerGrid grid = PowerGrid::uniform(cfg, 3);
  StructuralCount sc = structural_count(cfg, grid);
  CHECK(sc.paper_str() == "72");
}

TEST_CASE("degenerate M=0 lattice is the association choices only") {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.num_rus = 3;
  cfg.num_prbs = 0;  // unvalidated on purpose
  PowerGrid grid;
  grid.p_levels = 2;
  grid.levels = {{0.0, 1.0}, {0.0, 1.0}};
  StructuralCount sc = structural_count(cfg, grid);
  CHECK(sc.exact_str() == "9");  // B^U = 3^2
}

TEST_CASE("exact count equals the stream length") {
  Rng rng(501);
  for (int trial = 0; trial < 5; ++trial) {
    NetworkConfig cfg = random_small_cfg(rng);
    PowerGrid grid = PowerGrid::uniform(cfg, 2 + static_cast<int>(rng.uniform_int(2)));
    StructuralCount sc = structural_count(cfg, grid);
    unsigned long long n = 0;
    enumerate_allocations(cfg, grid, 1'000'000, [&](const Allocation&) {
      ++n;
      return true;
    });
    CHECK(u128_to_string(n) == sc.exact_str());
  }
}

TEST_CASE("solver matches the naive brute force on random instances") {
  Rng rng(777);
  int checked = 0;
  while (checked < 8) {
    NetworkConfig cfg = random_small_cfg(rng);
    PowerGrid grid = PowerGrid::uniform(cfg, 2 + static_cast<int>(rng.uniform_int(2)));
    StructuralCount sc = structural_count(cfg, grid);
    if (sc.exact > 200000) continue;
    Rng crng(cfg.seed);
    ChannelTensor h = generate_channel(cfg, crng);

    SolveResult fast = solve_esa(h, cfg, grid);
    naive::Result slow = naive::solve(h, cfg, grid);

    CHECK(fast.evaluated_count == slow.count);
    CHECK(fast.feasible_count == slow.feasible_count);
    CHECK(fast.found() == slow.feasible);
    if (slow.feasible) {
      CHECK(fast.best_value == doctest::Approx(slow.best).epsilon(1e-12));
      CHECK(check_feasible(h, fast.best_alloc, cfg).empty());
      CHECK(objective(h, fast.best_alloc, cfg) ==
            doctest::Approx(fast.best_value).epsilon(1e-12));
    }
    ++checked;
  }
}

TEST_CASE("pruning changes nothing but the work") {
  Rng rng(778);
  for (int trial = 0; trial < 6; ++trial) {
    NetworkConfig cfg = random_small_cfg(rng);
    cfg.p_ru_max_w = 0.4;  // make the power cap bite
    PowerGrid grid = PowerGrid::uniform(cfg, 3);
    StructuralCount sc = structural_count(cfg, grid);
    if (sc.exact > 200000) continue;
    Rng crng(cfg.seed);
    ChannelTensor h = generate_channel(cfg, crng);

    EsaOptions pruned, unpruned;
    pruned.prune_power_cap = true;
    unpruned.prune_power_cap = false;
    SolveResult a = solve_esa(h, cfg, grid, pruned);
    SolveResult b = solve_esa(h, cfg, grid, unpruned);
    CHECK(a.evaluated_count == b.evaluated_count);  // skipped leaves still counted
    CHECK(a.feasible_count == b.feasible_count);
    CHECK(a.found() == b.found());
    if (a.found()) CHECK(a.best_value == doctest::Approx(b.best_value).epsilon(1e-12));
  }
}

TEST_CASE("unattainable rate floor yields no feasible solution") {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.r_min = {1e6, 1e6};
  PowerGrid grid = PowerGrid::uniform(cfg, 3);
  Rng rng(5);
  ChannelTensor h = generate_channel(cfg, rng);
  SolveResult r = solve_esa(h, cfg, grid);
  CHECK(r.feasible_count == 0);
  CHECK_FALSE(r.found());
  CHECK(r.evaluated_count > 0);
}

TEST_CASE("objective is symmetric under relabeling same-slice UEs") {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.num_ues_embb = 2;
  cfg.num_ues_urllc = 0;
  cfg.num_slices_urllc = 0;
  cfg.p_slice_max_w = {1.0};
  cfg.r_min = {0.01};
  cfg.slice_weights = {1.0};
  ChannelTensor h = testutil::unit_channel(cfg);  // uniform gains
  PowerGrid grid = PowerGrid::uniform(cfg, 3);
  SolveResult r = solve_esa(h, cfg, grid);
  // swap the two UEs: identical channel, so the optimum cannot move
  SolveResult r2 = solve_esa(h, cfg, grid);
  CHECK(r.best_value == doctest::Approx(r2.best_value).epsilon(1e-12));
}

TEST_CASE("refining the grid never lowers the optimum") {
  Rng rng(779);
  NetworkConfig cfg = testutil::tiny_cfg();
  Rng crng(cfg.seed);
  ChannelTensor h = generate_channel(cfg, crng);
  // {0,1} subset of {0,1/2,1}? no: uniform(3) = {0,.5,1}, uniform(2) = {0,1}.
  SolveResult coarse = solve_esa(h, cfg, PowerGrid::uniform(cfg, 2));
  SolveResult fine = solve_esa(h, cfg, PowerGrid::uniform(cfg, 3));
  CHECK(fine.best_value >= coarse.best_value - 1e-12);
}

TEST_CASE("raising power caps never lowers the optimum") {
  NetworkConfig cfg = testutil::desk_cfg();
  cfg.num_prbs = 2;
  cfg.num_ues_embb = 1;
  cfg.num_ues_urllc = 1;
  cfg.p_ru_max_w = 0.5;
  PowerGrid grid = PowerGrid::uniform(cfg, 3);  // grid fixed across the sweep
  Rng crng(9);
  ChannelTensor h = generate_channel(cfg, crng);
  SolveResult tight = solve_esa(h, cfg, grid);

  NetworkConfig looser = cfg;
  looser.p_ru_max_w = 2.0;
  SolveResult loose = solve_esa(h, looser, grid);
  CHECK(loose.best_value >= tight.best_value - 1e-12);

  NetworkConfig slices_up = looser;
  for (double& v : slices_up.p_slice_max_w) v *= 2.0;
  SolveResult loose2 = solve_esa(h, slices_up, grid);
  CHECK(loose2.best_value >= loose.best_value - 1e-12);
}

TEST_CASE("labeled dataset: labels verify, files reproduce byte-for-byte") {
  NetworkConfig cfg = testutil::tiny_cfg();
  PowerGrid grid = PowerGrid::uniform(cfg, 3);
  Dataset ds = build_labeled_dataset(cfg, grid, 12, 2024);
  REQUIRE(ds.labeled.size() == 12);
  for (const auto& s : ds.labeled) {
    ChannelTensor h = channel_from_gains(s.h_flat, cfg);
    Allocation a = gamma_to_allocation(s.gamma, cfg);
    CHECK(check_feasible(h, a, cfg).empty());
    CHECK(objective(h, a, cfg) == doctest::Approx(s.objective).epsilon(1e-6));
  }

  Dataset empty = build_labeled_dataset(cfg, grid, 0, 2024);
  CHECK(empty.labeled.empty());

  save_dataset(ds, "/tmp/oran_test_ds_a.txt");
  Dataset again = build_labeled_dataset(cfg, grid, 12, 2024);
  save_dataset(again, "/tmp/oran_test_ds_b.txt");
  CHECK(slurp("/tmp/oran_test_ds_a.txt") == slurp("/tmp/oran_test_ds_b.txt"));

  Dataset loaded = load_dataset("/tmp/oran_test_ds_a.txt");
  REQUIRE(loaded.labeled.size() == 12);
  CHECK(loaded.cfg.num_prbs == cfg.num_prbs);
  CHECK(loaded.grid.p_levels == 3);
  CHECK(loaded.labeled[3].seed == ds.labeled[3].seed);
}

TEST_CASE("infeasible draws are dropped and regenerated") {
  NetworkConfig cfg = testutil::unit_cfg();
  cfg.noise_power_w = 1.0;
  cfg.r_min = {1.0};  // rate >= 1 needs gain >= 1: drops are common
  PowerGrid grid = PowerGrid::uniform(cfg, 2);
  Dataset ds = build_labeled_dataset(cfg, grid, 30, 99);
  CHECK(ds.labeled.size() == 30);
  CHECK(ds.dropped > 0);
  for (const auto& s : ds.labeled) {
    ChannelTensor h = channel_from_gains(s.h_flat, cfg);
    Allocation a = gamma_to_allocation(s.gamma, cfg);
    CHECK(check_feasible(h, a, cfg).empty());
  }
}

TEST_CASE("parallel dataset build is byte-identical to serial") {
  NetworkConfig cfg = testutil::tiny_cfg();
  PowerGrid grid = PowerGrid::uniform(cfg, 2);
  DatasetBuildOptions serial, parallel;
  serial.threads = 1;
  parallel.threads = 2;
  Dataset a = build_labeled_dataset(cfg, grid, 16, 7, serial);
  Dataset b = build_labeled_dataset(cfg, grid, 16, 7, parallel);
  save_dataset(a, "/tmp/oran_test_ds_ser.txt");
  save_dataset(b, "/tmp/oran_test_ds_par.txt");
  CHECK(slurp("/tmp/oran_test_ds_ser.txt") == slurp("/tmp/oran_test_ds_par.txt"));
}

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orgsim/auction.hpp"
#include "orgsim/landscape.hpp"
#include "orgsim/population.hpp"

namespace orgsim {

// One point of the experiment grid. Defaults follow the reference setting:
// N=12, M=3, P=30, T=200, R=1500, alpha=beta=0.5.
struct Scenario {
  std::string label;
  StructureKind structure = StructureKind::Decomposed;
  int k = 3;
  std::optional<InterdependenceMatrix> matrix;  // required for FromFile
  double learn_prob = 0.0;
  std::optional<int> tau;  // nullopt: single auction in period 1
  IncentiveScheme scheme{0.5, 0.5};
  int n = 12;
  int m_subtasks = 3;
  int p_total = 30;
  int horizon = 200;
  int replications = 1500;
  std::uint64_t master_seed = 0;
  LearningScope learning_scope = LearningScope::All;
  EventOrder event_order = EventOrder::DecideThenLearn;

  // Canonical signature, e.g. "decomp_K3_P0.25_tau10_a0.50". Used for
  // output paths and for seed derivation.
  std::string signature() const;
  // Structural hash folded into every replication seed, so extending a grid
  // never perturbs existing scenarios' runs.
  std::uint64_t hash() const;
  void validate() const;

  InterdependenceMatrix make_matrix() const;
};

struct PeriodRecord {
  double raw = 0.0;
  double normalized = 0.0;
  bool auction_held = false;
};

struct RunTrace {
  int replication = 0;
  std::uint64_t landscape_seed = 0;
  std::vector<PeriodRecord> periods;

  double final_normalized() const { return periods.back().normalized; }
  double time_mean_normalized() const;
  int auction_count() const;
};

bool auction_scheduled(int period, const std::optional<int>& tau);

RunTrace run_replication(const Scenario& scenario, int replication);

// All R replications, deterministically ordered by replication index.
// `workers` <= 1 runs inline; results are identical for any worker count.
std::vector<RunTrace> run_scenario(const Scenario& scenario, int workers = 1,
                                   const std::function<void(int)>& progress = {});

std::vector<std::vector<RunTrace>> run_grid(
    const std::vector<Scenario>& scenarios, int workers = 1,
    const std::function<void(const Scenario&, int)>& progress = {});

}  // namespace orgsim

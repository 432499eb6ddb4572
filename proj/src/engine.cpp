#include "orgsim/engine.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace orgsim {

namespace {

// Stream purposes for per-replication seed derivation.
enum StreamId : std::uint64_t {
  kLandscape = 1,
  kInitialSolution = 2,
  kPopulation = 3,
  kAuctionTie = 4,
  kDecideTie = 5,
  kLearnForget = 6,
};

std::string format_prob(double p) {
  std::ostringstream out;
  out << p;
  return out.str();
}

}  // namespace

std::string Scenario::signature() const {
  std::ostringstream out;
  switch (structure) {
    case StructureKind::Decomposed: out << "decomp"; break;
    case StructureKind::Interdependent: out << "interdep"; break;
    case StructureKind::Roll: out << "roll"; break;
    case StructureKind::FromFile: out << "file"; break;
  }
  out << "_K" << k << "_P" << format_prob(learn_prob) << "_tau";
  if (tau)
    out << *tau;
  else
    out << "inf";
  char alpha_buf[16];
  std::snprintf(alpha_buf, sizeof(alpha_buf), "%.2f", scheme.alpha);
  out << "_a" << alpha_buf;
  if (learning_scope == LearningScope::MembersOnly) out << "_members";
  if (event_order == EventOrder::LearnThenDecide) out << "_learnfirst";
  return out.str();
}

std::uint64_t Scenario::hash() const {
  std::uint64_t structure_word = static_cast<std::uint64_t>(structure);
  if (structure == StructureKind::FromFile && matrix) {
    // Fold the loaded pattern in so distinct files get distinct streams.
    std::uint64_t acc = 0;
    for (const auto& row : matrix->rows)
      for (int j : row) acc = mix_seed({acc, static_cast<std::uint64_t>(j)});
    structure_word = acc;
  }
  return mix_seed({structure_word, static_cast<std::uint64_t>(k),
                   std::bit_cast<std::uint64_t>(learn_prob),
                   tau ? static_cast<std::uint64_t>(*tau) : ~0ULL,
                   std::bit_cast<std::uint64_t>(scheme.alpha),
                   static_cast<std::uint64_t>(n),
                   static_cast<std::uint64_t>(m_subtasks),
                   static_cast<std::uint64_t>(p_total),
                   static_cast<std::uint64_t>(horizon),
                   static_cast<std::uint64_t>(learning_scope),
                   static_cast<std::uint64_t>(event_order)});
}

void Scenario::validate() const {
  if (n <= 0 || n > 24) throw std::invalid_argument("scenario: n must be in [1,24]");
  if (m_subtasks <= 0 || n % m_subtasks != 0)
    throw std::invalid_argument("scenario: n must be divisible by m_subtasks");
  if (p_total <= 0 || p_total % m_subtasks != 0)
    throw std::invalid_argument("scenario: p_total must be divisible by m_subtasks");
  if (learn_prob < 0.0 || learn_prob > 1.0)
    throw std::invalid_argument("scenario: learn_prob must be in [0,1]");
  if (tau && *tau < 1) throw std::invalid_argument("scenario: tau must be >= 1");
  if (horizon < 1) throw std::invalid_argument("scenario: horizon must be >= 1");
  if (replications < 1)
    throw std::invalid_argument("scenario: replications must be >= 1");
  make_scheme(scheme.alpha, scheme.beta);
  if (structure == StructureKind::FromFile) {
    if (!matrix) throw std::invalid_argument("scenario: FromFile needs a matrix");
    if (matrix->n != n)
      throw std::invalid_argument("scenario: matrix size must equal n");
  }
}

InterdependenceMatrix Scenario::make_matrix() const {
  if (structure == StructureKind::FromFile) return *matrix;
  return build_matrix(structure, n, m_subtasks, k);
}

double RunTrace::time_mean_normalized() const {
  double sum = 0.0;
  for (const auto& p : periods) sum += p.normalized;
  return sum / periods.size();
}

int RunTrace::auction_count() const {
  int count = 0;
  for (const auto& p : periods) count += p.auction_held ? 1 : 0;
  return count;
}

bool auction_scheduled(int period, const std::optional<int>& tau) {
  if (period == 1) return true;
  return tau && (period - 1) % *tau == 0;
}

RunTrace run_replication(const Scenario& scenario, int replication) {
  scenario.validate();
  const std::uint64_t rep_seed =
      mix_seed({scenario.master_seed, scenario.hash(),
                static_cast<std::uint64_t>(replication)});
  auto stream = [&](std::uint64_t purpose, std::uint64_t a = 0,
                    std::uint64_t b = 0) {
    return Xoshiro256ss(mix_seed({rep_seed, purpose, a, b}));
  };

  const std::uint64_t landscape_seed = mix_seed({rep_seed, kLandscape});
  const Landscape landscape(scenario.make_matrix(), landscape_seed);
  const TaskSplit split = TaskSplit::of(scenario.n, scenario.m_subtasks);
  const double optimum = landscape.optimum_value();

  Xoshiro256ss pop_rng = stream(kPopulation);
  std::vector<Agent> agents =
      init_population(scenario.p_total, split, pop_rng);

  // Pre-history observable: one random full solution, published to all.
  full_bits_t previous = static_cast<full_bits_t>(
      stream(kInitialSolution).below(full_bits_t{1} << scenario.n));

  Group group;
  RunTrace trace;
  trace.replication = replication;
  trace.landscape_seed = landscape_seed;
  trace.periods.reserve(scenario.horizon);

  std::vector<std::vector<double>> tables(split.m);
  auto fill_tables = [&](full_bits_t context) {
    for (int slot = 0; slot < split.m; ++slot)
      tables[slot] = utility_table(landscape, split,
                                   ResidualContext{context, slot},
                                   scenario.scheme);
  };

  auto learning_round = [&](full_bits_t context, std::uint64_t period) {
    if (scenario.learn_prob <= 0.0) return;
    fill_tables(context);
    const bool members_only =
        scenario.learning_scope == LearningScope::MembersOnly;
    if (members_only && group.members.empty()) return;  // no group formed yet
    for (Agent& a : agents) {
      if (members_only && group.members[a.slot] != a.id) continue;
      Xoshiro256ss rng =
          stream(kLearnForget, period, static_cast<std::uint64_t>(a.id));
      learn_forget_step(a, tables[a.slot], split.s, scenario.learn_prob, rng);
    }
  };

  std::vector<part_bits_t> decisions(split.m);
  for (int t = 1; t <= scenario.horizon; ++t) {
    if (scenario.event_order == EventOrder::LearnThenDecide)
      learning_round(previous, static_cast<std::uint64_t>(t));

    const bool hold_auction = auction_scheduled(t, scenario.tau);
    fill_tables(previous);
    if (hold_auction) {
      group.members.assign(split.m, -1);
      group.prices.assign(split.m, 0.0);
      group.formed_at = t;
      std::vector<Agent> pool;
      for (int slot = 0; slot < split.m; ++slot) {
        pool.clear();
        for (const Agent& a : agents)
          if (a.slot == slot) pool.push_back(a);
        const auto bids = collect_bids(pool, tables[slot], slot);
        Xoshiro256ss rng = stream(kAuctionTie, static_cast<std::uint64_t>(t),
                                  static_cast<std::uint64_t>(slot));
        const SlotResult result = resolve_slot(bids, rng);
        group.members[slot] = result.winner;
        group.prices[slot] = result.price;
      }
    }

    for (int slot = 0; slot < split.m; ++slot) {
      Xoshiro256ss rng = stream(kDecideTie, static_cast<std::uint64_t>(t),
                                static_cast<std::uint64_t>(slot));
      decisions[slot] = decide(agents[group.members[slot]], tables[slot], rng);
    }
    const full_bits_t implemented =
        concatenate_group_solution(decisions, split);
    const double raw = landscape.performance(implemented);
    trace.periods.push_back(PeriodRecord{raw, raw / optimum, hold_auction});

    if (scenario.event_order == EventOrder::DecideThenLearn)
      learning_round(implemented, static_cast<std::uint64_t>(t));

    previous = implemented;
  }
  return trace;
}

std::vector<RunTrace> run_scenario(const Scenario& scenario, int workers,
                                   const std::function<void(int)>& progress) {
  scenario.validate();
  std::vector<RunTrace> traces(scenario.replications);
  if (workers <= 1) {
    for (int r = 0; r < scenario.replications; ++r) {
      traces[r] = run_replication(scenario, r);
      if (progress) progress(r + 1);
    }
    return traces;
  }

  std::atomic<int> next{0};
  std::atomic<int> done{0};
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= scenario.replications) return;
      traces[r] = run_replication(scenario, r);
      const int d = done.fetch_add(1) + 1;
      if (progress) progress(d);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return traces;
}

std::vector<std::vector<RunTrace>> run_grid(
    const std::vector<Scenario>& scenarios, int workers,
    const std::function<void(const Scenario&, int)>& progress) {
  if (scenarios.empty()) throw std::invalid_argument("run_grid: no scenarios");
  std::vector<std::vector<RunTrace>> results;
  results.reserve(scenarios.size());
  for (const Scenario& s : scenarios) {
    auto tick = progress
                    ? std::function<void(int)>([&](int d) { progress(s, d); })
                    : std::function<void(int)>{};
    results.push_back(run_scenario(s, workers, tick));
  }
  return results;
}

}  // namespace orgsim

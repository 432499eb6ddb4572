#include "orgsim/population.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orgsim {

TaskSplit TaskSplit::of(int n, int m) {
  if (m <= 0 || n <= 0 || n % m != 0)
    throw std::invalid_argument("TaskSplit: n must be divisible by m");
  return TaskSplit{n, m, n / m};
}

IncentiveScheme make_scheme(double alpha, double beta) {
  if (alpha < 0.0 || beta < 0.0 || std::abs(alpha + beta - 1.0) > 1e-12)
    throw std::invalid_argument(
        "incentive scheme: alpha and beta must be in [0,1] with alpha+beta=1");
  return IncentiveScheme{alpha, beta};
}

bool Agent::knows(part_bits_t solution) const {
  return std::binary_search(known.begin(), known.end(), solution);
}

std::vector<Agent> init_population(int p_total, const TaskSplit& split,
                                   Xoshiro256ss& rng) {
  if (p_total <= 0 || p_total % split.m != 0)
    throw std::invalid_argument(
        "init_population: population must divide evenly across slots");
  const int per_slot = p_total / split.m;
  std::vector<Agent> agents;
  agents.reserve(p_total);
  for (int id = 0; id < p_total; ++id) {
    Agent a;
    a.id = id;
    a.slot = id / per_slot;
    a.known.push_back(static_cast<part_bits_t>(rng.below(1u << split.s)));
    agents.push_back(std::move(a));
  }
  return agents;
}

double estimated_utility(const Landscape& landscape, const TaskSplit& split,
                         const ResidualContext& ctx,
                         const IncentiveScheme& scheme, part_bits_t candidate) {
  if (landscape.n() != split.n)
    throw std::invalid_argument("estimated_utility: split/landscape mismatch");
  const full_bits_t full = split.splice(ctx.previous, candidate, ctx.slot);
  double own = 0.0;
  double residual = 0.0;
  for (int block = 0; block < split.m; ++block) {
    double mean = 0.0;
    for (int j = 0; j < split.s; ++j)
      mean += landscape.contribution(full, block * split.s + j);
    mean /= split.s;
    if (block == ctx.slot)
      own = mean;
    else
      residual += mean;
  }
  if (split.m > 1) residual /= (split.m - 1);
  return scheme.alpha * own + scheme.beta * residual;
}

std::vector<double> utility_table(const Landscape& landscape,
                                  const TaskSplit& split,
                                  const ResidualContext& ctx,
                                  const IncentiveScheme& scheme) {
  std::vector<double> table(size_t{1} << split.s);
  for (size_t c = 0; c < table.size(); ++c)
    table[c] = estimated_utility(landscape, split, ctx, scheme,
                                 static_cast<part_bits_t>(c));
  return table;
}

part_bits_t decide(const Agent& agent, std::span<const double> utilities,
                   Xoshiro256ss& rng) {
  if (agent.known.empty())
    throw std::logic_error("decide: agent has no known solutions");
  double best = utilities[agent.known.front()];
  for (part_bits_t c : agent.known) best = std::max(best, utilities[c]);
  int ties = 0;
  for (part_bits_t c : agent.known)
    if (utilities[c] == best) ++ties;
  std::uint64_t pick = rng.below(ties);
  for (part_bits_t c : agent.known)
    if (utilities[c] == best && pick-- == 0) return c;
  return agent.known.front();  // unreachable
}

part_bits_t decide(const Agent& agent, const Landscape& landscape,
                   const TaskSplit& split, const ResidualContext& ctx,
                   const IncentiveScheme& scheme, Xoshiro256ss& rng) {
  return decide(agent, utility_table(landscape, split, ctx, scheme), rng);
}

void learn_forget_step(Agent& agent, std::span<const double> utilities,
                       int bits_per_solution, double prob, Xoshiro256ss& rng) {
  // Forgetting first, judged against the knowledge held entering the period.
  const bool forget = rng.bernoulli(prob);
  const bool learn = rng.bernoulli(prob);

  if (forget && agent.known.size() > 1) {
    double best = utilities[agent.known.front()];
    for (part_bits_t c : agent.known) best = std::max(best, utilities[c]);
    int removable = 0;
    for (part_bits_t c : agent.known)
      if (utilities[c] < best) ++removable;
    if (removable > 0) {
      std::uint64_t pick = rng.below(removable);
      for (auto it = agent.known.begin(); it != agent.known.end(); ++it) {
        if (utilities[*it] < best && pick-- == 0) {
          agent.known.erase(it);
          break;
        }
      }
    }
  }

  if (learn) {
    // Uniform over (known solution, bit) pairs whose neighbor is new.
    int pairs = 0;
    for (part_bits_t c : agent.known)
      for (int b = 0; b < bits_per_solution; ++b)
        if (!agent.knows(static_cast<part_bits_t>(c ^ (1u << b)))) ++pairs;
    if (pairs > 0) {
      std::uint64_t pick = rng.below(pairs);
      for (part_bits_t c : agent.known) {
        for (int b = 0; b < bits_per_solution; ++b) {
          const auto neighbor = static_cast<part_bits_t>(c ^ (1u << b));
          if (!agent.knows(neighbor) && pick-- == 0) {
            agent.known.insert(
                std::lower_bound(agent.known.begin(), agent.known.end(),
                                 neighbor),
                neighbor);
            return;
          }
        }
      }
    }
  }
}

void learn_forget_step(Agent& agent, const Landscape& landscape,
                       const TaskSplit& split, const ResidualContext& ctx,
                       const IncentiveScheme& scheme, double prob,
                       Xoshiro256ss& rng) {
  learn_forget_step(agent, utility_table(landscape, split, ctx, scheme),
                    split.s, prob, rng);
}

full_bits_t concatenate_group_solution(std::span<const part_bits_t> decisions,
                                       const TaskSplit& split) {
  if (static_cast<int>(decisions.size()) != split.m)
    throw std::invalid_argument(
        "concatenate_group_solution: one block per slot required");
  full_bits_t d = 0;
  for (int slot = 0; slot < split.m; ++slot)
    d |= static_cast<full_bits_t>(decisions[slot]) << (slot * split.s);
  return d;
}

}  // namespace orgsim

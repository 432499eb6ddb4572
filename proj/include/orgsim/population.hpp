#pragma once

#include <span>
#include <vector>

#include "orgsim/landscape.hpp"
#include "orgsim/rng.hpp"

namespace orgsim {

// How the n decisions split into m subtask blocks of s consecutive bits.
struct TaskSplit {
  int n = 0;
  int m = 0;
  int s = 0;

  static TaskSplit of(int n, int m);
  full_bits_t block_mask(int slot) const {
    return ((full_bits_t{1} << s) - 1u) << (slot * s);
  }
  part_bits_t block_of(full_bits_t d, int slot) const {
    return static_cast<part_bits_t>((d >> (slot * s)) & ((1u << s) - 1u));
  }
  full_bits_t splice(full_bits_t d, part_bits_t candidate, int slot) const {
    return (d & ~block_mask(slot)) |
           (static_cast<full_bits_t>(candidate) << (slot * s));
  }
};

// Linear incentive weights on own vs residual block performance.
struct IncentiveScheme {
  double alpha = 0.5;
  double beta = 0.5;
};

IncentiveScheme make_scheme(double alpha, double beta);

// The previously implemented full solution, as seen by an agent on `slot`.
struct ResidualContext {
  full_bits_t previous = 0;
  int slot = 0;
};

// An expert permanently bound to one subtask slot. `known` is kept sorted
// and duplicate-free; it never becomes empty.
struct Agent {
  int id = 0;
  int slot = 0;
  std::vector<part_bits_t> known;

  bool knows(part_bits_t solution) const;
};

enum class LearningScope { All, MembersOnly };
enum class EventOrder { DecideThenLearn, LearnThenDecide };

// P/M agents per slot, each seeded with one uniformly random length-s
// partial solution.
std::vector<Agent> init_population(int p_total, const TaskSplit& split,
                                   Xoshiro256ss& rng);

// Weighted mean of block performances of the candidate spliced into the
// context: alpha * own block + beta * average of the other blocks.
double estimated_utility(const Landscape& landscape, const TaskSplit& split,
                         const ResidualContext& ctx,
                         const IncentiveScheme& scheme, part_bits_t candidate);

// Utilities of every possible candidate for one slot under one context,
// indexed by candidate bits. One fill per (slot, context) serves decisions,
// bids, and forgetting for the whole slot.
std::vector<double> utility_table(const Landscape& landscape,
                                  const TaskSplit& split,
                                  const ResidualContext& ctx,
                                  const IncentiveScheme& scheme);

// Argmax of utility over `known`; exact ties broken uniformly at random.
part_bits_t decide(const Agent& agent, std::span<const double> utilities,
                   Xoshiro256ss& rng);
part_bits_t decide(const Agent& agent, const Landscape& landscape,
                   const TaskSplit& split, const ResidualContext& ctx,
                   const IncentiveScheme& scheme, Xoshiro256ss& rng);

// One learning/forgetting round for one agent: two independent Bernoulli
// draws, forgetting resolved first. Forgetting removes one uniformly chosen
// known solution that is not a current utility argmax (no-op if all tie or
// only one is known). Learning adds the one-bit neighbor of a uniformly
// chosen (known solution, bit) pair whose neighbor is new (no-op if the
// neighborhood is exhausted).
void learn_forget_step(Agent& agent, std::span<const double> utilities,
                       int bits_per_solution, double prob, Xoshiro256ss& rng);
void learn_forget_step(Agent& agent, const Landscape& landscape,
                       const TaskSplit& split, const ResidualContext& ctx,
                       const IncentiveScheme& scheme, double prob,
                       Xoshiro256ss& rng);

// d_t = d_1 ^frown ... ^frown d_M, slot order.
full_bits_t concatenate_group_solution(std::span<const part_bits_t> decisions,
                                       const TaskSplit& split);

}  // namespace orgsim

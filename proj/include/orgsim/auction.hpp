#pragma once

#include <functional>
#include <span>
#include <vector>

#include "orgsim/population.hpp"

namespace orgsim {

struct Bid {
  int agent_id = -1;
  int slot = -1;
  double value = 0.0;  // maximum estimated utility over the bidder's knowledge
};

struct Group {
  std::vector<int> members;   // agent id per slot
  std::vector<double> prices; // second-highest bid per slot
  int formed_at = 0;          // period index
};

// One sealed bid per candidate: the best estimated utility attainable from
// the candidate's known solutions under the shared context.
std::vector<Bid> collect_bids(std::span<const Agent> candidates,
                              std::span<const double> utilities, int slot);
std::vector<Bid> collect_bids(std::span<const Agent> candidates,
                              const Landscape& landscape,
                              const TaskSplit& split, full_bits_t previous,
                              const IncentiveScheme& scheme, int slot);

// Second-price winner selection for one slot. Ties on the top bid are
// broken uniformly; a lone bidder pays their own bid.
struct SlotResult {
  int winner = -1;
  double winning_bid = 0.0;
  double price = 0.0;
};
SlotResult resolve_slot(std::span<const Bid> bids, Xoshiro256ss& rng);

// Runs all m slot auctions independently. `slot_rng(slot)` must hand back
// the tie-break stream for that slot so slots stay decoupled.
Group run_auction(std::span<const Agent> population, const Landscape& landscape,
                  const TaskSplit& split, full_bits_t previous,
                  const IncentiveScheme& scheme, int period,
                  const std::function<Xoshiro256ss(int)>& slot_rng);

}  // namespace orgsim

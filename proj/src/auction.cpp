#include "orgsim/auction.hpp"

#include <algorithm>
#include <stdexcept>

namespace orgsim {

std::vector<Bid> collect_bids(std::span<const Agent> candidates,
                              std::span<const double> utilities, int slot) {
  if (candidates.empty())
    throw std::invalid_argument("collect_bids: empty candidate pool");
  std::vector<Bid> bids;
  bids.reserve(candidates.size());
  for (const Agent& a : candidates) {
    if (a.slot != slot)
      throw std::invalid_argument("collect_bids: candidate on wrong slot");
    double best = utilities[a.known.front()];
    for (part_bits_t c : a.known) best = std::max(best, utilities[c]);
    bids.push_back(Bid{a.id, slot, best});
  }
  return bids;
}

std::vector<Bid> collect_bids(std::span<const Agent> candidates,
                              const Landscape& landscape,
                              const TaskSplit& split, full_bits_t previous,
                              const IncentiveScheme& scheme, int slot) {
  const auto utilities = utility_table(
      landscape, split, ResidualContext{previous, slot}, scheme);
  return collect_bids(candidates, utilities, slot);
}

SlotResult resolve_slot(std::span<const Bid> bids, Xoshiro256ss& rng) {
  if (bids.empty()) throw std::invalid_argument("resolve_slot: no bids");
  double top = bids.front().value;
  for (const Bid& b : bids) top = std::max(top, b.value);
  int ties = 0;
  for (const Bid& b : bids)
    if (b.value == top) ++ties;
  std::uint64_t pick = rng.below(ties);
  const Bid* winner = nullptr;
  for (const Bid& b : bids)
    if (b.value == top && pick-- == 0) {
      winner = &b;
      break;
    }

  // Second-highest bid over the whole pool; equals `top` when the top value
  // is shared, and the lone bid when there is only one bidder.
  double second = top;
  if (bids.size() > 1) {
    bool skipped_top = false;
    second = -1.0;
    for (const Bid& b : bids) {
      if (!skipped_top && b.value == top && &b == winner) {
        skipped_top = true;
        continue;
      }
      second = std::max(second, b.value);
    }
  }
  return SlotResult{winner->agent_id, top, second};
}

Group run_auction(std::span<const Agent> population, const Landscape& landscape,
                  const TaskSplit& split, full_bits_t previous,
                  const IncentiveScheme& scheme, int period,
                  const std::function<Xoshiro256ss(int)>& slot_rng) {
  Group group;
  group.members.assign(split.m, -1);
  group.prices.assign(split.m, 0.0);
  group.formed_at = period;
  std::vector<Agent> pool;
  for (int slot = 0; slot < split.m; ++slot) {
    pool.clear();
    for (const Agent& a : population)
      if (a.slot == slot) pool.push_back(a);
    if (pool.empty())
      throw std::invalid_argument("run_auction: slot has no candidates");
    const auto bids =
        collect_bids(pool, landscape, split, previous, scheme, slot);
    Xoshiro256ss rng = slot_rng(slot);
    const SlotResult result = resolve_slot(bids, rng);
    group.members[slot] = result.winner;
    group.prices[slot] = result.price;
  }
  return group;
}

}  // namespace orgsim

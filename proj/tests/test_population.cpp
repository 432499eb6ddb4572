#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <bit>

#include "doctest.h"
#include "oracle.hpp"
#include "orgsim/population.hpp"

using namespace orgsim;

namespace {

Landscape constant_landscape(double value) {
  auto m = build_matrix(StructureKind::Decomposed, 4, 2, 1);
  std::vector<std::vector<double>> tables(4, std::vector<double>(4, value));
  return Landscape(std::move(m), std::move(tables));
}

}  // namespace

TEST_CASE("init_population allocates symmetrically with singleton knowledge") {
  const TaskSplit split = TaskSplit::of(12, 3);
  Xoshiro256ss rng(1);
  const auto agents = init_population(30, split, rng);
  REQUIRE(agents.size() == 30);
  int per_slot[3] = {0, 0, 0};
  for (const auto& a : agents) {
    per_slot[a.slot]++;
    CHECK(a.known.size() == 1);
    CHECK(a.known[0] < (1u << split.s));
  }
  CHECK(per_slot[0] == 10);
  CHECK(per_slot[1] == 10);
  CHECK(per_slot[2] == 10);

  Xoshiro256ss rng2(1);
  const auto again = init_population(30, split, rng2);
  for (size_t i = 0; i < agents.size(); ++i)
    CHECK(agents[i].known == again[i].known);

  Xoshiro256ss rng3(2);
  CHECK_THROWS_AS(init_population(31, split, rng3), std::invalid_argument);
}

TEST_CASE("incentive scheme validation") {
  CHECK_NOTHROW(make_scheme(0.5, 0.5));
  CHECK_NOTHROW(make_scheme(1.0, 0.0));
  CHECK_THROWS_AS(make_scheme(0.6, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(make_scheme(1.2, -0.2), std::invalid_argument);
}

TEST_CASE("estimated_utility: degenerate and constant cases") {
  const TaskSplit split = TaskSplit::of(4, 2);
  const auto m = build_matrix(StructureKind::Roll, 4, 2, 2);
  const Landscape ls(m, 3);

  SUBCASE("alpha=1 reduces to the own-block mean") {
    for (full_bits_t prev = 0; prev < 16; ++prev)
      for (part_bits_t c = 0; c < 4; ++c) {
        const double u = estimated_utility(ls, split, {prev, 0},
                                           IncentiveScheme{1.0, 0.0}, c);
        const full_bits_t spliced = split.splice(prev, c, 0);
        const double own =
            (ls.contribution(spliced, 0) + ls.contribution(spliced, 1)) / 2.0;
        CHECK(u == doctest::Approx(own).epsilon(1e-12));
      }
  }
  SUBCASE("constant field gives constant utility") {
    const Landscape flat = constant_landscape(0.5);
    for (full_bits_t prev = 0; prev < 16; ++prev)
      for (int slot = 0; slot < 2; ++slot)
        for (part_bits_t c = 0; c < 4; ++c)
          CHECK(estimated_utility(flat, split, {prev, slot},
                                  IncentiveScheme{0.5, 0.5}, c) ==
                doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("estimated_utility matches the splice-and-evaluate oracle") {
  const TaskSplit split = TaskSplit::of(4, 2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Landscape ls(build_matrix(StructureKind::Roll, 4, 2, 2), seed);
    const IncentiveScheme scheme{0.5, 0.5};
    for (full_bits_t prev = 0; prev < 16; ++prev)
      for (int slot = 0; slot < 2; ++slot)
        for (part_bits_t c = 0; c < 4; ++c)
          CHECK(estimated_utility(ls, split, {prev, slot}, scheme, c) ==
                oracle::utility(ls, split, prev, slot, scheme, c));
  }
}

TEST_CASE("utility_table enumerates every candidate") {
  const TaskSplit split = TaskSplit::of(12, 3);
  const Landscape ls(build_matrix(StructureKind::Interdependent, 12, 3, 5), 7);
  const IncentiveScheme scheme{0.5, 0.5};
  const ResidualContext ctx{0b101100111010, 1};
  const auto table = utility_table(ls, split, ctx, scheme);
  REQUIRE(table.size() == 16);
  for (part_bits_t c = 0; c < 16; ++c)
    CHECK(table[c] == estimated_utility(ls, split, ctx, scheme, c));
}

TEST_CASE("decide") {
  const TaskSplit split = TaskSplit::of(4, 2);
  const Landscape ls(build_matrix(StructureKind::Roll, 4, 2, 2), 11);
  Xoshiro256ss rng(5);

  SUBCASE("singleton knowledge is returned unconditionally") {
    Agent a{0, 0, {part_bits_t{2}}};
    for (full_bits_t prev = 0; prev < 16; ++prev)
      CHECK(decide(a, ls, split, {prev, 0}, IncentiveScheme{0.5, 0.5}, rng) ==
            2);
  }
  SUBCASE("full knowledge with alpha=1 finds the block optimum") {
    Agent a{0, 0, {0, 1, 2, 3}};
    for (full_bits_t prev = 0; prev < 16; ++prev) {
      const auto choice =
          decide(a, ls, split, {prev, 0}, IncentiveScheme{1.0, 0.0}, rng);
      double best = -1.0;
      part_bits_t best_c = 0;
      for (part_bits_t c = 0; c < 4; ++c) {
        const double v =
            oracle::utility(ls, split, prev, 0, IncentiveScheme{1.0, 0.0}, c);
        if (v > best) {
          best = v;
          best_c = c;
        }
      }
      CHECK(choice == best_c);
    }
  }
  SUBCASE("membership: output is always known") {
    Xoshiro256ss init(9);
    auto agents = init_population(10, split, init);
    for (auto& a : agents) {
      a.known.push_back(static_cast<part_bits_t>((a.known[0] + 1) % 4));
      std::sort(a.known.begin(), a.known.end());
      a.known.erase(std::unique(a.known.begin(), a.known.end()),
                    a.known.end());
      const auto choice =
          decide(a, ls, split, {0b0110, a.slot}, IncentiveScheme{0.5, 0.5},
                 rng);
      CHECK(a.knows(choice));
    }
  }
  SUBCASE("positive scaling of the weights never moves the argmax") {
    Agent a{0, 1, {0, 1, 2, 3}};
    for (full_bits_t prev = 0; prev < 16; ++prev) {
      Xoshiro256ss r1(prev), r2(prev);
      const auto base =
          decide(a, ls, split, {prev, 1}, IncentiveScheme{0.3, 0.7}, r1);
      const auto scaled =
          decide(a, ls, split, {prev, 1}, IncentiveScheme{0.6, 1.4}, r2);
      CHECK(base == scaled);
    }
  }
  SUBCASE("ties break uniformly") {
    const Landscape flat = constant_landscape(0.5);
    Agent a{0, 0, {0, 3}};
    int saw0 = 0, saw3 = 0;
    for (int i = 0; i < 200; ++i) {
      const auto c =
          decide(a, flat, split, {0, 0}, IncentiveScheme{0.5, 0.5}, rng);
      (c == 0 ? saw0 : saw3)++;
    }
    CHECK(saw0 > 50);
    CHECK(saw3 > 50);
  }
}

TEST_CASE("learn_forget_step") {
  const TaskSplit split = TaskSplit::of(4, 2);
  const Landscape ls(build_matrix(StructureKind::Roll, 4, 2, 2), 21);
  const IncentiveScheme scheme{0.5, 0.5};

  SUBCASE("prob=0 never changes knowledge") {
    Agent a{0, 0, {1, 2}};
    Xoshiro256ss rng(1);
    for (int i = 0; i < 100; ++i) {
      learn_forget_step(a, ls, split, {full_bits_t(i % 16), 0}, scheme, 0.0,
                        rng);
      CHECK(a.known == std::vector<part_bits_t>{1, 2});
    }
  }
  SUBCASE("prob=1 with singleton knowledge grows to a 1-bit neighbor") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      Agent a{0, 0, {part_bits_t{2}}};
      Xoshiro256ss rng(s);
      learn_forget_step(a, ls, split, {5, 0}, scheme, 1.0, rng);
      REQUIRE(a.known.size() == 2);
      const part_bits_t other = a.known[0] == 2 ? a.known[1] : a.known[0];
      CHECK(std::popcount(static_cast<unsigned>(other ^ 2)) == 1);
    }
  }
  SUBCASE("full knowledge is a fixed point of the joint step") {
    // Forgetting drops one non-argmax, after which learning's only novel
    // neighbor is that same solution; it is re-added deterministically. A
    // full set therefore never shrinks, and learning alone can add nothing.
    for (std::uint64_t s = 0; s < 20; ++s) {
      Agent a{0, 0, {0, 1, 2, 3}};
      Xoshiro256ss rng(s);
      learn_forget_step(a, ls, split, {9, 0}, scheme, 1.0, rng);
      CHECK(a.known == std::vector<part_bits_t>{0, 1, 2, 3});
    }
  }
  SUBCASE("forgetting never removes the argmax; size stays >= 1") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      Agent a{0, 1, {0, 1, 2, 3}};
      Xoshiro256ss rng(s + 100);
      const full_bits_t prev = static_cast<full_bits_t>(s % 16);
      const auto utilities = utility_table(ls, split, {prev, 1}, scheme);
      double best = -1.0;
      for (part_bits_t c : a.known) best = std::max(best, utilities[c]);
      learn_forget_step(a, utilities, split.s, 1.0, rng);
      REQUIRE(!a.known.empty());
      double still_best = -1.0;
      for (part_bits_t c : a.known)
        still_best = std::max(still_best, utilities[c]);
      CHECK(still_best == best);
    }
  }
  SUBCASE("long random run keeps 1 <= |known| <= 2^S and Hamming-1 growth") {
    Agent a{0, 0, {part_bits_t{1}}};
    Xoshiro256ss rng(77);
    for (int t = 0; t < 2000; ++t) {
      const auto before = a.known;
      const full_bits_t prev = static_cast<full_bits_t>(rng.below(16));
      learn_forget_step(a, ls, split, {prev, 0}, scheme, 0.5, rng);
      CHECK(a.known.size() >= 1);
      CHECK(a.known.size() <= 4);
      CHECK(std::is_sorted(a.known.begin(), a.known.end()));
      CHECK(std::adjacent_find(a.known.begin(), a.known.end()) ==
            a.known.end());
      for (part_bits_t c : a.known) {
        bool ok = std::find(before.begin(), before.end(), c) != before.end();
        for (part_bits_t b : before)
          if (std::popcount(static_cast<unsigned>(b ^ c)) == 1) ok = true;
        CHECK(ok);
      }
    }
  }
}

TEST_CASE("concatenate_group_solution") {
  const TaskSplit split = TaskSplit::of(12, 3);
  const std::vector<part_bits_t> blocks{0b1111, 0b0000, 0b1010};
  const full_bits_t d = concatenate_group_solution(blocks, split);
  CHECK(d == 0b1010'0000'1111);
  for (int slot = 0; slot < 3; ++slot)
    CHECK(split.block_of(d, slot) == blocks[slot]);

  // Resubmitting the previous blocks reproduces the previous solution.
  const full_bits_t prev = 0b0110'1011'0001;
  std::vector<part_bits_t> resubmit;
  for (int slot = 0; slot < 3; ++slot)
    resubmit.push_back(split.block_of(prev, slot));
  CHECK(concatenate_group_solution(resubmit, split) == prev);

  const std::vector<part_bits_t> missing{0b1111, 0b0000};
  CHECK_THROWS_AS(concatenate_group_solution(missing, split),
                  std::invalid_argument);
}

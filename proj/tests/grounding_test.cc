// Copyright 2026 The ginsign Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ginsign/grounding.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "support/paths.h"

namespace ginsign {
namespace {

using testing::LoadBundled;

// Picks the window entry with the highest fixed, window-independent score.
class FixedScoreScorer final : public SpanScorer {
 public:
  explicit FixedScoreScorer(std::map<std::string, double> scores) : scores_(std::move(scores)) {}
  ScoreResponse Score(const ScoreRequest &request) override {
    ++calls;
    ScoreResponse out;
    double best = -1e300;
    for (std::size_t i = 0; i < request.candidates.size(); ++i) {
      if (request.candidates[i] == kPadToken) continue;
      double s = scores_.at(request.candidates[i]);
      if (s > best) {
        best = s;
        out.chosen_index = i;
      }
    }
    return out;
  }
  std::string id() const override { return "fixed"; }
  std::size_t calls = 0;

 private:
  std::map<std::string, double> scores_;
};

// Answers from a span -> label table; falls back to the first entry.
class TableScorer final : public SpanScorer {
 public:
  explicit TableScorer(std::multimap<std::string, std::string> table) : table_(std::move(table)) {}
  ScoreResponse Score(const ScoreRequest &request) override {
    auto [lo, hi] = table_.equal_range(request.span_text);
    for (std::size_t i = 0; i < request.candidates.size(); ++i) {
      for (auto it = lo; it != hi; ++it) {
        if (request.candidates[i] == it->second) return {i, std::nullopt};
      }
    }
    return {0, std::nullopt};
  }
  std::string id() const override { return "table"; }

 private:
  std::multimap<std::string, std::string> table_;
};

class BrokenScorer final : public SpanScorer {
 public:
  ScoreResponse Score(const ScoreRequest &) override { throw Error(ErrorKind::kTransport, "link down"); }
  std::string id() const override { return "broken"; }
};

class PadPickingScorer final : public SpanScorer {
 public:
  ScoreResponse Score(const ScoreRequest &request) override { return {request.candidates.size() - 1, {}}; }
  std::string id() const override { return "pad"; }
};

std::vector<std::string> Labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("c" + std::to_string(i));
  return out;
}

Signature RunningExample() {
  return Signature::Parse(R"({"name": "office",
    "types": {"obj": ["package1", "package2", "letter"], "room": ["roomA", "roomB", "hall"]},
    "predicates": {"pick_up": ["obj", "room"]}})");
}

TEST(PartitionTest, WindowArithmetic) {
  auto windows = PartitionWindows(Labels(175), 20);
  ASSERT_EQ(windows.size(), 9u);
  EXPECT_EQ(windows.back().real_count, 15u);
  for (const auto &w : windows) EXPECT_EQ(w.candidates.size(), 20u);
  EXPECT_EQ(windows.back().candidates.back(), kPadToken);
  EXPECT_EQ(windows[8].window_index, 8u);
  std::vector<std::string> flat;
  for (const auto &w : windows) flat.insert(flat.end(), w.candidates.begin(), w.candidates.begin() + w.real_count);
  EXPECT_EQ(flat, Labels(175));

  auto five = PartitionWindows(Labels(5), 20);
  ASSERT_EQ(five.size(), 1u);
  EXPECT_EQ(five[0].real_count, 5u);
  EXPECT_EQ(std::count(five[0].candidates.begin(), five[0].candidates.end(), std::string(kPadToken)), 15);

  auto exact = PartitionWindows(Labels(20), 20);
  ASSERT_EQ(exact.size(), 1u);
  EXPECT_EQ(exact[0].real_count, 20u);

  EXPECT_THROW(PartitionWindows({}, 20), Error);
  EXPECT_THROW(PartitionWindows(Labels(3), 1), Error);
}

TEST(TournamentTest, RoundsForKnownSizes) {
  std::map<std::string, double> scores;
  auto labels = Labels(175);
  for (std::size_t i = 0; i < labels.size(); ++i) scores[labels[i]] = static_cast<double>((i * 37) % 175);
  FixedScoreScorer scorer(scores);
  auto result = TournamentSelect({"prop_1", "x", {}}, labels, scorer, 20);
  EXPECT_EQ(result.rounds, 2u);
  EXPECT_EQ(result.evaluation_count, 175u + 9u);
  EXPECT_EQ(scorer.calls, 10u);

  auto small = Labels(7);
  FixedScoreScorer s2(scores);
  EXPECT_EQ(TournamentSelect({"prop_1", "x", {}}, small, s2, 20).rounds, 1u);
  EXPECT_EQ(TournamentSelect({"prop_1", "x", {}}, std::vector<std::string>{"c3"}, s2, 20).rounds, 1u);
}

TEST(TournamentTest, WinnerIsGlobalArgmax) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + rng() % 500;
    std::size_t m = std::vector<std::size_t>{2, 5, 20}[rng() % 3];
    auto labels = Labels(n);
    std::map<std::string, double> scores;
    // Few distinct values so ties are common.
    for (const auto &l : labels) scores[l] = static_cast<double>(rng() % 50);
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (scores[labels[i]] > scores[labels[best]]) best = i;
    }
    FixedScoreScorer scorer(scores);
    auto result = TournamentSelect({"prop_1", "span", {}}, labels, scorer, m);
    ASSERT_EQ(result.winner_index, best) << "n=" << n << " m=" << m;
    ASSERT_EQ(result.winner, labels[best]);
    std::size_t bound = static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n)) / std::log(m))) + 1;
    ASSERT_LE(result.rounds, bound);
  }
}

TEST(TournamentTest, ScorerFailuresCarryContext) {
  BrokenScorer broken;
  try {
    TournamentSelect({"prop_4", "x", {}}, Labels(30), broken, 20);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kScorerFailure);
    EXPECT_NE(std::string(e.what()).find("prop_4 round 1"), std::string::npos);
  }
  PadPickingScorer pad;
  try {
    TournamentSelect({"prop_1", "x", {}}, Labels(3), pad, 20);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kScorerFailure);
  }
  EXPECT_THROW(TournamentSelect({"prop_1", "x", {}}, {}, pad, 20), Error);
}

TEST(FilterArgumentsTest, WarehouseSlots) {
  Signature sig = LoadBundled("warehouse");
  EXPECT_EQ(FilterArguments(sig, "deliver", 2), (std::vector<std::string>{"shelf", "loading_dock"}));
  EXPECT_EQ(FilterArguments(sig, "deliver", 1).size(), 80u);
  EXPECT_EQ(FilterArguments(sig, "deliver", 1), sig.BuildPrefix("item"));
  for (std::size_t slot : {0, 1, 2}) {
    try {
      FilterArguments(sig, "get_help", slot);
      FAIL();
    } catch (const Error &e) {
      EXPECT_EQ(e.kind(), ErrorKind::kSlotOutOfRange);
    }
  }
  EXPECT_THROW(FilterArguments(sig, "deliver", 3), Error);
}

TEST(GrounderTest, RunningExample) {
  Signature sig = RunningExample();
  TableScorer scorer({{"pick up the package from room A", "package1"},
                      {"pick up the package from room A", "roomA"}});
  Grounder grounder(sig, scorer);
  auto d = grounder.Ground({"prop_1", "pick up the package from room A", {}});
  EXPECT_EQ(d.atom().ToString(), "pick_up(package1,roomA)");
  EXPECT_EQ(d.placeholder_id, "prop_1");
  // One forced predicate round and one round per slot.
  EXPECT_EQ(d.rounds, 3u);
  EXPECT_EQ(d.evaluation_count, 1u + 3u + 3u);
}

TEST(GrounderTest, BackpackDeliveryWithLearnedChoices) {
  Signature sig = LoadBundled("warehouse");
  TableScorer scorer({{"find the bookbag", "search"},
                      {"find the bookbag", "backpack"},
                      {"deliver it to shipping", "deliver"},
                      {"deliver it to shipping", "backpack"},
                      {"deliver it to shipping", "loading_dock"}});
  Grounder grounder(sig, scorer);
  EXPECT_EQ(grounder.Ground({"prop_1", "find the bookbag", {}}).atom().ToString(), "search(backpack)");
  auto d = grounder.Ground({"prop_2", "deliver it to shipping", {}});
  EXPECT_EQ(d.atom().ToString(), "deliver(backpack,loading_dock)");
  EXPECT_EQ(d.args.size(), 2u);
}

TEST(GrounderTest, NullaryAndForcedChoices) {
  Signature nullary = Signature::Parse(R"({"types": {}, "predicates": {"halt": []}})");
  BrokenScorer broken;
  PadPickingScorer pad;
  FirstCandidateScorer first;
  auto d = Grounder(nullary, first).Ground({"prop_1", "stop everything", {}});
  EXPECT_EQ(d.atom().ToString(), "halt");
  EXPECT_TRUE(d.args.empty());

  Signature empty = Signature::Parse(R"({"types": {}, "predicates": {}})");
  try {
    Grounder(empty, first).Ground({"prop_1", "x", {}});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyCandidateList);
  }

  Signature hollow = Signature::Parse(R"({"types": {"box": []}, "predicates": {"open": ["box"]}})");
  try {
    Grounder(hollow, first).Ground({"prop_1", "open it", {}});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyCandidateList);
  }
}

TEST(GrounderTest, DecisionJson) {
  Signature sig = LoadBundled("warehouse");
  LexicalScorer lexical;
  auto d = Grounder(sig, lexical).Ground({"prop_1", "go to the loading dock with the laptop", {}});
  auto doc = d.ToJson();
  EXPECT_EQ(doc["placeholder_id"], "prop_1");
  EXPECT_EQ(doc["atom"], d.atom().ToString());
  EXPECT_EQ(doc["evaluation_count"], d.evaluation_count);
  EXPECT_EQ(doc["rounds"], d.rounds);
  // Deterministic for a fixed scorer and shard size.
  EXPECT_EQ(Grounder(sig, lexical).Ground({"prop_1", "go to the loading dock with the laptop", {}}), d);
}

// Random scorers over the bundled signatures never yield an ill-typed atom.
TEST(GrounderTest, TypeSoundnessFuzz) {
  class RandomScorer final : public SpanScorer {
   public:
    explicit RandomScorer(std::uint64_t seed) : rng_(seed) {}
    ScoreResponse Score(const ScoreRequest &request) override {
      return {rng_() % request.real_count(), std::nullopt};
    }
    std::string id() const override { return "random"; }

   private:
    std::mt19937_64 rng_;
  };
  for (const char *name : {"search_and_rescue", "traffic_light", "warehouse"}) {
    Signature sig = LoadBundled(name);
    std::set<std::string> vocab;
    for (const auto &a : EnumerateGroundedAtoms(sig)) vocab.insert(a.ToString());
    RandomScorer scorer(41);
    for (std::size_t m : {2, 3, 7, 20}) {
      Grounder grounder(sig, scorer, {m});
      for (int i = 0; i < 200; ++i) {
        auto atom = grounder.Ground({"prop_1", "anything", {}}).atom();
        ASSERT_TRUE(vocab.contains(atom.ToString())) << atom.ToString();
      }
    }
  }
}

TEST(BudgetTest, BundledSignatures) {
  Signature warehouse = LoadBundled("warehouse");
  EXPECT_EQ(CandidateBudget(warehouse, BudgetMode::kFlat), 322u);
  EXPECT_EQ(CandidateBudget(warehouse, BudgetMode::kHierarchical), 87u);
  for (const char *name : {"search_and_rescue", "traffic_light", "warehouse"}) {
    Signature sig = LoadBundled(name);
    EXPECT_EQ(CandidateBudget(sig, BudgetMode::kFlat), EnumerateGroundedAtoms(sig).size());
    EXPECT_LT(CandidateBudget(sig, BudgetMode::kHierarchical), CandidateBudget(sig, BudgetMode::kFlat)) << name;
  }
  Signature one = Signature::Parse(R"({"types": {}, "predicates": {"halt": []}})");
  EXPECT_EQ(CandidateBudget(one, BudgetMode::kFlat), 1u);
  EXPECT_EQ(CandidateBudget(one, BudgetMode::kHierarchical), 1u);
}

}  // namespace
}  // namespace ginsign

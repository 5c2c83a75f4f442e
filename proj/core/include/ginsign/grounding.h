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

#ifndef GINSIGN_GROUNDING_H_
#define GINSIGN_GROUNDING_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ginsign/scorer.h"
#include "ginsign/signature.h"

namespace ginsign {

inline constexpr std::size_t kDefaultShardSize = 20;

// A lifted atomic proposition: the placeholder and the NL span it replaced.
struct LiftedAP {
  std::string placeholder_id;
  std::string span_text;
  std::optional<std::string> context_text;
};

enum class DecisionOrigin { kPredicate, kArgument };

// One shard of a candidate list, always exactly m entries long: the real
// candidates followed by kPadToken filler.
struct CandidateWindow {
  std::vector<std::string> candidates;
  std::size_t real_count = 0;
  std::size_t window_index = 0;
  DecisionOrigin origin = DecisionOrigin::kPredicate;
  // 1-based argument slot; 0 for predicate decisions.
  std::size_t slot = 0;
};

// Splits `candidates` into ceil(N/m) contiguous windows. Requires m >= 2.
// Throws EmptyCandidateList for an empty list.
std::vector<CandidateWindow> PartitionWindows(std::span<const std::string> candidates,
                                              std::size_t m,
                                              DecisionOrigin origin = DecisionOrigin::kPredicate,
                                              std::size_t slot = 0);

// Extra request fields forwarded to the scorer.
struct TournamentQuery {
  ScoreTask task = ScoreTask::kPredicate;
  std::optional<std::string> predicate_hint;
  std::optional<std::size_t> slot;
};

struct TournamentResult {
  std::string winner;
  // Position of the winner in the original candidate list.
  std::size_t winner_index = 0;
  // Real (non-pad) candidates shown to the scorer over all rounds.
  std::size_t evaluation_count = 0;
  std::size_t rounds = 0;
};

// Each round scores every window and keeps the window winners, in their
// original relative order, as the next round's list; stops at one survivor.
// Scorer exceptions and pad/out-of-range picks surface as ScorerFailure with
// the round and window in the message.
TournamentResult TournamentSelect(const LiftedAP &ap, std::span<const std::string> candidates,
                                  SpanScorer &scorer, std::size_t m = kDefaultShardSize,
                                  const TournamentQuery &query = {});

struct GroundingDecision {
  std::string placeholder_id;
  std::string predicate;
  std::vector<std::string> args;
  std::size_t evaluation_count = 0;
  std::size_t rounds = 0;

  GroundedAtom atom() const { return {predicate, args}; }
  // {"placeholder_id", "predicate", "args", "atom", "evaluation_count", "rounds"}
  nlohmann::json ToJson() const;

  bool operator==(const GroundingDecision &) const = default;
};

// Type-filtered candidates for 1-based slot `slot` of `predicate`. Throws
// SlotOutOfRange outside 1..arity, TypeError for an unknown predicate.
std::vector<std::string> FilterArguments(const Signature &sig, std::string_view predicate,
                                         std::size_t slot);

struct GrounderOptions {
  std::size_t shard_size = kDefaultShardSize;
};

// Hierarchical grounding: choose a predicate from enum(P), then resolve each
// argument slot independently among the constants of its declared type.
// The resulting atom is well-typed by construction.
class Grounder {
 public:
  Grounder(const Signature &sig, SpanScorer &scorer, GrounderOptions options = {});

  const PredicateSymbol &GroundPredicate(const LiftedAP &ap, TournamentResult *stats = nullptr) const;
  std::vector<std::string> GroundArguments(const LiftedAP &ap, const PredicateSymbol &predicate,
                                           TournamentResult *stats = nullptr) const;
  GroundingDecision Ground(const LiftedAP &ap) const;

  const Signature &signature() const { return sig_; }

 private:
  const Signature &sig_;
  SpanScorer &scorer_;
  GrounderOptions options_;
};

enum class BudgetMode { kHierarchical, kFlat };

// Candidates a scorer must discriminate for one AP. Flat is |P_S|;
// hierarchical is |P| plus the largest per-predicate sum of slot class sizes.
// Throws SizeLimit in flat mode when |P_S| exceeds `cap`.
std::size_t CandidateBudget(const Signature &sig, BudgetMode mode,
                            std::size_t cap = kDefaultAtomCap);

}  // namespace ginsign

#endif  // GINSIGN_GROUNDING_H_

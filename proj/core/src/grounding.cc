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

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace ginsign {

std::vector<CandidateWindow> PartitionWindows(std::span<const std::string> candidates,
                                              std::size_t m, DecisionOrigin origin,
                                              std::size_t slot) {
  if (m < 2) throw Error(ErrorKind::kInvalidArgument, "shard size must be at least 2");
  if (candidates.empty()) throw Error(ErrorKind::kEmptyCandidateList, "no candidates to partition");
  std::vector<CandidateWindow> windows;
  for (std::size_t begin = 0; begin < candidates.size(); begin += m) {
    CandidateWindow w;
    w.window_index = windows.size();
    w.origin = origin;
    w.slot = slot;
    std::size_t end = std::min(begin + m, candidates.size());
    w.candidates.assign(candidates.begin() + begin, candidates.begin() + end);
    w.real_count = w.candidates.size();
    w.candidates.resize(m, std::string(kPadToken));
    windows.push_back(std::move(w));
  }
  return windows;
}

TournamentResult TournamentSelect(const LiftedAP &ap, std::span<const std::string> candidates,
                                  SpanScorer &scorer, std::size_t m, const TournamentQuery &query) {
  if (candidates.empty()) {
    throw Error(ErrorKind::kEmptyCandidateList, "no candidates for " + ap.placeholder_id);
  }
  std::vector<std::size_t> alive(candidates.size());
  std::iota(alive.begin(), alive.end(), 0);

  TournamentResult result;
  do {
    ++result.rounds;
    std::vector<std::string> labels;
    labels.reserve(alive.size());
    for (std::size_t i : alive) labels.push_back(candidates[i]);
    auto windows = PartitionWindows(labels, m);

    std::vector<ScoreRequest> requests;
    requests.reserve(windows.size());
    for (auto &w : windows) {
      ScoreRequest r;
      r.task = query.task;
      r.span_text = ap.span_text;
      r.context_text = ap.context_text;
      r.candidates = std::move(w.candidates);
      r.predicate_hint = query.predicate_hint;
      r.slot = query.slot;
      requests.push_back(std::move(r));
    }

    std::vector<ScoreResponse> responses;
    try {
      responses = scorer.ScoreBatch(requests);
    } catch (const std::exception &e) {
      throw Error(ErrorKind::kScorerFailure, ap.placeholder_id + " round " +
                                                 std::to_string(result.rounds) + ": " + e.what());
    }
    if (responses.size() != windows.size()) {
      throw Error(ErrorKind::kScorerFailure, "scorer returned " + std::to_string(responses.size()) +
                                                 " responses for " + std::to_string(windows.size()) +
                                                 " windows");
    }

    std::vector<std::size_t> winners;
    winners.reserve(windows.size());
    for (std::size_t j = 0; j < windows.size(); ++j) {
      std::size_t pick = responses[j].chosen_index;
      if (pick >= windows[j].real_count) {
        throw Error(ErrorKind::kScorerFailure,
                    ap.placeholder_id + " round " + std::to_string(result.rounds) + " window " +
                        std::to_string(j) + ": chosen index " + std::to_string(pick) +
                        " is not a real candidate");
      }
      result.evaluation_count += windows[j].real_count;
      winners.push_back(alive[j * m + pick]);
    }
    alive = std::move(winners);
  } while (alive.size() > 1);

  result.winner_index = alive.front();
  result.winner = candidates[result.winner_index];
  return result;
}

nlohmann::json GroundingDecision::ToJson() const {
  nlohmann::json doc = nlohmann::json::object();
  doc["placeholder_id"] = placeholder_id;
  doc["predicate"] = predicate;
  doc["args"] = args;
  doc["atom"] = atom().ToString();
  doc["evaluation_count"] = evaluation_count;
  doc["rounds"] = rounds;
  return doc;
}

std::vector<std::string> FilterArguments(const Signature &sig, std::string_view predicate,
                                         std::size_t slot) {
  const PredicateSymbol *pred = sig.FindPredicate(predicate);
  if (pred == nullptr) {
    throw Error(ErrorKind::kTypeError, "unknown predicate '" + std::string(predicate) + "'");
  }
  if (slot < 1 || slot > pred->arity()) {
    throw Error(ErrorKind::kSlotOutOfRange, "slot " + std::to_string(slot) + " of '" + pred->name +
                                                "' (arity " + std::to_string(pred->arity()) + ")");
  }
  return sig.BuildPrefix(pred->arg_types[slot - 1]);
}

Grounder::Grounder(const Signature &sig, SpanScorer &scorer, GrounderOptions options)
    : sig_(sig), scorer_(scorer), options_(options) {
  if (options_.shard_size < 2) throw Error(ErrorKind::kInvalidArgument, "shard size must be at least 2");
}

const PredicateSymbol &Grounder::GroundPredicate(const LiftedAP &ap, TournamentResult *stats) const {
  auto prefix = sig_.BuildPrefix();
  if (prefix.empty()) {
    throw Error(ErrorKind::kEmptyCandidateList, "signature '" + sig_.name() + "' has no predicates");
  }
  auto result = TournamentSelect(ap, prefix, scorer_, options_.shard_size, TournamentQuery{});
  if (stats != nullptr) *stats = result;
  return sig_.predicates()[result.winner_index];
}

std::vector<std::string> Grounder::GroundArguments(const LiftedAP &ap,
                                                   const PredicateSymbol &predicate,
                                                   TournamentResult *stats) const {
  std::vector<std::string> args;
  TournamentResult total;
  for (std::size_t slot = 1; slot <= predicate.arity(); ++slot) {
    auto candidates = FilterArguments(sig_, predicate.name, slot);
    if (candidates.empty()) {
      throw Error(ErrorKind::kEmptyCandidateList,
                  "type '" + predicate.arg_types[slot - 1] + "' has no constants for slot " +
                      std::to_string(slot) + " of '" + predicate.name + "'");
    }
    auto result = TournamentSelect(ap, candidates, scorer_, options_.shard_size,
                                   {ScoreTask::kArgument, predicate.name, slot});
    total.evaluation_count += result.evaluation_count;
    total.rounds += result.rounds;
    args.push_back(result.winner);
  }
  if (stats != nullptr) *stats = total;
  return args;
}

GroundingDecision Grounder::Ground(const LiftedAP &ap) const {
  TournamentResult predicate_stats;
  TournamentResult argument_stats;
  const PredicateSymbol &predicate = GroundPredicate(ap, &predicate_stats);
  auto args = GroundArguments(ap, predicate, &argument_stats);
  GroundingDecision decision;
  decision.placeholder_id = ap.placeholder_id;
  // Re-validated through the signature; cannot fail for filtered arguments.
  GroundedAtom atom = sig_.MakeAtom(predicate.name, args);
  decision.predicate = atom.predicate;
  decision.args = std::move(atom.args);
  decision.evaluation_count = predicate_stats.evaluation_count + argument_stats.evaluation_count;
  decision.rounds = predicate_stats.rounds + argument_stats.rounds;
  return decision;
}

std::size_t CandidateBudget(const Signature &sig, BudgetMode mode, std::size_t cap) {
  if (mode == BudgetMode::kFlat) return CountGroundedAtoms(sig, cap);
  std::unordered_map<std::string, std::size_t> class_size;
  for (const auto &c : sig.constants()) ++class_size[c.type];
  std::size_t widest = 0;
  for (const auto &p : sig.predicates()) {
    std::size_t sum = 0;
    for (const auto &type : p.arg_types) sum += class_size[type];
    widest = std::max(widest, sum);
  }
  return sig.predicates().size() + widest;
}

}  // namespace ginsign

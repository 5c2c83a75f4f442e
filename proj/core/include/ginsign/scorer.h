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

#ifndef GINSIGN_SCORER_H_
#define GINSIGN_SCORER_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ginsign/error.h"

namespace ginsign {

// Reserved filler for short windows. Never a legal winner.
inline constexpr std::string_view kPadToken = "<pad>";

enum class ScoreTask { kPredicate, kArgument };

std::string_view ScoreTaskName(ScoreTask task);

// One classification query: pick an entry of `candidates` for `span_text`.
struct ScoreRequest {
  ScoreTask task = ScoreTask::kPredicate;
  std::string span_text;
  std::optional<std::string> context_text;
  // Serialized window, possibly padded with kPadToken.
  std::vector<std::string> candidates;
  // Chosen predicate, for argument requests. Scorers may ignore it.
  std::optional<std::string> predicate_hint;
  // 1-based argument slot, for argument requests.
  std::optional<std::size_t> slot;

  std::size_t real_count() const;
  // Throws InvalidArgument when the window is empty, all padding, or repeats
  // a real label.
  void Validate() const;
};

struct ScoreResponse {
  std::size_t chosen_index = 0;
  // Aligned with the request candidates; pad positions hold -inf.
  std::optional<std::vector<double>> scores;

  bool operator==(const ScoreResponse &) const = default;
};

// Checks the response contract against its request: index in range, not a
// pad entry, and an argmax of the pad-masked scores when scores are present.
// Throws ProtocolViolation.
void CheckResponse(const ScoreRequest &request, const ScoreResponse &response);

// Wire documents. Requests:
//   {"id": n, "task": "predicate"|"argument", "span": "...", "context": "...",
//    "candidates": [...], "predicate_hint": "...", "slot": r}
// Responses:
//   {"id": n, "chosen_index": i, "scores": [s0, s1, ...]}
// Pad scores are encoded as null. Optional fields are omitted when absent.
nlohmann::json RequestToJson(const ScoreRequest &request);
ScoreRequest RequestFromJson(const nlohmann::json &doc);
nlohmann::json ResponseToJson(const ScoreResponse &response);
// Parses and validates a response document for `request`. Throws
// ProtocolViolation on any malformed or out-of-contract field.
ScoreResponse ResponseFromJson(const ScoreRequest &request, const nlohmann::json &doc);

// Span scorer h: (span, window) -> index.
class SpanScorer {
 public:
  virtual ~SpanScorer() = default;

  virtual ScoreResponse Score(const ScoreRequest &request) = 0;
  // Responses are returned in request order. The default calls Score in turn.
  virtual std::vector<ScoreResponse> ScoreBatch(std::span<const ScoreRequest> requests);
  // True when Score may be called from several threads at once.
  virtual bool concurrent() const { return false; }
  virtual std::string id() const = 0;
};

struct LexicalWeights {
  double token_overlap = 1.0;
  double trigram = 0.5;
};

// Fraction of the label's words that occur among the span's words.
double TokenOverlap(std::string_view span, std::string_view label);
// Jaccard similarity of boundary-marked character trigram sets.
double TrigramJaccard(std::string_view span, std::string_view label);

// Deterministic baseline: weighted token overlap plus trigram Jaccard,
// ties to the lowest index.
class LexicalScorer final : public SpanScorer {
 public:
  explicit LexicalScorer(LexicalWeights weights = {}) : weights_(weights) {}

  ScoreResponse Score(const ScoreRequest &request) override;
  bool concurrent() const override { return true; }
  std::string id() const override { return "lexical"; }

 private:
  LexicalWeights weights_;
};

// Always picks the first window entry.
class FirstCandidateScorer final : public SpanScorer {
 public:
  ScoreResponse Score(const ScoreRequest &request) override;
  bool concurrent() const override { return true; }
  std::string id() const override { return "first"; }
};

}  // namespace ginsign

#endif  // GINSIGN_SCORER_H_

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

#ifndef GINSIGN_EXTERNAL_SCORER_H_
#define GINSIGN_EXTERNAL_SCORER_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ginsign/scorer.h"

namespace ginsign {

struct ExternalScorerOptions {
  std::chrono::milliseconds timeout{30'000};
  // Windows per batch envelope.
  std::size_t max_batch = 64;
};

// Speaks newline-delimited JSON with a child process over its stdin/stdout.
// Single requests carry an "id"; batches are sent as
//   {"id": n, "batch": [request...]}  ->  {"id": n, "responses": [response...]}
// Calls on one channel are serialized. After a transport failure or timeout
// the channel is closed and every later call fails with Transport.
class ProcessScorer final : public SpanScorer {
 public:
  explicit ProcessScorer(std::string command, ExternalScorerOptions options = {});
  ~ProcessScorer() override;

  ProcessScorer(const ProcessScorer &) = delete;
  ProcessScorer &operator=(const ProcessScorer &) = delete;

  ScoreResponse Score(const ScoreRequest &request) override;
  std::vector<ScoreResponse> ScoreBatch(std::span<const ScoreRequest> requests) override;
  std::string id() const override { return "external:" + command_; }

 private:
  nlohmann::json RoundTrip(const nlohmann::json &doc);
  void WriteLine(const std::string &line);
  std::string ReadLine();
  void Shutdown();

  std::string command_;
  ExternalScorerOptions options_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  bool broken_ = false;
  std::string buffer_;
  std::uint64_t next_id_ = 1;
  std::mutex mu_;
};

// Posts the same documents to `<url>/score` (or to `url` itself when it
// already ends in /score).
class HttpScorer final : public SpanScorer {
 public:
  explicit HttpScorer(std::string url, ExternalScorerOptions options = {});

  ScoreResponse Score(const ScoreRequest &request) override;
  std::vector<ScoreResponse> ScoreBatch(std::span<const ScoreRequest> requests) override;
  bool concurrent() const override { return true; }
  std::string id() const override { return "http:" + url_; }

 private:
  nlohmann::json Post(const nlohmann::json &doc);

  std::string url_;
  std::string host_;
  std::string path_;
  ExternalScorerOptions options_;
  std::uint64_t next_id_ = 1;
  std::mutex mu_;
};

// Builds a scorer from a command-line spec: `lexical`, `first`,
// `external:<command>` or `http:<url>`.
std::unique_ptr<SpanScorer> MakeScorer(std::string_view spec, ExternalScorerOptions options = {});

// Server side of the protocol: answers one request or batch document. Scorer
// errors are reported as {"id": n, "error": "..."} rather than thrown.
nlohmann::json HandleScoreDocument(SpanScorer &scorer, const nlohmann::json &doc);

}  // namespace ginsign

#endif  // GINSIGN_EXTERNAL_SCORER_H_

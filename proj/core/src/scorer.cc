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

#include "ginsign/scorer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "text_util.h"

namespace ginsign {
namespace {

using Json = nlohmann::json;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool IsPad(std::string_view label) { return label == kPadToken; }

std::set<std::string> Trigrams(const std::vector<std::string> &words) {
  std::set<std::string> grams;
  for (const auto &w : words) {
    std::string marked = "^" + w + "$";
    for (std::size_t i = 0; i + 3 <= marked.size(); ++i) grams.insert(marked.substr(i, 3));
  }
  return grams;
}

[[noreturn]] void Violation(const std::string &what) {
  throw Error(ErrorKind::kProtocolViolation, what);
}

}  // namespace

std::string_view ScoreTaskName(ScoreTask task) {
  return task == ScoreTask::kPredicate ? "predicate" : "argument";
}

std::size_t ScoreRequest::real_count() const {
  return static_cast<std::size_t>(
      std::count_if(candidates.begin(), candidates.end(), [](const auto &c) { return !IsPad(c); }));
}

void ScoreRequest::Validate() const {
  if (candidates.empty()) throw Error(ErrorKind::kInvalidArgument, "score request has no candidates");
  if (real_count() == 0) throw Error(ErrorKind::kInvalidArgument, "score request window is all padding");
  std::set<std::string_view> seen;
  for (const auto &c : candidates) {
    if (!IsPad(c) && !seen.insert(c).second) {
      throw Error(ErrorKind::kInvalidArgument, "duplicate candidate '" + c + "' in window");
    }
  }
}

void CheckResponse(const ScoreRequest &request, const ScoreResponse &response) {
  const auto &cands = request.candidates;
  if (response.chosen_index >= cands.size()) {
    Violation("chosen_index " + std::to_string(response.chosen_index) + " out of range for " +
              std::to_string(cands.size()) + " candidates");
  }
  if (IsPad(cands[response.chosen_index])) {
    Violation("chosen_index " + std::to_string(response.chosen_index) + " selects a pad entry");
  }
  if (!response.scores) return;
  const auto &scores = *response.scores;
  if (scores.size() != cands.size()) Violation("scores length does not match candidates");
  double best = kNegInf;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (IsPad(cands[i])) continue;
    if (std::isnan(scores[i])) Violation("score at index " + std::to_string(i) + " is NaN");
    best = std::max(best, scores[i]);
  }
  if (scores[response.chosen_index] < best) {
    Violation("chosen_index " + std::to_string(response.chosen_index) +
              " is not an argmax of the pad-masked scores");
  }
}

Json RequestToJson(const ScoreRequest &request) {
  Json doc = Json::object();
  doc["task"] = ScoreTaskName(request.task);
  doc["span"] = request.span_text;
  if (request.context_text) doc["context"] = *request.context_text;
  doc["candidates"] = request.candidates;
  if (request.predicate_hint) doc["predicate_hint"] = *request.predicate_hint;
  if (request.slot) doc["slot"] = *request.slot;
  return doc;
}

ScoreRequest RequestFromJson(const Json &doc) {
  try {
    ScoreRequest request;
    std::string task = doc.at("task").get<std::string>();
    if (task == "predicate") {
      request.task = ScoreTask::kPredicate;
    } else if (task == "argument") {
      request.task = ScoreTask::kArgument;
    } else {
      throw Error(ErrorKind::kSchema, "unknown task '" + task + "'");
    }
    request.span_text = doc.at("span").get<std::string>();
    if (doc.contains("context") && !doc["context"].is_null()) {
      request.context_text = doc["context"].get<std::string>();
    }
    request.candidates = doc.at("candidates").get<std::vector<std::string>>();
    if (doc.contains("predicate_hint") && !doc["predicate_hint"].is_null()) {
      request.predicate_hint = doc["predicate_hint"].get<std::string>();
    }
    if (doc.contains("slot") && !doc["slot"].is_null()) request.slot = doc["slot"].get<std::size_t>();
    return request;
  } catch (const Json::exception &e) {
    throw Error(ErrorKind::kSchema, std::string("malformed score request: ") + e.what());
  }
}

Json ResponseToJson(const ScoreResponse &response) {
  Json doc = Json::object();
  doc["chosen_index"] = response.chosen_index;
  if (response.scores) {
    Json scores = Json::array();
    for (double s : *response.scores) {
      if (std::isfinite(s)) {
        scores.push_back(s);
      } else {
        scores.push_back(nullptr);
      }
    }
    doc["scores"] = std::move(scores);
  }
  return doc;
}

ScoreResponse ResponseFromJson(const ScoreRequest &request, const Json &doc) {
  if (!doc.is_object()) Violation("response must be a JSON object");
  if (!doc.contains("chosen_index")) Violation("response lacks chosen_index");
  const Json &index = doc["chosen_index"];
  if (!index.is_number_integer()) Violation("chosen_index must be an integer");
  if (index.get<long long>() < 0) Violation("chosen_index must be non-negative");
  ScoreResponse response;
  response.chosen_index = index.get<std::size_t>();
  if (doc.contains("scores") && !doc["scores"].is_null()) {
    const Json &scores = doc["scores"];
    if (!scores.is_array()) Violation("scores must be an array");
    std::vector<double> values;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i].is_null()) {
        values.push_back(kNegInf);
      } else if (scores[i].is_number()) {
        values.push_back(scores[i].get<double>());
      } else {
        Violation("scores must be numbers or null");
      }
    }
    response.scores = std::move(values);
  }
  CheckResponse(request, response);
  return response;
}

std::vector<ScoreResponse> SpanScorer::ScoreBatch(std::span<const ScoreRequest> requests) {
  std::vector<ScoreResponse> out;
  out.reserve(requests.size());
  for (const auto &request : requests) out.push_back(Score(request));
  return out;
}

double TokenOverlap(std::string_view span, std::string_view label) {
  auto label_words = text::LabelWords(label);
  if (label_words.empty()) return 0.0;
  auto span_words = text::Words(span);
  std::set<std::string> span_set(span_words.begin(), span_words.end());
  std::set<std::string> label_set(label_words.begin(), label_words.end());
  std::size_t hits = 0;
  for (const auto &w : label_set) hits += span_set.contains(w);
  return static_cast<double>(hits) / static_cast<double>(label_set.size());
}

double TrigramJaccard(std::string_view span, std::string_view label) {
  auto a = Trigrams(text::Words(span));
  auto b = Trigrams(text::LabelWords(label));
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto &g : a) common += b.contains(g);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

ScoreResponse LexicalScorer::Score(const ScoreRequest &request) {
  request.Validate();
  ScoreResponse response;
  std::vector<double> scores(request.candidates.size(), kNegInf);
  double best = kNegInf;
  for (std::size_t i = 0; i < request.candidates.size(); ++i) {
    const auto &label = request.candidates[i];
    if (IsPad(label)) continue;
    scores[i] = weights_.token_overlap * TokenOverlap(request.span_text, label) +
                weights_.trigram * TrigramJaccard(request.span_text, label);
    if (scores[i] > best) {
      best = scores[i];
      response.chosen_index = i;
    }
  }
  response.scores = std::move(scores);
  return response;
}

ScoreResponse FirstCandidateScorer::Score(const ScoreRequest &request) {
  request.Validate();
  auto it = std::find_if(request.candidates.begin(), request.candidates.end(),
                         [](const auto &c) { return !IsPad(c); });
  return {static_cast<std::size_t>(it - request.candidates.begin()), std::nullopt};
}

}  // namespace ginsign

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

#ifndef GINSIGN_PIPELINE_H_
#define GINSIGN_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ginsign/equivalence.h"
#include "ginsign/grounding.h"
#include "ginsign/ltl.h"
#include "ginsign/scorer.h"
#include "ginsign/signature.h"
#include "ginsign/trace.h"

namespace ginsign {

// Signatures by domain id (Signature::name()).
using SignatureSet = std::map<std::string, Signature>;

// One dataset line. JSONL fields:
//   id (optional), domain, nl, lifted_nl, lifted_ltl,
//   ap_spans {prop_k: span}, gold_grounding {prop_k: "pred(a,b)"},
//   gold_grounded_ltl (optional), predicted_lifted_ltl (optional),
//   traces (optional array of {"prefix", "loop"}).
struct SpecRecord {
  std::string id;
  std::string domain;
  std::string nl;
  std::string lifted_nl;
  std::string lifted_ltl;
  std::map<std::string, std::string> ap_spans;
  GroundingMap gold_grounding;
  std::optional<std::string> gold_grounded_ltl;
  // Output of an upstream lifted translator; defaults to lifted_ltl.
  std::optional<std::string> predicted_lifted_ltl;
  std::vector<Trace> traces;

  nlohmann::ordered_json ToJson() const;
};

// Validates one record document against the signatures. Throws SchemaError
// for structural problems and TypeError for ill-typed gold atoms; `index` is
// quoted in the message.
SpecRecord ParseRecord(const nlohmann::json &doc, const SignatureSet &signatures, std::size_t index);

// Reads JSONL (blank lines skipped). Record indices in errors are 0-based.
std::vector<SpecRecord> IngestDataset(std::istream &in, const SignatureSet &signatures);
std::vector<SpecRecord> IngestDataset(const std::filesystem::path &path, const SignatureSet &signatures);

enum class SplitMode { kFull, kIntraDomainOod, kCrossDomainOod };

std::string_view SplitModeName(SplitMode mode);

struct DomainHoldout {
  std::set<std::string> predicates;
  std::set<std::string> constants;
};

// Which records are evaluated and which may be exported for training.
//   {"mode": "full"}
//   {"mode": "intra-domain-ood", "domains": {d: {"heldout_predicates": [...],
//                                                "heldout_constants": [...]}}}
//   {"mode": "cross-domain-ood", "heldout_domains": [...]}
struct SplitConfig {
  SplitMode mode = SplitMode::kFull;
  std::map<std::string, DomainHoldout> holdouts;
  std::set<std::string> heldout_domains;

  static SplitConfig FromJson(const nlohmann::json &doc);
  static SplitConfig Load(const std::filesystem::path &path);

  // Holdout names must exist in the signature of their domain. Domains with
  // no loaded signature are ignored.
  void Validate(const SignatureSet &signatures) const;

  bool TouchesHoldout(const SpecRecord &record) const;
  bool IsEvalRecord(const SpecRecord &record) const;
  bool IsTrainingRecord(const SpecRecord &record) const;
  // Removes held-out symbols of `domain` from a candidate list.
  std::vector<std::string> FilterCandidates(const std::string &domain,
                                            std::vector<std::string> candidates) const;
};

// Supplies the scorer for one record.
class ScorerProvider {
 public:
  virtual ~ScorerProvider() = default;
  virtual std::shared_ptr<SpanScorer> ForRecord(const SpecRecord &record) = 0;
  virtual bool concurrent() const = 0;
  virtual std::string id() const = 0;
};

// Every record shares one scorer. Calls are serialized when the scorer does
// not declare concurrent support.
std::unique_ptr<ScorerProvider> SharedScorer(std::shared_ptr<SpanScorer> scorer);

// Per-record scorer that answers with the gold label whenever it is in the
// window, and with the first real candidate otherwise. Upper bound for the
// harness.
std::unique_ptr<ScorerProvider> GoldOracleScorer();

struct EvalConfig {
  std::size_t shard_size = kDefaultShardSize;
  std::size_t bound = kDefaultBound;
  std::size_t workers = 1;
  std::string split_name;
  // Bootstrap resamples for the confidence intervals.
  std::size_t bootstrap_samples = 1000;
  std::uint64_t bootstrap_seed = 7;
};

struct RecordVerdict {
  std::string id;
  std::string domain;
  std::vector<GroundingDecision> decisions;
  ApF1 scores;
  bool lifted_equivalent = false;
  bool gle = false;
  std::set<std::string> ap_diff;
  // Fraction of reference traces on which the predicted grounded formula
  // agrees with the gold one; absent when the record has no traces.
  std::optional<double> trace_agreement;
  std::size_t evaluation_count = 0;
  std::size_t rounds = 0;
  std::optional<std::string> error;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct DomainSummary {
  std::string domain;
  std::size_t records = 0;
  std::size_t aps = 0;
  std::size_t errors = 0;
  ApF1 scores;
  std::size_t le_count = 0;
  std::size_t gle_count = 0;
  double le_rate = 0.0;
  double gle_rate = 0.0;
  Interval le_ci;
  Interval gle_ci;
  double mean_evaluations = 0.0;
  std::size_t max_rounds = 0;
};

struct EvalReport {
  EvalConfig config;
  std::string scorer_id;
  std::string split_mode;
  // Sorted by domain id, followed by an "all" row when there are records.
  std::vector<DomainSummary> domains;
  std::vector<RecordVerdict> records;
};

// Grounds every AP of every evaluated record and scores AP F1, LE and GLE.
// Failures inside a record are captured in its verdict. Records run on up to
// config.workers threads; aggregation follows record order, so the report
// does not depend on scheduling.
EvalReport RunEval(const std::vector<SpecRecord> &records, const SignatureSet &signatures,
                   ScorerProvider &scorers, const SplitConfig &split, const EvalConfig &config);

enum class ReportFormat { kTable, kJson };

std::string EmitReport(const EvalReport &report, ReportFormat format);
nlohmann::ordered_json ReportToJson(const EvalReport &report);

// Gold-in training shard for the learned scorer.
struct TrainingShard {
  std::string record_id;
  std::string domain;
  std::string placeholder_id;
  ScoreTask task = ScoreTask::kPredicate;
  std::string span_text;
  std::optional<std::string> context_text;
  std::optional<std::string> predicate_hint;
  std::optional<std::size_t> slot;
  std::vector<std::string> window;
  std::size_t gold_index = 0;

  nlohmann::ordered_json ToJson() const;
};

// One shard per decision (the predicate and every argument slot) of every
// training record. Each window is a contiguous slice of at most m held-in
// candidates containing the gold label at a seeded random offset.
std::vector<TrainingShard> ExportTraining(const std::vector<SpecRecord> &records,
                                          const SignatureSet &signatures, const SplitConfig &split,
                                          std::size_t m = kDefaultShardSize, std::uint64_t seed = 13);

}  // namespace ginsign

#endif  // GINSIGN_PIPELINE_H_

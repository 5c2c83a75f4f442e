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

#include "ginsign/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "text_util.h"

namespace ginsign {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void SchemaFail(std::size_t index, const std::string &msg) {
  throw Error(ErrorKind::kSchema, "record " + std::to_string(index) + ": " + msg);
}

std::string RequireString(const json &doc, const char *key, std::size_t index) {
  auto it = doc.find(key);
  if (it == doc.end()) SchemaFail(index, std::string("missing field '") + key + "'");
  if (!it->is_string()) SchemaFail(index, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> OptionalString(const json &doc, const char *key, std::size_t index) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) SchemaFail(index, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

Formula ParseField(const std::string &text, const char *key, std::size_t index) {
  try {
    return ParseLtl(text);
  } catch (const Error &e) {
    SchemaFail(index, std::string("field '") + key + "': " + e.what());
  }
}

// Grounded labels are rewritten to their declared spelling so that they
// compare equal to atoms produced by ApplyGrounding.
Observation CanonicalObservation(const Observation &obs, const Signature &sig) {
  Observation out;
  for (const auto &label : obs) {
    try {
      out.insert(sig.ResolveAtom(label).ToString());
    } catch (const Error &) {
      out.insert(label);
    }
  }
  return out;
}

std::string SpanFor(const SpecRecord &record, const std::string &placeholder) {
  auto it = record.ap_spans.find(placeholder);
  return it != record.ap_spans.end() ? it->second : record.nl;
}

bool ContainsKey(const std::set<std::string> &keys, std::string_view name) {
  return keys.contains(IdentifierKey(name));
}

std::set<std::string> KeySet(const json &array, const char *what) {
  if (!array.is_array()) throw Error(ErrorKind::kSchema, std::string(what) + " must be an array");
  std::set<std::string> out;
  for (const auto &v : array) {
    if (!v.is_string()) throw Error(ErrorKind::kSchema, std::string(what) + " entries must be strings");
    out.insert(IdentifierKey(v.get<std::string>()));
  }
  return out;
}

// Serializes calls to a scorer that is not safe for concurrent use.
class SerializedScorer final : public SpanScorer {
 public:
  explicit SerializedScorer(std::shared_ptr<SpanScorer> inner) : inner_(std::move(inner)) {}
  ScoreResponse Score(const ScoreRequest &request) override {
    std::lock_guard lock(mu_);
    return inner_->Score(request);
  }
  std::vector<ScoreResponse> ScoreBatch(std::span<const ScoreRequest> requests) override {
    std::lock_guard lock(mu_);
    return inner_->ScoreBatch(requests);
  }
  bool concurrent() const override { return true; }
  std::string id() const override { return inner_->id(); }

 private:
  std::shared_ptr<SpanScorer> inner_;
  std::mutex mu_;
};

class SharedProvider final : public ScorerProvider {
 public:
  explicit SharedProvider(std::shared_ptr<SpanScorer> scorer)
      : id_(scorer->id()),
        scorer_(scorer->concurrent() ? std::move(scorer)
                                     : std::make_shared<SerializedScorer>(std::move(scorer))) {}
  std::shared_ptr<SpanScorer> ForRecord(const SpecRecord &) override { return scorer_; }
  bool concurrent() const override { return true; }
  std::string id() const override { return id_; }

 private:
  std::string id_;
  std::shared_ptr<SpanScorer> scorer_;
};

class GoldScorer final : public SpanScorer {
 public:
  explicit GoldScorer(const SpecRecord &record) {
    for (const auto &[placeholder, atom] : record.gold_grounding) {
      by_span_.emplace(SpanFor(record, placeholder), atom);
    }
  }

  ScoreResponse Score(const ScoreRequest &request) override {
    std::optional<std::string> gold;
    auto [lo, hi] = by_span_.equal_range(request.span_text);
    for (auto it = lo; it != hi && !gold; ++it) {
      const GroundedAtom &atom = it->second;
      if (request.task == ScoreTask::kPredicate) {
        gold = atom.predicate;
      } else if (request.slot && *request.slot >= 1 && *request.slot <= atom.args.size() &&
                 (!request.predicate_hint ||
                  IdentifierKey(*request.predicate_hint) == IdentifierKey(atom.predicate))) {
        gold = atom.args[*request.slot - 1];
      }
    }
    ScoreResponse response;
    bool found = false;
    for (std::size_t i = 0; i < request.candidates.size(); ++i) {
      if (request.candidates[i] == kPadToken) continue;
      if (gold && IdentifierKey(request.candidates[i]) == IdentifierKey(*gold)) {
        response.chosen_index = i;
        found = true;
        break;
      }
    }
    if (!found) {
      for (std::size_t i = 0; i < request.candidates.size(); ++i) {
        if (request.candidates[i] != kPadToken) {
          response.chosen_index = i;
          break;
        }
      }
    }
    return response;
  }
  bool concurrent() const override { return true; }
  std::string id() const override { return "oracle"; }

 private:
  std::multimap<std::string, GroundedAtom> by_span_;
};

class GoldProvider final : public ScorerProvider {
 public:
  std::shared_ptr<SpanScorer> ForRecord(const SpecRecord &record) override {
    return std::make_shared<GoldScorer>(record);
  }
  bool concurrent() const override { return true; }
  std::string id() const override { return "oracle"; }
};

RecordVerdict EvaluateRecord(const SpecRecord &record, const Signature &sig, SpanScorer &scorer,
                             const EvalConfig &config) {
  RecordVerdict verdict;
  verdict.id = record.id;
  verdict.domain = record.domain;
  try {
    Formula gold_lifted = ParseLtl(record.lifted_ltl);
    Formula pred_lifted = ParseLtl(record.predicted_lifted_ltl.value_or(record.lifted_ltl));

    Grounder grounder(sig, scorer, GrounderOptions{config.shard_size});
    GroundingMap pred_map;
    for (const auto &placeholder : ExtractAtoms(pred_lifted)) {
      LiftedAP ap{placeholder, SpanFor(record, placeholder), record.nl};
      GroundingDecision decision = grounder.Ground(ap);
      verdict.evaluation_count += decision.evaluation_count;
      verdict.rounds = std::max(verdict.rounds, decision.rounds);
      pred_map.emplace(placeholder, decision.atom());
      verdict.decisions.push_back(std::move(decision));
    }

    // Gold APs the predicted formula dropped still count as misses.
    std::vector<GroundingDecision> scored;
    for (const auto &d : verdict.decisions) {
      if (record.gold_grounding.contains(d.placeholder_id)) scored.push_back(d);
    }
    verdict.scores = ComputeApF1(scored, record.gold_grounding);
    for (const auto &d : verdict.decisions) {
      if (!record.gold_grounding.contains(d.placeholder_id)) {
        ++verdict.scores.atom.false_positives;
        ++verdict.scores.predicate.false_positives;
        verdict.scores.argument.false_positives += d.args.size();
      }
    }

    // LE compares the lifted formulas under the dataset's shared numbering,
    // so it does not depend on the grounding; GLE also requires it.
    verdict.lifted_equivalent = CheckEquivalence(pred_lifted, gold_lifted, config.bound).equivalent;
    GleVerdict gle = CheckGle(pred_lifted, pred_map, gold_lifted, record.gold_grounding, config.bound);
    verdict.gle = gle.gle && verdict.lifted_equivalent;
    verdict.ap_diff = gle.ap_diff;

    if (!record.traces.empty()) {
      Formula pred_grounded = ApplyGrounding(pred_lifted, pred_map);
      Formula gold_grounded = record.gold_grounded_ltl ? ParseLtl(*record.gold_grounded_ltl)
                                                       : ApplyGrounding(gold_lifted, record.gold_grounding);
      std::size_t agree = 0;
      for (const auto &trace : record.traces) {
        if (EvalOnTrace(pred_grounded, trace) == EvalOnTrace(gold_grounded, trace)) ++agree;
      }
      verdict.trace_agreement = static_cast<double>(agree) / static_cast<double>(record.traces.size());
    }
  } catch (const std::exception &e) {
    verdict.error = e.what();
    verdict.lifted_equivalent = false;
    verdict.gle = false;
    verdict.scores = ComputeApF1({}, record.gold_grounding);
  }
  return verdict;
}

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Percentile bootstrap of a 0/1 mean.
Interval BootstrapInterval(const std::vector<char> &outcomes, std::size_t samples, std::uint64_t seed) {
  if (outcomes.empty() || samples == 0) return {};
  std::mt19937_64 rng(seed);
  const std::size_t n = outcomes.size();
  std::vector<double> means(samples);
  for (auto &mean : means) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += outcomes[rng() % n];
    mean = static_cast<double>(hits) / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  auto at = [&](double q) {
    auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(samples - 1) + 0.5));
    return means[std::min(idx, samples - 1)];
  };
  return {at(0.025), at(0.975)};
}

}  // namespace

nlohmann::ordered_json SpecRecord::ToJson() const {
  ordered_json doc;
  doc["id"] = id;
  doc["domain"] = domain;
  doc["nl"] = nl;
  doc["lifted_nl"] = lifted_nl;
  doc["lifted_ltl"] = lifted_ltl;
  if (!ap_spans.empty()) doc["ap_spans"] = ap_spans;
  ordered_json gold = ordered_json::object();
  for (const auto &[k, atom] : gold_grounding) gold[k] = atom.ToString();
  doc["gold_grounding"] = gold;
  if (gold_grounded_ltl) doc["gold_grounded_ltl"] = *gold_grounded_ltl;
  if (predicted_lifted_ltl) doc["predicted_lifted_ltl"] = *predicted_lifted_ltl;
  if (!traces.empty()) {
    ordered_json arr = ordered_json::array();
    for (const auto &t : traces) arr.push_back(ordered_json::parse(t.ToJson().dump()));
    doc["traces"] = arr;
  }
  return doc;
}

SpecRecord ParseRecord(const nlohmann::json &doc, const SignatureSet &signatures, std::size_t index) {
  if (!doc.is_object()) SchemaFail(index, "not a JSON object");
  SpecRecord record;
  record.id = OptionalString(doc, "id", index).value_or("record-" + std::to_string(index));
  record.domain = RequireString(doc, "domain", index);
  auto sig_it = signatures.find(record.domain);
  if (sig_it == signatures.end()) SchemaFail(index, "unknown domain '" + record.domain + "'");
  const Signature &sig = sig_it->second;

  record.nl = RequireString(doc, "nl", index);
  record.lifted_nl = RequireString(doc, "lifted_nl", index);
  record.lifted_ltl = RequireString(doc, "lifted_ltl", index);
  Formula lifted = ParseField(record.lifted_ltl, "lifted_ltl", index);
  if (lifted.atom_kind() != AtomKind::kPlaceholder) {
    SchemaFail(index, "lifted_ltl must only use prop_<k> placeholders");
  }
  record.gold_grounded_ltl = OptionalString(doc, "gold_grounded_ltl", index);
  record.predicted_lifted_ltl = OptionalString(doc, "predicted_lifted_ltl", index);
  if (record.predicted_lifted_ltl) ParseField(*record.predicted_lifted_ltl, "predicted_lifted_ltl", index);

  if (auto it = doc.find("ap_spans"); it != doc.end()) {
    if (!it->is_object()) SchemaFail(index, "field 'ap_spans' must be an object");
    for (const auto &[k, v] : it->items()) {
      if (!v.is_string()) SchemaFail(index, "ap_spans entries must be strings");
      record.ap_spans.emplace(k, v.get<std::string>());
    }
  }

  auto gold_it = doc.find("gold_grounding");
  if (gold_it == doc.end() || !gold_it->is_object()) {
    SchemaFail(index, "field 'gold_grounding' must be an object");
  }
  for (const auto &[k, v] : gold_it->items()) {
    if (!IsPlaceholder(k)) SchemaFail(index, "gold_grounding key '" + k + "' is not a placeholder");
    if (!v.is_string()) SchemaFail(index, "gold_grounding values must be atom strings");
    try {
      record.gold_grounding.emplace(k, sig.ResolveAtom(v.get<std::string>()));
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::kTypeError) {
        throw Error(ErrorKind::kTypeError, "record " + std::to_string(index) + ": " + e.detail());
      }
      SchemaFail(index, e.detail());
    }
  }

  // Placeholders must agree across the lifted sentence, formula and gold map.
  auto lifted_atoms = ExtractAtoms(lifted);
  for (const auto &p : lifted_atoms) {
    if (!record.gold_grounding.contains(p)) SchemaFail(index, "no gold grounding for " + p);
    if (record.lifted_nl.find(p) == std::string::npos) SchemaFail(index, p + " does not occur in lifted_nl");
  }
  for (const auto &[p, atom] : record.gold_grounding) {
    if (!lifted_atoms.contains(p)) SchemaFail(index, p + " is grounded but not used in lifted_ltl");
  }
  for (const auto &[p, span] : record.ap_spans) {
    if (!lifted_atoms.contains(p)) SchemaFail(index, "ap_spans names unknown placeholder " + p);
  }

  if (auto it = doc.find("traces"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) SchemaFail(index, "field 'traces' must be an array");
    for (const auto &t : *it) {
      Trace trace;
      try {
        trace = Trace::FromJson(t);
      } catch (const Error &e) {
        SchemaFail(index, e.what());
      }
      for (auto &obs : trace.prefix) obs = CanonicalObservation(obs, sig);
      for (auto &obs : trace.loop) obs = CanonicalObservation(obs, sig);
      record.traces.push_back(std::move(trace));
    }
  }
  if (record.gold_grounded_ltl) {
    Formula g = ParseField(*record.gold_grounded_ltl, "gold_grounded_ltl", index);
    if (g.atom_kind() != AtomKind::kGrounded) SchemaFail(index, "gold_grounded_ltl must use grounded atoms");
    for (const auto &label : ExtractAtoms(g)) {
      try {
        sig.ResolveAtom(label);
      } catch (const Error &e) {
        throw Error(ErrorKind::kTypeError, "record " + std::to_string(index) + ": " + e.detail());
      }
    }
  }
  return record;
}

std::vector<SpecRecord> IngestDataset(std::istream &in, const SignatureSet &signatures) {
  std::vector<SpecRecord> records;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (text::Trim(line).empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error &e) {
      SchemaFail(index, std::string("invalid JSON: ") + e.what());
    }
    records.push_back(ParseRecord(doc, signatures, index));
    ++index;
  }
  return records;
}

std::vector<SpecRecord> IngestDataset(const std::filesystem::path &path, const SignatureSet &signatures) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return IngestDataset(in, signatures);
}

std::string_view SplitModeName(SplitMode mode) {
  switch (mode) {
    case SplitMode::kFull: return "full";
    case SplitMode::kIntraDomainOod: return "intra-domain-ood";
    case SplitMode::kCrossDomainOod: return "cross-domain-ood";
  }
  return "full";
}

SplitConfig SplitConfig::FromJson(const nlohmann::json &doc) {
  if (!doc.is_object()) throw Error(ErrorKind::kSchema, "split config must be an object");
  SplitConfig config;
  std::string mode = doc.value("mode", std::string("full"));
  if (mode == "full") {
    config.mode = SplitMode::kFull;
  } else if (mode == "intra-domain-ood") {
    config.mode = SplitMode::kIntraDomainOod;
  } else if (mode == "cross-domain-ood") {
    config.mode = SplitMode::kCrossDomainOod;
  } else {
    throw Error(ErrorKind::kSchema, "unknown split mode '" + mode + "'");
  }
  if (auto it = doc.find("domains"); it != doc.end()) {
    if (!it->is_object()) throw Error(ErrorKind::kSchema, "'domains' must be an object");
    for (const auto &[domain, spec] : it->items()) {
      DomainHoldout holdout;
      if (spec.contains("heldout_predicates")) {
        holdout.predicates = KeySet(spec["heldout_predicates"], "heldout_predicates");
      }
      if (spec.contains("heldout_constants")) {
        holdout.constants = KeySet(spec["heldout_constants"], "heldout_constants");
      }
      config.holdouts.emplace(domain, std::move(holdout));
    }
  }
  if (auto it = doc.find("heldout_domains"); it != doc.end()) {
    if (!it->is_array()) throw Error(ErrorKind::kSchema, "'heldout_domains' must be an array");
    for (const auto &d : *it) config.heldout_domains.insert(d.get<std::string>());
  }
  if (config.mode == SplitMode::kCrossDomainOod && config.heldout_domains.empty()) {
    throw Error(ErrorKind::kSchema, "cross-domain-ood split needs heldout_domains");
  }
  return config;
}

SplitConfig SplitConfig::Load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return FromJson(json::parse(in));
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kSchema, path.string() + ": " + e.what());
  }
}

void SplitConfig::Validate(const SignatureSet &signatures) const {
  for (const auto &[domain, holdout] : holdouts) {
    auto it = signatures.find(domain);
    if (it == signatures.end()) continue;
    for (const auto &p : holdout.predicates) {
      if (!it->second.FindPredicate(p)) {
        throw Error(ErrorKind::kSchema, "held-out predicate '" + p + "' is not in " + domain);
      }
    }
    for (const auto &c : holdout.constants) {
      if (!it->second.FindConstant(c)) {
        throw Error(ErrorKind::kSchema, "held-out constant '" + c + "' is not in " + domain);
      }
    }
  }
}

bool SplitConfig::TouchesHoldout(const SpecRecord &record) const {
  auto it = holdouts.find(record.domain);
  if (it == holdouts.end()) return false;
  for (const auto &[p, atom] : record.gold_grounding) {
    if (ContainsKey(it->second.predicates, atom.predicate)) return true;
    for (const auto &arg : atom.args) {
      if (ContainsKey(it->second.constants, arg)) return true;
    }
  }
  return false;
}

bool SplitConfig::IsEvalRecord(const SpecRecord &record) const {
  switch (mode) {
    case SplitMode::kFull: return true;
    case SplitMode::kIntraDomainOod: return TouchesHoldout(record);
    case SplitMode::kCrossDomainOod: return heldout_domains.contains(record.domain);
  }
  return true;
}

bool SplitConfig::IsTrainingRecord(const SpecRecord &record) const {
  switch (mode) {
    case SplitMode::kFull: return true;
    case SplitMode::kIntraDomainOod: return !TouchesHoldout(record);
    case SplitMode::kCrossDomainOod: return !heldout_domains.contains(record.domain);
  }
  return true;
}

std::vector<std::string> SplitConfig::FilterCandidates(const std::string &domain,
                                                       std::vector<std::string> candidates) const {
  if (mode != SplitMode::kIntraDomainOod) return candidates;
  auto it = holdouts.find(domain);
  if (it == holdouts.end()) return candidates;
  std::erase_if(candidates, [&](const std::string &c) {
    return ContainsKey(it->second.predicates, c) || ContainsKey(it->second.constants, c);
  });
  return candidates;
}

std::unique_ptr<ScorerProvider> SharedScorer(std::shared_ptr<SpanScorer> scorer) {
  if (!scorer) throw Error(ErrorKind::kInvalidArgument, "null scorer");
  return std::make_unique<SharedProvider>(std::move(scorer));
}

std::unique_ptr<ScorerProvider> GoldOracleScorer() { return std::make_unique<GoldProvider>(); }

namespace {

DomainSummary Summarize(const std::string &domain, const std::vector<const RecordVerdict *> &rows,
                        const std::vector<std::size_t> &gold_aps, const EvalConfig &config) {
  DomainSummary s;
  s.domain = domain;
  s.records = rows.size();
  std::vector<char> le, gle;
  std::size_t decisions = 0;
  std::size_t evaluations = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const RecordVerdict &r = *rows[i];
    if (r.gle && !r.lifted_equivalent) {
      throw Error(ErrorKind::kInvalidArgument, "record " + r.id + " is GLE but not lifted-equivalent");
    }
    s.aps += gold_aps[i];
    if (r.error) ++s.errors;
    s.scores += r.scores;
    s.le_count += r.lifted_equivalent;
    s.gle_count += r.gle;
    le.push_back(r.lifted_equivalent);
    gle.push_back(r.gle);
    decisions += r.decisions.size();
    evaluations += r.evaluation_count;
    s.max_rounds = std::max(s.max_rounds, r.rounds);
  }
  if (s.records > 0) {
    s.le_rate = static_cast<double>(s.le_count) / static_cast<double>(s.records);
    s.gle_rate = static_cast<double>(s.gle_count) / static_cast<double>(s.records);
  }
  if (decisions > 0) s.mean_evaluations = static_cast<double>(evaluations) / static_cast<double>(decisions);
  std::uint64_t seed = config.bootstrap_seed ^ Fnv1a(domain);
  s.le_ci = BootstrapInterval(le, config.bootstrap_samples, seed);
  s.gle_ci = BootstrapInterval(gle, config.bootstrap_samples, seed);
  return s;
}

// Six decimals keeps reports readable and stable.
double Round6(double x) { return std::round(x * 1e6) / 1e6; }

ordered_json CountsJson(const F1Counts &c) {
  return {{"precision", Round6(c.precision())},
          {"recall", Round6(c.recall())},
          {"f1", Round6(c.f1())},
          {"tp", c.true_positives},
          {"fp", c.false_positives},
          {"fn", c.false_negatives}};
}

std::string Percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", Round6(x) * 100.0);
  return buf;
}

}  // namespace

EvalReport RunEval(const std::vector<SpecRecord> &records, const SignatureSet &signatures,
                   ScorerProvider &scorers, const SplitConfig &split, const EvalConfig &config) {
  std::vector<const SpecRecord *> selected;
  for (const auto &r : records) {
    if (split.IsEvalRecord(r)) selected.push_back(&r);
  }

  std::vector<RecordVerdict> verdicts(selected.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < selected.size(); i = next++) {
      const SpecRecord &record = *selected[i];
      auto sig = signatures.find(record.domain);
      if (sig == signatures.end()) {
        verdicts[i].id = record.id;
        verdicts[i].domain = record.domain;
        verdicts[i].error = "no signature for domain " + record.domain;
        verdicts[i].scores = ComputeApF1({}, record.gold_grounding);
        continue;
      }
      std::shared_ptr<SpanScorer> scorer;
      try {
        scorer = scorers.ForRecord(record);
      } catch (const std::exception &e) {
        verdicts[i].id = record.id;
        verdicts[i].domain = record.domain;
        verdicts[i].error = e.what();
        verdicts[i].scores = ComputeApF1({}, record.gold_grounding);
        continue;
      }
      verdicts[i] = EvaluateRecord(record, sig->second, *scorer, config);
    }
  };
  std::size_t workers = std::clamp<std::size_t>(config.workers, 1, std::max<std::size_t>(selected.size(), 1));
  if (!scorers.concurrent()) workers = 1;
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto &t : pool) t.join();
  }

  EvalReport report;
  report.config = config;
  report.scorer_id = scorers.id();
  report.split_mode = std::string(SplitModeName(split.mode));

  std::map<std::string, std::pair<std::vector<const RecordVerdict *>, std::vector<std::size_t>>> by_domain;
  std::vector<const RecordVerdict *> all;
  std::vector<std::size_t> all_aps;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    auto &bucket = by_domain[verdicts[i].domain];
    bucket.first.push_back(&verdicts[i]);
    bucket.second.push_back(selected[i]->gold_grounding.size());
    all.push_back(&verdicts[i]);
    all_aps.push_back(selected[i]->gold_grounding.size());
  }
  for (const auto &[domain, bucket] : by_domain) {
    report.domains.push_back(Summarize(domain, bucket.first, bucket.second, config));
  }
  if (!all.empty()) report.domains.push_back(Summarize("all", all, all_aps, config));
  report.records = std::move(verdicts);
  return report;
}

nlohmann::ordered_json ReportToJson(const EvalReport &report) {
  ordered_json doc;
  // Worker count is deliberately absent: reports must not depend on it.
  doc["config"] = {{"m", report.config.shard_size},
                   {"k", report.config.bound},
                   {"scorer", report.scorer_id},
                   {"split", report.config.split_name},
                   {"split_mode", report.split_mode},
                   {"interval", "percentile bootstrap, 95%, " + std::to_string(report.config.bootstrap_samples) +
                                    " resamples, seed " + std::to_string(report.config.bootstrap_seed)}};
  ordered_json domains = ordered_json::array();
  for (const auto &d : report.domains) {
    domains.push_back({{"domain", d.domain},
                       {"records", d.records},
                       {"aps", d.aps},
                       {"errors", d.errors},
                       {"predicate", CountsJson(d.scores.predicate)},
                       {"argument", CountsJson(d.scores.argument)},
                       {"atom", CountsJson(d.scores.atom)},
                       {"le_rate", Round6(d.le_rate)},
                       {"le_ci", {Round6(d.le_ci.low), Round6(d.le_ci.high)}},
                       {"gle_rate", Round6(d.gle_rate)},
                       {"gle_ci", {Round6(d.gle_ci.low), Round6(d.gle_ci.high)}},
                       {"mean_evaluations", Round6(d.mean_evaluations)},
                       {"max_rounds", d.max_rounds}});
  }
  doc["domains"] = domains;
  ordered_json records = ordered_json::array();
  for (const auto &r : report.records) {
    ordered_json row;
    row["id"] = r.id;
    row["domain"] = r.domain;
    row["lifted_equivalent"] = r.lifted_equivalent;
    row["gle"] = r.gle;
    row["ap_diff"] = r.ap_diff;
    row["predicate_f1"] = Round6(r.scores.predicate.f1());
    row["argument_f1"] = Round6(r.scores.argument.f1());
    row["atom_f1"] = Round6(r.scores.atom.f1());
    row["trace_agreement"] = r.trace_agreement ? ordered_json(Round6(*r.trace_agreement)) : ordered_json();
    row["evaluation_count"] = r.evaluation_count;
    row["rounds"] = r.rounds;
    ordered_json decisions = ordered_json::array();
    for (const auto &d : r.decisions) decisions.push_back(ordered_json::parse(d.ToJson().dump()));
    row["decisions"] = decisions;
    row["error"] = r.error ? ordered_json(*r.error) : ordered_json();
    records.push_back(row);
  }
  doc["records"] = records;
  return doc;
}

std::string EmitReport(const EvalReport &report, ReportFormat format) {
  if (format == ReportFormat::kJson) return ReportToJson(report).dump(2) + "\n";
  std::ostringstream out;
  out << "scorer=" << report.scorer_id << " split=" << report.split_mode;
  if (!report.config.split_name.empty() && report.config.split_name != report.split_mode) {
    out << " (" << report.config.split_name << ")";
  }
  out << " m=" << report.config.shard_size << " k=" << report.config.bound << "\n";
  char line[256];
  const char *header = "%-20s %7s %5s %7s %7s %7s %7s %7s %15s %9s %6s %6s\n";
  std::snprintf(line, sizeof(line), header, "domain", "records", "aps", "pred_f1", "arg_f1", "atom_f1", "le",
                "gle", "gle_95ci", "evals/ap", "rounds", "errors");
  out << line;
  for (const auto &d : report.domains) {
    std::string ci = Percent(d.gle_ci.low) + "-" + Percent(d.gle_ci.high);
    std::snprintf(line, sizeof(line), "%-20s %7zu %5zu %7s %7s %7s %7s %7s %15s %9.2f %6zu %6zu\n",
                  d.domain.c_str(), d.records, d.aps, Percent(d.scores.predicate.f1()).c_str(),
                  Percent(d.scores.argument.f1()).c_str(), Percent(d.scores.atom.f1()).c_str(),
                  Percent(d.le_rate).c_str(), Percent(d.gle_rate).c_str(), ci.c_str(),
                  Round6(d.mean_evaluations), d.max_rounds, d.errors);
    out << line;
  }
  return out.str();
}

nlohmann::ordered_json TrainingShard::ToJson() const {
  ordered_json doc;
  doc["record_id"] = record_id;
  doc["domain"] = domain;
  doc["placeholder_id"] = placeholder_id;
  doc["task"] = std::string(ScoreTaskName(task));
  doc["span_text"] = span_text;
  doc["context_text"] = context_text ? ordered_json(*context_text) : ordered_json();
  doc["predicate_hint"] = predicate_hint ? ordered_json(*predicate_hint) : ordered_json();
  doc["slot"] = slot ? ordered_json(*slot) : ordered_json();
  doc["window"] = window;
  doc["gold_index"] = gold_index;
  return doc;
}

std::vector<TrainingShard> ExportTraining(const std::vector<SpecRecord> &records,
                                          const SignatureSet &signatures, const SplitConfig &split,
                                          std::size_t m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "window size must be positive");
  std::mt19937_64 rng(seed);
  std::vector<TrainingShard> shards;

  auto emit = [&](const SpecRecord &record, const std::string &placeholder, ScoreTask task,
                  std::vector<std::string> candidates, const std::string &gold,
                  std::optional<std::string> hint, std::optional<std::size_t> slot) {
    candidates = split.FilterCandidates(record.domain, std::move(candidates));
    auto pos = std::find_if(candidates.begin(), candidates.end(), [&](const std::string &c) {
      return IdentifierKey(c) == IdentifierKey(gold);
    });
    if (pos == candidates.end()) return;
    const std::size_t n = candidates.size();
    const std::size_t g = static_cast<std::size_t>(pos - candidates.begin());
    const std::size_t w = std::min(m, n);
    // Valid starts keep the gold label inside the window.
    const std::size_t lo = g + 1 >= w ? g + 1 - w : 0;
    const std::size_t hi = std::min(g, n - w);
    const std::size_t start = lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
    TrainingShard shard;
    shard.record_id = record.id;
    shard.domain = record.domain;
    shard.placeholder_id = placeholder;
    shard.task = task;
    shard.span_text = SpanFor(record, placeholder);
    shard.context_text = record.nl;
    shard.predicate_hint = std::move(hint);
    shard.slot = slot;
    shard.window.assign(candidates.begin() + static_cast<std::ptrdiff_t>(start),
                        candidates.begin() + static_cast<std::ptrdiff_t>(start + w));
    shard.gold_index = g - start;
    shards.push_back(std::move(shard));
  };

  for (const auto &record : records) {
    if (!split.IsTrainingRecord(record)) continue;
    auto sig = signatures.find(record.domain);
    if (sig == signatures.end()) continue;
    for (const auto &[placeholder, atom] : record.gold_grounding) {
      emit(record, placeholder, ScoreTask::kPredicate, sig->second.BuildPrefix(), atom.predicate,
           std::nullopt, std::nullopt);
      for (std::size_t r = 1; r <= atom.args.size(); ++r) {
        emit(record, placeholder, ScoreTask::kArgument, FilterArguments(sig->second, atom.predicate, r),
             atom.args[r - 1], atom.predicate, r);
      }
    }
  }
  return shards;
}

}  // namespace ginsign

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

// Acceptance harness: one PASS/FAIL line per criterion. Tolerances and sizes
// are pinned below; the exit status is nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ginsign/equivalence.h"
#include "ginsign/error.h"
#include "ginsign/grounding.h"
#include "ginsign/ltl.h"
#include "ginsign/pipeline.h"
#include "ginsign/scorer.h"
#include "ginsign/signature.h"
#include "support/oracle.h"
#include "support/paths.h"

namespace ginsign {
namespace {

using Clock = std::chrono::steady_clock;
using Strings = std::vector<std::string>;

constexpr double kPrefixSeconds = 1.0;
constexpr double kTournamentSeconds = 10.0;
constexpr double kSoundnessSeconds = 30.0;
constexpr double kEquivalenceSeconds = 120.0;
constexpr double kCeilingSeconds = 5.0;
constexpr int kTournamentInstances = 1000;
constexpr std::size_t kTournamentMaxN = 500;
constexpr int kSoundnessRuns = 10000;
constexpr std::size_t kEquivalenceBound = 6;
constexpr std::size_t kOracleDepth = 3;

struct Outcome {
  bool pass = true;
  std::string detail;
  void Fail(const std::string &why) {
    if (pass) detail = why;
    pass = false;
  }
};

// ---------------------------------------------------------------------------
// Prefix fidelity

struct ExpectedSignature {
  std::string name;
  Strings predicates;
  std::map<std::string, Strings> types;  // fully listed constant sets
  std::size_t constants;
};

Strings Seq(std::initializer_list<const char *> xs) { return Strings(xs.begin(), xs.end()); }

std::vector<ExpectedSignature> PublishedSignatures() {
  return {
      {"search_and_rescue",
       Seq({"avoid", "communicate", "deliver_aid", "get_help", "go_home", "photo", "record"}),
       {{"person", Seq({"injured_civilian", "injured_hostile", "injured_person", "injured_rescuer", "injured_victim",
                        "safe_civilian", "safe_hostile", "safe_person", "safe_rescuer", "safe_victim",
                        "unsafe_civilian", "unsafe_person", "unsafe_rescuer", "unsafe_victim"})},
        {"hazard",
         Seq({"debris", "fire_source", "flood", "gas_leak", "unstable_beam", "active_debris", "active_fire_source",
              "active_flood", "active_gas_leak", "active_unstable_beam", "inactive_debris", "inactive_fire_source",
              "inactive_flood", "inactive_gas_leak", "inactive_unstable_beam", "impending_debris",
              "impending_fire_source", "impending_flood", "impending_gas_leak", "impending_unstable_beam",
              "probable_debris", "probable_fire_source", "probable_flood", "probable_gas_leak",
              "probable_unstable_beam", "nearest_debris", "nearest_fire_source", "nearest_flood",
              "nearest_gas_leak", "nearest_unstable_beam"})}},
       44},
      {"traffic_light",
       Seq({"change", "record", "photo", "get_help"}),
       {{"light", Seq({"light_north", "light_south", "light_east", "light_west"})},
        {"color", Seq({"red", "yellow", "green"})},
        {"vehicle", Seq({"vehicle", "car", "bus", "truck", "motorcycle", "motorbike", "bicycle"})},
        {"person", Seq({"person", "pedestrian", "jaywalker", "cyclist"})}},
       175},
      {"warehouse",
       Seq({"deliver", "pickup", "search", "get_help", "idle"}),
       {{"item",
         Seq({"aeroplane", "apple", "backpack", "banana", "baseball_bat", "baseball_glove", "bear", "bed", "bench",
              "bicycle", "bird", "boat", "book", "bottle", "bowl", "broccoli", "bus", "cake", "car", "carrot", "cat",
              "cell_phone", "chair", "clock", "cow", "cup", "dining_table", "dog", "donut", "elephant",
              "fire_hydrant", "fork", "frisbee", "giraffe", "hair-drier", "handbag", "horse", "hot_dog", "keyboard",
              "kite", "knife", "laptop", "microwave", "motorbike", "mouse", "orange", "oven", "parking_meter",
              "person", "pizza", "potted_plant", "refrigerator", "remote", "sandwich", "scissors", "sheep", "sink",
              "skateboard", "skis", "snowboard", "sofa", "spoon", "sports_ball", "stop_sign", "suitcase",
              "surfboard", "teddy-bear", "tennis_racket", "tie", "toaster", "toilet", "toothbrush",
              "traffic_light", "train", "truck", "tv_monitor", "umbrella", "vase", "wine_glass", "zebra"})},
        {"location", Seq({"shelf", "loading_dock"})}},
       82},
  };
}

Outcome PrefixFidelity() {
  Outcome out;
  std::ostringstream counts;
  for (const auto &want : PublishedSignatures()) {
    Signature sig = testing::LoadBundled(want.name);
    if (sig.BuildPrefix() != want.predicates) out.Fail(want.name + ": predicate prefix differs");
    for (const auto &[type, constants] : want.types) {
      if (sig.BuildPrefix(type) != constants) out.Fail(want.name + ": " + type + " prefix differs");
    }
    std::size_t total = 0;
    for (const auto &t : sig.types()) total += sig.BuildPrefix(t.name).size();
    if (total != want.constants || sig.constants().size() != want.constants) {
      out.Fail(want.name + ": " + std::to_string(total) + " constants");
    }
    if (want.name == "traffic_light") {
      // Road names are only sketched by their endpoints.
      auto roads = sig.BuildPrefix("road");
      for (const char *r : {"east_1st_avenue", "east_1st_street", "west_10th_street"}) {
        if (std::find(roads.begin(), roads.end(), r) == roads.end()) out.Fail(std::string("missing road ") + r);
      }
    }
    counts << (counts.tellp() ? " " : "") << sig.predicates().size() << "/" << total;
  }
  if (out.pass) out.detail = "predicates/constants " + counts.str();
  return out;
}

// ---------------------------------------------------------------------------
// Tournament

class FixedScoreScorer final : public SpanScorer {
 public:
  explicit FixedScoreScorer(const std::unordered_map<std::string, double> &scores) : scores_(scores) {}
  ScoreResponse Score(const ScoreRequest &request) override {
    std::size_t best = 0;
    for (std::size_t i = 1; i < request.real_count(); ++i) {
      if (scores_.at(request.candidates[i]) > scores_.at(request.candidates[best])) best = i;
    }
    return {best, std::nullopt};
  }
  std::string id() const override { return "fixed"; }

 private:
  const std::unordered_map<std::string, double> &scores_;
};

std::size_t CeilLog(std::size_t n, std::size_t base) {
  std::size_t k = 0;
  for (std::size_t reach = 1; reach < n; reach *= base) ++k;
  return k;
}

Outcome Tournament() {
  Outcome out;
  std::mt19937_64 rng(2024);
  const std::size_t shard_sizes[] = {2, 5, 20};
  std::size_t max_rounds = 0;
  for (int trial = 0; trial < kTournamentInstances; ++trial) {
    std::size_t n = 1 + rng() % kTournamentMaxN;
    std::size_t m = shard_sizes[trial % 3];
    Strings labels(n);
    std::unordered_map<std::string, double> scores;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = "c" + std::to_string(i);
      scores[labels[i]] = u(rng);
    }
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (scores[labels[i]] > scores[labels[argmax]]) argmax = i;
    }
    FixedScoreScorer scorer(scores);
    auto r = TournamentSelect({"prop_1", "span", {}}, labels, scorer, m);
    if (r.winner != labels[argmax] || r.winner_index != argmax) {
      out.Fail("trial " + std::to_string(trial) + ": winner " + r.winner + " != " + labels[argmax]);
    }
    if (r.rounds > CeilLog(n, m) + 1) out.Fail("trial " + std::to_string(trial) + ": too many rounds");
    max_rounds = std::max(max_rounds, r.rounds);
  }
  if (out.pass) {
    out.detail = std::to_string(kTournamentInstances) + " instances, max rounds " + std::to_string(max_rounds);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Type soundness

struct RandomSignature {
  nlohmann::ordered_json doc;
  std::set<std::string> atoms;  // every well-typed atom, built from the generator's own model
};

RandomSignature MakeRandomSignature(std::mt19937_64 &rng) {
  std::size_t n_types = 1 + rng() % 4;
  std::vector<Strings> members(n_types);
  nlohmann::ordered_json types = nlohmann::ordered_json::object();
  std::size_t next_constant = 0;
  for (std::size_t t = 0; t < n_types; ++t) {
    std::size_t size = 1 + rng() % 30;
    for (std::size_t i = 0; i < size; ++i) members[t].push_back("k" + std::to_string(next_constant++));
    types["t" + std::to_string(t)] = members[t];
  }
  nlohmann::ordered_json predicates = nlohmann::ordered_json::object();
  std::set<std::string> atoms;
  std::size_t n_preds = 1 + rng() % 12;
  for (std::size_t p = 0; p < n_preds; ++p) {
    std::string name = "p" + std::to_string(p);
    std::vector<std::size_t> slots(rng() % 4);
    Strings arg_types;
    for (auto &s : slots) {
      s = rng() % n_types;
      arg_types.push_back("t" + std::to_string(s));
    }
    predicates[name] = arg_types;
    std::function<void(std::size_t, std::string)> expand = [&](std::size_t i, std::string acc) {
      if (i == slots.size()) {
        atoms.insert(slots.empty() ? name : name + "(" + acc + ")");
        return;
      }
      for (const auto &c : members[slots[i]]) expand(i + 1, acc.empty() ? c : acc + "," + c);
    };
    expand(0, "");
  }
  nlohmann::ordered_json doc;
  doc["name"] = "random";
  doc["types"] = types;
  doc["predicates"] = predicates;
  return {doc, atoms};
}

class RandomScorer final : public SpanScorer {
 public:
  explicit RandomScorer(std::uint64_t seed) : rng_(seed) {}
  ScoreResponse Score(const ScoreRequest &request) override { return {rng_() % request.real_count(), std::nullopt}; }
  std::string id() const override { return "random"; }

 private:
  std::mt19937_64 rng_;
};

Outcome TypeSoundness() {
  Outcome out;
  std::mt19937_64 rng(99);
  RandomScorer scorer(100);
  std::size_t ill_typed = 0;
  int runs = 0;
  while (runs < kSoundnessRuns) {
    RandomSignature rs = MakeRandomSignature(rng);
    Signature sig = Signature::FromJson(rs.doc);
    Grounder grounder(sig, scorer, {2 + rng() % 20});
    for (int i = 0; i < 50 && runs < kSoundnessRuns; ++i, ++runs) {
      GroundedAtom atom = grounder.Ground({"prop_1", "some span", {}}).atom();
      if (!rs.atoms.contains(atom.ToString()) || !sig.IsWellTyped(atom)) ++ill_typed;
    }
  }
  if (ill_typed) out.Fail(std::to_string(ill_typed) + " ill-typed atoms");
  else out.detail = std::to_string(runs) + " runs, 0 ill-typed atoms";
  return out;
}

// ---------------------------------------------------------------------------
// Budget

// Counts straight from the signature documents.
std::pair<std::size_t, std::size_t> EnumeratedBudget(const std::string &name) {
  std::ifstream in(testing::SignaturePath(name));
  auto doc = nlohmann::json::parse(in);
  std::map<std::string, std::size_t> sizes;
  for (auto &[type, constants] : doc["types"].items()) sizes[type] = constants.size();
  std::size_t flat = 0, widest = 0;
  for (auto &[pred, args] : doc["predicates"].items()) {
    std::size_t product = 1, sum = 0;
    for (const auto &t : args) {
      product *= sizes.at(t.get<std::string>());
      sum += sizes.at(t.get<std::string>());
    }
    flat += product;
    widest = std::max(widest, sum);
  }
  return {flat, doc["predicates"].size() + widest};
}

Outcome Budget() {
  Outcome out;
  std::ostringstream detail;
  for (const char *name : {"search_and_rescue", "traffic_light", "warehouse"}) {
    Signature sig = testing::LoadBundled(name);
    std::size_t flat = CandidateBudget(sig, BudgetMode::kFlat);
    std::size_t hier = CandidateBudget(sig, BudgetMode::kHierarchical);
    auto [want_flat, want_hier] = EnumeratedBudget(name);
    if (flat != want_flat || hier != want_hier) out.Fail(std::string(name) + ": disagrees with enumeration");
    if (flat != EnumerateGroundedAtoms(sig).size()) out.Fail(std::string(name) + ": flat != |atoms|");
    if (!(hier < flat)) out.Fail(std::string(name) + ": hierarchical >= flat");
    if (std::string(name) == "warehouse" && (flat != 322 || hier != 87)) {
      out.Fail("warehouse flat=" + std::to_string(flat) + " hierarchical=" + std::to_string(hier));
    }
    detail << (detail.tellp() ? ", " : "") << name << " " << flat << "/" << hier;
  }
  if (out.pass) out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// Equivalence

// Exhaustive-unrolling oracle. Truth values are tabulated bottom-up for every
// position of every lasso with |prefix| + |loop| <= k; a lasso of length n
// has n distinct positions, and position n wraps to the loop start. At most n
// successor steps reach every position, which bounds the F, G and U scans.
class UnrollingOracle {
 public:
  using Row = std::vector<std::uint64_t>;

  UnrollingOracle(const Strings &atoms, std::size_t k) : traces_(testing::AllTraces(atoms, k)) {
    for (const auto &t : traces_) {
      offsets_.push_back(positions_);
      positions_ += t.length();
    }
  }

  // Truth values at position 0 of every lasso, packed.
  Row Table(const Formula &f) {
    std::vector<char> all = Eval(f);
    Row row((traces_.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < traces_.size(); ++i) {
      if (all[offsets_[i]]) row[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return row;
  }

  bool At(const Row &row, std::size_t trace) const { return (row[trace / 64] >> (trace % 64)) & 1; }
  const std::vector<Trace> &traces() const { return traces_; }

 private:
  // Subformula tables are memoized; the formula itself is not.
  const std::vector<char> &Child(const Formula &f) {
    std::string key = PrintLtl(f);
    auto it = memo_.find(key);
    if (it == memo_.end()) it = memo_.emplace(key, Eval(f)).first;
    return it->second;
  }

  std::vector<char> Eval(const Formula &f) {
    std::vector<char> v(positions_);
    const bool unary = f.op() == LtlOp::kNot || f.op() == LtlOp::kNext || f.op() == LtlOp::kEventually ||
                       f.op() == LtlOp::kAlways;
    const std::vector<char> *a = nullptr, *b = nullptr;
    if (unary) a = &Child(f.operand());
    else if (f.op() != LtlOp::kAtom) {
      a = &Child(f.lhs());
      b = &Child(f.rhs());
    }
    for (std::size_t ti = 0; ti < traces_.size(); ++ti) {
      const Trace &t = traces_[ti];
      const std::size_t n = t.length(), base = offsets_[ti];
      auto succ = [&](std::size_t i) { return i + 1 < n ? i + 1 : t.prefix.size(); };
      auto A = [&](std::size_t i) { return (*a)[base + i] != 0; };
      auto B = [&](std::size_t i) { return (*b)[base + i] != 0; };
      for (std::size_t i = 0; i < n; ++i) {
        bool value = false;
        switch (f.op()) {
          case LtlOp::kAtom: value = testing::Letter(t, i).contains(f.label()); break;
          case LtlOp::kNot: value = !A(i); break;
          case LtlOp::kNext: value = A(succ(i)); break;
          case LtlOp::kAnd: value = A(i) && B(i); break;
          case LtlOp::kOr: value = A(i) || B(i); break;
          case LtlOp::kImplies: value = !A(i) || B(i); break;
          case LtlOp::kEventually:
            value = false;
            for (std::size_t j = i, s = 0; s < n && !value; ++s, j = succ(j)) value = A(j);
            break;
          case LtlOp::kAlways:
            value = true;
            for (std::size_t j = i, s = 0; s < n && value; ++s, j = succ(j)) value = A(j);
            break;
          case LtlOp::kUntil:
            for (std::size_t j = i, s = 0; s < n; ++s, j = succ(j)) {
              if (B(j)) {
                value = true;
                break;
              }
              if (!A(j)) break;
            }
            break;
        }
        v[base + i] = value;
      }
    }
    return v;
  }

  std::vector<Trace> traces_;
  std::vector<std::size_t> offsets_;
  std::size_t positions_ = 0;
  std::unordered_map<std::string, std::vector<char>> memo_;
};

// Every formula over `atoms` whose syntax tree has height <= depth.
std::vector<Formula> FormulasOfDepth(const Strings &atoms, std::size_t depth) {
  std::vector<Formula> level;
  for (const auto &a : atoms) level.push_back(Formula::Atom(a));
  for (std::size_t d = 2; d <= depth; ++d) {
    std::vector<Formula> next = level;
    for (const auto &sub : level) {
      for (LtlOp op : testing::kUnaryOps) next.push_back(Formula::Unary(op, sub));
    }
    for (const auto &l : level) {
      for (const auto &r : level) {
        for (LtlOp op : testing::kBinaryOps) next.push_back(Formula::Binary(op, l, r));
      }
    }
    level = std::move(next);
  }
  return level;
}

Outcome Equivalence() {
  Outcome out;
  const Strings atoms{"p", "q"};
  UnrollingOracle oracle(atoms, kEquivalenceBound);

  // Oracle rows for the exhaustive small set followed by every depth-3 formula.
  auto small = testing::AllFormulas(atoms, 3);
  auto deep = FormulasOfDepth(atoms, kOracleDepth);
  std::vector<Formula> formulas = small;
  formulas.insert(formulas.end(), deep.begin(), deep.end());
  std::vector<UnrollingOracle::Row> rows;
  for (const auto &f : formulas) rows.push_back(oracle.Table(f));

  // The tabulating oracle must itself agree with direct evaluation.
  std::mt19937_64 rng(5);
  for (std::size_t i = 0; i < formulas.size(); i += 7) {
    for (int s = 0; s < 50; ++s) {
      std::size_t t = rng() % oracle.traces().size();
      if (oracle.At(rows[i], t) != testing::NaiveEval(formulas[i], oracle.traces()[t], 0)) {
        out.Fail("oracle self-check on " + PrintLtl(formulas[i]));
      }
    }
  }

  // Every unordered pair of depth-3 formulas, plus the small set both ways.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < small.size(); ++a) {
    for (std::size_t b = 0; b < small.size(); ++b) pairs.emplace_back(a, b);
  }
  for (std::size_t a = small.size(); a < formulas.size(); ++a) {
    for (std::size_t b = a; b < formulas.size(); ++b) pairs.emplace_back(a, b);
  }

  std::size_t equivalent = 0, disagreements = 0;
  for (const auto &[i, j] : pairs) {
    const Formula &a = formulas[i], &b = formulas[j];
    bool expected = rows[i] == rows[j];
    EquivalenceVerdict v = CheckEquivalence(a, b, kEquivalenceBound);
    if (v.equivalent != expected) {
      if (!disagreements++) out.Fail("disagrees on " + PrintLtl(a) + " vs " + PrintLtl(b));
      continue;
    }
    if (!v.equivalent && (!v.witness || EvalOnTrace(a, *v.witness) == EvalOnTrace(b, *v.witness) ||
                          testing::NaiveEval(a, *v.witness, 0) == testing::NaiveEval(b, *v.witness, 0))) {
      out.Fail("witness does not separate " + PrintLtl(a) + " vs " + PrintLtl(b));
    }
    equivalent += expected;
  }

  const std::pair<const char *, const char *> laws[] = {{"p U q", "q | (p & X (p U q))"}, {"F F p", "F p"}};
  for (const auto &[l, r] : laws) {
    if (!CheckEquivalence(ParseLtl(l), ParseLtl(r), kEquivalenceBound).equivalent) {
      out.Fail(std::string("law fails: ") + l + " == " + r);
    }
  }
  Formula fp = ParseLtl("F p"), gp = ParseLtl("G p");
  auto refuted = CheckEquivalence(fp, gp, kEquivalenceBound);
  if (refuted.equivalent || !refuted.witness) {
    out.Fail("F p vs G p not refuted");
  } else {
    // Replay the witness after a JSON round trip.
    Trace replay = Trace::FromJson(nlohmann::json::parse(refuted.witness->ToJson().dump()));
    if (EvalOnTrace(fp, replay) == EvalOnTrace(gp, replay)) out.Fail("F p vs G p witness does not replay");
  }
  if (out.pass) {
    out.detail = std::to_string(pairs.size()) + " pairs (" + std::to_string(equivalent) + " equivalent) over " +
                 std::to_string(formulas.size()) + " formulas, k=" + std::to_string(kEquivalenceBound);
  }
  return out;
}

// ---------------------------------------------------------------------------
// GLE and the oracle ceiling

std::vector<SpecRecord> Corpus(bool with_translator_errors) {
  auto sigs = testing::BundledSignatures();
  auto records = IngestDataset(testing::DataDir() / "corpus" / "fixture.jsonl", sigs);
  if (with_translator_errors) {
    auto extra = IngestDataset(testing::TestDataDir() / "translator_errors.jsonl", sigs);
    records.insert(records.end(), extra.begin(), extra.end());
  }
  return records;
}

Outcome Gle() {
  Outcome out;
  auto records = Corpus(true);
  auto sigs = testing::BundledSignatures();
  std::size_t checked = 0;
  std::vector<std::unique_ptr<ScorerProvider>> providers;
  providers.push_back(GoldOracleScorer());
  providers.push_back(SharedScorer(std::make_shared<LexicalScorer>()));
  providers.push_back(SharedScorer(std::make_shared<FirstCandidateScorer>()));
  for (auto &provider : providers) {
    auto report = RunEval(records, sigs, *provider, SplitConfig{}, EvalConfig{});
    for (const auto &r : report.records) {
      ++checked;
      if (r.gle && !r.lifted_equivalent) out.Fail(provider->id() + " " + r.id + ": gle without LE");
    }
  }
  for (const auto &r : records) {
    Formula pred = ParseLtl(r.predicted_lifted_ltl.value_or(r.lifted_ltl));
    Formula gold = ParseLtl(r.lifted_ltl);
    auto v = CheckGle(pred, r.gold_grounding, gold, r.gold_grounding);
    ++checked;
    if (v.gle && !v.lifted_equivalent) out.Fail(r.id + ": gle without LE on gold map");
  }

  Formula lifted = ParseLtl("F (prop_1 & F prop_2)");
  GroundingMap gold{{"prop_1", GroundedAtom{"search", {"backpack"}}},
                    {"prop_2", GroundedAtom{"deliver", {"backpack", "loading_dock"}}}};
  GroundingMap perturbed = gold;
  perturbed["prop_1"].args[0] = "suitcase";
  if (!CheckGle(lifted, gold, lifted, gold).gle) out.Fail("backpack example: gold map not GLE");
  if (CheckGle(lifted, perturbed, lifted, gold).gle) out.Fail("backpack example: perturbed map still GLE");
  if (out.pass) out.detail = std::to_string(checked) + " verdicts, worked example true/false";
  return out;
}

Outcome OracleCeiling() {
  Outcome out;
  auto oracle = GoldOracleScorer();
  auto report = RunEval(Corpus(false), testing::BundledSignatures(), *oracle, SplitConfig{}, EvalConfig{});
  const DomainSummary &all = report.domains.back();
  if (all.domain != "all") out.Fail("missing overall row");
  for (const auto &d : report.domains) {
    if (d.scores.predicate.f1() != 1.0 || d.scores.argument.f1() != 1.0 || d.gle_rate != 1.0 || d.errors) {
      out.Fail(d.domain + ": below ceiling");
    }
  }
  if (out.pass) {
    out.detail = std::to_string(all.records) + " records, " + std::to_string(all.aps) +
                 " APs, predicate/argument F1 and GLE 100%";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Determinism

std::string Capture(const std::string &cmd, int *status) {
  std::string text;
  FILE *pipe = popen(cmd.c_str(), "r");
  if (!pipe) return text;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) text.append(buf.data(), n);
  int raw = pclose(pipe);
  *status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return text;
}

Outcome Determinism() {
  Outcome out;
  const std::string base = std::string("'") + GINSIGN_CLI_PATH + "' eval --sig '" +
                           (testing::DataDir() / "signatures").string() + "' --data '" +
                           (testing::DataDir() / "corpus" / "fixture.jsonl").string() + "' --scorer lexical";
  std::string reference;
  std::size_t runs = 0;
  for (const char *format : {"json", "table"}) {
    std::string first;
    for (int workers : {1, 1, 2, 8, 32}) {
      int status = 0;
      std::string report = Capture(base + " --format " + format + " --workers " + std::to_string(workers), &status);
      ++runs;
      if (status != 0 || report.empty()) {
        out.Fail(std::string("eval exited with ") + std::to_string(status));
        continue;
      }
      if (first.empty()) first = report;
      else if (report != first) out.Fail(std::string(format) + " report differs at workers=" + std::to_string(workers));
    }
  }
  if (out.pass) out.detail = std::to_string(runs) + " runs byte-identical (workers 1, 1, 2, 8, 32)";
  return out;
}

struct Criterion {
  const char *name;
  std::function<Outcome()> run;
  double limit_seconds;  // 0 = untimed
};

}  // namespace
}  // namespace ginsign

int main() {
  using namespace ginsign;
  const Criterion criteria[] = {
      {"prefix-fidelity", PrefixFidelity, kPrefixSeconds},
      {"tournament", Tournament, kTournamentSeconds},
      {"type-soundness", TypeSoundness, kSoundnessSeconds},
      {"budget", Budget, 0},
      {"equivalence-oracle", Equivalence, kEquivalenceSeconds},
      {"gle", Gle, 0},
      {"oracle-ceiling", OracleCeiling, kCeilingSeconds},
      {"determinism", Determinism, 0},
  };
  int failures = 0, index = 0;
  for (const auto &c : criteria) {
    ++index;
    auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.Fail(std::string("exception: ") + e.what());
    }
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.limit_seconds > 0 && seconds >= c.limit_seconds) {
      o.Fail("took " + std::to_string(seconds) + " s, limit " + std::to_string(c.limit_seconds) + " s");
    }
    char timing[64];
    std::snprintf(timing, sizeof(timing), "%.3f s", seconds);
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << index << "] " << c.name << ": " << o.detail << " ("
              << timing << ")" << std::endl;
    failures += !o.pass;
  }
  return failures ? 1 : 0;
}

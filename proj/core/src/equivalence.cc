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

#include "ginsign/equivalence.h"

#include <algorithm>
#include <functional>
#include <iterator>
#include <map>
#include <unordered_map>

namespace ginsign {
namespace {

// Bit b of the lane number, for the six low trace-index bits.
constexpr std::uint64_t kLanePattern[6] = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
};

struct Instr {
  LtlOp op;
  int lhs = -1;
  int rhs = -1;
  int atom = -1;
};

// Post-order instruction list shared by both formulas of a query.
class Program {
 public:
  explicit Program(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {}

  int Compile(const Formula &f) {
    if (auto it = index_.find(f.id()); it != index_.end()) return it->second;
    Instr ins{f.op()};
    if (f.op() == LtlOp::kAtom) {
      ins.atom = static_cast<int>(std::lower_bound(atoms_.begin(), atoms_.end(), f.label()) - atoms_.begin());
    } else {
      ins.lhs = Compile(f.lhs());
      if (IsBinary(f.op())) ins.rhs = Compile(f.rhs());
    }
    code_.push_back(ins);
    int id = static_cast<int>(code_.size()) - 1;
    index_.emplace(f.id(), id);
    return id;
  }

  const std::vector<Instr> &code() const { return code_; }
  std::size_t atom_count() const { return atoms_.size(); }
  const std::vector<std::string> &atoms() const { return atoms_; }

 private:
  std::vector<std::string> atoms_;
  std::vector<Instr> code_;
  std::unordered_map<const void *, int> index_;
};

// Evaluates the program on 64 traces of one lasso shape at once; lane l of
// every word belongs to trace l of the batch.
class BitEvaluator {
 public:
  BitEvaluator(const Program &program, std::size_t n, std::size_t loop_start)
      : program_(program), n_(n), loop_start_(loop_start), values_(program.code().size() * n) {}

  // `bits[pos * atoms + j]` holds atom j at position pos for all lanes.
  void Run(const std::vector<std::uint64_t> &bits) {
    const std::size_t a = program_.atom_count();
    const auto &code = program_.code();
    for (std::size_t k = 0; k < code.size(); ++k) {
      const Instr &ins = code[k];
      std::uint64_t *out = &values_[k * n_];
      const std::uint64_t *x = ins.lhs >= 0 ? &values_[ins.lhs * n_] : nullptr;
      const std::uint64_t *y = ins.rhs >= 0 ? &values_[ins.rhs * n_] : nullptr;
      switch (ins.op) {
        case LtlOp::kAtom:
          for (std::size_t i = 0; i < n_; ++i) out[i] = bits[i * a + ins.atom];
          break;
        case LtlOp::kNot:
          for (std::size_t i = 0; i < n_; ++i) out[i] = ~x[i];
          break;
        case LtlOp::kAnd:
          for (std::size_t i = 0; i < n_; ++i) out[i] = x[i] & y[i];
          break;
        case LtlOp::kOr:
          for (std::size_t i = 0; i < n_; ++i) out[i] = x[i] | y[i];
          break;
        case LtlOp::kImplies:
          for (std::size_t i = 0; i < n_; ++i) out[i] = ~x[i] | y[i];
          break;
        case LtlOp::kNext:
          for (std::size_t i = 0; i < n_; ++i) out[i] = x[Succ(i)];
          break;
        case LtlOp::kEventually:
          LeastFixpoint(x, nullptr, out);
          break;
        case LtlOp::kUntil:
          LeastFixpoint(y, x, out);
          break;
        case LtlOp::kAlways: {
          std::fill(out, out + n_, ~0ull);
          bool changed = true;
          while (changed) {
            changed = false;
            for (std::size_t i = n_; i-- > 0;) {
              std::uint64_t v = x[i] & out[Succ(i)];
              changed = changed || v != out[i];
              out[i] = v;
            }
          }
          break;
        }
      }
    }
  }

  std::uint64_t At(int node, std::size_t position) const { return values_[node * n_ + position]; }

 private:
  std::size_t Succ(std::size_t i) const { return i + 1 < n_ ? i + 1 : loop_start_; }

  // v = goal | (keep & X v), keep = all lanes when null.
  void LeastFixpoint(const std::uint64_t *goal, const std::uint64_t *keep, std::uint64_t *out) const {
    std::fill(out, out + n_, 0ull);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = n_; i-- > 0;) {
        std::uint64_t k = keep != nullptr ? keep[i] : ~0ull;
        std::uint64_t v = goal[i] | (k & out[Succ(i)]);
        changed = changed || v != out[i];
        out[i] = v;
      }
    }
  }

  const Program &program_;
  std::size_t n_;
  std::size_t loop_start_;
  std::vector<std::uint64_t> values_;
};

Trace DecodeTrace(const std::vector<std::string> &atoms, std::size_t n, std::size_t loop_start,
                  std::uint64_t index) {
  Trace trace;
  const std::size_t a = atoms.size();
  for (std::size_t i = 0; i < n; ++i) {
    Observation obs;
    for (std::size_t j = 0; j < a; ++j) {
      if ((index >> (i * a + j)) & 1u) obs.insert(atoms[j]);
    }
    (i < loop_start ? trace.prefix : trace.loop).push_back(std::move(obs));
  }
  return trace;
}

int Lowest(std::uint64_t word) { return __builtin_ctzll(word); }

// Renames placeholders so that equal groundings share a name: every gold
// placeholder maps to the first gold placeholder with the same atom, every
// predicted placeholder to the gold placeholder with its atom. Unmatched
// predicted placeholders keep their own name unless the name is taken by
// the gold side, in which case they get a fresh one.
std::pair<Formula, Formula> AlignPlaceholders(const Formula &pred, const GroundingMap &pred_map,
                                              const Formula &gold, const GroundingMap &gold_map) {
  std::map<std::string, std::string> atom_owner;
  for (const auto &label : ExtractAtoms(gold)) {
    if (!IsPlaceholder(label)) continue;
    auto it = gold_map.find(label);
    if (it == gold_map.end()) throw Error(ErrorKind::kMissingMapping, "gold map lacks '" + label + "'");
    atom_owner.emplace(it->second.ToString(), label);
  }
  std::set<std::string> claimed;
  for (const auto &[atom, owner] : atom_owner) claimed.insert(owner);

  std::map<std::string, std::string> gold_rename;
  for (const auto &label : ExtractAtoms(gold)) {
    if (IsPlaceholder(label)) gold_rename[label] = atom_owner.at(gold_map.at(label).ToString());
  }
  std::map<std::string, std::string> pred_rename;
  std::size_t fresh = 0;
  for (const auto &label : ExtractAtoms(pred)) {
    if (!IsPlaceholder(label)) continue;
    auto it = pred_map.find(label);
    if (it == pred_map.end()) throw Error(ErrorKind::kMissingMapping, "predicted map lacks '" + label + "'");
    if (auto owner = atom_owner.find(it->second.ToString()); owner != atom_owner.end()) {
      pred_rename[label] = owner->second;
    } else if (!claimed.contains(label)) {
      pred_rename[label] = label;
    } else {
      std::string name;
      do {
        name = "prop_" + std::to_string(100000 + fresh++);
      } while (claimed.contains(name));
      pred_rename[label] = name;
    }
  }
  auto rename = [](const std::map<std::string, std::string> &table) {
    return [&table](const std::string &label) {
      auto it = table.find(label);
      return it == table.end() ? label : it->second;
    };
  };
  return {MapAtoms(pred, rename(pred_rename)), MapAtoms(gold, rename(gold_rename))};
}

bool SameSymbol(const std::string &a, const std::string &b) { return IdentifierKey(a) == IdentifierKey(b); }

}  // namespace

EquivalenceVerdict CheckEquivalence(const Formula &f1, const Formula &f2, std::size_t k,
                                    const EquivalenceOptions &options) {
  if (k == 0) throw Error(ErrorKind::kBoundTooSmall, "bound k must be at least 1");
  AtomKind k1 = f1.atom_kind();
  AtomKind k2 = f2.atom_kind();
  if (k1 == AtomKind::kNone || k2 == AtomKind::kNone || k1 != k2) {
    throw Error(ErrorKind::kMixedAtomKinds, "formulas must both be lifted or both be grounded");
  }
  std::set<std::string> joint = ExtractAtoms(f1);
  joint.merge(ExtractAtoms(f2));
  if (joint.size() > options.max_atoms) {
    throw Error(ErrorKind::kAlphabetTooLarge, std::to_string(joint.size()) + " atoms exceed the cap of " +
                                                  std::to_string(options.max_atoms));
  }
  const std::size_t a = joint.size();
  if (a * k > options.max_trace_bits || a * k >= 64) {
    throw Error(ErrorKind::kSizeLimit, "2^" + std::to_string(a * k) +
                                           " traces per shape exceed the enumeration limit");
  }

  Program program(std::vector<std::string>(joint.begin(), joint.end()));
  const int root1 = program.Compile(f1);
  const int root2 = program.Compile(f2);

  EquivalenceVerdict verdict;
  verdict.bound_used = k;
  verdict.bound_too_small = k < 2 * (f1.size() + f2.size());

  std::vector<std::uint64_t> bits;
  for (std::size_t n = 1; n <= k; ++n) {
    const std::size_t width = a * n;
    bits.assign(width, 0);
    const std::uint64_t traces = 1ull << width;
    const std::uint64_t lanes = std::min<std::uint64_t>(64, traces);
    const std::uint64_t lane_mask = lanes == 64 ? ~0ull : (1ull << lanes) - 1;
    const std::uint64_t batches = traces / lanes;
    for (std::size_t loop_start = 0; loop_start < n; ++loop_start) {
      BitEvaluator eval(program, n, loop_start);
      for (std::uint64_t batch = 0; batch < batches; ++batch) {
        for (std::size_t b = 0; b < width; ++b) {
          bits[b] = b < 6 ? kLanePattern[b] : (((batch >> (b - 6)) & 1u) ? ~0ull : 0ull);
        }
        eval.Run(bits);
        verdict.traces_checked += lanes;
        std::uint64_t diff = (eval.At(root1, 0) ^ eval.At(root2, 0)) & lane_mask;
        if (diff != 0) {
          std::uint64_t index = batch * 64 + static_cast<std::uint64_t>(Lowest(diff));
          verdict.equivalent = false;
          verdict.witness = DecodeTrace(program.atoms(), n, loop_start, index);
          return verdict;
        }
      }
    }
  }
  verdict.equivalent = true;
  return verdict;
}

GleVerdict CheckGle(const Formula &pred_lifted, const GroundingMap &pred_map,
                    const Formula &gold_lifted, const GroundingMap &gold_map, std::size_t k,
                    const EquivalenceOptions &options) {
  GleVerdict verdict;
  auto pred_atoms = ExtractAtoms(ApplyGrounding(pred_lifted, pred_map));
  auto gold_atoms = ExtractAtoms(ApplyGrounding(gold_lifted, gold_map));
  std::set_symmetric_difference(pred_atoms.begin(), pred_atoms.end(), gold_atoms.begin(),
                                gold_atoms.end(), std::inserter(verdict.ap_diff, verdict.ap_diff.end()));
  verdict.grounding_match = verdict.ap_diff.empty();

  auto [pred_aligned, gold_aligned] = AlignPlaceholders(pred_lifted, pred_map, gold_lifted, gold_map);
  verdict.equivalence = CheckEquivalence(pred_aligned, gold_aligned, k, options);
  verdict.lifted_equivalent = verdict.equivalence.equivalent;
  verdict.gle = verdict.lifted_equivalent && verdict.grounding_match;
  return verdict;
}

ModelCheckResult ModelCheck(const KripkeStructure &model, const Formula &f, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::kBoundTooSmall, "bound k must be at least 1");
  model.Validate();
  for (const auto &atom : ExtractAtoms(f)) {
    if (!model.alphabet.contains(atom)) {
      throw Error(ErrorKind::kUngroundedAtom, "atom '" + atom + "' is not in the model's alphabet");
    }
  }

  ModelCheckResult result;
  result.bound_used = k;
  std::vector<std::size_t> path;

  auto check_lasso = [&](std::size_t loop_start) {
    Trace trace;
    for (std::size_t i = 0; i < path.size(); ++i) {
      (i < loop_start ? trace.prefix : trace.loop).push_back(model.labels[path[i]]);
    }
    ++result.lassos_checked;
    if (EvalOnTrace(f, trace, 0)) return true;
    result.holds = false;
    result.counterexample = std::move(trace);
    result.counterexample_loop_start = loop_start;
    for (std::size_t s : path) result.counterexample_states.push_back(model.states[s]);
    return false;
  };

  // Depth-first over simple and non-simple paths alike; every back edge from
  // the last state to an earlier occurrence closes a lasso.
  std::function<bool()> extend = [&]() {
    for (std::size_t next : model.successors[path.back()]) {
      for (std::size_t j = 0; j < path.size(); ++j) {
        if (path[j] == next && !check_lasso(j)) return false;
      }
    }
    if (path.size() == k) return true;
    for (std::size_t next : model.successors[path.back()]) {
      path.push_back(next);
      bool ok = extend();
      path.pop_back();
      if (!ok) return false;
    }
    return true;
  };

  for (std::size_t s : model.initial) {
    path.assign(1, s);
    if (!extend()) break;
  }
  return result;
}

double F1Counts::precision() const {
  std::size_t predicted = true_positives + false_positives;
  if (predicted == 0) return false_negatives == 0 ? 1.0 : 0.0;
  return static_cast<double>(true_positives) / static_cast<double>(predicted);
}

double F1Counts::recall() const {
  std::size_t actual = true_positives + false_negatives;
  if (actual == 0) return false_positives == 0 ? 1.0 : 0.0;
  return static_cast<double>(true_positives) / static_cast<double>(actual);
}

double F1Counts::f1() const {
  double p = precision();
  double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

F1Counts &F1Counts::operator+=(const F1Counts &other) {
  true_positives += other.true_positives;
  false_positives += other.false_positives;
  false_negatives += other.false_negatives;
  return *this;
}

ApF1 &ApF1::operator+=(const ApF1 &other) {
  atom += other.atom;
  predicate += other.predicate;
  argument += other.argument;
  return *this;
}

ApF1 ComputeApF1(std::span<const GroundingDecision> predictions, const GroundingMap &gold) {
  std::map<std::string, const GroundingDecision *> by_id;
  for (const auto &d : predictions) {
    if (!gold.contains(d.placeholder_id)) {
      throw Error(ErrorKind::kAlignmentMismatch, "prediction for '" + d.placeholder_id + "' has no gold atom");
    }
    if (!by_id.emplace(d.placeholder_id, &d).second) {
      throw Error(ErrorKind::kAlignmentMismatch, "duplicate prediction for '" + d.placeholder_id + "'");
    }
  }

  ApF1 score;
  for (const auto &[id, expected] : gold) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      ++score.atom.false_negatives;
      ++score.predicate.false_negatives;
      score.argument.false_negatives += expected.args.size();
      continue;
    }
    const GroundingDecision &d = *it->second;
    std::size_t matching_args = 0;
    for (std::size_t r = 0; r < std::min(d.args.size(), expected.args.size()); ++r) {
      matching_args += SameSymbol(d.args[r], expected.args[r]);
    }
    bool predicate_ok = SameSymbol(d.predicate, expected.predicate);
    bool atom_ok = predicate_ok && d.args.size() == expected.args.size() &&
                   matching_args == expected.args.size();
    auto tally = [](F1Counts &c, bool ok) {
      if (ok) {
        ++c.true_positives;
      } else {
        ++c.false_positives;
        ++c.false_negatives;
      }
    };
    tally(score.atom, atom_ok);
    tally(score.predicate, predicate_ok);
    score.argument.true_positives += matching_args;
    score.argument.false_positives += d.args.size() - matching_args;
    score.argument.false_negatives += expected.args.size() - matching_args;
  }
  return score;
}

}  // namespace ginsign

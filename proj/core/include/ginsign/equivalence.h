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

#ifndef GINSIGN_EQUIVALENCE_H_
#define GINSIGN_EQUIVALENCE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ginsign/grounding.h"
#include "ginsign/ltl.h"
#include "ginsign/trace.h"

namespace ginsign {

inline constexpr std::size_t kDefaultBound = 8;
inline constexpr std::size_t kMaxEquivalenceAtoms = 6;

struct EquivalenceOptions {
  std::size_t max_atoms = kMaxEquivalenceAtoms;
  // Refuse to enumerate shapes with more than 2^max_trace_bits traces.
  std::size_t max_trace_bits = 36;
};

struct EquivalenceVerdict {
  bool equivalent = false;
  // A trace satisfying exactly one of the two formulas, when not equivalent.
  std::optional<Trace> witness;
  std::size_t bound_used = 0;
  // Set when k < 2 * (|f1| + |f2|); the verdict is then weaker than usual.
  bool bound_too_small = false;
  std::uint64_t traces_checked = 0;
};

// Decides whether f1 and f2 agree on every ultimately periodic trace with
// |prefix| + |loop| <= k over the joint atom alphabet. Refutations are exact;
// "equivalent" means equivalent up to k. Shorter traces are tried first, so
// the witness is a shortest one.
// Throws AlphabetTooLarge, BoundTooSmall (k == 0), MixedAtomKinds, SizeLimit.
EquivalenceVerdict CheckEquivalence(const Formula &f1, const Formula &f2,
                                    std::size_t k = kDefaultBound,
                                    const EquivalenceOptions &options = {});

struct GleVerdict {
  bool lifted_equivalent = false;
  bool grounding_match = false;
  bool gle = false;
  // Symmetric difference of the predicted and gold grounded atom sets.
  std::set<std::string> ap_diff;
  EquivalenceVerdict equivalence;
};

// Grounded logical equivalence. Predicted placeholders are aligned with gold
// placeholders that ground to the same atom; lifted equivalence is checked on
// the aligned lifted formulas, and the grounded atom sets must be equal.
// Throws MissingMapping if either map is not total over its formula.
GleVerdict CheckGle(const Formula &pred_lifted, const GroundingMap &pred_map,
                    const Formula &gold_lifted, const GroundingMap &gold_map,
                    std::size_t k = kDefaultBound, const EquivalenceOptions &options = {});

struct ModelCheckResult {
  bool holds = true;
  // Violating lasso as observations, plus the state path it came from.
  std::optional<Trace> counterexample;
  std::vector<std::string> counterexample_states;
  std::size_t counterexample_loop_start = 0;
  std::size_t bound_used = 0;
  // Always true: only lassos of length <= k were examined.
  bool bounded = true;
  std::uint64_t lassos_checked = 0;
};

// Checks `f` on every lasso-shaped path of `model` with at most k states,
// starting from an initial state. Throws UngroundedAtom when `f` mentions an
// atom outside the model's alphabet and BoundTooSmall when k == 0.
ModelCheckResult ModelCheck(const KripkeStructure &model, const Formula &f, std::size_t k);

struct F1Counts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  double precision() const;
  double recall() const;
  double f1() const;
  F1Counts &operator+=(const F1Counts &other);
};

struct ApF1 {
  F1Counts atom;
  F1Counts predicate;
  F1Counts argument;

  ApF1 &operator+=(const ApF1 &other);
};

// Micro-averaged scores over AP slots, aligned by placeholder id. A missing
// prediction is a false negative; a wrong one is both a false positive and a
// false negative. Argument counts compare slots positionally. Throws
// AlignmentMismatch for predictions without gold or duplicated ids.
ApF1 ComputeApF1(std::span<const GroundingDecision> predictions, const GroundingMap &gold);

}  // namespace ginsign

#endif  // GINSIGN_EQUIVALENCE_H_

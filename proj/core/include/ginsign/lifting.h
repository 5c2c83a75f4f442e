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

#ifndef GINSIGN_LIFTING_H_
#define GINSIGN_LIFTING_H_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ginsign/signature.h"

namespace ginsign {

struct LiftedSpan {
  std::string placeholder_id;
  std::string text;
  // Byte offsets into the input sentence.
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct LiftResult {
  std::string lifted_nl;
  std::vector<LiftedSpan> spans;
};

// Deterministic gazetteer lifter. Phrases come from predicate and constant
// names (split on `_`, `-` and camel case) plus a synonym table mapping a
// phrase to a symbol. Matching is longest-first and non-overlapping. A
// predicate match opens an AP span that runs to the next clause boundary
// (punctuation or a connective such as "and", "then", "until") or the next
// predicate match; a constant match outside such a span forms its own AP.
// Spans are numbered prop_1..prop_k from left to right.
class TemplateLifter {
 public:
  // Synonym targets must name a predicate or constant of `sig`.
  explicit TemplateLifter(const Signature &sig, const std::map<std::string, std::string> &synonyms = {});

  LiftResult Lift(std::string_view nl) const;

 private:
  enum class Kind { kPredicate, kConstant };
  struct Entry {
    Kind kind;
    std::string symbol;
  };

  std::map<std::vector<std::string>, Entry> phrases_;
  std::size_t longest_ = 0;
};

// Rule-based lifted translation for the CLI stub. Cue words before a
// placeholder wrap it ("eventually" F, "always" G, "never" G !, "next" X);
// words between placeholders combine them ("until" U, "or" |, "and" &,
// "then"/"after that"/"followed by" sequencing as F (a & F b)). A sentence
// whose first placeholder has no temporal cue is read as "eventually".
// Returns the formula in canonical text form.
std::string TranslateTemplate(std::string_view lifted_nl);

}  // namespace ginsign

#endif  // GINSIGN_LIFTING_H_

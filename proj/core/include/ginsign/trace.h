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

#ifndef GINSIGN_TRACE_H_
#define GINSIGN_TRACE_H_

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ginsign/ltl.h"

namespace ginsign {

// Atom labels that hold at one step.
using Observation = std::set<std::string>;

// Ultimately periodic word prefix . loop^omega. The loop is never empty.
struct Trace {
  std::vector<Observation> prefix;
  std::vector<Observation> loop;

  // Number of distinct positions of the finite quotient.
  std::size_t length() const { return prefix.size() + loop.size(); }
  // Maps any position of the infinite word onto the quotient.
  std::size_t Normalize(std::size_t position) const;
  const Observation &At(std::size_t position) const;

  // {"prefix": [[labels...]...], "loop": [[labels...]...]}
  static Trace FromJson(const nlohmann::json &doc);
  static Trace Load(const std::filesystem::path &path);
  nlohmann::json ToJson() const;

  bool operator==(const Trace &) const = default;
};

// Exact LTL semantics at `position` of the infinite word represented by `trace`.
bool EvalOnTrace(const Formula &f, const Trace &trace, std::size_t position = 0);

// Truth value of `f` at every quotient position of `trace`.
std::vector<bool> EvalAllPositions(const Formula &f, const Trace &trace);

// Labeled transition system M = (S, S0, R, L). States are indices into
// `states`; the transition relation must be total.
struct KripkeStructure {
  std::vector<std::string> states;
  std::vector<std::size_t> initial;
  std::vector<std::vector<std::size_t>> successors;
  std::vector<Observation> labels;
  // Atomic propositions the model can talk about. Defaults to the union of
  // all state labels; may be larger.
  std::set<std::string> alphabet;

  // Throws InvalidArgument on an empty initial set, dangling indices or a
  // state without successors.
  void Validate() const;

  // {"states": [...], "initial": [...], "transitions": {s: [succ...]},
  //  "labels": {s: [aps...]}, "alphabet": [...] (optional)}
  static KripkeStructure FromJson(const nlohmann::json &doc);
  static KripkeStructure Load(const std::filesystem::path &path);
  nlohmann::json ToJson() const;
};

}  // namespace ginsign

#endif  // GINSIGN_TRACE_H_

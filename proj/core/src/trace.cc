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

#include "ginsign/trace.h"

#include <fstream>
#include <unordered_map>

namespace ginsign {
namespace {

using Json = nlohmann::json;

// Grounded atoms are stored in the canonical `pred(a,b)` spelling so that
// they match formula atoms regardless of spacing.
std::string CanonicalLabel(const std::string &label) {
  if (label.find('(') == std::string::npos) return label;
  try {
    return GroundedAtom::Parse(label).ToString();
  } catch (const Error &) {
    return label;
  }
}

Observation ReadObservation(const Json &doc, const std::string &where) {
  if (!doc.is_array()) throw Error(ErrorKind::kSchema, where + " must be an array of labels");
  Observation obs;
  for (const auto &label : doc) {
    if (!label.is_string()) throw Error(ErrorKind::kSchema, where + " must contain strings");
    obs.insert(CanonicalLabel(label.get<std::string>()));
  }
  return obs;
}

Json ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error &e) {
    throw Error(ErrorKind::kSchema, path.string() + ": " + e.what());
  }
}

// Evaluates every subformula over the quotient positions. Temporal operators
// are fixpoints over the successor function; the loop back-edge makes plain
// backward propagation insufficient, so iterate until stable.
class QuotientEvaluator {
 public:
  explicit QuotientEvaluator(const Trace &trace)
      : trace_(trace), n_(trace.length()), loop_start_(trace.prefix.size()) {}

  std::vector<char> Eval(const Formula &f) {
    if (auto it = memo_.find(f.id()); it != memo_.end()) return it->second;
    std::vector<char> out(n_, 0);
    switch (f.op()) {
      case LtlOp::kAtom:
        for (std::size_t i = 0; i < n_; ++i) out[i] = trace_.At(i).contains(f.label());
        break;
      case LtlOp::kNot: {
        auto a = Eval(f.operand());
        for (std::size_t i = 0; i < n_; ++i) out[i] = !a[i];
        break;
      }
      case LtlOp::kAnd:
      case LtlOp::kOr:
      case LtlOp::kImplies: {
        auto a = Eval(f.lhs());
        auto b = Eval(f.rhs());
        for (std::size_t i = 0; i < n_; ++i) {
          if (f.op() == LtlOp::kAnd) out[i] = a[i] && b[i];
          if (f.op() == LtlOp::kOr) out[i] = a[i] || b[i];
          if (f.op() == LtlOp::kImplies) out[i] = !a[i] || b[i];
        }
        break;
      }
      case LtlOp::kNext: {
        auto a = Eval(f.operand());
        for (std::size_t i = 0; i < n_; ++i) out[i] = a[Succ(i)];
        break;
      }
      case LtlOp::kEventually: {
        auto a = Eval(f.operand());
        out = LeastFixpoint(a, std::vector<char>(n_, 1));
        break;
      }
      case LtlOp::kAlways: {
        auto a = Eval(f.operand());
        // Greatest fixpoint of v = a & X v.
        out.assign(n_, 1);
        bool changed = true;
        while (changed) {
          changed = false;
          for (std::size_t i = n_; i-- > 0;) {
            char v = a[i] && out[Succ(i)];
            if (v != out[i]) {
              out[i] = v;
              changed = true;
            }
          }
        }
        break;
      }
      case LtlOp::kUntil: {
        auto a = Eval(f.lhs());
        auto b = Eval(f.rhs());
        out = LeastFixpoint(b, a);
        break;
      }
    }
    memo_.emplace(f.id(), out);
    return out;
  }

 private:
  std::size_t Succ(std::size_t i) const { return i + 1 < n_ ? i + 1 : loop_start_; }

  // Least fixpoint of v = goal | (keep & X v); F is the case keep = true.
  std::vector<char> LeastFixpoint(const std::vector<char> &goal, const std::vector<char> &keep) {
    std::vector<char> v(n_, 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = n_; i-- > 0;) {
        char next = goal[i] || (keep[i] && v[Succ(i)]);
        if (next != v[i]) {
          v[i] = next;
          changed = true;
        }
      }
    }
    return v;
  }

  const Trace &trace_;
  std::size_t n_;
  std::size_t loop_start_;
  std::unordered_map<const void *, std::vector<char>> memo_;
};

}  // namespace

std::size_t Trace::Normalize(std::size_t position) const {
  if (loop.empty()) throw Error(ErrorKind::kInvalidArgument, "trace loop must not be empty");
  if (position < prefix.size()) return position;
  return prefix.size() + (position - prefix.size()) % loop.size();
}

const Observation &Trace::At(std::size_t position) const {
  std::size_t i = Normalize(position);
  return i < prefix.size() ? prefix[i] : loop[i - prefix.size()];
}

Trace Trace::FromJson(const Json &doc) {
  if (!doc.is_object() || !doc.contains("loop")) {
    throw Error(ErrorKind::kSchema, "trace must be an object with a 'loop' array");
  }
  Trace trace;
  if (doc.contains("prefix")) {
    if (!doc["prefix"].is_array()) throw Error(ErrorKind::kSchema, "'prefix' must be an array");
    for (const auto &obs : doc["prefix"]) trace.prefix.push_back(ReadObservation(obs, "prefix"));
  }
  if (!doc["loop"].is_array()) throw Error(ErrorKind::kSchema, "'loop' must be an array");
  for (const auto &obs : doc["loop"]) trace.loop.push_back(ReadObservation(obs, "loop"));
  if (trace.loop.empty()) throw Error(ErrorKind::kSchema, "'loop' must not be empty");
  return trace;
}

Trace Trace::Load(const std::filesystem::path &path) { return FromJson(ReadFile(path)); }

Json Trace::ToJson() const {
  Json doc = Json::object();
  doc["prefix"] = Json::array();
  for (const auto &obs : prefix) doc["prefix"].push_back(obs);
  doc["loop"] = Json::array();
  for (const auto &obs : loop) doc["loop"].push_back(obs);
  return doc;
}

std::vector<bool> EvalAllPositions(const Formula &f, const Trace &trace) {
  if (trace.loop.empty()) throw Error(ErrorKind::kInvalidArgument, "trace loop must not be empty");
  auto values = QuotientEvaluator(trace).Eval(f);
  return {values.begin(), values.end()};
}

bool EvalOnTrace(const Formula &f, const Trace &trace, std::size_t position) {
  std::size_t i = trace.Normalize(position);
  return QuotientEvaluator(trace).Eval(f)[i] != 0;
}

void KripkeStructure::Validate() const {
  const std::size_t n = states.size();
  if (initial.empty()) throw Error(ErrorKind::kInvalidArgument, "Kripke structure has no initial state");
  if (successors.size() != n || labels.size() != n) {
    throw Error(ErrorKind::kInvalidArgument, "transitions and labels must cover every state");
  }
  for (std::size_t s : initial) {
    if (s >= n) throw Error(ErrorKind::kInvalidArgument, "initial state index out of range");
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (successors[s].empty()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "transition relation is not total: state '" + states[s] + "' has no successor");
    }
    for (std::size_t t : successors[s]) {
      if (t >= n) throw Error(ErrorKind::kInvalidArgument, "transition target out of range");
    }
  }
}

KripkeStructure KripkeStructure::FromJson(const Json &doc) {
  if (!doc.is_object()) throw Error(ErrorKind::kSchema, "Kripke document must be an object");
  for (const char *key : {"states", "initial", "transitions"}) {
    if (!doc.contains(key)) throw Error(ErrorKind::kSchema, std::string("missing '") + key + "'");
  }
  KripkeStructure m;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto &s : doc["states"]) {
    if (!s.is_string()) throw Error(ErrorKind::kSchema, "state names must be strings");
    auto name = s.get<std::string>();
    if (!index.emplace(name, m.states.size()).second) {
      throw Error(ErrorKind::kSchema, "duplicate state '" + name + "'");
    }
    m.states.push_back(name);
  }
  auto lookup = [&](const Json &s) {
    if (!s.is_string()) throw Error(ErrorKind::kSchema, "state references must be strings");
    auto it = index.find(s.get<std::string>());
    if (it == index.end()) {
      throw Error(ErrorKind::kSchema, "unknown state '" + s.get<std::string>() + "'");
    }
    return it->second;
  };
  for (const auto &s : doc["initial"]) m.initial.push_back(lookup(s));
  m.successors.resize(m.states.size());
  m.labels.resize(m.states.size());
  for (const auto &[from, targets] : doc["transitions"].items()) {
    std::size_t s = lookup(Json(from));
    for (const auto &t : targets) m.successors[s].push_back(lookup(t));
  }
  if (doc.contains("labels")) {
    for (const auto &[state, aps] : doc["labels"].items()) {
      m.labels[lookup(Json(state))] = ReadObservation(aps, "labels." + state);
    }
  }
  for (const auto &obs : m.labels) m.alphabet.insert(obs.begin(), obs.end());
  if (doc.contains("alphabet")) {
    auto extra = ReadObservation(doc["alphabet"], "alphabet");
    m.alphabet.insert(extra.begin(), extra.end());
  }
  m.Validate();
  return m;
}

KripkeStructure KripkeStructure::Load(const std::filesystem::path &path) {
  return FromJson(ReadFile(path));
}

Json KripkeStructure::ToJson() const {
  Json doc = Json::object();
  doc["states"] = states;
  doc["initial"] = Json::array();
  for (std::size_t s : initial) doc["initial"].push_back(states[s]);
  doc["transitions"] = Json::object();
  doc["labels"] = Json::object();
  for (std::size_t s = 0; s < states.size(); ++s) {
    Json targets = Json::array();
    for (std::size_t t : successors[s]) targets.push_back(states[t]);
    doc["transitions"][states[s]] = std::move(targets);
    doc["labels"][states[s]] = labels[s];
  }
  doc["alphabet"] = alphabet;
  return doc;
}

}  // namespace ginsign

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

#ifndef GINSIGN_SIGNATURE_H_
#define GINSIGN_SIGNATURE_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ginsign/error.h"

namespace ginsign {

// A sort of the many-sorted vocabulary, e.g. `item` or `location`.
struct TypeSymbol {
  std::string name;

  bool operator==(const TypeSymbol &) const = default;
};

struct ConstantSymbol {
  std::string name;
  std::string type;

  bool operator==(const ConstantSymbol &) const = default;
};

struct PredicateSymbol {
  std::string name;
  std::vector<std::string> arg_types;

  std::size_t arity() const { return arg_types.size(); }
  bool operator==(const PredicateSymbol &) const = default;
};

// A predicate applied to constants. Well-typedness is only guaranteed for
// atoms produced by Signature::MakeAtom.
struct GroundedAtom {
  std::string predicate;
  std::vector<std::string> args;

  // `pred` for nullary atoms, `pred(c1,c2)` otherwise, no spaces.
  std::string ToString() const;

  // Syntactic parse of `pred`, `pred()` or `pred(a, b)`. Does not consult a
  // signature.
  static GroundedAtom Parse(std::string_view text);

  bool operator==(const GroundedAtom &) const = default;
  auto operator<=>(const GroundedAtom &) const = default;
};

struct SignatureViolation {
  ErrorKind kind;
  std::string message;
};

// Raised by signature validation; carries every violation found, not just the
// first one.
class SignatureError : public Error {
 public:
  explicit SignatureError(std::vector<SignatureViolation> violations);

  const std::vector<SignatureViolation> &violations() const {
    return violations_;
  }

 private:
  std::vector<SignatureViolation> violations_;
};

// Spaces become underscores; surrounding whitespace is dropped.
std::string NormalizeIdentifier(std::string_view name);
// Case-insensitive comparison key for a normalized identifier.
std::string IdentifierKey(std::string_view name);
// True for lifted placeholders `prop_<k>`.
bool IsPlaceholder(std::string_view label);

// Many-sorted system signature <T, P, C>. Immutable once validated;
// declaration order of every section is preserved and is the enumeration
// order used for candidate prefixes.
class Signature {
 public:
  Signature() = default;

  // Validates a parsed signature document. Accepted keys:
  //   name:       optional string id
  //   types:      {type: [constants...]} or [type, ...]
  //   constants:  optional {constant: type}
  //   predicates: {predicate: [arg types...]}
  // Throws SignatureError listing all violations. Non-fatal findings (a
  // predicate argument type without constants) are appended to `warnings`.
  static Signature FromJson(const nlohmann::ordered_json &doc,
                            std::vector<std::string> *warnings = nullptr);
  // Like FromJson, but also rejects duplicate object keys in the raw text.
  static Signature Parse(std::string_view text,
                         std::vector<std::string> *warnings = nullptr);
  static Signature Load(const std::filesystem::path &path,
                        std::vector<std::string> *warnings = nullptr);

  // Canonical document: types as {type: [constants]}, predicates as
  // {name: [arg types]}. FromJson(ToJson()) reproduces *this.
  nlohmann::ordered_json ToJson() const;

  const std::string &name() const { return name_; }
  const std::vector<TypeSymbol> &types() const { return types_; }
  const std::vector<PredicateSymbol> &predicates() const { return predicates_; }
  const std::vector<ConstantSymbol> &constants() const { return constants_; }

  // Lookups are case-insensitive. Return nullptr when absent.
  const TypeSymbol *FindType(std::string_view name) const;
  const PredicateSymbol *FindPredicate(std::string_view name) const;
  const ConstantSymbol *FindConstant(std::string_view name) const;

  // Candidate prefix: every predicate name when `type_filter` is empty,
  // otherwise the constants of that type. Both in declaration order.
  // Throws UnknownType for a filter that is not in T.
  std::vector<std::string> BuildPrefix(
      std::optional<std::string_view> type_filter = std::nullopt) const;

  // The only sanctioned way to build a well-typed atom. Names are resolved
  // case-insensitively and returned in their declared spelling. Throws
  // TypeError on unknown symbols, wrong arity or ill-typed arguments.
  GroundedAtom MakeAtom(std::string_view predicate,
                        std::span<const std::string> args) const;
  // Parses `text` and resolves it through MakeAtom.
  GroundedAtom ResolveAtom(std::string_view text) const;
  bool IsWellTyped(const GroundedAtom &atom) const;

  bool operator==(const Signature &other) const;

 private:
  void Reindex();

  std::string name_;
  std::vector<TypeSymbol> types_;
  std::vector<PredicateSymbol> predicates_;
  std::vector<ConstantSymbol> constants_;
  std::unordered_map<std::string, std::size_t> type_index_;
  std::unordered_map<std::string, std::size_t> predicate_index_;
  std::unordered_map<std::string, std::size_t> constant_index_;
};

inline constexpr std::size_t kDefaultAtomCap = 1'000'000;

// Brute-force enumeration of every well-typed atom, in predicate declaration
// order with arguments varying fastest in the last slot. Throws SizeLimit when
// the vocabulary would exceed `cap`.
std::vector<GroundedAtom> EnumerateGroundedAtoms(
    const Signature &sig, std::size_t cap = kDefaultAtomCap);

// |P_S| computed arithmetically (sum over predicates of the product of slot
// class sizes). Throws SizeLimit above `cap`.
std::size_t CountGroundedAtoms(const Signature &sig,
                               std::size_t cap = kDefaultAtomCap);

}  // namespace ginsign

#endif  // GINSIGN_SIGNATURE_H_

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

#ifndef GINSIGN_LTL_H_
#define GINSIGN_LTL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "ginsign/error.h"
#include "ginsign/signature.h"

namespace ginsign {

enum class LtlOp : std::uint8_t {
  kAtom,
  kNot,
  kAnd,
  kOr,
  kImplies,
  kNext,
  kEventually,
  kAlways,
  kUntil,
};

constexpr bool IsUnary(LtlOp op) {
  return op == LtlOp::kNot || op == LtlOp::kNext || op == LtlOp::kEventually ||
         op == LtlOp::kAlways;
}

constexpr bool IsBinary(LtlOp op) {
  return op == LtlOp::kAnd || op == LtlOp::kOr || op == LtlOp::kImplies ||
         op == LtlOp::kUntil;
}

// ASCII spelling used by the printer: `!`, `&`, `|`, `->`, `X`, `F`, `G`, `U`.
std::string_view OpSymbol(LtlOp op);

enum class AtomKind { kNone, kPlaceholder, kGrounded };

// Immutable LTL syntax tree with value semantics. Subtrees are shared, so
// copying a Formula is cheap.
class Formula {
 public:
  static Formula Atom(std::string label);
  static Formula Unary(LtlOp op, Formula operand);
  static Formula Binary(LtlOp op, Formula lhs, Formula rhs);

  static Formula Not(Formula f) { return Unary(LtlOp::kNot, std::move(f)); }
  static Formula Next(Formula f) { return Unary(LtlOp::kNext, std::move(f)); }
  static Formula Eventually(Formula f) { return Unary(LtlOp::kEventually, std::move(f)); }
  static Formula Always(Formula f) { return Unary(LtlOp::kAlways, std::move(f)); }
  static Formula And(Formula a, Formula b) { return Binary(LtlOp::kAnd, std::move(a), std::move(b)); }
  static Formula Or(Formula a, Formula b) { return Binary(LtlOp::kOr, std::move(a), std::move(b)); }
  static Formula Implies(Formula a, Formula b) {
    return Binary(LtlOp::kImplies, std::move(a), std::move(b));
  }
  static Formula Until(Formula a, Formula b) { return Binary(LtlOp::kUntil, std::move(a), std::move(b)); }

  LtlOp op() const;
  // Atom label; empty for operators.
  const std::string &label() const;
  // Operand of a unary node, left operand of a binary node.
  const Formula &lhs() const;
  const Formula &rhs() const;
  const Formula &operand() const { return lhs(); }

  // Number of syntax tree nodes.
  std::size_t size() const;
  // Height; an atom has depth 1.
  std::size_t depth() const;
  AtomKind atom_kind() const;

  // Stable identity of the shared node, usable as a memoization key.
  const void *id() const { return node_.get(); }

  bool operator==(const Formula &other) const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Raised for malformed formula text; position is a byte offset into the input.
class LtlSyntaxError : public Error {
 public:
  LtlSyntaxError(std::size_t position, const std::string &message)
      : Error(ErrorKind::kSyntax, message + " at offset " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct LtlParseOptions {
  // Operator spellings accepted on input, mapped to operators. Word aliases
  // (letters only) must appear as whole words; symbol aliases match greedily.
  std::map<std::string, LtlOp, std::less<>> aliases = DefaultAliases();
  // When false, formulas mixing placeholders and grounded atoms are rejected.
  bool allow_mixed_atoms = false;

  // ASCII operators plus the usual Unicode glyphs (¬ ∧ ∨ → ○ ◇ □) and a few
  // common alternates (`~`, `&&`, `||`, `=>`, `<>`, `[]`).
  static std::map<std::string, LtlOp, std::less<>> DefaultAliases();
};

// Precedence, tightest first: unary (! X F G), U, &, |, ->. Both U and -> are
// right-associative; & and | associate to the left.
Formula ParseLtl(std::string_view text, const LtlParseOptions &options = {});

// Canonical, fully parenthesized rendering such that
// ParseLtl(PrintLtl(f)) == f. Example: `F ((prop_1) & (F (prop_2)))`.
std::string PrintLtl(const Formula &f);

// Distinct atom labels, sorted.
std::set<std::string> ExtractAtoms(const Formula &f);

// g_S: placeholder id -> grounded atom.
using GroundingMap = std::map<std::string, GroundedAtom>;

// Replaces each placeholder atom with the canonical string of its grounding.
// Non-placeholder atoms are left untouched. Throws MissingMapping when a
// placeholder has no entry.
Formula ApplyGrounding(const Formula &f, const GroundingMap &grounding);

// Rewrites every atom label through `fn`, keeping the tree shape.
Formula MapAtoms(const Formula &f,
                 const std::function<std::string(const std::string &)> &fn);

}  // namespace ginsign

#endif  // GINSIGN_LTL_H_

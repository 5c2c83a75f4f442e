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

#include "ginsign/ltl.h"

#include <algorithm>
#include <cctype>
#include <optional>
#include <vector>

namespace ginsign {

struct Formula::Node {
  LtlOp op;
  std::string label;
  std::vector<Formula> children;
  std::size_t size = 1;
  std::size_t depth = 1;
  bool has_placeholder = false;
  bool has_grounded = false;
};

std::string_view OpSymbol(LtlOp op) {
  switch (op) {
    case LtlOp::kAtom: return "";
    case LtlOp::kNot: return "!";
    case LtlOp::kAnd: return "&";
    case LtlOp::kOr: return "|";
    case LtlOp::kImplies: return "->";
    case LtlOp::kNext: return "X";
    case LtlOp::kEventually: return "F";
    case LtlOp::kAlways: return "G";
    case LtlOp::kUntil: return "U";
  }
  return "?";
}

Formula Formula::Atom(std::string label) {
  auto node = std::make_shared<Node>();
  node->op = LtlOp::kAtom;
  node->has_placeholder = IsPlaceholder(label);
  node->has_grounded = !node->has_placeholder;
  node->label = std::move(label);
  return Formula(std::move(node));
}

Formula Formula::Unary(LtlOp op, Formula operand) {
  if (!IsUnary(op)) throw Error(ErrorKind::kInvalidArgument, "operator is not unary");
  auto node = std::make_shared<Node>();
  node->op = op;
  node->size = 1 + operand.node_->size;
  node->depth = 1 + operand.node_->depth;
  node->has_placeholder = operand.node_->has_placeholder;
  node->has_grounded = operand.node_->has_grounded;
  node->children.push_back(std::move(operand));
  return Formula(std::move(node));
}

Formula Formula::Binary(LtlOp op, Formula lhs, Formula rhs) {
  if (!IsBinary(op)) throw Error(ErrorKind::kInvalidArgument, "operator is not binary");
  auto node = std::make_shared<Node>();
  node->op = op;
  node->size = 1 + lhs.node_->size + rhs.node_->size;
  node->depth = 1 + std::max(lhs.node_->depth, rhs.node_->depth);
  node->has_placeholder = lhs.node_->has_placeholder || rhs.node_->has_placeholder;
  node->has_grounded = lhs.node_->has_grounded || rhs.node_->has_grounded;
  node->children.push_back(std::move(lhs));
  node->children.push_back(std::move(rhs));
  return Formula(std::move(node));
}

LtlOp Formula::op() const { return node_->op; }
const std::string &Formula::label() const { return node_->label; }

const Formula &Formula::lhs() const {
  if (node_->children.empty()) throw Error(ErrorKind::kInvalidArgument, "atom has no operands");
  return node_->children[0];
}

const Formula &Formula::rhs() const {
  if (node_->children.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "formula has no right operand");
  }
  return node_->children[1];
}

std::size_t Formula::size() const { return node_->size; }
std::size_t Formula::depth() const { return node_->depth; }

AtomKind Formula::atom_kind() const {
  if (node_->has_placeholder && node_->has_grounded) return AtomKind::kNone;
  if (node_->has_placeholder) return AtomKind::kPlaceholder;
  return AtomKind::kGrounded;
}

bool Formula::operator==(const Formula &other) const {
  if (node_ == other.node_) return true;
  if (node_->op != other.node_->op || node_->size != other.node_->size) return false;
  if (node_->op == LtlOp::kAtom) return node_->label == other.node_->label;
  for (std::size_t i = 0; i < node_->children.size(); ++i) {
    if (!(node_->children[i] == other.node_->children[i])) return false;
  }
  return true;
}

std::map<std::string, LtlOp, std::less<>> LtlParseOptions::DefaultAliases() {
  return {
      {"!", LtlOp::kNot},         {"~", LtlOp::kNot},       {"¬", LtlOp::kNot},
      {"&", LtlOp::kAnd},         {"&&", LtlOp::kAnd},      {"∧", LtlOp::kAnd},
      {"|", LtlOp::kOr},          {"||", LtlOp::kOr},       {"∨", LtlOp::kOr},
      {"->", LtlOp::kImplies},    {"=>", LtlOp::kImplies},  {"→", LtlOp::kImplies},
      {"X", LtlOp::kNext},        {"○", LtlOp::kNext}, {"◯", LtlOp::kNext},
      {"F", LtlOp::kEventually},  {"<>", LtlOp::kEventually},
      {"◇", LtlOp::kEventually}, {"⋄", LtlOp::kEventually},
      {"G", LtlOp::kAlways},      {"[]", LtlOp::kAlways},   {"□", LtlOp::kAlways},
      {"U", LtlOp::kUntil},       {"\U0001d4b0", LtlOp::kUntil},
  };
}

namespace {

enum class TokenKind { kAtom, kOp, kLParen, kRParen, kEnd };

struct Token {
  TokenKind kind;
  std::size_t position;
  LtlOp op = LtlOp::kAtom;
  std::string text;
};

bool IsWordAlias(std::string_view alias) {
  return !alias.empty() && std::all_of(alias.begin(), alias.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c));
  });
}

bool IsIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  Lexer(std::string_view text, const LtlParseOptions &options) : text_(text) {
    for (const auto &[alias, op] : options.aliases) {
      if (IsWordAlias(alias)) {
        words_.emplace(alias, op);
      } else {
        symbols_.emplace_back(alias, op);
      }
    }
    // Longest symbol first so `->` wins over a bare `-`.
    std::sort(symbols_.begin(), symbols_.end(),
              [](const auto &a, const auto &b) { return a.first.size() > b.first.size(); });
  }

  std::vector<Token> Tokenize() {
    std::vector<Token> tokens;
    while (true) {
      SkipSpace();
      if (pos_ >= text_.size()) {
        tokens.push_back({TokenKind::kEnd, pos_, LtlOp::kAtom, {}});
        return tokens;
      }
      char c = text_[pos_];
      if (c == '(') {
        tokens.push_back({TokenKind::kLParen, pos_++, LtlOp::kAtom, {}});
        continue;
      }
      if (c == ')') {
        tokens.push_back({TokenKind::kRParen, pos_++, LtlOp::kAtom, {}});
        continue;
      }
      if (auto symbol = MatchSymbol()) {
        tokens.push_back(*symbol);
        continue;
      }
      if (IsIdentStart(c)) {
        tokens.push_back(ReadWord());
        continue;
      }
      throw LtlSyntaxError(pos_, "unexpected character '" + std::string(1, c) + "'");
    }
  }

 private:
  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::optional<Token> MatchSymbol() {
    for (const auto &[alias, op] : symbols_) {
      if (text_.substr(pos_).starts_with(alias)) {
        Token token{TokenKind::kOp, pos_, op, alias};
        pos_ += alias.size();
        return token;
      }
    }
    return std::nullopt;
  }

  std::string ReadIdentifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      bool hyphen = c == '-' && pos_ + 1 < text_.size() &&
                    std::isalnum(static_cast<unsigned char>(text_[pos_ + 1]));
      if (!IsIdentChar(c) && !hyphen) break;
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  Token ReadWord() {
    std::size_t start = pos_;
    std::string word = ReadIdentifier();
    if (auto it = words_.find(word); it != words_.end()) {
      return {TokenKind::kOp, start, it->second, word};
    }
    if (IsPlaceholder(word)) return {TokenKind::kAtom, start, LtlOp::kAtom, word};

    // Optional argument list: `pred(a, b)`.
    std::size_t after = pos_;
    SkipSpace();
    if (pos_ >= text_.size() || text_[pos_] != '(') {
      pos_ = after;
      return {TokenKind::kAtom, start, LtlOp::kAtom, word};
    }
    ++pos_;
    GroundedAtom atom{word, {}};
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == ')') {
      ++pos_;
      return {TokenKind::kAtom, start, LtlOp::kAtom, atom.ToString()};
    }
    while (true) {
      SkipSpace();
      if (pos_ >= text_.size() || !IsIdentStart(text_[pos_])) {
        throw LtlSyntaxError(pos_, "expected argument of '" + word + "'");
      }
      atom.args.push_back(ReadIdentifier());
      SkipSpace();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (pos_ < text_.size() && text_[pos_] == ')') {
        ++pos_;
        break;
      }
      throw LtlSyntaxError(pos_, "expected ',' or ')' in arguments of '" + word + "'");
    }
    return {TokenKind::kAtom, start, LtlOp::kAtom, atom.ToString()};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::map<std::string, LtlOp, std::less<>> words_;
  std::vector<std::pair<std::string, LtlOp>> symbols_;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Formula ParseAll() {
    Formula f = ParseImplies();
    if (Peek().kind != TokenKind::kEnd) Fail("unexpected trailing input");
    return f;
  }

 private:
  const Token &Peek() const { return tokens_[index_]; }
  bool PeekOp(LtlOp op) const { return Peek().kind == TokenKind::kOp && Peek().op == op; }
  [[noreturn]] void Fail(const std::string &what) const { throw LtlSyntaxError(Peek().position, what); }

  Formula ParseImplies() {
    Formula lhs = ParseOr();
    if (PeekOp(LtlOp::kImplies)) {
      ++index_;
      return Formula::Implies(std::move(lhs), ParseImplies());
    }
    return lhs;
  }

  Formula ParseOr() {
    Formula f = ParseAnd();
    while (PeekOp(LtlOp::kOr)) {
      ++index_;
      f = Formula::Or(std::move(f), ParseAnd());
    }
    return f;
  }

  Formula ParseAnd() {
    Formula f = ParseUntil();
    while (PeekOp(LtlOp::kAnd)) {
      ++index_;
      f = Formula::And(std::move(f), ParseUntil());
    }
    return f;
  }

  Formula ParseUntil() {
    Formula lhs = ParseUnary();
    if (PeekOp(LtlOp::kUntil)) {
      ++index_;
      return Formula::Until(std::move(lhs), ParseUntil());
    }
    return lhs;
  }

  Formula ParseUnary() {
    const Token &t = Peek();
    if (t.kind == TokenKind::kOp && IsUnary(t.op)) {
      LtlOp op = t.op;
      ++index_;
      return Formula::Unary(op, ParseUnary());
    }
    return ParsePrimary();
  }

  Formula ParsePrimary() {
    const Token &t = Peek();
    switch (t.kind) {
      case TokenKind::kAtom:
        ++index_;
        return Formula::Atom(t.text);
      case TokenKind::kLParen: {
        ++index_;
        Formula inner = ParseImplies();
        if (Peek().kind != TokenKind::kRParen) Fail("expected ')'");
        ++index_;
        return inner;
      }
      case TokenKind::kEnd:
        Fail("unexpected end of formula");
      case TokenKind::kRParen:
        Fail("unexpected ')'");
      case TokenKind::kOp:
        Fail("operator '" + t.text + "' is missing its left operand");
    }
    Fail("unexpected token");
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

void Print(const Formula &f, std::string *out) {
  if (f.op() == LtlOp::kAtom) {
    out->append(f.label());
    return;
  }
  if (IsUnary(f.op())) {
    out->append(OpSymbol(f.op()));
    out->append(" (");
    Print(f.operand(), out);
    out->push_back(')');
    return;
  }
  out->push_back('(');
  Print(f.lhs(), out);
  out->append(") ");
  out->append(OpSymbol(f.op()));
  out->append(" (");
  Print(f.rhs(), out);
  out->push_back(')');
}

void CollectAtoms(const Formula &f, std::set<std::string> *atoms) {
  if (f.op() == LtlOp::kAtom) {
    atoms->insert(f.label());
    return;
  }
  CollectAtoms(f.lhs(), atoms);
  if (IsBinary(f.op())) CollectAtoms(f.rhs(), atoms);
}

}  // namespace

Formula ParseLtl(std::string_view text, const LtlParseOptions &options) {
  Formula f = Parser(Lexer(text, options).Tokenize()).ParseAll();
  if (!options.allow_mixed_atoms && f.atom_kind() == AtomKind::kNone) {
    throw Error(ErrorKind::kMixedAtomKinds,
                "formula mixes placeholders and grounded atoms: " + std::string(text));
  }
  return f;
}

std::string PrintLtl(const Formula &f) {
  std::string out;
  Print(f, &out);
  return out;
}

std::set<std::string> ExtractAtoms(const Formula &f) {
  std::set<std::string> atoms;
  CollectAtoms(f, &atoms);
  return atoms;
}

Formula MapAtoms(const Formula &f, const std::function<std::string(const std::string &)> &fn) {
  if (f.op() == LtlOp::kAtom) return Formula::Atom(fn(f.label()));
  if (IsUnary(f.op())) return Formula::Unary(f.op(), MapAtoms(f.operand(), fn));
  return Formula::Binary(f.op(), MapAtoms(f.lhs(), fn), MapAtoms(f.rhs(), fn));
}

Formula ApplyGrounding(const Formula &f, const GroundingMap &grounding) {
  return MapAtoms(f, [&](const std::string &label) {
    if (!IsPlaceholder(label)) return label;
    auto it = grounding.find(label);
    if (it == grounding.end()) {
      throw Error(ErrorKind::kMissingMapping, "no grounding for placeholder '" + label + "'");
    }
    return it->second.ToString();
  });
}

}  // namespace ginsign

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

#include "ginsign/lifting.h"

#include <cctype>
#include <optional>
#include <set>

#include "ginsign/ltl.h"
#include "text_util.h"

namespace ginsign {
namespace {

struct Token {
  std::string word;
  std::size_t begin;
  std::size_t end;
};

// Alphanumeric runs, lowercased, with byte offsets. `keep_underscore` keeps
// placeholders such as prop_3 in one piece.
std::vector<Token> Tokenize(std::string_view s, bool keep_underscore) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    auto is_word = [&](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || (keep_underscore && c == '_');
    };
    if (!is_word(s[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < s.size() && is_word(s[i])) ++i;
    tokens.push_back({text::ToLower(s.substr(start, i - start)), start, i});
  }
  return tokens;
}

const std::set<std::string> &Connectives() {
  static const std::set<std::string> words = {
      "and",    "or",      "then",   "until",   "before",     "after",     "while",
      "unless", "if",      "when",   "whenever", "once",      "eventually", "always",
      "never",  "finally", "globally", "next",  "afterwards", "but",
  };
  return words;
}

bool PunctuationBetween(std::string_view s, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i) {
    if (std::string_view(",.;:!?").find(s[i]) != std::string_view::npos) return true;
  }
  return false;
}

}  // namespace

TemplateLifter::TemplateLifter(const Signature &sig, const std::map<std::string, std::string> &synonyms) {
  auto add = [&](const std::vector<std::string> &words, Kind kind, const std::string &symbol) {
    if (words.empty()) return;
    phrases_.emplace(words, Entry{kind, symbol});
    longest_ = std::max(longest_, words.size());
  };
  // Synonyms first so that they win over a same-phrase symbol name.
  for (const auto &[phrase, target] : synonyms) {
    if (const auto *p = sig.FindPredicate(target)) {
      add(text::Words(phrase), Kind::kPredicate, p->name);
    } else if (const auto *c = sig.FindConstant(target)) {
      add(text::Words(phrase), Kind::kConstant, c->name);
    } else {
      throw Error(ErrorKind::kInvalidArgument,
                  "synonym '" + phrase + "' targets unknown symbol '" + target + "'");
    }
  }
  for (const auto &p : sig.predicates()) add(text::LabelWords(p.name), Kind::kPredicate, p.name);
  for (const auto &c : sig.constants()) add(text::LabelWords(c.name), Kind::kConstant, c.name);
}

LiftResult TemplateLifter::Lift(std::string_view nl) const {
  auto tokens = Tokenize(nl, /*keep_underscore=*/false);

  auto match_at = [&](std::size_t i) -> std::optional<std::pair<std::size_t, Kind>> {
    for (std::size_t len = std::min(longest_, tokens.size() - i); len > 0; --len) {
      std::vector<std::string> words;
      for (std::size_t j = i; j < i + len; ++j) words.push_back(tokens[j].word);
      if (auto it = phrases_.find(words); it != phrases_.end()) {
        return std::make_pair(len, it->second.kind);
      }
    }
    return std::nullopt;
  };

  // Token ranges [first, last] of each AP span.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t i = 0;
  while (i < tokens.size()) {
    auto match = match_at(i);
    if (!match) {
      ++i;
      continue;
    }
    std::size_t last = i + match->first - 1;
    if (match->second == Kind::kPredicate) {
      while (last + 1 < tokens.size()) {
        std::size_t next = last + 1;
        if (PunctuationBetween(nl, tokens[last].end, tokens[next].begin)) break;
        if (Connectives().contains(tokens[next].word)) break;
        if (auto m = match_at(next); m && m->second == Kind::kPredicate) break;
        last = next;
      }
    }
    ranges.emplace_back(i, last);
    i = last + 1;
  }

  LiftResult result;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    std::size_t begin = tokens[ranges[k].first].begin;
    std::size_t end = tokens[ranges[k].second].end;
    std::string id = "prop_" + std::to_string(k + 1);
    result.lifted_nl.append(nl.substr(cursor, begin - cursor));
    result.lifted_nl.append(id);
    result.spans.push_back({id, std::string(nl.substr(begin, end - begin)), begin, end});
    cursor = end;
  }
  result.lifted_nl.append(nl.substr(cursor));
  return result;
}

namespace {

enum class Cue { kNone, kEventually, kAlways, kNever, kNext };
enum class Link { kAnd, kOr, kUntil, kSequence, kImplies };

bool Has(const std::vector<std::string> &words, std::initializer_list<const char *> any) {
  for (const auto &w : words) {
    for (const char *a : any) {
      if (w == a) return true;
    }
  }
  return false;
}

Cue CueOf(const std::vector<std::string> &words) {
  if (Has(words, {"never"})) return Cue::kNever;
  if (Has(words, {"always", "globally", "forever"})) return Cue::kAlways;
  if (Has(words, {"eventually", "finally", "sometime", "ultimately"})) return Cue::kEventually;
  if (Has(words, {"next"})) return Cue::kNext;
  return Cue::kNone;
}

Link LinkOf(const std::vector<std::string> &words, bool conditional) {
  if (Has(words, {"until"})) return Link::kUntil;
  if (conditional && Has(words, {"then"})) return Link::kImplies;
  if (Has(words, {"then", "after", "afterwards", "followed"})) return Link::kSequence;
  if (Has(words, {"or"})) return Link::kOr;
  if (conditional) return Link::kImplies;
  return Link::kAnd;
}

Formula Wrap(Cue cue, Formula f) {
  switch (cue) {
    case Cue::kNone: return f;
    case Cue::kEventually: return Formula::Eventually(std::move(f));
    case Cue::kAlways: return Formula::Always(std::move(f));
    case Cue::kNever: return Formula::Always(Formula::Not(std::move(f)));
    case Cue::kNext: return Formula::Next(std::move(f));
  }
  return f;
}

}  // namespace

std::string TranslateTemplate(std::string_view lifted_nl) {
  auto tokens = Tokenize(lifted_nl, /*keep_underscore=*/true);
  std::vector<std::string> atoms;
  std::vector<std::vector<std::string>> segments(1);
  for (const auto &t : tokens) {
    if (IsPlaceholder(t.word)) {
      atoms.push_back(t.word);
      segments.emplace_back();
    } else {
      segments.back().push_back(t.word);
    }
  }
  if (atoms.empty()) throw Error(ErrorKind::kInvalidArgument, "lifted sentence has no placeholders");

  const bool whenever = Has(segments[0], {"whenever"});
  const bool conditional = whenever || Has(segments[0], {"if"});

  std::vector<Formula> items;
  std::vector<Cue> cues;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    cues.push_back(CueOf(segments[i]));
    items.push_back(Wrap(cues.back(), Formula::Atom(atoms[i])));
  }
  std::vector<Link> links;
  for (std::size_t i = 1; i < atoms.size(); ++i) links.push_back(LinkOf(segments[i], conditional && i == 1));

  Formula f = items.back();
  for (std::size_t i = items.size() - 1; i-- > 0;) {
    switch (links[i]) {
      case Link::kAnd: f = Formula::And(items[i], f); break;
      case Link::kOr: f = Formula::Or(items[i], f); break;
      case Link::kUntil: f = Formula::Until(items[i], f); break;
      case Link::kImplies: f = Formula::Implies(items[i], f); break;
      case Link::kSequence: f = Formula::And(items[i], Formula::Eventually(f)); break;
    }
  }
  bool top_is_plain = links.empty() || (links[0] != Link::kImplies && links[0] != Link::kUntil);
  if (whenever) {
    f = Formula::Always(f);
  } else if (cues[0] == Cue::kNone && top_is_plain) {
    f = Formula::Eventually(f);
  }
  return PrintLtl(f);
}

}  // namespace ginsign

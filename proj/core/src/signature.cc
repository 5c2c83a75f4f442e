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

#include "ginsign/signature.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_set>

#include "text_util.h"

namespace ginsign {
namespace {

using Json = nlohmann::ordered_json;

const std::regex &TypeNamePattern() {
  static const std::regex re("[a-z][a-z0-9_]*");
  return re;
}

// Constants and predicates may carry hyphens (`teddy-bear`) and mixed case.
const std::regex &SymbolNamePattern() {
  static const std::regex re("[A-Za-z][A-Za-z0-9_\\-]*");
  return re;
}

bool IsReservedSymbol(std::string_view name) {
  return name == "X" || name == "F" || name == "G" || name == "U" ||
         IsPlaceholder(name);
}

class ViolationCollector {
 public:
  void Add(ErrorKind kind, std::string message) {
    violations_.push_back({kind, std::move(message)});
  }
  bool empty() const { return violations_.empty(); }
  [[noreturn]] void Raise() { throw SignatureError(std::move(violations_)); }

 private:
  std::vector<SignatureViolation> violations_;
};

std::vector<std::string> StringList(const Json &value, const std::string &where,
                                    ViolationCollector *errors) {
  std::vector<std::string> out;
  if (!value.is_array()) {
    errors->Add(ErrorKind::kSchema, where + " must be an array of strings");
    return out;
  }
  for (const auto &item : value) {
    if (!item.is_string()) {
      errors->Add(ErrorKind::kSchema, where + " must contain only strings");
      continue;
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

SignatureError::SignatureError(std::vector<SignatureViolation> violations)
    : Error(violations.empty() ? ErrorKind::kSchema : violations.front().kind,
            [&] {
              std::string msg;
              for (const auto &v : violations) {
                if (!msg.empty()) msg += "; ";
                msg += std::string(ErrorKindName(v.kind)) + ": " + v.message;
              }
              return msg;
            }()),
      violations_(std::move(violations)) {}

std::string NormalizeIdentifier(std::string_view name) {
  std::string out(text::Trim(name));
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

std::string IdentifierKey(std::string_view name) {
  return text::ToLower(NormalizeIdentifier(name));
}

bool IsPlaceholder(std::string_view label) {
  constexpr std::string_view kPrefix = "prop_";
  if (label.size() <= kPrefix.size() || !label.starts_with(kPrefix)) {
    return false;
  }
  return std::all_of(label.begin() + kPrefix.size(), label.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::string GroundedAtom::ToString() const {
  if (args.empty()) return predicate;
  std::string out = predicate + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) out += ",";
    out += args[i];
  }
  out += ")";
  return out;
}

GroundedAtom GroundedAtom::Parse(std::string_view text) {
  std::string_view s = text::Trim(text);
  GroundedAtom atom;
  auto open = s.find('(');
  if (open == std::string_view::npos) {
    atom.predicate = std::string(s);
  } else {
    if (s.back() != ')') {
      throw Error(ErrorKind::kSyntax,
                  "unterminated argument list in atom '" + std::string(text) + "'");
    }
    atom.predicate = std::string(text::Trim(s.substr(0, open)));
    std::string_view inner = s.substr(open + 1, s.size() - open - 2);
    if (!text::Trim(inner).empty()) {
      for (auto part : text::Split(inner, ',')) {
        auto arg = text::Trim(part);
        if (arg.empty()) {
          throw Error(ErrorKind::kSyntax,
                      "empty argument in atom '" + std::string(text) + "'");
        }
        atom.args.emplace_back(arg);
      }
    }
  }
  if (atom.predicate.empty()) {
    throw Error(ErrorKind::kSyntax, "missing predicate in atom '" + std::string(text) + "'");
  }
  return atom;
}

Signature Signature::FromJson(const Json &doc, std::vector<std::string> *warnings) {
  ViolationCollector errors;
  if (!doc.is_object()) {
    errors.Add(ErrorKind::kSchema, "signature document must be a JSON object");
    errors.Raise();
  }
  for (const auto &[key, _] : doc.items()) {
    if (key != "name" && key != "types" && key != "constants" &&
        key != "predicates" && key != "description") {
      errors.Add(ErrorKind::kSchema, "unexpected top-level key '" + key + "'");
    }
  }

  Signature sig;
  if (doc.contains("name")) {
    if (doc["name"].is_string()) {
      sig.name_ = doc["name"].get<std::string>();
    } else {
      errors.Add(ErrorKind::kSchema, "'name' must be a string");
    }
  }

  std::unordered_set<std::string> type_keys, predicate_keys, constant_keys;

  auto add_type = [&](const std::string &raw) {
    std::string name = text::ToLower(NormalizeIdentifier(raw));
    if (!std::regex_match(name, TypeNamePattern())) {
      errors.Add(ErrorKind::kInvalidIdentifier, "type name '" + raw + "' is not an identifier");
      return;
    }
    if (!type_keys.insert(name).second) {
      errors.Add(ErrorKind::kDuplicateName, "type '" + name + "' declared twice");
      return;
    }
    sig.types_.push_back({name});
  };

  auto add_constant = [&](const std::string &raw, const std::string &raw_type) {
    std::string name = NormalizeIdentifier(raw);
    std::string type = text::ToLower(NormalizeIdentifier(raw_type));
    if (!std::regex_match(name, SymbolNamePattern()) || IsReservedSymbol(name)) {
      errors.Add(ErrorKind::kInvalidIdentifier, "constant name '" + raw + "' is not a valid symbol");
      return;
    }
    if (!type_keys.contains(type)) {
      errors.Add(ErrorKind::kUnknownType,
                 "constant '" + name + "' has undeclared type '" + type + "'");
      return;
    }
    if (!constant_keys.insert(IdentifierKey(name)).second) {
      errors.Add(ErrorKind::kDuplicateName, "constant '" + name + "' declared twice");
      return;
    }
    sig.constants_.push_back({name, type});
  };

  std::vector<std::pair<std::string, std::string>> nested_constants;
  if (doc.contains("types")) {
    const Json &types = doc["types"];
    if (types.is_object()) {
      for (const auto &[type, members] : types.items()) {
        add_type(type);
        for (const auto &c : StringList(members, "types." + type, &errors)) {
          nested_constants.emplace_back(c, type);
        }
      }
    } else if (types.is_array()) {
      for (const auto &type : StringList(types, "types", &errors)) add_type(type);
    } else {
      errors.Add(ErrorKind::kSchema, "'types' must be an object or an array");
    }
  }
  for (const auto &[c, type] : nested_constants) add_constant(c, type);
  if (doc.contains("constants")) {
    const Json &constants = doc["constants"];
    if (!constants.is_object()) {
      errors.Add(ErrorKind::kSchema, "'constants' must map constant names to types");
    } else {
      for (const auto &[c, type] : constants.items()) {
        if (!type.is_string()) {
          errors.Add(ErrorKind::kSchema, "constants." + c + " must be a type name");
          continue;
        }
        add_constant(c, type.get<std::string>());
      }
    }
  }

  if (doc.contains("predicates")) {
    const Json &predicates = doc["predicates"];
    if (!predicates.is_object()) {
      errors.Add(ErrorKind::kSchema, "'predicates' must map names to argument type lists");
    } else {
      for (const auto &[raw, args] : predicates.items()) {
        std::string name = NormalizeIdentifier(raw);
        if (!std::regex_match(name, SymbolNamePattern()) || IsReservedSymbol(name)) {
          errors.Add(ErrorKind::kInvalidIdentifier,
                     "predicate name '" + raw + "' is not a valid symbol");
          continue;
        }
        std::string key = IdentifierKey(name);
        if (!predicate_keys.insert(key).second) {
          errors.Add(ErrorKind::kDuplicateName, "predicate '" + name + "' declared twice");
          continue;
        }
        if (type_keys.contains(key)) {
          errors.Add(ErrorKind::kDuplicateName,
                     "predicate '" + name + "' collides with a type name");
        }
        if (constant_keys.contains(key)) {
          errors.Add(ErrorKind::kDuplicateName,
                     "predicate '" + name + "' collides with a constant name");
        }
        PredicateSymbol pred{name, {}};
        for (const auto &arg : StringList(args, "predicates." + raw, &errors)) {
          std::string type = text::ToLower(NormalizeIdentifier(arg));
          if (!type_keys.contains(type)) {
            errors.Add(ErrorKind::kUnknownType,
                       "predicate '" + name + "' uses undeclared type '" + type + "'");
          }
          pred.arg_types.push_back(type);
        }
        sig.predicates_.push_back(std::move(pred));
      }
    }
  }

  if (!errors.empty()) errors.Raise();
  sig.Reindex();

  if (warnings != nullptr) {
    std::set<std::string> reported;
    for (const auto &pred : sig.predicates_) {
      for (const auto &type : pred.arg_types) {
        if (sig.BuildPrefix(type).empty() && reported.insert(type).second) {
          warnings->push_back("EmptySignatureSection: type '" + type +
                              "' is required by predicate '" + pred.name +
                              "' but has no constants");
        }
      }
    }
  }
  return sig;
}

Signature Signature::Parse(std::string_view text, std::vector<std::string> *warnings) {
  std::vector<std::set<std::string>> open_objects;
  std::vector<std::string> duplicates;
  Json::parser_callback_t watch = [&](int, Json::parse_event_t event, Json &parsed) {
    switch (event) {
      case Json::parse_event_t::object_start:
        open_objects.emplace_back();
        break;
      case Json::parse_event_t::object_end:
        open_objects.pop_back();
        break;
      case Json::parse_event_t::key:
        if (!open_objects.back().insert(parsed.get<std::string>()).second) {
          duplicates.push_back(parsed.get<std::string>());
        }
        break;
      default:
        break;
    }
    return true;
  };
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end(), watch);
  } catch (const Json::parse_error &e) {
    throw Error(ErrorKind::kSchema, std::string("malformed signature JSON: ") + e.what());
  }
  if (!duplicates.empty()) {
    std::vector<SignatureViolation> violations;
    for (const auto &key : duplicates) {
      violations.push_back({ErrorKind::kDuplicateName, "key '" + key + "' appears twice"});
    }
    throw SignatureError(std::move(violations));
  }
  return FromJson(doc, warnings);
}

Signature Signature::Load(const std::filesystem::path &path,
                          std::vector<std::string> *warnings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open signature file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Signature sig = Parse(buffer.str(), warnings);
  if (sig.name_.empty()) sig.name_ = path.stem().string();
  return sig;
}

Json Signature::ToJson() const {
  Json doc = Json::object();
  if (!name_.empty()) doc["name"] = name_;
  Json types = Json::object();
  for (const auto &t : types_) types[t.name] = Json::array();
  for (const auto &c : constants_) types[c.type].push_back(c.name);
  doc["types"] = std::move(types);
  Json predicates = Json::object();
  for (const auto &p : predicates_) predicates[p.name] = p.arg_types;
  doc["predicates"] = std::move(predicates);
  return doc;
}

void Signature::Reindex() {
  type_index_.clear();
  predicate_index_.clear();
  constant_index_.clear();
  for (std::size_t i = 0; i < types_.size(); ++i) type_index_[IdentifierKey(types_[i].name)] = i;
  for (std::size_t i = 0; i < predicates_.size(); ++i) {
    predicate_index_[IdentifierKey(predicates_[i].name)] = i;
  }
  for (std::size_t i = 0; i < constants_.size(); ++i) {
    constant_index_[IdentifierKey(constants_[i].name)] = i;
  }
}

const TypeSymbol *Signature::FindType(std::string_view name) const {
  auto it = type_index_.find(IdentifierKey(name));
  return it == type_index_.end() ? nullptr : &types_[it->second];
}

const PredicateSymbol *Signature::FindPredicate(std::string_view name) const {
  auto it = predicate_index_.find(IdentifierKey(name));
  return it == predicate_index_.end() ? nullptr : &predicates_[it->second];
}

const ConstantSymbol *Signature::FindConstant(std::string_view name) const {
  auto it = constant_index_.find(IdentifierKey(name));
  return it == constant_index_.end() ? nullptr : &constants_[it->second];
}

std::vector<std::string> Signature::BuildPrefix(
    std::optional<std::string_view> type_filter) const {
  std::vector<std::string> prefix;
  if (!type_filter) {
    prefix.reserve(predicates_.size());
    for (const auto &p : predicates_) prefix.push_back(p.name);
    return prefix;
  }
  const TypeSymbol *type = FindType(*type_filter);
  if (type == nullptr) {
    throw Error(ErrorKind::kUnknownType, "type '" + std::string(*type_filter) +
                                             "' is not declared in signature '" + name_ + "'");
  }
  for (const auto &c : constants_) {
    if (c.type == type->name) prefix.push_back(c.name);
  }
  return prefix;
}

GroundedAtom Signature::MakeAtom(std::string_view predicate,
                                 std::span<const std::string> args) const {
  const PredicateSymbol *pred = FindPredicate(predicate);
  if (pred == nullptr) {
    throw Error(ErrorKind::kTypeError, "unknown predicate '" + std::string(predicate) + "'");
  }
  if (args.size() != pred->arity()) {
    throw Error(ErrorKind::kTypeError,
                "predicate '" + pred->name + "' expects " + std::to_string(pred->arity()) +
                    " arguments, got " + std::to_string(args.size()));
  }
  GroundedAtom atom{pred->name, {}};
  for (std::size_t r = 0; r < args.size(); ++r) {
    const ConstantSymbol *c = FindConstant(args[r]);
    if (c == nullptr) {
      throw Error(ErrorKind::kTypeError, "unknown constant '" + args[r] + "'");
    }
    if (c->type != pred->arg_types[r]) {
      throw Error(ErrorKind::kTypeError,
                  "argument " + std::to_string(r + 1) + " of '" + pred->name + "' must be of type '" +
                      pred->arg_types[r] + "', but '" + c->name + "' is '" + c->type + "'");
    }
    atom.args.push_back(c->name);
  }
  return atom;
}

GroundedAtom Signature::ResolveAtom(std::string_view text) const {
  GroundedAtom parsed = GroundedAtom::Parse(text);
  return MakeAtom(parsed.predicate, parsed.args);
}

bool Signature::IsWellTyped(const GroundedAtom &atom) const {
  try {
    return MakeAtom(atom.predicate, atom.args) == atom;
  } catch (const Error &) {
    return false;
  }
}

bool Signature::operator==(const Signature &other) const {
  return name_ == other.name_ && types_ == other.types_ &&
         predicates_ == other.predicates_ && constants_ == other.constants_;
}

std::size_t CountGroundedAtoms(const Signature &sig, std::size_t cap) {
  std::unordered_map<std::string, std::size_t> class_size;
  for (const auto &c : sig.constants()) ++class_size[c.type];
  std::size_t total = 0;
  for (const auto &pred : sig.predicates()) {
    std::size_t count = 1;
    for (const auto &type : pred.arg_types) {
      std::size_t n = class_size[type];
      if (n != 0 && count > cap / n) {
        throw Error(ErrorKind::kSizeLimit, "grounded vocabulary exceeds cap of " + std::to_string(cap));
      }
      count *= n;
    }
    total += count;
    if (total > cap) {
      throw Error(ErrorKind::kSizeLimit, "grounded vocabulary exceeds cap of " + std::to_string(cap));
    }
  }
  return total;
}

std::vector<GroundedAtom> EnumerateGroundedAtoms(const Signature &sig, std::size_t cap) {
  std::vector<GroundedAtom> atoms;
  for (const auto &pred : sig.predicates()) {
    std::vector<std::vector<std::string>> slots;
    bool empty_slot = false;
    for (const auto &type : pred.arg_types) {
      slots.push_back(sig.BuildPrefix(type));
      empty_slot = empty_slot || slots.back().empty();
    }
    if (empty_slot) continue;
    // Odometer over the slot classes.
    std::vector<std::size_t> cursor(slots.size(), 0);
    while (true) {
      if (atoms.size() >= cap) {
        throw Error(ErrorKind::kSizeLimit,
                    "grounded vocabulary exceeds cap of " + std::to_string(cap));
      }
      GroundedAtom atom{pred.name, {}};
      for (std::size_t r = 0; r < slots.size(); ++r) atom.args.push_back(slots[r][cursor[r]]);
      atoms.push_back(std::move(atom));
      bool exhausted = true;
      for (std::size_t r = slots.size(); r-- > 0;) {
        if (++cursor[r] < slots[r].size()) {
          exhausted = false;
          break;
        }
        cursor[r] = 0;
      }
      if (exhausted) break;
    }
  }
  return atoms;
}

}  // namespace ginsign

// Copyright 2026 The dynsem Authors.
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

// JSON documents for lexicons and histories.
//
// Lexicon document:
//   {"version": 1, "states": ["NoHeat", "Heat"],
//    "entries": [{"utterance": "", "pairs": [{"a": "Heat", "c": "Heat"}]}]}
//
// Entries are sorted by utterance; pairs keep the meaning's order. Silence
// is the empty utterance.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "dynsem/engine.hpp"
#include "dynsem/scenario.hpp"
#include "dynsem/semantics.hpp"

namespace dynsem {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

class PersistenceError : public Error {
public:
  enum class Kind {
    malformed,
    version_mismatch,
    invalid_space,
    unknown_state,
    soundness_violation,
    duplicate_utterance,
  };

  PersistenceError(Kind kind, const std::string& what)
      : Error(std::string(name(kind)) + ": " + what), kind_(kind) {}

  Kind kind() const { return kind_; }

  static constexpr std::string_view name(Kind k) {
    switch (k) {
      case Kind::malformed: return "malformed document";
      case Kind::version_mismatch: return "version mismatch";
      case Kind::invalid_space: return "invalid action space";
      case Kind::unknown_state: return "unknown state";
      case Kind::soundness_violation: return "soundness violation";
      case Kind::duplicate_utterance: return "duplicate utterance";
    }
    return "error";
  }

private:
  Kind kind_;
};

struct LexiconDocument {
  ActionSpace space;
  Lexicon lexicon;

  friend bool operator==(const LexiconDocument&, const LexiconDocument&) = default;
};

inline Json states_to_json(const ActionSpace& space) {
  Json out = Json::array();
  for (const auto& l : space.labels()) out.push_back(l);
  return out;
}

inline Json lexicon_to_json(const Lexicon& lex, const ActionSpace& space) {
  Json entries = Json::array();
  for (const auto& [u, m] : lex.entries()) {
    Json pairs = Json::array();
    for (const auto& p : m.pairs())
      pairs.push_back({{"a", space.label(p.antecedent)},
                       {"c", space.label(p.consequent)}});
    entries.push_back({{"utterance", u.text()}, {"pairs", std::move(pairs)}});
  }
  return {{"version", kFormatVersion},
          {"states", states_to_json(space)},
          {"entries", std::move(entries)}};
}

inline std::string export_lexicon(const Lexicon& lex, const ActionSpace& space) {
  return lexicon_to_json(lex, space).dump(2) + "\n";
}

namespace detail {

using PKind = PersistenceError::Kind;

inline const Json& member(const Json& obj, const char* key, Json::value_t type,
                          const char* type_name) {
  if (!obj.is_object() || !obj.contains(key))
    throw PersistenceError(PKind::malformed,
                           std::string("missing field '") + key + "'");
  const Json& v = obj.at(key);
  if (v.type() != type &&
      !(type == Json::value_t::number_integer && v.is_number_unsigned()))
    throw PersistenceError(PKind::malformed, std::string("field '") + key +
                                                 "' must be " + type_name);
  return v;
}

inline std::string string_member(const Json& obj, const char* key) {
  return member(obj, key, Json::value_t::string, "a string").get<std::string>();
}

inline void check_version(const Json& doc) {
  const auto& v = member(doc, "version", Json::value_t::number_integer,
                         "an integer");
  if (v.get<long long>() != kFormatVersion)
    throw PersistenceError(PKind::version_mismatch,
                           "expected version " + std::to_string(kFormatVersion) +
                               ", got " + v.dump());
}

inline ActionSpace space_from_json(const Json& doc) {
  const auto& arr = member(doc, "states", Json::value_t::array, "an array");
  std::vector<std::string> labels;
  for (const auto& l : arr) {
    if (!l.is_string())
      throw PersistenceError(PKind::malformed, "state labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  try {
    return ActionSpace(std::move(labels));
  } catch (const InvariantError& e) {
    throw PersistenceError(PKind::invalid_space, e.what());
  }
}

inline State state_from_json(const ActionSpace& space, const std::string& l) {
  if (auto s = space.find(l); s && space.label(*s) == l) return *s;
  throw PersistenceError(PKind::unknown_state, "'" + l + "' is not declared");
}

inline Json parse(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw PersistenceError(PKind::malformed, e.what());
  }
}

inline Utterance utterance_from_json(const std::string& text) {
  try {
    return Utterance(text);
  } catch (const InvariantError& e) {
    throw PersistenceError(PKind::malformed, e.what());
  }
}

}  // namespace detail

inline LexiconDocument lexicon_from_json(const Json& doc) {
  using detail::PKind;
  if (!doc.is_object())
    throw PersistenceError(PKind::malformed, "document must be an object");
  detail::check_version(doc);
  LexiconDocument out{detail::space_from_json(doc), {}};

  const auto& entries =
      detail::member(doc, "entries", Json::value_t::array, "an array");
  for (const auto& e : entries) {
    const auto text = detail::string_member(e, "utterance");
    const Utterance u = detail::utterance_from_json(text);
    if (out.lexicon.contains_utterance(u))
      throw PersistenceError(PKind::duplicate_utterance,
                             "'" + text + "' appears more than once");
    Meaning m;
    for (const auto& p :
         detail::member(e, "pairs", Json::value_t::array, "an array")) {
      const AcPair pair{
          detail::state_from_json(out.space, detail::string_member(p, "a")),
          detail::state_from_json(out.space, detail::string_member(p, "c"))};
      if (m.apply(pair.antecedent))
        throw PersistenceError(PKind::soundness_violation,
                               "'" + text + "' maps antecedent '" +
                                   out.space.label(pair.antecedent) +
                                   "' more than once");
      m = m.extend(pair);
    }
    out.lexicon.upsert_in_place(u, std::move(m));
  }
  return out;
}

inline LexiconDocument import_lexicon(std::string_view text) {
  return lexicon_from_json(detail::parse(text));
}

/// One history entry in wire form; the field names match the record columns.
inline Json entry_to_json(const HistoryEntry& e, std::optional<std::size_t> k,
                          const ActionSpace& space) {
  return {{"t", e.t},
          {"k", k ? Json(*k) : Json(nullptr)},
          {"utterance", e.utterance.text()},
          {"antecedent", space.label(e.pair.antecedent)},
          {"consequent", space.label(e.pair.consequent)},
          {"rule", std::string(to_string(e.rule))}};
}

inline Json history_entries_to_json(const History& h, const ActionSpace& space) {
  Json out = Json::array();
  for (const auto& e : h.entries())
    out.push_back(entry_to_json(e, h.iteration(e.t), space));
  return out;
}

inline std::string export_history(const History& h, const ActionSpace& space) {
  Json doc = {{"version", kFormatVersion},
              {"states", states_to_json(space)},
              {"history", history_entries_to_json(h, space)}};
  return doc.dump(2) + "\n";
}

struct HistoryDocument {
  ActionSpace space;
  History history;
};

inline HistoryDocument import_history(std::string_view text) {
  using detail::PKind;
  const Json doc = detail::parse(text);
  if (!doc.is_object())
    throw PersistenceError(PKind::malformed, "document must be an object");
  detail::check_version(doc);
  HistoryDocument out{detail::space_from_json(doc), {}};
  for (const auto& e :
       detail::member(doc, "history", Json::value_t::array, "an array")) {
    const auto& t = detail::member(e, "t", Json::value_t::number_integer,
                                   "an integer");
    if (t.get<long long>() != static_cast<long long>(out.history.size()))
      throw PersistenceError(PKind::malformed,
                             "history time stamps must count up from 0");
    const auto rule = parse_rule(detail::string_member(e, "rule"));
    if (!rule) throw PersistenceError(PKind::malformed, "unknown rule label");
    out.history.append(
        detail::utterance_from_json(detail::string_member(e, "utterance")),
        {detail::state_from_json(out.space,
                                 detail::string_member(e, "antecedent")),
         detail::state_from_json(out.space,
                                 detail::string_member(e, "consequent"))},
        *rule);
  }
  return out;
}

}  // namespace dynsem

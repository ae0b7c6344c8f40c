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

// Domain types of dynamic semantics: a finite action space, utterances,
// meanings as ordered partial functions over the space, and the lexicon
// mapping each utterance to exactly one meaning.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dynsem {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A value violates a domain invariant (bad label, duplicate antecedent, ...).
class InvariantError : public Error {
public:
  using Error::Error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// One element of an action space, stored as its ordinal in that space.
struct State {
  std::size_t index = 0;

  friend constexpr auto operator<=>(State, State) = default;
};

/// A fixed pair of antecedent and consequent states.
struct AcPair {
  State antecedent;
  State consequent;

  constexpr bool is_fixed_point() const { return antecedent == consequent; }

  friend constexpr auto operator<=>(const AcPair&, const AcPair&) = default;
};

/// Finite ordered set of epistemic states (operation modes). The order
/// defines the successor relation used by the cyclic selector.
class ActionSpace {
public:
  ActionSpace() = default;

  explicit ActionSpace(std::vector<std::string> labels) {
    if (labels.size() < 2)
      throw InvariantError("action space needs at least 2 states, got " +
                           std::to_string(labels.size()));
    for (auto& l : labels) {
      l = std::string(detail::trim(l));
      if (l.empty()) throw InvariantError("state label must not be empty");
    }
    for (std::size_t i = 0; i < labels.size(); ++i)
      for (std::size_t j = i + 1; j < labels.size(); ++j)
        if (labels[i] == labels[j])
          throw InvariantError("duplicate state label '" + labels[i] + "'");
    labels_ = std::move(labels);
  }

  std::size_t size() const { return labels_.size(); }
  std::span<const std::string> labels() const { return labels_; }

  bool contains(State s) const { return s.index < labels_.size(); }

  const std::string& label(State s) const {
    if (!contains(s))
      throw InvariantError("state index " + std::to_string(s.index) +
                           " outside action space");
    return labels_[s.index];
  }

  std::optional<State> find(std::string_view label) const {
    const auto key = detail::trim(label);
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == key) return State{i};
    return std::nullopt;
  }

  State state(std::string_view label) const {
    if (auto s = find(label)) return *s;
    throw InvariantError("unknown state '" + std::string(label) + "'");
  }

  State successor(State s) const {
    return State{(s.index + 1) % labels_.size()};
  }

  std::vector<State> states() const {
    std::vector<State> out;
    for (std::size_t i = 0; i < labels_.size(); ++i) out.push_back(State{i});
    return out;
  }

  std::string format(const AcPair& p) const {
    return "(" + label(p.antecedent) + ", " + label(p.consequent) + ")";
  }

  friend bool operator==(const ActionSpace&, const ActionSpace&) = default;

private:
  std::vector<std::string> labels_;
};

/// A transcribed token of speech. The empty text is silence.
class Utterance {
public:
  Utterance() = default;

  explicit Utterance(std::string_view raw) {
    const auto t = detail::trim(raw);
    for (unsigned char ch : t)
      if (ch < 0x20 || ch == 0x7f)
        throw InvariantError("utterance contains a control character");
    text_ = std::string(t);
  }

  static Utterance silence() { return Utterance{}; }

  const std::string& text() const { return text_; }
  bool is_silence() const { return text_.empty(); }

  friend auto operator<=>(const Utterance&, const Utterance&) = default;

private:
  std::string text_;
};

/// Ordered partial function over an action space. Insertion order is the
/// total order on pairs; no two pairs share an antecedent.
class Meaning {
public:
  Meaning() = default;

  /// Builds a meaning from pairs in order; throws on a duplicate antecedent.
  explicit Meaning(std::vector<AcPair> pairs) {
    for (const auto& p : pairs) *this = extend(p);
  }

  std::span<const AcPair> pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  std::optional<State> apply(State a) const {
    if (auto i = position_of(a)) return pairs_[*i].consequent;
    return std::nullopt;
  }

  bool accepts(State a) const { return apply(a) == a; }

  bool contains(const AcPair& p) const {
    return std::find(pairs_.begin(), pairs_.end(), p) != pairs_.end();
  }

  /// Appends p as the new maximum of the order.
  Meaning extend(const AcPair& p) const {
    if (position_of(p.antecedent))
      throw InvariantError("meaning already maps antecedent " +
                           std::to_string(p.antecedent.index));
    Meaning out = *this;
    out.pairs_.push_back(p);
    return out;
  }

  /// Replaces the consequent of antecedent a in place.
  Meaning revise(State a, State new_consequent) const {
    const auto i = position_of(a);
    if (!i)
      throw InvariantError("revision target missing: no pair with antecedent " +
                           std::to_string(a.index));
    Meaning out = *this;
    out.pairs_[*i].consequent = new_consequent;
    return out;
  }

  bool is_functional() const {
    for (std::size_t i = 0; i < pairs_.size(); ++i)
      for (std::size_t j = i + 1; j < pairs_.size(); ++j)
        if (pairs_[i].antecedent == pairs_[j].antecedent) return false;
    return true;
  }

  std::string format(const ActionSpace& space) const {
    std::string out = "{";
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      if (i) out += ", ";
      out += space.format(pairs_[i]);
    }
    return out + "}";
  }

  friend bool operator==(const Meaning&, const Meaning&) = default;

private:
  std::optional<std::size_t> position_of(State a) const {
    for (std::size_t i = 0; i < pairs_.size(); ++i)
      if (pairs_[i].antecedent == a) return i;
    return std::nullopt;
  }

  std::vector<AcPair> pairs_;
};

/// Utterance-meaning pair.
struct Ump {
  Utterance utterance;
  Meaning meaning;

  friend bool operator==(const Ump&, const Ump&) = default;
};

/// The mental lexicon: at most one meaning per utterance.
class Lexicon {
public:
  using Map = std::map<Utterance, Meaning>;

  bool contains_utterance(const Utterance& u) const {
    return entries_.contains(u);
  }

  bool contains_meaning(const Meaning& m) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const auto& e) { return e.second == m; });
  }

  bool contains_pair(const AcPair& p) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const auto& e) { return e.second.contains(p); });
  }

  const Meaning* find(const Utterance& u) const {
    auto it = entries_.find(u);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const Meaning& at(const Utterance& u) const {
    if (auto* m = find(u)) return *m;
    throw InvariantError("utterance '" + u.text() + "' not in lexicon");
  }

  Lexicon upsert(const Utterance& u, Meaning m) const {
    Lexicon out = *this;
    out.upsert_in_place(u, std::move(m));
    return out;
  }

  void upsert_in_place(const Utterance& u, Meaning m) {
    if (!m.is_functional())
      throw InvariantError("meaning of '" + u.text() + "' is not functional");
    entries_.insert_or_assign(u, std::move(m));
  }

  std::vector<Ump> umps() const {
    std::vector<Ump> out;
    for (const auto& [u, m] : entries_) out.push_back({u, m});
    return out;
  }

  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool is_sound() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const auto& e) { return e.second.is_functional(); });
  }

  /// True when every state referenced by the lexicon belongs to space.
  bool is_over(const ActionSpace& space) const {
    for (const auto& [u, m] : entries_)
      for (const auto& p : m.pairs())
        if (!space.contains(p.antecedent) || !space.contains(p.consequent))
          return false;
    return true;
  }

  friend bool operator==(const Lexicon&, const Lexicon&) = default;

private:
  Map entries_;
};

}  // namespace dynsem

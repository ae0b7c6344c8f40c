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

// The learning engine. One call to EngineSession::step processes one
// utterance in the current epistemic state:
//
//   R1a    unknown utterance, silence: keep the state, learn (a, a)
//   R1b    unknown utterance, non-silent: move to c != a, learn (a, c)
//   R2a    known utterance whose meaning maps a: apply it
//   R2bi   known silence without a pair for a: keep the state, add (a, a)
//   R2bii  known utterance without a pair for a: move to c != a, add (a, c)
//   R3     revision entry, appended after any step that changed the state
//
// Every step appends one history entry. When the step leaves the state
// (c != a), the revision pass rewrites the consequents learned since the
// most recently accepted state so that they map to c, and appends one R3
// entry per rewritten pair.

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynsem/selectors.hpp"
#include "dynsem/semantics.hpp"

namespace dynsem {

enum class Rule { R1a, R1b, R2a, R2bi, R2bii, R3 };

inline constexpr std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::R1a: return "R1a";
    case Rule::R1b: return "R1b";
    case Rule::R2a: return "R2a";
    case Rule::R2bi: return "R2bi";
    case Rule::R2bii: return "R2bii";
    case Rule::R3: return "R3";
  }
  return "?";
}

inline std::optional<Rule> parse_rule(std::string_view s) {
  for (Rule r : {Rule::R1a, Rule::R1b, Rule::R2a, Rule::R2bi, Rule::R2bii,
                 Rule::R3})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

/// One written history slot: the single pair learned, applied or revised
/// at time t, tagged with the rule that produced it.
struct HistoryEntry {
  std::size_t t = 0;
  Utterance utterance;
  AcPair pair;
  Rule rule = Rule::R1a;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// Append-only log. Unwritten slots are simply absent.
class History {
public:
  const HistoryEntry& append(Utterance u, AcPair pair, Rule rule) {
    const std::size_t t = entries_.size();
    if (rule == Rule::R3) {
      iterations_.push_back(std::nullopt);
    } else {
      iterations_.push_back(next_iteration_++);
    }
    entries_.push_back({t, std::move(u), pair, rule});
    return entries_.back();
  }

  std::span<const HistoryEntry> entries() const { return entries_; }
  const HistoryEntry& operator[](std::size_t t) const { return entries_.at(t); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Iteration k that wrote slot t, or nullopt for revision entries.
  std::optional<std::size_t> iteration(std::size_t t) const {
    return iterations_.at(t);
  }

  friend bool operator==(const History& a, const History& b) {
    return a.entries_ == b.entries_;
  }

private:
  std::vector<HistoryEntry> entries_;
  std::vector<std::optional<std::size_t>> iterations_;
  std::size_t next_iteration_ = 0;
};

/// Time index of the most recently accepted state at or before t0: the
/// latest non-revision entry whose pair is a fixed point. nullopt means no
/// such entry exists, so a revision range starts at the first entry.
inline std::optional<std::size_t> mras(const History& h, std::size_t t0) {
  if (h.empty()) return std::nullopt;
  for (std::size_t s = std::min(t0, h.size() - 1) + 1; s-- > 0;) {
    const auto& e = h[s];
    if (e.rule != Rule::R3 && e.pair.is_fixed_point()) return s;
  }
  return std::nullopt;
}

/// Pair of the most recent entry for u at time <= before.
inline std::optional<AcPair> last_update(const History& h, const Utterance& u,
                                         std::size_t before) {
  if (h.empty()) return std::nullopt;
  for (std::size_t t = std::min(before, h.size() - 1) + 1; t-- > 0;)
    if (h[t].utterance == u) return h[t].pair;
  return std::nullopt;
}

struct LexiconChange {
  Utterance utterance;
  std::optional<AcPair> before;  // absent when a pair was added
  AcPair after;

  friend bool operator==(const LexiconChange&, const LexiconChange&) = default;
};

/// Observable outcome of one step.
struct StepReport {
  std::size_t k = 0;
  Utterance utterance;
  State antecedent;
  State consequent;
  Rule rule = Rule::R1a;
  std::vector<HistoryEntry> appended;  // primary entry, then R3 entries
  std::vector<LexiconChange> lexicon_changes;

  std::span<const HistoryEntry> revisions() const {
    return std::span<const HistoryEntry>(appended).subspan(1);
  }
};

/// Raised when an internal consistency check fails.
class EngineError : public Error {
public:
  using Error::Error;
};

class EngineSession {
public:
  EngineSession(ActionSpace space, State initial, const SelectorSpec& selector,
                Lexicon lexicon = {})
      : space_(std::move(space)),
        selector_(space_, selector),
        lexicon_(std::move(lexicon)),
        current_(initial) {
    if (!space_.contains(initial))
      throw InvariantError("initial state outside action space");
    if (!lexicon_.is_over(space_))
      throw InvariantError("lexicon references states outside action space");
    if (!lexicon_.is_sound())
      throw InvariantError("lexicon contains a non-functional meaning");
  }

  EngineSession(ActionSpace space, std::string_view initial,
                const SelectorSpec& selector, Lexicon lexicon = {})
      : EngineSession(space, space.state(initial), selector,
                      std::move(lexicon)) {}

  StepReport step(const Utterance& u) {
    const State a = current_;
    StepReport report;
    report.k = k_;
    report.utterance = u;
    report.antecedent = a;

    State c = a;
    Rule rule;
    const Meaning* known = lexicon_.find(u);
    if (!known) {
      c = u.is_silence() ? a : selector_.select(a);
      rule = u.is_silence() ? Rule::R1a : Rule::R1b;
      lexicon_.upsert_in_place(u, Meaning{}.extend({a, c}));
      report.lexicon_changes.push_back({u, std::nullopt, {a, c}});
    } else if (auto applied = known->apply(a)) {
      c = *applied;
      rule = Rule::R2a;
    } else {
      c = u.is_silence() ? a : selector_.select(a);
      rule = u.is_silence() ? Rule::R2bi : Rule::R2bii;
      lexicon_.upsert_in_place(u, known->extend({a, c}));
      report.lexicon_changes.push_back({u, std::nullopt, {a, c}});
    }

    report.consequent = c;
    report.rule = rule;
    const auto& entry = history_.append(u, {a, c}, rule);
    report.appended.push_back(entry);

    if (c != a) {
      const std::size_t tau = entry.t;
      for (auto& change : revise_impl(tau, c, report.lexicon_changes))
        report.appended.push_back(std::move(change));
    }

    current_ = c;
    ++k_;
    return report;
  }

  /// Revision pass for the unaccepted transition written at tau.
  ///
  /// Entries after mras(h, tau) up to tau are grouped by (utterance,
  /// antecedent); each group is visited once, in order of its latest
  /// occurrence. The consequent is read from the live lexicon and replaced
  /// by c_k unless it already equals c_k.
  std::vector<HistoryEntry> revise(std::size_t tau, State c_k) {
    std::vector<LexiconChange> ignored;
    return revise_impl(tau, c_k, ignored);
  }

  const ActionSpace& space() const { return space_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const History& history() const { return history_; }
  State current() const { return current_; }
  std::size_t iteration() const { return k_; }
  const SelectorSpec& selector_spec() const { return selector_.spec(); }

private:
  struct RevisionKey {
    Utterance utterance;
    State antecedent;
    std::size_t latest = 0;
  };

  std::vector<HistoryEntry> revise_impl(std::size_t tau, State c_k,
                                        std::vector<LexiconChange>& changes) {
    if (tau >= history_.size())
      throw EngineError("revise: no history entry at time " +
                        std::to_string(tau));
    if (history_[tau].pair.is_fixed_point())
      throw EngineError("revise: entry at time " + std::to_string(tau) +
                        " is an accepted transition");

    const auto s = mras(history_, tau);
    const std::size_t begin = s ? *s + 1 : 0;

    std::vector<RevisionKey> keys;
    for (std::size_t p = begin; p <= tau; ++p) {
      const auto& e = history_[p];
      auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& k) {
        return k.utterance == e.utterance && k.antecedent == e.pair.antecedent;
      });
      if (it == keys.end())
        keys.push_back({e.utterance, e.pair.antecedent, p});
      else
        it->latest = p;
    }
    std::stable_sort(keys.begin(), keys.end(),
                     [](const auto& x, const auto& y) { return x.latest < y.latest; });

    std::vector<HistoryEntry> out;
    for (const auto& key : keys) {
      const Meaning* m = lexicon_.find(key.utterance);
      const auto c_p = m ? m->apply(key.antecedent) : std::nullopt;
      if (!c_p)
        throw EngineError("revise: '" + key.utterance.text() +
                          "' lost its antecedent " +
                          space_.label(key.antecedent));
      if (*c_p == c_k) continue;
      lexicon_.upsert_in_place(key.utterance, m->revise(key.antecedent, c_k));
      changes.push_back(
          {key.utterance, AcPair{key.antecedent, *c_p}, {key.antecedent, c_k}});
      out.push_back(
          history_.append(key.utterance, {key.antecedent, c_k}, Rule::R3));
    }
    return out;
  }

  ActionSpace space_;
  ConsequentSelector selector_;
  Lexicon lexicon_;
  History history_;
  State current_;
  std::size_t k_ = 0;
};

}  // namespace dynsem

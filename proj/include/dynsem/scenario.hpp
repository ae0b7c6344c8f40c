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

// Scenario files and trace rendering.
//
// A scenario file looks like
//
//   # comment
//   states: NoHeat, Heat
//   initial: Heat
//   selector: cyclic
//   steps:
//   <silence>
//   I go to grandma now
//
// The three headers may come in any order but must all precede `steps:`.
// Each line after `steps:` is one utterance; `<silence>` is the empty
// utterance. Blank lines and lines whose first non-blank character is `#`
// are ignored.

#pragma once

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dynsem/engine.hpp"
#include "dynsem/selectors.hpp"
#include "dynsem/semantics.hpp"

namespace dynsem {

inline constexpr std::string_view kSilenceToken = "<silence>";

/// Renders ε as `<silence>`.
inline std::string display(const Utterance& u) {
  return u.is_silence() ? std::string(kSilenceToken) : u.text();
}

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error(what + " at line " + std::to_string(line)), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

struct Scenario {
  ActionSpace space;
  State initial;
  SelectorSpec selector;
  std::vector<Utterance> utterances;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline std::vector<std::string> split_labels(std::string_view list) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = std::min(list.find(',', pos), list.size());
    out.emplace_back(trim(list.substr(pos, comma - pos)));
    if (comma == list.size()) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

inline Scenario parse_scenario(std::string_view text) {
  std::optional<ActionSpace> space;
  std::optional<std::string> initial_label;
  std::size_t initial_line = 0;
  std::optional<SelectorSpec> selector;
  std::size_t selector_line = 0;
  bool in_steps = false;
  std::vector<Utterance> utterances;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = std::min(text.find('\n', pos), text.size());
    const auto raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (in_steps) {
      if (line == kSilenceToken) {
        utterances.push_back(Utterance::silence());
        continue;
      }
      try {
        utterances.emplace_back(line);
      } catch (const InvariantError& e) {
        throw ParseError(line_no, e.what());
      }
      continue;
    }

    const auto colon = line.find(':');
    if (colon == std::string_view::npos)
      throw ParseError(line_no, "expected 'key: value' header");
    const auto key = detail::trim(line.substr(0, colon));
    const auto value = detail::trim(line.substr(colon + 1));

    if (key == "states") {
      if (space) throw ParseError(line_no, "repeated header 'states'");
      try {
        space.emplace(detail::split_labels(value));
      } catch (const InvariantError& e) {
        throw ParseError(line_no, e.what());
      }
    } else if (key == "initial") {
      if (initial_label) throw ParseError(line_no, "repeated header 'initial'");
      initial_label = std::string(value);
      initial_line = line_no;
    } else if (key == "selector") {
      if (selector) throw ParseError(line_no, "repeated header 'selector'");
      try {
        selector = SelectorSpec::parse(value);
      } catch (const SelectorError& e) {
        throw ParseError(line_no, e.what());
      }
      selector_line = line_no;
    } else if (key == "steps") {
      if (!value.empty())
        throw ParseError(line_no, "'steps:' must be alone on its line");
      if (!space) throw ParseError(line_no, "missing header 'states'");
      if (!initial_label) throw ParseError(line_no, "missing header 'initial'");
      if (!selector) throw ParseError(line_no, "missing header 'selector'");
      in_steps = true;
    } else {
      throw ParseError(line_no, "unknown header '" + std::string(key) + "'");
    }
  }

  if (!in_steps) {
    const std::size_t eof_line = line_no + 1;
    if (!space) throw ParseError(eof_line, "missing header 'states'");
    if (!initial_label) throw ParseError(eof_line, "missing header 'initial'");
    if (!selector) throw ParseError(eof_line, "missing header 'selector'");
    throw ParseError(eof_line, "missing header 'steps'");
  }

  const auto initial = space->find(*initial_label);
  if (!initial)
    throw ParseError(initial_line, "unknown state '" + *initial_label + "'");
  for (const auto& l : selector->script)
    if (!space->find(l))
      throw ParseError(selector_line, "unknown state '" + l + "'");

  return {*space, *initial, *selector, std::move(utterances)};
}

inline std::string format_scenario(const Scenario& sc) {
  std::ostringstream out;
  out << "states: ";
  for (std::size_t i = 0; i < sc.space.size(); ++i)
    out << (i ? ", " : "") << sc.space.labels()[i];
  out << "\ninitial: " << sc.space.label(sc.initial) << "\n";
  out << "selector: " << sc.selector.to_string() << "\n";
  out << "steps:\n";
  for (const auto& u : sc.utterances) out << display(u) << "\n";
  return out.str();
}

struct Trace {
  ActionSpace space;
  std::vector<StepReport> reports;
  History history;
  Lexicon lexicon;
  State final_state;
};

inline Trace replay(const Scenario& sc) {
  EngineSession session(sc.space, sc.initial, sc.selector);
  Trace tr;
  tr.space = sc.space;
  for (const auto& u : sc.utterances) tr.reports.push_back(session.step(u));
  tr.history = session.history();
  tr.lexicon = session.lexicon();
  tr.final_state = session.current();
  return tr;
}

enum class TraceStyle { table, records };

inline constexpr std::string_view kRecordsHeader =
    "t\tk\tutterance\tantecedent\tconsequent\trule";

/// One tab-separated record line (no terminator).
inline std::string format_record(const HistoryEntry& e,
                                 std::optional<std::size_t> k,
                                 const ActionSpace& space) {
  std::string out = std::to_string(e.t);
  out += '\t';
  if (k) out += std::to_string(*k);
  out += '\t';
  out += display(e.utterance);
  out += '\t';
  out += space.label(e.pair.antecedent);
  out += '\t';
  out += space.label(e.pair.consequent);
  out += '\t';
  out += to_string(e.rule);
  return out;
}

inline std::string format_records(const History& h, const ActionSpace& space) {
  std::string out(kRecordsHeader);
  out += '\n';
  for (const auto& e : h.entries()) {
    out += format_record(e, h.iteration(e.t), space);
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::string format_table(const Trace& tr) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"k", "t", "a", "b", "c", "UMP", "rule"});
  for (const auto& e : tr.history.entries()) {
    const auto k = tr.history.iteration(e.t);
    const std::string ump = "(" + display(e.utterance) + ", {" +
                            tr.space.format(e.pair) + "})";
    if (k) {
      rows.push_back({std::to_string(*k), std::to_string(e.t),
                      tr.space.label(e.pair.antecedent), display(e.utterance),
                      tr.space.label(e.pair.consequent), ump,
                      std::string(to_string(e.rule))});
    } else {
      rows.push_back({"", std::to_string(e.t), "", "", "", ump,
                      std::string(to_string(e.rule))});
    }
  }

  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i)
      width[i] = std::max(width[i], r[i].size());

  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      // k and t are right-aligned like the numeric columns of a table.
      const auto pad = std::string(width[i] - r[i].size(), ' ');
      line += i < 2 ? pad + r[i] : r[i] + pad;
      if (i + 1 < r.size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace detail

inline std::string format_trace(const Trace& tr, TraceStyle style) {
  return style == TraceStyle::records ? format_records(tr.history, tr.space)
                                      : detail::format_table(tr);
}

}  // namespace dynsem

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

// Line-oriented training loop. Every input line is an utterance; an empty
// line or `<silence>` is silence. Lines starting with ':' are commands:
//   :lexicon  :history  :save <path>  :quit

#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "dynsem/engine.hpp"
#include "dynsem/persistence.hpp"
#include "dynsem/scenario.hpp"

namespace dynsem {

/// Human-readable listing of a lexicon, one utterance per line.
inline std::string format_lexicon(const Lexicon& lex, const ActionSpace& space) {
  std::size_t width = 0;
  for (const auto& [u, m] : lex.entries())
    width = std::max(width, display(u).size());
  std::string out;
  for (const auto& [u, m] : lex.entries()) {
    const auto name = display(u);
    out += name + std::string(width - name.size(), ' ') + "  " +
           m.format(space) + "\n";
  }
  if (lex.empty()) out = "(empty lexicon)\n";
  return out;
}

inline void print_step(std::ostream& out, const StepReport& r,
                       const ActionSpace& space) {
  out << to_string(r.rule) << "  " << space.label(r.antecedent) << " -> "
      << space.label(r.consequent) << "\n";
  for (const auto& e : r.revisions())
    out << "  " << to_string(e.rule) << "  revised " << display(e.utterance)
        << ": " << space.format(e.pair) << "\n";
}

/// Runs until end of input or `:quit`. Returns the exit status.
inline int run_repl(std::istream& in, std::ostream& out, EngineSession& session) {
  const auto& space = session.space();
  std::string line;
  while (true) {
    out << "[" << space.label(session.current()) << "]> " << std::flush;
    if (!std::getline(in, line)) break;
    const auto text = detail::trim(line);

    if (!text.empty() && text.front() == ':') {
      const auto sp = std::min(text.find(' '), text.size());
      const auto cmd = text.substr(0, sp);
      const auto arg = detail::trim(text.substr(sp));
      if (cmd == ":quit") {
        out << "\n";
        return 0;
      } else if (cmd == ":lexicon") {
        out << format_lexicon(session.lexicon(), space);
      } else if (cmd == ":history") {
        out << format_records(session.history(), space);
      } else if (cmd == ":save") {
        if (arg.empty()) {
          out << "usage: :save <path>\n";
          continue;
        }
        std::ofstream file{std::string(arg), std::ios::binary};
        file << export_lexicon(session.lexicon(), space);
        if (!file) {
          out << "error: cannot write " << arg << "\n";
        } else {
          out << "saved " << session.lexicon().size() << " entries to " << arg
              << "\n";
        }
      } else {
        out << "unknown command " << cmd
            << " (try :lexicon, :history, :save <path>, :quit)\n";
      }
      continue;
    }

    try {
      const Utterance u =
          text == kSilenceToken ? Utterance::silence() : Utterance(text);
      print_step(out, session.step(u), space);
    } catch (const Error& e) {
      out << "error: " << e.what() << "\n";
    }
  }
  out << "\n";
  return 0;
}

}  // namespace dynsem

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

// dynsem: replay scenarios, train interactively, serve sessions, inspect
// lexicons. Exit status: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dynsem/engine.hpp"
#include "dynsem/persistence.hpp"
#include "dynsem/repl.hpp"
#include "dynsem/scenario.hpp"
#include "dynsem/service.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDataError = 2;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw DataError("file not found: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path);
}

dynsem::Scenario load_scenario(const std::string& path) {
  const auto text = read_file(path);
  try {
    return dynsem::parse_scenario(text);
  } catch (const dynsem::ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

dynsem::LexiconDocument load_lexicon(const std::string& path) {
  const auto text = read_file(path);
  try {
    return dynsem::import_lexicon(text);
  } catch (const dynsem::PersistenceError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn utterance meanings as partial functions over a finite "
               "action space"};
  app.require_subcommand(1);

  // replay
  std::string replay_file;
  std::string replay_format = "table";
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "Replay a scenario file");
  replay->add_option("file", replay_file, "Scenario file")->required();
  replay->add_option("--format", replay_format, "Output style")
      ->check(CLI::IsMember({"table", "records"}));
  replay->add_option("--out", replay_out, "Write output to a file");

  // repl
  std::string repl_states;
  std::string repl_initial;
  std::string repl_selector = "cyclic";
  std::optional<std::uint64_t> repl_seed;
  std::string repl_load;
  auto* repl = app.add_subcommand("repl", "Interactive training session");
  repl->add_option("--states", repl_states, "Comma-separated state labels")
      ->required();
  repl->add_option("--initial", repl_initial, "Initial state")->required();
  repl->add_option("--selector", repl_selector,
                   "cyclic | random [seed] | scripted <s1,s2,...>");
  repl->add_option("--seed", repl_seed, "Seed for the random selector");
  repl->add_option("--load", repl_load, "Start from a saved lexicon");

  // serve
  int serve_port = 8080;
  std::string serve_bind = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Run the session service");
  serve->add_option("--port", serve_port, "Port (0 picks a free port)")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--bind", serve_bind, "Address to bind");

  // lexicon
  auto* lexicon = app.add_subcommand("lexicon", "Inspect and convert lexicons");
  lexicon->require_subcommand(1);
  std::string show_path;
  auto* show = lexicon->add_subcommand("show", "Print a lexicon document");
  show->add_option("file", show_path, "Lexicon document")->required();
  std::string export_scenario;
  std::string export_out;
  auto* exp = lexicon->add_subcommand(
      "export", "Replay a scenario and write its final lexicon");
  exp->add_option("scenario", export_scenario, "Scenario file")->required();
  exp->add_option("--out", export_out, "Write the document to a file");
  std::string import_path;
  std::string import_out;
  auto* imp = lexicon->add_subcommand(
      "import", "Validate a lexicon document and write it in canonical form");
  imp->add_option("file", import_path, "Lexicon document")->required();
  imp->add_option("--out", import_out, "Write the document to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*replay) {
      const auto trace = dynsem::replay(load_scenario(replay_file));
      const auto style = replay_format == "records"
                             ? dynsem::TraceStyle::records
                             : dynsem::TraceStyle::table;
      write_output(dynsem::format_trace(trace, style), replay_out);
      return kOk;
    }

    if (*repl) {
      std::optional<dynsem::ActionSpace> space;
      dynsem::SelectorSpec selector;
      try {
        space.emplace(dynsem::detail::split_labels(repl_states));
        auto sel_text = repl_selector;
        if (repl_seed) {
          if (dynsem::detail::trim(sel_text) != "random") {
            std::cerr << "--seed requires --selector random\n";
            return kUsage;
          }
          sel_text += " " + std::to_string(*repl_seed);
        } else if (dynsem::detail::trim(sel_text) == "random") {
          sel_text += " 0";
        }
        selector = dynsem::SelectorSpec::parse(sel_text);
        if (!space->find(repl_initial))
          throw dynsem::InvariantError("unknown initial state '" + repl_initial +
                                       "'");
      } catch (const dynsem::Error& e) {
        std::cerr << "error: " << e.what() << "\n" << repl->help();
        return kUsage;
      }
      dynsem::Lexicon lex;
      if (!repl_load.empty()) {
        auto doc = load_lexicon(repl_load);
        if (!(doc.space == *space))
          throw DataError(repl_load + ": lexicon states differ from --states");
        lex = std::move(doc.lexicon);
      }
      dynsem::EngineSession session(*space, repl_initial, selector,
                                    std::move(lex));
      return dynsem::run_repl(std::cin, std::cout, session);
    }

    if (*serve) {
      dynsem::SessionService service;
      dynsem::HttpServer server(service);
      const int port = server.bind(serve_bind, serve_port);
      if (port < 0) {
        std::cerr << "error: cannot bind " << serve_bind << ":" << serve_port
                  << " (port in use?)\n";
        return kDataError;
      }
      std::cout << "listening on " << serve_bind << ":" << port << std::endl;
      return server.listen() ? kOk : kDataError;
    }

    if (*show) {
      const auto doc = load_lexicon(show_path);
      std::cout << "states: ";
      for (std::size_t i = 0; i < doc.space.size(); ++i)
        std::cout << (i ? ", " : "") << doc.space.labels()[i];
      std::cout << "\n" << dynsem::format_lexicon(doc.lexicon, doc.space);
      return kOk;
    }

    if (*exp) {
      const auto trace = dynsem::replay(load_scenario(export_scenario));
      write_output(dynsem::export_lexicon(trace.lexicon, trace.space), export_out);
      return kOk;
    }

    if (*imp) {
      const auto doc = load_lexicon(import_path);
      write_output(dynsem::export_lexicon(doc.lexicon, doc.space), import_out);
      return kOk;
    }
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const dynsem::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

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

// Strategies that pick the consequent when the user dissents. Every
// strategy returns a state different from the current one.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dynsem/semantics.hpp"

namespace dynsem {

class SelectorError : public Error {
public:
  using Error::Error;
};

/// Textual description of a selector, independent of any action space:
///   cyclic | random <seed> | scripted <label,label,...>
struct SelectorSpec {
  enum class Kind { cyclic, random, scripted };

  Kind kind = Kind::cyclic;
  std::uint64_t seed = 0;
  std::vector<std::string> script;

  static SelectorSpec cyclic() { return {}; }
  static SelectorSpec random(std::uint64_t seed) {
    return {Kind::random, seed, {}};
  }
  static SelectorSpec scripted(std::vector<std::string> labels) {
    return {Kind::scripted, 0, std::move(labels)};
  }

  static SelectorSpec parse(std::string_view text) {
    const auto t = detail::trim(text);
    const auto sp = std::min(t.find_first_of(" \t"), t.size());
    const auto kind = t.substr(0, sp);
    const auto arg = detail::trim(t.substr(sp));
    if (kind == "cyclic") {
      if (!arg.empty())
        throw SelectorError("selector 'cyclic' takes no argument");
      return cyclic();
    }
    if (kind == "random") {
      std::uint64_t seed = 0;
      std::istringstream in{std::string(arg)};
      if (arg.empty() || arg.front() == '-' || !(in >> seed) || !in.eof())
        throw SelectorError("selector 'random' needs an unsigned integer seed");
      return random(seed);
    }
    if (kind == "scripted") {
      std::vector<std::string> labels;
      std::size_t pos = 0;
      while (pos <= arg.size() && !arg.empty()) {
        const auto comma = std::min(arg.find(',', pos), arg.size());
        const auto label = detail::trim(arg.substr(pos, comma - pos));
        if (label.empty())
          throw SelectorError("selector 'scripted' has an empty state label");
        labels.emplace_back(label);
        pos = comma + 1;
      }
      if (labels.empty())
        throw SelectorError("selector 'scripted' needs at least one state");
      return scripted(std::move(labels));
    }
    throw SelectorError("unknown selector kind '" + std::string(kind) + "'");
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::cyclic:
        return "cyclic";
      case Kind::random:
        return "random " + std::to_string(seed);
      case Kind::scripted: {
        std::string out = "scripted ";
        for (std::size_t i = 0; i < script.size(); ++i) {
          if (i) out += ",";
          out += script[i];
        }
        return out;
      }
    }
    return {};
  }

  friend bool operator==(const SelectorSpec&, const SelectorSpec&) = default;
};

/// Chooses c != a for a dissenting utterance in state a.
///
/// The cyclic selector returns the successor of a in the action space order,
/// wrapping at the end; over two states it is the binary complement. The
/// random selector draws uniformly from the other states using a 64-bit
/// Mersenne Twister so that a seed replays identically on every platform.
/// The scripted selector hands out a fixed list of states in order.
class ConsequentSelector {
public:
  ConsequentSelector(const ActionSpace& space, const SelectorSpec& spec)
      : space_(space), spec_(spec) {
    if (space_.size() < 2)
      throw SelectorError("selector needs an action space of at least 2 states");
    if (spec.kind == SelectorSpec::Kind::random) rng_.seed(spec.seed);
    if (spec.kind == SelectorSpec::Kind::scripted)
      for (const auto& l : spec.script) {
        auto s = space_.find(l);
        if (!s) throw SelectorError("scripted selector: unknown state '" + l + "'");
        script_.push_back(*s);
      }
  }

  State select(State a) {
    if (!space_.contains(a))
      throw SelectorError("selector: state outside action space");
    switch (spec_.kind) {
      case SelectorSpec::Kind::cyclic:
        return space_.successor(a);
      case SelectorSpec::Kind::random: {
        // Uniform over the n-1 other states; skip over a.
        const auto n = static_cast<std::uint64_t>(space_.size());
        auto i = static_cast<std::size_t>(rng_() % (n - 1));
        if (i >= a.index) ++i;
        return State{i};
      }
      case SelectorSpec::Kind::scripted: {
        if (next_ >= script_.size())
          throw SelectorError("scripted selector exhausted after " +
                              std::to_string(script_.size()) + " choices");
        const State c = script_[next_++];
        if (c == a)
          throw SelectorError("scripted selector: entry " +
                              std::to_string(next_ - 1) + " ('" +
                              space_.label(c) + "') equals the current state");
        return c;
      }
    }
    return space_.successor(a);
  }

  const SelectorSpec& spec() const { return spec_; }
  const ActionSpace& space() const { return space_; }

private:
  ActionSpace space_;
  SelectorSpec spec_;
  std::mt19937_64 rng_;
  std::vector<State> script_;
  std::size_t next_ = 0;
};

}  // namespace dynsem

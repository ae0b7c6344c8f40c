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

#include <gtest/gtest.h>

#include <random>

#include "dynsem/engine.hpp"
#include "properties.hpp"
#include "test_support.hpp"

namespace dynsem {
namespace {

using testing::Binary;
using testing::kGrandma;
using testing::kSilence;
using testing::Ternary;
using testing::U;

EngineSession run(const ActionSpace& space, State initial,
                  const std::vector<Utterance>& us, std::size_t count) {
  EngineSession s(space, initial, SelectorSpec::cyclic());
  for (std::size_t i = 0; i < count; ++i) s.step(us[i]);
  return s;
}

TEST(SessionNew, StartsEmpty) {
  Binary b;
  EngineSession s(b.space, b.H, SelectorSpec::cyclic());
  EXPECT_TRUE(s.lexicon().empty());
  EXPECT_TRUE(s.history().empty());
  EXPECT_EQ(s.iteration(), 0u);
  EXPECT_EQ(s.current(), b.H);
  Ternary x;
  EXPECT_EQ(EngineSession(x.space, "Heat", SelectorSpec::cyclic()).current(),
            x.H);
}

TEST(SessionNew, RejectsBadConfig) {
  Binary b;
  EXPECT_THROW(EngineSession(b.space, State{5}, SelectorSpec::cyclic()),
               InvariantError);
  EXPECT_THROW(EngineSession(ActionSpace({"only"}), State{0},
                             SelectorSpec::cyclic()),
               InvariantError);
  EXPECT_THROW(EngineSession(b.space, "Semi", SelectorSpec::cyclic()),
               InvariantError);
}

TEST(Step, FirstSilenceAgrees) {
  Binary b;
  EngineSession s(b.space, b.H, SelectorSpec::cyclic());
  const auto r = s.step(kSilence);
  EXPECT_EQ(r.rule, Rule::R1a);
  ASSERT_EQ(r.appended.size(), 1u);
  EXPECT_EQ(r.appended[0], (HistoryEntry{0, kSilence, {b.H, b.H}, Rule::R1a}));
  EXPECT_EQ(s.current(), b.H);

  const auto r2 = s.step(U(kGrandma));
  EXPECT_EQ(r2.rule, Rule::R1b);
  ASSERT_EQ(r2.appended.size(), 1u);
  EXPECT_EQ(r2.appended[0].pair, (AcPair{b.H, b.N}));
  EXPECT_EQ(s.iteration(), 2u);
}

TEST(Step, DissentRevisesEarlierUtterance) {
  Binary b;
  const auto us = testing::scenario1_utterances();
  auto s = run(b.space, b.H, us, 4);
  ASSERT_EQ(s.current(), b.H);
  const auto r = s.step(U("no!"));
  EXPECT_EQ(r.rule, Rule::R1b);
  ASSERT_EQ(r.appended.size(), 2u);
  EXPECT_EQ(r.appended[0], (HistoryEntry{4, U("no!"), {b.H, b.N}, Rule::R1b}));
  EXPECT_EQ(r.appended[1], (HistoryEntry{5, U(kGrandma), {b.N, b.N}, Rule::R3}));
  ASSERT_EQ(r.lexicon_changes.size(), 2u);
  EXPECT_EQ(r.lexicon_changes[1].before, (AcPair{b.N, b.H}));
}

TEST(Step, RepeatedDissentRevisesTwoUtterances) {
  Ternary x;
  const auto us = testing::scenario2_utterances();
  auto s = run(x.space, x.H, us, 5);
  ASSERT_EQ(s.current(), x.H);
  const auto r = s.step(U("no!"));
  EXPECT_EQ(r.rule, Rule::R2bii);
  ASSERT_EQ(r.appended.size(), 3u);
  EXPECT_EQ(r.appended[0], (HistoryEntry{6, U("no!"), {x.H, x.N}, Rule::R2bii}));
  EXPECT_EQ(r.appended[1], (HistoryEntry{7, U("no!"), {x.S, x.N}, Rule::R3}));
  EXPECT_EQ(r.appended[2], (HistoryEntry{8, U(kGrandma), {x.N, x.N}, Rule::R3}));
}

TEST(Step, ApplyTriggersRevisionInLatestOccurrenceOrder) {
  Ternary x;
  const auto us = testing::scenario2_utterances();
  auto s = run(x.space, x.H, us, 9);
  const auto r = s.step(U(kGrandma));
  EXPECT_EQ(r.rule, Rule::R2a);
  ASSERT_EQ(r.appended.size(), 3u);
  EXPECT_EQ(r.appended[1], (HistoryEntry{14, U(kGrandma), {x.S, x.N}, Rule::R3}));
  EXPECT_EQ(r.appended[2], (HistoryEntry{15, U("heat!"), {x.N, x.N}, Rule::R3}));
}

TEST(Step, RejectsControlCharactersBeforeStepping) {
  EXPECT_THROW(U("he\x02y"), InvariantError);
}

TEST(Step, SelectorErrorsPropagateWithoutSideEffects) {
  Binary b;
  EngineSession s(b.space, b.H, SelectorSpec::scripted({"NoHeat"}));
  s.step(U("a"));
  EXPECT_THROW(s.step(U("b")), SelectorError);
  EXPECT_EQ(s.history().size(), 1u);
  EXPECT_EQ(s.lexicon().size(), 1u);
  EXPECT_EQ(s.iteration(), 1u);
}

TEST(Mras, ScenarioTwoPoints) {
  Ternary x;
  const auto s = run(x.space, x.H, testing::scenario2_utterances(), 14);
  EXPECT_EQ(mras(s.history(), 6), 2u);
  EXPECT_EQ(mras(s.history(), 13), 9u);
  EXPECT_EQ(mras(History{}, 0), std::nullopt);
}

TEST(Mras, IgnoresRevisionEntries) {
  // Scenario 1 entry t=5 is an R3 fixed point; mras(5) must skip it.
  Binary b;
  const auto s = run(b.space, b.H, testing::scenario1_utterances(), 5);
  ASSERT_EQ(s.history()[5].rule, Rule::R3);
  ASSERT_TRUE(s.history()[5].pair.is_fixed_point());
  EXPECT_EQ(mras(s.history(), 5), 2u);
}

TEST(Mras, SentinelWhenNothingAccepted) {
  Binary b;
  EngineSession s(b.space, b.H, SelectorSpec::cyclic());
  s.step(U("go"));
  EXPECT_EQ(mras(s.history(), 0), std::nullopt);
}

TEST(LastUpdate, ReadsHistory) {
  Ternary x;
  const auto s = run(x.space, x.H, testing::scenario2_utterances(), 14);
  EXPECT_EQ(last_update(s.history(), U("no!"), 5), (AcPair{x.S, x.H}));
  EXPECT_EQ(last_update(s.history(), U("heat!"), 12), (AcPair{x.N, x.H}));
  EXPECT_EQ(last_update(s.history(), U("never said"), 20), std::nullopt);
}

TEST(Revise, FirstEntryIsRevisableWithoutAcceptedState) {
  // Nothing accepted yet: the revision range starts at t=0.
  Binary b;
  EngineSession s(b.space, b.H, SelectorSpec::cyclic());
  s.step(U("a"));   // (H, N)
  const auto r = s.step(U("b"));  // (N, H), revises a: (H, N) -> (H, H)
  ASSERT_EQ(r.appended.size(), 2u);
  EXPECT_EQ(r.appended[1], (HistoryEntry{2, U("a"), {b.H, b.H}, Rule::R3}));
}

TEST(Revise, DirectCallWithOtherConsequent) {
  // After scenario 2 through t=8, revising tau=6 towards Semi visits the keys
  // (no!,S)@4, (grandma,NoHeat)@5, (no!,Heat)@6, all currently NoHeat.
  Ternary x;
  auto s = run(x.space, x.H, testing::scenario2_utterances(), 6);
  ASSERT_EQ(s.history().size(), 9u);
  const auto out = s.revise(6, x.S);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], (HistoryEntry{9, U("no!"), {x.S, x.S}, Rule::R3}));
  EXPECT_EQ(out[1], (HistoryEntry{10, U(kGrandma), {x.N, x.S}, Rule::R3}));
  EXPECT_EQ(out[2], (HistoryEntry{11, U("no!"), {x.H, x.S}, Rule::R3}));
}

TEST(Revise, EmptyWhenOnlyTriggerInRange) {
  Binary b;
  auto s = run(b.space, b.H, testing::scenario1_utterances(), 2);
  EXPECT_TRUE(s.revise(1, b.N).empty());
}

TEST(Revise, RejectsAcceptedOrMissingTrigger) {
  Binary b;
  auto s = run(b.space, b.H, testing::scenario1_utterances(), 3);
  EXPECT_THROW(s.revise(0, b.H), EngineError);
  EXPECT_THROW(s.revise(99, b.H), EngineError);
}

TEST(Engine, ReUtteranceConvergesOnPaperTraces) {
  Binary b;
  const auto us = testing::scenario1_utterances();
  EngineSession s(b.space, b.H, SelectorSpec::cyclic());
  for (std::size_t k = 0; k < us.size(); ++k) {
    const auto r = s.step(us[k]);
    // Steps 7 and 11 revise and are followed by the same utterance.
    if (k == 7 || k == 11) {
      ASSERT_GT(r.appended.size(), 1u);
      ASSERT_EQ(us[k + 1], us[k]);
      EngineSession probe = s;
      const auto again = probe.step(us[k]);
      EXPECT_EQ(again.rule, Rule::R2a);
      EXPECT_EQ(again.appended.size(), 1u);
      EXPECT_EQ(again.consequent, again.antecedent);
    }
  }
}

class EngineProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(EngineProperties, InvariantsHoldAfterEveryStep) {
  std::mt19937_64 rng(GetParam());
  const auto space = testing::random_space(rng);
  const State initial{rng() % space.size()};
  const auto spec =
      GetParam() % 2 ? SelectorSpec::random(rng()) : SelectorSpec::cyclic();
  EngineSession s(space, initial, spec);
  std::optional<State> last_non_r3;
  for (int i = 0; i < 200; ++i) {
    const auto before = s.lexicon();
    const auto prev = s.current();
    const auto u = testing::random_utterance(rng);
    const auto r = s.step(u);
    ASSERT_EQ(testing::check_step(before, prev, r, s), "") << "step " << i;
    if (last_non_r3) EXPECT_EQ(r.antecedent, *last_non_r3);
    last_non_r3 = r.consequent;

    // Accepted re-utterance: apply, same state, no revision.
    if (r.appended.size() > 1 && s.lexicon().at(u).accepts(s.current())) {
      EngineSession probe = s;
      const auto again = probe.step(u);
      EXPECT_EQ(again.rule, Rule::R2a);
      EXPECT_EQ(again.appended.size(), 1u);
    }
  }
  EXPECT_EQ(s.iteration(), 200u);
}

INSTANTIATE_TEST_SUITE_P(Seeds, EngineProperties,
                         ::testing::Range<std::uint64_t>(1, 51));

TEST(Engine, DeterministicGivenSeed) {
  std::mt19937_64 rng(99);
  std::vector<Utterance> us;
  for (int i = 0; i < 300; ++i) us.push_back(testing::random_utterance(rng));
  Ternary x;
  EngineSession a(x.space, x.H, SelectorSpec::random(5));
  EngineSession b(x.space, x.H, SelectorSpec::random(5));
  for (const auto& u : us) {
    a.step(u);
    b.step(u);
  }
  EXPECT_EQ(a.history(), b.history());
  EXPECT_EQ(a.lexicon(), b.lexicon());
}

TEST(Engine, LoadedLexiconIsValidated) {
  Binary b;
  Ternary x;
  EXPECT_THROW(EngineSession(b.space, b.H, SelectorSpec::cyclic(),
                             testing::lexicon_m14()),
               InvariantError);
  EngineSession s(x.space, x.H, SelectorSpec::cyclic(), testing::lexicon_m14());
  EXPECT_EQ(s.step(U(kGrandma)).rule, Rule::R2a);
}

}  // namespace
}  // namespace dynsem

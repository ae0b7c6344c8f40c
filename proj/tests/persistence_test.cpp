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

#include "dynsem/persistence.hpp"
#include "dynsem/scenario.hpp"
#include "test_support.hpp"

namespace dynsem {
namespace {

using testing::Binary;
using testing::kSilence;
using testing::Ternary;
using testing::U;
using Kind = PersistenceError::Kind;

Kind import_error(std::string_view text) {
  try {
    import_lexicon(text);
  } catch (const PersistenceError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "import succeeded: " << text;
  return Kind::malformed;
}

TEST(ExportLexicon, SingleEntry) {
  Binary b;
  const auto m1 = Lexicon{}.upsert(kSilence, Meaning({{b.H, b.H}}));
  const auto doc = Json::parse(export_lexicon(m1, b.space));
  EXPECT_EQ(doc["version"], 1);
  EXPECT_EQ(doc["states"], Json::parse(R"(["NoHeat","Heat"])"));
  ASSERT_EQ(doc["entries"].size(), 1u);
  EXPECT_EQ(doc["entries"][0]["utterance"], "");
  EXPECT_EQ(doc["entries"][0]["pairs"], Json::parse(R"([{"a":"Heat","c":"Heat"}])"));
}

TEST(ExportLexicon, Empty) {
  Binary b;
  const auto doc = Json::parse(export_lexicon(Lexicon{}, b.space));
  EXPECT_TRUE(doc["entries"].empty());
}

TEST(ExportLexicon, FinalThreeStateLexicon) {
  Ternary x;
  const auto text = export_lexicon(testing::lexicon_m14(), x.space);
  const auto doc = Json::parse(text);
  ASSERT_EQ(doc["entries"].size(), 5u);
  // Sorted by utterance bytes: "", "I go...", "good boy!", "heat!", "no!".
  EXPECT_EQ(doc["entries"][1]["utterance"], testing::kGrandma);
  EXPECT_EQ(doc["entries"][1]["pairs"],
            Json::parse(R"([{"a":"Heat","c":"NoHeat"},{"a":"NoHeat","c":"NoHeat"},{"a":"Semi","c":"NoHeat"}])"));
  EXPECT_EQ(doc["entries"][4]["utterance"], "no!");
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(ImportLexicon, RoundTripsScenarioTwo) {
  Ternary x;
  const auto doc = import_lexicon(export_lexicon(testing::lexicon_m14(), x.space));
  EXPECT_EQ(doc.space, x.space);
  EXPECT_EQ(doc.lexicon, testing::lexicon_m14());
}

TEST(ImportLexicon, RoundTripsRandomLexicons) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    const auto space = testing::random_space(rng);
    const auto lex = testing::random_lexicon(rng, space);
    const auto text = export_lexicon(lex, space);
    const auto doc = import_lexicon(text);
    EXPECT_EQ(doc.lexicon, lex);
    EXPECT_EQ(doc.space, space);
    EXPECT_EQ(export_lexicon(doc.lexicon, doc.space), text);
  }
}

TEST(ImportLexicon, DuplicateAntecedentIsSoundnessViolation) {
  EXPECT_EQ(import_error(R"({"version":1,"states":["NoHeat","Heat"],"entries":[
              {"utterance":"x","pairs":[{"a":"Heat","c":"NoHeat"},{"a":"Heat","c":"Heat"}]}]})"),
            Kind::soundness_violation);
}

TEST(ImportLexicon, UndeclaredState) {
  EXPECT_EQ(import_error(R"({"version":1,"states":["NoHeat","Heat"],"entries":[
              {"utterance":"x","pairs":[{"a":"Semi","c":"Heat"}]}]})"),
            Kind::unknown_state);
}

TEST(ImportLexicon, VersionMismatch) {
  EXPECT_EQ(import_error(R"({"version":2,"states":["a","b"],"entries":[]})"),
            Kind::version_mismatch);
}

TEST(ImportLexicon, OtherDiagnostics) {
  EXPECT_EQ(import_error("not json"), Kind::malformed);
  EXPECT_EQ(import_error(R"([1,2])"), Kind::malformed);
  EXPECT_EQ(import_error(R"({"version":1,"states":["a","b"]})"), Kind::malformed);
  EXPECT_EQ(import_error(R"({"version":"1","states":["a","b"],"entries":[]})"),
            Kind::malformed);
  EXPECT_EQ(import_error(R"({"version":1,"states":["a"],"entries":[]})"),
            Kind::invalid_space);
  EXPECT_EQ(import_error(R"({"version":1,"states":["a","a"],"entries":[]})"),
            Kind::invalid_space);
  EXPECT_EQ(import_error(R"({"version":1,"states":["a","b"],"entries":[
              {"utterance":"x","pairs":[]},{"utterance":" x ","pairs":[]}]})"),
            Kind::duplicate_utterance);
  EXPECT_EQ(import_error(R"({"version":1,"states":["a","b"],"entries":[
              {"utterance":"x","pairs":[{"a":" a","c":"b"}]}]})"),
            Kind::unknown_state);
}

TEST(History, ExportImportRoundTrip) {
  const auto tr = replay(parse_scenario(testing::read_fixture("scenario2.scn")));
  const auto text = export_history(tr.history, tr.space);
  const auto doc = import_history(text);
  EXPECT_EQ(doc.space, tr.space);
  EXPECT_EQ(doc.history, tr.history);
  EXPECT_EQ(format_records(doc.history, doc.space),
            testing::read_fixture("scenario2.records.tsv"));
}

TEST(History, RejectsGapsAndUnknownRules) {
  EXPECT_THROW(import_history(R"({"version":1,"states":["a","b"],"history":[
                 {"t":1,"k":0,"utterance":"","antecedent":"a","consequent":"a","rule":"R1a"}]})"),
               PersistenceError);
  EXPECT_THROW(import_history(R"({"version":1,"states":["a","b"],"history":[
                 {"t":0,"k":0,"utterance":"","antecedent":"a","consequent":"a","rule":"R9"}]})"),
               PersistenceError);
}

}  // namespace
}  // namespace dynsem

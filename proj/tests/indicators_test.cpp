#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ccpd/indicators.hpp"
#include "ccpd/oracle.hpp"
#include "support/brute_force.hpp"
#include "support/generators.hpp"

namespace ccpd {
namespace {

constexpr double kTol = 1e-12;

TEST(Combine, ScalarExamples) {
  EXPECT_NEAR(combine_r_der(0.25, 0.1, 0.02), 0.04, kTol);
  EXPECT_NEAR(*redri_from(0.04, 0.08), 0.5, kTol);
  EXPECT_FALSE(redri_from(0.0, 0.0).has_value());
  EXPECT_FALSE(redri_from(0.3, 0.0).has_value());
  EXPECT_NEAR(*redri_from(0.0, 0.2), 1.0, kTol);
  // a selection that does worse than the baseline goes negative
  EXPECT_LT(*redri_from(0.3, 0.2), 0.0);
}

TEST(Der, OneErrorInFourLetters) {
  const std::vector<Label> truth{Label::Fatha, Label::Damma, Label::Kasra, Label::Sukun};
  const std::vector<Label> pred{Label::Fatha, Label::Damma, Label::Kasra, Label::Fatha};
  LetterLayout layout;
  layout.word_offsets = {0, 2, 4};
  EXPECT_DOUBLE_EQ(der(pred, truth, layout), 0.25);
  EXPECT_DOUBLE_EQ(wer(pred, truth, layout), 0.5);
  // the error sits on a case ending
  EXPECT_DOUBLE_EQ(der(pred, truth, layout, {Subset::All, CaseEndings::Exclude}), 0.0);
  EXPECT_DOUBLE_EQ(wer(pred, truth, layout, CaseEndings::Exclude), 0.0);
}

TEST(Wer, OneWrongWordInFive) {
  LetterLayout layout;
  layout.word_offsets = {0, 1, 3, 4, 6, 7};
  std::vector<Label> truth(7, Label::Fatha), pred = truth;
  pred[4] = Label::Damma;
  EXPECT_DOUBLE_EQ(wer(pred, truth, layout), 0.2);
  // single-letter words drop out without case endings
  EXPECT_DOUBLE_EQ(wer(pred, truth, layout, CaseEndings::Exclude), 0.5);
}

TEST(Der, ScopesNeedMask) {
  const std::vector<Label> a(3, Label::None);
  LetterLayout layout;
  layout.word_offsets = {0, 3};
  EXPECT_THROW(der(a, a, layout, {Subset::Marked, CaseEndings::Include}), ConfigError);
  const SelectionMask short_mask = SelectionMask::all(2, true);
  EXPECT_THROW(der(a, a, layout, {Subset::Marked, CaseEndings::Include}, &short_mask), ShapeError);
  const std::vector<Label> b(2, Label::None);
  EXPECT_THROW(der(a, b, layout), ShapeError);
  EXPECT_THROW(wer(b, b, layout), ShapeError);
}

TEST(Sr, CountsMaskAndRejectsEmpty) {
  SelectionMask m = SelectionMask::all(4, false);
  m.marked[1] = true;
  EXPECT_DOUBLE_EQ(sr(m), 0.25);
  EXPECT_THROW(sr(SelectionMask{}), EmptyScope);
}

TEST(IndicatorRow, EmptyScopesAreFlagged) {
  testing::Rng rng(1);
  const Sentence s = testing::random_sentence(rng, 4, 4);
  const auto g = testing::random_grid(rng, s.letter_count());
  const auto none = indicator_row("x", Evaluation::of(s, g, SelectionMask::all(s.letter_count(), false)));
  EXPECT_TRUE(none.p_der_empty);
  EXPECT_FALSE(none.h_der_empty);
  EXPECT_DOUBLE_EQ(none.p_der, 0.0);
  EXPECT_DOUBLE_EQ(none.sr, 0.0);
  const auto all = indicator_row("x", Evaluation::of(s, g, SelectionMask::all(s.letter_count(), true)));
  EXPECT_FALSE(all.p_der_empty);
  EXPECT_TRUE(all.h_der_empty);
  EXPECT_DOUBLE_EQ(all.sr, 1.0);
}

TEST(Evaluation, ShapeMismatchThrows) {
  testing::Rng rng(2);
  const Sentence s = testing::sentence_of({testing::random_word(rng, 4, 4)});
  Evaluation e;
  EXPECT_THROW(e.add(s, testing::random_grid(rng, 3), SelectionMask::all(4, true)), ShapeError);
  EXPECT_THROW(e.add(s, testing::random_grid(rng, 4), SelectionMask::all(3, true)), ShapeError);
}

struct RandomInstance {
  std::vector<Sentence> truth;
  std::vector<PredictionGrid> grids;
  std::vector<SelectionMask> masks;
  Evaluation eval;
};

RandomInstance random_instance(testing::Rng& rng, bool hard) {
  RandomInstance r;
  std::size_t letters = 0;
  const std::size_t budget = testing::uniform_int(rng, 1, 200);
  while (letters < budget) {
    Sentence s = testing::random_sentence(rng, 6, 6);
    if (letters + s.letter_count() > 200) break;
    letters += s.letter_count();
    auto g = testing::random_grid(rng, s.letter_count());
    auto m = hard ? mark_hard(g) : testing::random_mask(rng, s.letter_count());
    r.eval.add(s, g, m);
    r.truth.push_back(std::move(s));
    r.grids.push_back(std::move(g));
    r.masks.push_back(std::move(m));
  }
  if (r.truth.empty()) {
    Sentence s = testing::sentence_of({testing::random_word(rng, 1, 1)});
    auto g = testing::random_grid(rng, 1);
    auto m = hard ? mark_hard(g) : testing::random_mask(rng, 1);
    r.eval.add(s, g, m);
    r.truth.push_back(s);
    r.grids.push_back(g);
    r.masks.push_back(m);
  }
  return r;
}

void expect_matches_brute_force(const RandomInstance& r) {
  const auto want = testing::brute_indicators(testing::brute_instance(r.truth, r.grids, r.masks));
  const Evaluation& e = r.eval;
  EXPECT_NEAR(sr(e), want.sr, kTol);
  EXPECT_NEAR(p_der(e), want.p_der, kTol);
  EXPECT_NEAR(b_der(e), want.b_der, kTol);
  EXPECT_NEAR(h_der(e), want.h_der, kTol);
  EXPECT_NEAR(r_der(e), want.r_der, kTol);
  ASSERT_EQ(redri(e).has_value(), want.redri.has_value());
  if (want.redri) {
    EXPECT_NEAR(*redri(e), *want.redri, kTol);
  }
  EXPECT_NEAR(der(e.sent, e.truth, e.layout), want.der_ce, kTol);
  EXPECT_NEAR(der(e.sent, e.truth, e.layout, {Subset::All, CaseEndings::Exclude}), want.der_nce, kTol);
  EXPECT_NEAR(der(e.sent, e.truth, e.layout, {Subset::Marked, CaseEndings::Exclude}, &e.mask), want.der_marked_nce,
              kTol);
  EXPECT_NEAR(der(e.sent, e.truth, e.layout, {Subset::Unmarked, CaseEndings::Exclude}, &e.mask),
              want.der_unmarked_nce, kTol);
  EXPECT_NEAR(wer(e.sent, e.truth, e.layout), want.wer_ce, kTol);
  EXPECT_NEAR(wer(e.sent, e.truth, e.layout, CaseEndings::Exclude), want.wer_nce, kTol);
}

TEST(Indicators, MatchBruteForceOnRandomInstances) {
  testing::Rng rng(3);
  for (int iter = 0; iter < 200; ++iter) expect_matches_brute_force(random_instance(rng, false));
}

TEST(Indicators, HardModeRDerEqualsContextualDer) {
  testing::Rng rng(4);
  for (int iter = 0; iter < 200; ++iter) {
    const auto r = random_instance(rng, true);
    expect_matches_brute_force(r);
    EXPECT_NEAR(r_der(r.eval), der(r.eval.sent, r.eval.truth, r.eval.layout), kTol);
  }
}

TEST(Indicators, PartitionIdentity) {
  testing::Rng rng(5);
  for (int iter = 0; iter < 100; ++iter) {
    const auto r = random_instance(rng, false);
    const Evaluation& e = r.eval;
    const Rate m = der_rate(e.word, e.truth, e.layout, {Subset::Marked, CaseEndings::Include}, &e.mask);
    const Rate u = der_rate(e.word, e.truth, e.layout, {Subset::Unmarked, CaseEndings::Include}, &e.mask);
    EXPECT_EQ(m.total + u.total, e.truth.size());
    EXPECT_NEAR(combine_r_der(sr(e), m.value(), u.value()), b_der(e), kTol);
  }
}

TEST(Indicators, SingleSentenceFormsAgree) {
  testing::Rng rng(6);
  const Sentence s = testing::random_sentence(rng, 6, 5);
  const auto g = testing::random_grid(rng, s.letter_count());
  const auto m = testing::random_mask(rng, s.letter_count());
  const auto e = Evaluation::of(s, g, m);
  EXPECT_EQ(p_der(g, s, m), p_der(e));
  EXPECT_EQ(b_der(g, s), b_der(e));
  EXPECT_EQ(h_der(g, s, m), h_der(e));
  EXPECT_EQ(r_der(g, s, m), r_der(e));
  EXPECT_EQ(redri(g, s, m), redri(e));
}

TEST(Report, OracleWithWordFlipsSelectsExactlyTheFlips) {
  testing::Rng rng(7);
  auto truth = std::make_shared<const Corpus>(testing::random_corpus_with_letters(rng, 5000, false));
  const auto pair = oracle_predictor(truth, 0.0, 0.3, 2);
  CcpdConfig cfg;
  cfg.inference = Inference::SinglePass;
  const auto row = report(*truth, {{"oracle", pair.predictors(), cfg}}).rows.at(0);
  EXPECT_NEAR(row.sr, 0.3, 0.02);
  EXPECT_EQ(row.p_der, 0.0);
  EXPECT_EQ(row.h_der, 0.0);
  EXPECT_EQ(row.r_der, 0.0);
  EXPECT_NEAR(row.b_der, row.sr, kTol);
  ASSERT_TRUE(row.redri.has_value());
  EXPECT_EQ(*row.redri, 1.0);
  EXPECT_EQ(row.der_ce, 0.0);
  EXPECT_EQ(row.wer_no_ce, 0.0);
}

TEST(Report, ExactOracleHasUndefinedRedri) {
  testing::Rng rng(8);
  auto truth = std::make_shared<const Corpus>(testing::random_corpus_with_letters(rng, 300));
  const auto pair = oracle_predictor(truth, 0.0, 0.0, 2);
  const auto rep = report(*truth, {{"oracle", pair.predictors(), CcpdConfig{}}});
  const auto& row = rep.rows.at(0);
  EXPECT_EQ(row.sr, 0.0);
  EXPECT_TRUE(row.p_der_empty);
  EXPECT_FALSE(row.redri.has_value());
  const std::string tsv = format_tsv(rep);
  EXPECT_EQ(tsv,
            "system\tsr\tp_der\th_der\tr_der\tredri\tder_ce\twer_ce\tder_nce\twer_nce\n"
            "oracle\t0.000000\t0.000000\t0.000000\t0.000000\tNA\t0.000000\t0.000000\t0.000000\t0.000000\n");
  const auto j = nlohmann::json::parse(format_json(rep));
  EXPECT_TRUE(j["redri"].is_null());
  EXPECT_EQ(j["sr"], 0.0);
  EXPECT_EQ(j["flags"], nlohmann::json({"sr_out_of_band", "p_der_empty"}));
  EXPECT_THROW(report(*truth, {}), ConfigError);
}

TEST(SrBand, Edges) {
  EXPECT_FALSE(sr_outside_band(0.01));
  EXPECT_FALSE(sr_outside_band(0.30));
  EXPECT_FALSE(sr_outside_band(0.065));
  EXPECT_TRUE(sr_outside_band(0.0099999));
  EXPECT_TRUE(sr_outside_band(0.3000001));
  EXPECT_TRUE(sr_outside_band(0.0));
  EXPECT_TRUE(sr_outside_band(1.0));
  // exact fractions landing on the edges
  SelectionMask m = SelectionMask::all(100, false);
  m.marked[0] = true;
  EXPECT_FALSE(sr_outside_band(sr(m)));
  SelectionMask w = SelectionMask::all(10, false);
  for (int i = 0; i < 3; ++i) w.marked[static_cast<std::size_t>(i)] = true;
  EXPECT_FALSE(sr_outside_band(sr(w)));
  w.marked[3] = true;
  EXPECT_TRUE(sr_outside_band(sr(w)));
}

TEST(Format, JsonRoundsAndOrdersKeys) {
  IndicatorRow r;
  r.system = "demo";
  r.sr = 0.0654321987;
  r.p_der = 0.112;
  r.h_der = 0.0123;
  r.r_der = 0.018;
  r.redri = 0.4;
  r.der_ce = 0.0185;
  r.wer_ce = 0.0553;
  const IndicatorReport rep{{r}};
  const std::string line = format_json(rep);
  EXPECT_EQ(line.rfind("{\"system\":\"demo\",\"sr\":0.065432,", 0), 0u) << line;
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["flags"], nlohmann::json::array());
  EXPECT_DOUBLE_EQ(j["redri"].get<double>(), 0.4);
  const std::string tsv = format_tsv(rep);
  EXPECT_NE(tsv.find("demo\t0.065432\t0.112000\t0.012300\t0.018000\t0.400000\t0.018500\t0.055300\t"),
            std::string::npos)
      << tsv;
}

}  // namespace
}  // namespace ccpd

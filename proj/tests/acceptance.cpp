// Acceptance suite: one PASS/FAIL/SKIP line per criterion, nonzero exit when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "ccpd/ccpd.hpp"
#include "support/brute_force.hpp"
#include "support/generators.hpp"

using namespace ccpd;

namespace {

struct Outcome {
  enum class Status { Pass, Fail, Skip } status = Status::Pass;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Status::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Status::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::Status::Skip, std::move(d)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

struct Instance {
  std::vector<Sentence> truth;
  std::vector<PredictionGrid> grids;
  std::vector<SelectionMask> masks, hard_masks;
};

Instance random_instance(testing::Rng& rng) {
  Instance r;
  std::size_t letters = 0;
  const std::size_t budget = testing::uniform_int(rng, 1, 200);
  do {
    Sentence s = testing::random_sentence(rng, 6, 6);
    if (letters > 0 && letters + s.letter_count() > budget) break;
    letters += s.letter_count();
    auto g = testing::random_grid(rng, s.letter_count());
    r.masks.push_back(testing::random_mask(rng, s.letter_count()));
    r.hard_masks.push_back(mark_hard(g));
    r.truth.push_back(std::move(s));
    r.grids.push_back(std::move(g));
  } while (letters < budget);
  return r;
}

Evaluation evaluation_of(const Instance& r, const std::vector<SelectionMask>& masks) {
  Evaluation e;
  for (std::size_t s = 0; s < r.truth.size(); ++s) e.add(r.truth[s], r.grids[s], masks[s]);
  return e;
}

// Returns the largest deviation from the brute-force reference.
double max_deviation(const Instance& r, const std::vector<SelectionMask>& masks) {
  const Evaluation e = evaluation_of(r, masks);
  const auto want = testing::brute_indicators(testing::brute_instance(r.truth, r.grids, masks));
  const auto rd = redri(e);
  if (rd.has_value() != want.redri.has_value()) return INFINITY;
  const EvalScope nce{Subset::All, CaseEndings::Exclude};
  const double got[] = {
      sr(e),
      p_der(e),
      b_der(e),
      h_der(e),
      r_der(e),
      rd.value_or(0),
      der(e.sent, e.truth, e.layout),
      der(e.sent, e.truth, e.layout, nce),
      der(e.sent, e.truth, e.layout, {Subset::Marked, CaseEndings::Exclude}, &e.mask),
      der(e.sent, e.truth, e.layout, {Subset::Unmarked, CaseEndings::Exclude}, &e.mask),
      wer(e.sent, e.truth, e.layout),
      wer(e.sent, e.truth, e.layout, CaseEndings::Exclude),
  };
  const double expected[] = {want.sr,     want.p_der,  want.b_der,          want.h_der,
                             want.r_der,  want.redri.value_or(0), want.der_ce, want.der_nce,
                             want.der_marked_nce, want.der_unmarked_nce, want.wer_ce, want.wer_nce};
  double worst = 0;
  for (std::size_t k = 0; k < std::size(got); ++k) worst = std::max(worst, std::abs(got[k] - expected[k]));
  return worst;
}

Outcome metric_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  testing::Rng rng(20240101);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Instance r = random_instance(rng);
    worst = std::max({worst, max_deviation(r, r.masks), max_deviation(r, r.hard_masks)});
  }
  const double secs = seconds_since(t0);
  const std::string d = fmt("100 corpora, max deviation %.3g, %.2f s", worst, secs);
  return worst <= 1e-12 && secs < 10.0 ? pass(d) : fail(d);
}

Outcome hard_identity() {
  testing::Rng rng(20240101);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Instance r = random_instance(rng);
    const Evaluation e = evaluation_of(r, r.hard_masks);
    worst = std::max(worst, std::abs(r_der(e) - der(e.sent, e.truth, e.layout)));
  }
  const std::string d = fmt("100 corpora, max |R-DER - DER(sent)| %.3g", worst);
  return worst <= 1e-12 ? pass(d) : fail(d);
}

Outcome soft_monotonicity() {
  testing::Rng rng(7);
  const std::vector<double> thetas{-1.0, -0.5, 0.0, 0.01, 0.1, 0.2, 0.4, 1.0};
  std::size_t grids = 0;
  for (int i = 0; i < 500; ++i, ++grids) {
    const auto g = testing::random_grid(rng, testing::uniform_int(rng, 1, 200));
    std::vector<SelectionMask> masks;
    for (double t : thetas) masks.push_back(mark_soft(g, t));
    if (sr(masks.front()) != 1.0) return fail(fmt("theta=-1 gives SR %.6f on grid %.0f", sr(masks.front()), i));
    if (sr(masks.back()) != 0.0) return fail(fmt("theta=1 gives SR %.6f on grid %.0f", sr(masks.back()), i));
    for (std::size_t k = 1; k < masks.size(); ++k)
      if (!masks[k].subset_of(masks[k - 1]) || sr(masks[k]) > sr(masks[k - 1]))
        return fail(fmt("masks not nested between theta %.2f and %.2f", thetas[k - 1], thetas[k]));
  }
  return pass(fmt("%.0f grids x 8 thetas nested, SR 1 at -1 and 0 at 1", static_cast<double>(grids)));
}

Outcome oracle_calibration() {
  testing::Rng rng(11);
  auto truth = std::make_shared<const Corpus>(testing::random_corpus_with_letters(rng, 10000, false));
  CcpdConfig cfg;
  cfg.inference = Inference::SinglePass;
  std::string d;
  bool ok = true;
  for (double q : {0.1, 0.3, 0.5}) {
    const auto pair = oracle_predictor(truth, 0.0, q, 3);
    const auto row = indicator_row("oracle", evaluate_system(*truth, pair.predictors(), cfg));
    const bool good = near(row.sr, q, 0.02) && row.p_der == 0.0 && row.h_der == 0.0 && row.redri && *row.redri == 1.0;
    ok = ok && good;
    d += fmt("q=%.1f SR %.4f P %.4f H %.4f", q, row.sr, row.p_der, row.h_der);
    d += row.redri ? fmt(" Redri %.4f; ", *row.redri) : std::string(" Redri NA; ");
  }
  d.resize(d.size() - 2);
  return ok ? pass(d) : fail(d);
}

Outcome round_trip() {
  testing::Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const std::string t = testing::random_marked_text(rng);
    const Sentence s = parse_marked_text(t, ParseMode::Strict);
    if (render_full(s) != canonicalize(t)) return fail(fmt("render/canonicalize mismatch on string %.0f", i));
    std::u32string without_marks;
    for (char32_t cp : decode_utf8(t))
      if (cp < 0x064B || cp > 0x0652) without_marks.push_back(cp);
    if (strip(s) != encode_utf8(without_marks)) return fail(fmt("strip mismatch on string %.0f", i));
  }
  return pass("1000 fuzzed strings");
}

Outcome voting() {
  testing::AmbiguousCorpus ac = testing::make_ambiguous_corpus(17, 200);
  const NgramModel m = train_ngram(ac.corpus);
  testing::Rng rng(19);
  for (std::size_t s = 0; s < ac.corpus.size(); ++s) {
    const Sentence& sent = ac.corpus.sentences[s];
    const auto sp = sp_infer(m, sent, s);
    for (std::size_t width : {sent.words.size(), sent.words.size() + 5}) {
      const auto mv = mv_infer(m, sent, s, {width, 2}, 1);
      for (std::size_t j = 0; j < mv.size(); ++j)
        if (mv[j].argmax() != sp[j].argmax()) return fail(fmt("MV differs from SP in sentence %.0f", s));
    }
    const WindowSpec spec{4, 1};
    const auto base = mv_infer(m, sent, s, spec, 23);
    std::vector<std::size_t> order(segment(sent, spec).size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (int rerun = 0; rerun < 3; ++rerun) {
      std::shuffle(order.begin(), order.end(), rng);
      if (mv_infer(m, sent, s, spec, 23, order) != base || mv_infer(m, sent, s, spec, 23) != base)
        return fail(fmt("MV not reproducible in sentence %.0f", s));
    }
  }
  return pass("200 sentences: MV == SP at full width; 3 permuted reruns identical");
}

Outcome end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  testing::AmbiguousCorpus ac = testing::make_ambiguous_corpus(29, 500);
  Corpus train, test;
  for (std::size_t s = 0; s < ac.corpus.size(); ++s)
    (s % 5 == 4 ? test : train).sentences.push_back(ac.corpus.sentences[s]);
  const auto f = PredictorPair::shared(std::make_shared<const NgramModel>(train_ngram(train)));
  const CcpdConfig cfg{};
  const Evaluation e = evaluate_system(test, f, cfg);

  std::size_t amb = 0, amb_marked = 0, other = 0, other_marked = 0, j = 0;
  for (const auto& s : test.sentences)
    for (const auto& w : s.words) {
      const bool is_amb = ac.is_ambiguous(w.plain());
      for (std::size_t k = 0; k < w.size(); ++k, ++j) {
        (is_amb ? amb : other) += 1;
        (is_amb ? amb_marked : other_marked) += e.mask[j];
      }
    }
  const double amb_rate = static_cast<double>(amb_marked) / static_cast<double>(amb);
  const double other_rate = static_cast<double>(other_marked) / static_cast<double>(other);
  const auto rd = redri(e);
  const double secs = seconds_since(t0);
  std::string d = fmt("ambiguous mark rate %.4f vs %.4f, SR %.4f, ", amb_rate, other_rate, sr(e));
  d += rd ? fmt("Redri %.4f", *rd) : std::string("Redri NA");
  d += fmt(", %.2f s", secs);
  return amb_rate > other_rate && rd && *rd > 0 && secs < 60.0 ? pass(d) : fail(d);
}

Outcome sr_band() {
  struct Case {
    double sr;
    bool flagged;
  };
  const Case cases[] = {{0.01, false}, {0.30, false}, {0.065, false}, {0.0099999, true},
                        {0.3000001, true}, {0.0, true}, {1.0, true}};
  for (const auto& c : cases) {
    IndicatorRow r;
    r.sr = c.sr;
    const bool in_json = format_json(IndicatorReport{{r}}).find("sr_out_of_band") != std::string::npos;
    if (r.sr_out_of_band() != c.flagged || in_json != c.flagged) return fail(fmt("wrong flag at SR %.7f", c.sr));
  }
  return pass("edges 0.01 and 0.30 in band; 0.0099999 and 0.3000001 flagged");
}

Outcome d2_logits() {
  const char* logits = std::getenv("CCPD_D2_LOGITS");
  const char* test = std::getenv("CCPD_D2_TEST");
  if (!logits || !test) return skip("set CCPD_D2_LOGITS and CCPD_D2_TEST to run");
  const Corpus corpus = load_corpus(test);
  CcpdConfig cfg;
  cfg.inference = Inference::SinglePass;
  const auto row = indicator_row("D2", evaluate_system(corpus, load_external_logits(logits), cfg));
  const double pp = 0.001;
  const bool ok = near(row.sr, 0.065, pp) && near(row.p_der, 0.112, pp) && near(row.r_der, 0.018, pp) &&
                  near(row.der_ce, 0.0185, pp) && near(row.wer_ce, 0.0553, pp);
  const std::string d = fmt("SR %.4f P-DER %.4f R-DER %.4f DER %.4f", row.sr, row.p_der, row.r_der, row.der_ce) +
                        fmt(" WER %.4f", row.wer_ce);
  return ok ? pass(d) : fail(d);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric oracle equivalence", metric_equivalence},
      {"hard-mode identity", hard_identity},
      {"soft-mode monotonicity", soft_monotonicity},
      {"oracle calibration", oracle_calibration},
      {"round trip", round_trip},
      {"voting determinism and degeneracy", voting},
      {"end-to-end desk-scale run", end_to_end},
      {"SR plausibility band", sr_band},
      {"D2 logits row", d2_logits},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Outcome::Status::Pass ? "PASS" : o.status == Outcome::Status::Fail ? "FAIL" : "SKIP";
    failures += o.status == Outcome::Status::Fail;
    std::printf("%s  %-36s %s\n", tag, name, o.detail.c_str());
  }
  std::fflush(stdout);
  return failures ? 1 : 0;
}

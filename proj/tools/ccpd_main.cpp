// ccpd: clean corpora, train the n-gram baseline, partially diacritize text,
// and score systems with the partial-diacritization indicators.
//
// Exit status: 0 success, 1 usage, 2 data/parse error, 3 model/position mismatch.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccpd/ccpd.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitModel = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelOptions {
  std::string model;
  std::string mode = "hard";
  std::vector<double> theta;
  std::string inference = "mv";
  std::size_t window = 20;
  std::size_t stride = 2;
  std::optional<std::size_t> radius;
  std::uint64_t seed = 0;
  double flip_sent = 0.0;
  double flip_word = 0.0;

  CLI::Option* inference_opt = nullptr;
  CLI::Option* window_opt = nullptr;
  CLI::Option* stride_opt = nullptr;
  CLI::Option* radius_opt = nullptr;
};

void add_model_options(CLI::App* cmd, ModelOptions& o) {
  cmd->add_option("--model", o.model, "ngram model file, 'oracle', or 'logits:FILE'")->required();
  cmd->add_option("--mode", o.mode, "full | hard | soft")
      ->check(CLI::IsMember({"full", "hard", "soft"}))
      ->capture_default_str();
  cmd->add_option("--theta", o.theta, "soft-mode margin in [-1, 1]; repeatable for eval");
  o.inference_opt = cmd->add_option("--inference", o.inference, "mv | sp")
                        ->check(CLI::IsMember({"mv", "sp"}))
                        ->capture_default_str();
  o.window_opt = cmd->add_option("--window", o.window, "MV window width in words")->capture_default_str();
  o.stride_opt = cmd->add_option("--stride", o.stride, "MV window stride in words")->capture_default_str();
  o.radius_opt = cmd->add_option("--T", o.radius, "SP context radius in words (default: whole sentence)");
  cmd->add_option("--seed", o.seed, "seed for tie-breaking and oracle flips")->capture_default_str();
  cmd->add_option("--flip-sent", o.flip_sent, "oracle: contextual-channel flip rate")->capture_default_str();
  cmd->add_option("--flip-word", o.flip_word, "oracle: isolated-channel flip rate")->capture_default_str();
}

bool is_logits(const std::string& model) { return model.rfind("logits:", 0) == 0; }

// One config per theta value (a single one outside soft mode).
std::vector<ccpd::CcpdConfig> build_configs(const ModelOptions& o) {
  ccpd::CcpdConfig base;
  base.mode = o.mode == "full" ? ccpd::MaskMode::Full : o.mode == "soft" ? ccpd::MaskMode::Soft : ccpd::MaskMode::Hard;
  base.window = {o.window, o.stride};
  base.radius = o.radius;
  base.seed = o.seed;

  const bool inference_given = o.inference_opt->count() > 0;
  base.inference = o.inference == "sp" ? ccpd::Inference::SinglePass : ccpd::Inference::MajorityVote;
  if (base.mode == ccpd::MaskMode::Soft) {
    if (o.theta.empty()) throw UsageError("--mode soft requires --theta");
    if (inference_given && o.inference == "mv") throw UsageError("--mode soft requires --inference sp");
    base.inference = ccpd::Inference::SinglePass;
  } else if (!o.theta.empty()) {
    throw UsageError("--theta applies to --mode soft only");
  }
  if (is_logits(o.model) && (o.window_opt->count() || o.stride_opt->count() || o.radius_opt->count()))
    throw UsageError("logits models fix their positions; --window/--stride/--T are not allowed");
  if (o.radius && base.inference != ccpd::Inference::SinglePass)
    throw UsageError("--T applies to --inference sp only");
  if (o.window < 1 || o.stride < 1 || o.stride > o.window) throw UsageError("need --window >= 1 and 1 <= --stride <= --window");
  if (!(o.flip_sent >= 0 && o.flip_sent <= 1 && o.flip_word >= 0 && o.flip_word <= 1))
    throw UsageError("flip rates must be in [0, 1]");

  std::vector<ccpd::CcpdConfig> out;
  if (base.mode != ccpd::MaskMode::Soft) {
    out.push_back(base);
    return out;
  }
  for (double t : o.theta) {
    if (!(t >= -1.0 && t <= 1.0)) throw UsageError("--theta must be in [-1, 1]");
    auto c = base;
    c.theta = t;
    out.push_back(c);
  }
  return out;
}

// `truth` backs the oracle; other models ignore it.
ccpd::PredictorPair load_model(const ModelOptions& o, std::shared_ptr<const ccpd::Corpus> truth) {
  if (o.model == "oracle") return ccpd::oracle_predictor(std::move(truth), o.flip_sent, o.flip_word, o.seed).predictors();
  if (is_logits(o.model)) return ccpd::load_external_logits(o.model.substr(7));
  return ccpd::PredictorPair::shared(std::make_shared<const ccpd::NgramModel>(ccpd::NgramModel::load_file(o.model)));
}

std::string model_label(const std::string& model) {
  if (model == "oracle") return "oracle";
  if (is_logits(model)) return "logits:" + std::filesystem::path(model.substr(7)).stem().string();
  return std::filesystem::path(model).stem().string();
}

std::string describe(const ccpd::CcpdConfig& c) {
  std::ostringstream s;
  s << (c.inference == ccpd::Inference::SinglePass ? "SP" : "MV") << ", ";
  switch (c.mode) {
    case ccpd::MaskMode::Full: s << "full"; break;
    case ccpd::MaskMode::Hard: s << "hard"; break;
    case ccpd::MaskMode::Soft: s << "soft > " << c.theta; break;
  }
  return s.str();
}

void print_counts(std::ostream& out, const ccpd::TokenCounts& t) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%12s %12s %12s\n%12zu %12zu %12zu\n", "tokens", "letters", "marked", t.tokens,
                t.letters, t.marked_letters);
  out << buf;
}

ccpd::ParseMode parse_mode(bool strict) { return strict ? ccpd::ParseMode::Strict : ccpd::ParseMode::Lenient; }

// ---------------------------------------------------------------------------

struct CleanArgs {
  std::string in, out;
  bool strict = false;
};

int run_clean(const CleanArgs& a) {
  const ccpd::Corpus c = ccpd::load_corpus(a.in, parse_mode(a.strict));
  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw ccpd::IoError("cannot write '" + a.out + "'");
  for (const auto& s : c.sentences) out << ccpd::render_full(s) << '\n';
  if (!out) throw ccpd::IoError("write failed for '" + a.out + "'");
  print_counts(std::cout, ccpd::token_counts(c));
  if (c.warning_count) std::cerr << "warning: dropped " << c.warning_count << " malformed diacritic(s)\n";
  return 0;
}

struct TrainArgs {
  std::string corpus, out;
  double alpha = ccpd::NgramModel::kDefaultAlpha;
  double lambda = ccpd::NgramModel::kDefaultLambda;
};

int run_train(const TrainArgs& a) {
  if (!(a.alpha > 0)) throw UsageError("--alpha must be > 0");
  if (!(a.lambda >= 0 && a.lambda <= 1)) throw UsageError("--lambda must be in [0, 1]");
  const ccpd::Corpus c = ccpd::load_corpus(a.corpus);
  const ccpd::NgramModel m = ccpd::train_ngram(c, a.alpha, a.lambda);
  m.save_file(a.out);
  std::cout << "words " << m.word_lexicon().size() << "\nbigrams " << m.bigram_lexicon().size() << "\nletters "
            << m.letter_backoff().size() << '\n';
  return 0;
}

int run_diacritize(const ModelOptions& o) {
  const auto configs = build_configs(o);
  if (configs.size() != 1) throw UsageError("diacritize takes a single --theta");

  std::vector<std::string> lines;
  for (std::string line; std::getline(std::cin, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  // Sentence ids count lines that contain Arabic letters, matching corpus files.
  auto truth = std::make_shared<ccpd::Corpus>();
  std::vector<std::optional<std::size_t>> sid_of(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto s = ccpd::parse_marked_text(lines[i], ccpd::ParseMode::Lenient);
    if (s.words.empty()) continue;
    sid_of[i] = truth->sentences.size();
    truth->sentences.push_back(std::move(s));
  }
  const auto f = load_model(o, truth);

  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (sid_of[i]) out += ccpd::render_full(ccpd::diacritize_sentence(truth->sentences[*sid_of[i]], f, configs[0], *sid_of[i]).output);
    else out += lines[i];
    out += '\n';
  }
  std::cout << out;
  return 0;
}

struct EvalArgs {
  ModelOptions model;
  std::string test;
  std::string report = "tsv";
  std::string name;
  bool strict = false;
};

int run_eval(const EvalArgs& a) {
  const auto configs = build_configs(a.model);
  auto corpus = std::make_shared<const ccpd::Corpus>(ccpd::load_corpus(a.test, parse_mode(a.strict)));
  const auto f = load_model(a.model, corpus);

  std::vector<ccpd::SystemSpec> systems;
  const std::string base = a.name.empty() ? model_label(a.model.model) : a.name;
  for (const auto& c : configs) systems.push_back({base + " (" + describe(c) + ")", f, c});
  const auto rep = ccpd::report(*corpus, systems);

  std::cout << (a.report == "json" ? ccpd::format_json(rep) : ccpd::format_tsv(rep));
  for (const auto& r : rep.rows)
    if (r.sr_out_of_band())
      std::cerr << "warning: " << r.system << ": SR " << r.sr << " outside [" << ccpd::kSrBandLow << ", "
                << ccpd::kSrBandHigh << "]\n";
  return 0;
}

struct LogitsCheckArgs {
  std::string logits, test;
};

int run_logits_check(const LogitsCheckArgs& a) {
  const auto table = ccpd::LogitsTable::read_file(a.logits);
  const auto corpus = ccpd::load_corpus(a.test);
  const auto cov = ccpd::check_coverage(table, corpus);
  std::cout << "records " << table.record_count() << "\nletters " << cov.expected_letters << "\nmissing_sent "
            << cov.missing_sent << "\nmissing_word " << cov.missing_word << "\nunmatched " << cov.unmatched_records
            << '\n';
  return cov.complete() ? 0 : kExitModel;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-contrastive partial diacritization for Arabic text"};
  app.require_subcommand(1);

  CleanArgs clean;
  auto* clean_cmd = app.add_subcommand("clean", "keep only Arabic letters and diacritics; print token counts");
  clean_cmd->add_option("--in", clean.in, "input corpus")->required();
  clean_cmd->add_option("--out", clean.out, "cleaned corpus")->required();
  clean_cmd->add_flag("--strict", clean.strict, "fail on malformed diacritics");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train the n-gram baseline");
  train_cmd->add_option("--corpus", train.corpus, "training corpus")->required();
  train_cmd->add_option("--out", train.out, "model file")->required();
  train_cmd->add_option("--alpha", train.alpha, "back-off smoothing (> 0)")->capture_default_str();
  train_cmd->add_option("--lambda", train.lambda, "lexicon interpolation weight in [0, 1]")->capture_default_str();

  ModelOptions diac;
  auto* diac_cmd = app.add_subcommand("diacritize", "partially diacritize standard input");
  add_model_options(diac_cmd, diac);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "score a system on a diacritized test corpus");
  add_model_options(eval_cmd, eval.model);
  eval_cmd->add_option("--test", eval.test, "diacritized test corpus")->required();
  eval_cmd->add_option("--report", eval.report, "tsv | json")
      ->check(CLI::IsMember({"tsv", "json"}))
      ->capture_default_str();
  eval_cmd->add_option("--name", eval.name, "system name in the report");
  eval_cmd->add_flag("--strict", eval.strict, "fail on malformed diacritics");

  LogitsCheckArgs lcheck;
  auto* lcheck_cmd = app.add_subcommand("logits-check", "validate a logits file against a test corpus");
  lcheck_cmd->add_option("--logits", lcheck.logits, "logits file")->required();
  lcheck_cmd->add_option("--test", lcheck.test, "diacritized test corpus")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*clean_cmd) return run_clean(clean);
    if (*train_cmd) return run_train(train);
    if (*diac_cmd) return run_diacritize(diac);
    if (*eval_cmd) return run_eval(eval);
    if (*lcheck_cmd) return run_logits_check(lcheck);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ccpd::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ccpd::MissingPosition& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitModel;
  } catch (const ccpd::ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitModel;
  } catch (const ccpd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

#include "fpcfg/cli.hpp"

#include <algorithm>
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
#include "json.hpp"

#include "fpcfg/analysis.hpp"
#include "fpcfg/chart.hpp"
#include "fpcfg/corpus.hpp"
#include "fpcfg/decode.hpp"
#include "fpcfg/focusing.hpp"
#include "fpcfg/grammar.hpp"
#include "fpcfg/train.hpp"
#include "fpcfg/tree.hpp"
#include "fpcfg/util.hpp"

namespace fpcfg {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string shell_quote(const std::string& s) {
  if (!s.empty() && s.find_first_of(" \t\"'\\") == std::string::npos) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

std::string provenance(int argc, const char* const* argv) {
  std::string line = std::string("fpcfg ") + kVersion + " |";
  for (int i = 0; i < argc; ++i) line += " " + shell_quote(argv[i]);
  return line;
}

// Seed lists: "7", "0..3" (inclusive), or "1,4,9".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    std::size_t dots = part.find("..");
    try {
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(part));
      } else {
        std::uint64_t lo = std::stoull(part.substr(0, dots));
        std::uint64_t hi = std::stoull(part.substr(dots + 2));
        if (hi < lo || hi - lo > 10000)
          throw UsageError("bad seed range " + part);
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::invalid_argument&) {
      throw UsageError("cannot parse seed '" + part + "'");
    } catch (const std::out_of_range&) {
      throw UsageError("seed out of range '" + part + "'");
    }
  }
  if (seeds.empty()) throw UsageError("empty seed list");
  return seeds;
}

PreprocessOptions make_preprocess(const std::vector<std::string>& punct,
                                  bool keep_punct, bool lowercase) {
  PreprocessOptions opt;
  if (keep_punct)
    opt.punct_labels.clear();
  else if (!punct.empty())
    opt.punct_labels = std::set<std::string>(punct.begin(), punct.end());
  opt.lowercase = lowercase;
  return opt;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string fmtg(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct OutStream {
  std::ostream* os;
  std::unique_ptr<std::ofstream> file;
  explicit OutStream(const std::string& path) {
    if (path.empty() || path == "-") {
      os = &std::cout;
    } else {
      file = std::make_unique<std::ofstream>(path);
      if (!*file) throw DataError("cannot write " + path);
      os = file.get();
    }
  }
};

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

// --- induce -----------------------------------------------------------

struct InduceArgs {
  std::string corpus, val, bias, out_dir = ".", format = "brackets";
  std::string seeds = "0";
  int nt = 15, pt = 30, vocab_size = 10000;
  int epochs = 10, patience = 3, threads = 1;
  double concentration = 1.0, epsilon = 1e-8;
  std::vector<std::string> punct;
  bool keep_punct = false, lowercase = false;
};

int run_induce(const InduceArgs& args, const std::string& prov) {
  PreprocessOptions opt =
      make_preprocess(args.punct, args.keep_punct, args.lowercase);
  bool bracketed = args.format == "brackets";
  std::vector<std::string> warnings;

  auto token_lines = corpus_token_lines(args.corpus, bracketed, opt);
  std::vector<std::string> terminals =
      build_vocab(token_lines, args.vocab_size);
  SymbolInventory inv;
  inv.num_nonterminals = args.nt;
  inv.num_preterminals = args.pt;
  inv.terminals = terminals;
  {
    std::vector<std::string> problems = inv.check();
    if (!problems.empty()) throw UsageError(problems.front());
  }
  Corpus corpus = load_corpus(args.corpus, bracketed, inv, opt);
  Corpus validation;
  if (args.val.empty()) {
    warnings.push_back("no validation corpus given; using the training data");
    validation = corpus;
  } else {
    validation = load_corpus(args.val, bracketed, inv, opt);
  }

  FocusingBias bias;
  bool soft = !args.bias.empty();
  if (soft) bias = load_bias(args.bias);

  TrainConfig config;
  config.num_nonterminals = args.nt;
  config.num_preterminals = args.pt;
  config.max_epochs = args.epochs;
  config.patience = args.patience;
  config.concentration = args.concentration;
  config.epsilon = args.epsilon;
  config.seeds = parse_seeds(args.seeds);
  config.threads = args.threads;

  fs::create_directories(args.out_dir);
  std::vector<RunRecord> records = train(config, terminals, corpus, validation,
                                         soft ? &bias : nullptr, &warnings);

  save_vocab((fs::path(args.out_dir) / "vocab.txt").string(), terminals, prov);

  std::ofstream runs(fs::path(args.out_dir) / "runs.jsonl");
  if (!runs) throw DataError("cannot write runs.jsonl");
  runs << "# " << prov << "\n";
  for (const RunRecord& rec : records) {
    std::string name = "grammar-seed" + std::to_string(rec.seed) + ".pcfg";
    std::ofstream gf(fs::path(args.out_dir) / name);
    if (!gf) throw DataError("cannot write " + name);
    gf << "# " << prov << "\n";
    gf << "# seed " << rec.seed << " best_epoch " << rec.best_epoch << "\n";
    serialize(rec.best_grammar, gf);

    for (std::size_t e = 0; e < rec.train_objective.size(); ++e) {
      json rec_line = {{"seed", rec.seed},
                       {"epoch", e},
                       {"train_obj", rec.train_objective[e]},
                       {"val_nll", rec.val_nll[e]}};
      runs << rec_line.dump() << "\n";
    }
    json final_line = {{"seed", rec.seed},
                       {"best_epoch", rec.best_epoch},
                       {"grammar", name},
                       {"mode", soft ? "soft" : "off"}};
    runs << final_line.dump() << "\n";
    runs << "# wall seed=" << rec.seed << " " << rec.wall_seconds << "s\n";

    std::cout << "seed " << rec.seed << " best_epoch " << rec.best_epoch
              << " best_val_nll " << fmt(rec.val_nll[rec.best_epoch])
              << " grammar " << name << "\n";
  }
  print_warnings(warnings);
  return 0;
}

// --- bias -------------------------------------------------------------

struct BiasArgs {
  std::string corpus, out, format = "brackets", kind;
  std::vector<std::string> parser_files;
  std::uint64_t seed = 0;
  std::vector<std::string> punct;
  bool keep_punct = false, lowercase = false;
};

int run_bias(const BiasArgs& args, const std::string& prov) {
  PreprocessOptions opt =
      make_preprocess(args.punct, args.keep_punct, args.lowercase);
  Corpus corpus =
      load_corpus_surface(args.corpus, args.format == "brackets", opt);
  FocusingBias bias;
  if (!args.kind.empty()) {
    if (!args.parser_files.empty())
      throw UsageError("give parser files or --kind, not both");
    BiasKind kind = args.kind == "left"    ? BiasKind::left
                    : args.kind == "right" ? BiasKind::right
                                           : BiasKind::random;
    bias = synthetic_bias(corpus, kind, args.seed);
  } else {
    if (args.parser_files.empty())
      throw UsageError("no parser tree files and no --kind");
    for (const std::string& path : args.parser_files) {
      std::vector<std::optional<RawTree>> trees =
          preprocess_trees(load_tree_lines(path), opt);
      FocusingBias one = count_spans(trees, corpus, path);
      one.source_hashes.assign(1, fnv1a64_hex(read_file(path)));
      bias.merge(one);
    }
  }
  save_bias(args.out, bias, prov);
  std::cout << "bias " << args.out << " sentences " << bias.sentences.size()
            << " sources " << bias.source_names.size() << "\n";
  return 0;
}

// --- parse ------------------------------------------------------------

struct ParseArgs {
  std::string grammar, corpus, bias, out = "-", format = "brackets";
  std::string decoder = "mbr";
  int threads = 1;
  std::vector<std::string> punct;
  bool keep_punct = false, lowercase = false;
};

int run_parse(const ParseArgs& args, const std::string& prov) {
  PreprocessOptions opt =
      make_preprocess(args.punct, args.keep_punct, args.lowercase);
  std::ifstream gf(args.grammar);
  if (!gf) throw DataError("cannot open " + args.grammar);
  Grammar g = deserialize(gf);
  Corpus corpus =
      load_corpus(args.corpus, args.format == "brackets", g.inventory(), opt);
  FocusingBias bias;
  std::vector<SpanWeights> weights;
  if (!args.bias.empty()) {
    bias = load_bias(args.bias);
    weights = corpus_weights(corpus, &bias);
  }
  bool cyk = args.decoder == "cyk";

  OutStream out(args.out);
  *out.os << "# " << prov << "\n";
  int failed = 0;
  constexpr std::size_t kBlock = 16;
  std::size_t nblocks = (corpus.size() + kBlock - 1) / kBlock;
  ordered_blocks<std::vector<std::string>>(
      nblocks, args.threads,
      [&](std::size_t blk) {
        std::vector<std::string> lines;
        std::size_t lo = blk * kBlock;
        std::size_t hi = std::min(corpus.size(), lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) {
          const CorpusRecord& rec = corpus[i];
          if (rec.skipped) {
            lines.emplace_back();
            continue;
          }
          try {
            RawTree tree;
            if (cyk) {
              tree = viterbi(rec.tokens, rec.sentence, g).tree;
            } else {
              const SpanWeights* w = weights.empty() ? nullptr : &weights[i];
              tree = mbr_decode(rec.tokens, rec.sentence, g, w);
            }
            lines.push_back(serialize_bracketed(tree));
          } catch (const NumericError&) {
            lines.emplace_back();
          }
        }
        return lines;
      },
      [&](std::size_t, const std::vector<std::string>& lines) {
        for (const std::string& line : lines) {
          if (line.empty()) ++failed;
          *out.os << line << "\n";
        }
      });
  if (failed > 0)
    std::cerr << "warning: " << failed
              << " sentences had no parse (empty lines emitted)\n";
  return 0;
}

// --- eval -------------------------------------------------------------

struct EvalArgs {
  std::string pred, gold, out = "-", records;
  std::vector<std::string> punct;
  bool keep_punct = false, lowercase = false;
};

int run_eval(const EvalArgs& args, const std::string& prov) {
  PreprocessOptions opt =
      make_preprocess(args.punct, args.keep_punct, args.lowercase);
  std::vector<std::optional<RawTree>> pred =
      preprocess_trees(load_tree_lines(args.pred), opt);
  std::vector<std::optional<RawTree>> gold =
      preprocess_trees(load_tree_lines(args.gold), opt);
  EvalReport report = corpus_s_f1(pred, gold);
  OutStream out(args.out);
  *out.os << "# " << prov << "\n";
  *out.os << "sentences " << report.evaluated << "\n";
  *out.os << "skipped " << report.skipped << "\n";
  *out.os << "mean_f1 " << fmt(report.mean) << "\n";
  *out.os << "std_f1 " << fmt(report.stddev) << "\n";
  if (!args.records.empty()) {
    std::ofstream rf(args.records);
    if (!rf) throw DataError("cannot write " + args.records);
    rf << "# " << prov << "\n";
    for (std::size_t i = 0; i < report.per_sentence.size(); ++i) {
      json line = {{"index", i}, {"f1", report.per_sentence[i]}};
      rf << line.dump() << "\n";
    }
  }
  return 0;
}

// --- analyze ----------------------------------------------------------

int run_analyze_diversity(const std::string& trees_path, bool lexical,
                          const std::string& out_path,
                          const std::string& prov) {
  std::vector<std::optional<RawTree>> trees = load_tree_lines(trees_path);
  std::map<int, double> by_len = rule_diversity(trees, lexical);
  OutStream out(out_path);
  *out.os << "# " << prov << "\n";
  for (const auto& [len, mean] : by_len)
    *out.os << "len " << len << " mean_unique " << fmt(mean) << "\n";
  return 0;
}

int run_analyze_freq(const std::string& trees_path, int top, int limit,
                     const std::string& out_path, const std::string& prov) {
  RuleFrequencyProfile profile =
      rule_frequency_profile(load_tree_lines(trees_path));
  OutStream out(out_path);
  *out.os << "# " << prov << "\n";
  *out.os << "total " << profile.total << "\n";
  *out.os << "top" << top << "_share " << fmt(profile.top_share(top)) << "\n";
  int shown = 0;
  for (const auto& e : profile.entries) {
    if (limit >= 0 && shown++ >= limit) break;
    *out.os << "rule " << e.parent << " -> " << e.left << " " << e.right
            << " " << e.count << "\n";
  }
  return 0;
}

int run_analyze_corr(const std::string& pairs_path, const std::string& out_path,
                     const std::string& prov) {
  std::vector<double> xs, ys;
  std::ifstream in(pairs_path);
  if (!in) throw DataError("cannot open " + pairs_path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x >> y))
      throw DataError(pairs_path + ":" + std::to_string(lineno) +
                      ": expected two numbers");
    xs.push_back(x);
    ys.push_back(y);
  }
  Correlation c = correlate_nll_f1(xs, ys);
  OutStream out(out_path);
  *out.os << "# " << prov << "\n";
  *out.os << "n " << c.n << "\n";
  *out.os << "pearson_r " << fmt(c.r) << "\n";
  *out.os << "p_value " << fmtg(c.p_value) << "\n";
  return 0;
}

int run_analyze_iou(const std::string& a_path, const std::string& b_path,
                    const PreprocessOptions& opt, const std::string& out_path,
                    const std::string& prov) {
  auto a = tree_spans_for_iou(preprocess_trees(load_tree_lines(a_path), opt));
  auto b = tree_spans_for_iou(preprocess_trees(load_tree_lines(b_path), opt));
  OutStream out(out_path);
  *out.os << "# " << prov << "\n";
  *out.os << "iou " << fmt(iou(a, b)) << "\n";
  return 0;
}

int run_analyze_common(const std::string& gold_path,
                       const std::vector<std::string>& parser_paths,
                       const PreprocessOptions& opt,
                       const std::string& out_path, const std::string& prov) {
  auto gold =
      tree_spans_for_iou(preprocess_trees(load_tree_lines(gold_path), opt));
  std::vector<std::vector<SpanSet>> parsers;
  for (const std::string& p : parser_paths)
    parsers.push_back(
        tree_spans_for_iou(preprocess_trees(load_tree_lines(p), opt)));
  CommonSpanReport report = common_span_gold_frequency(parsers, gold);
  OutStream out(out_path);
  *out.os << "# " << prov << "\n";
  *out.os << "gold_total " << report.gold_total << "\n";
  for (const auto& row : report.rows) {
    *out.os << "subset ";
    for (std::size_t i = 0; i < row.parsers.size(); ++i)
      *out.os << (i ? "," : "") << row.parsers[i];
    *out.os << " common_in_gold " << row.common_in_gold << "\n";
  }
  for (std::size_t k = 1; k < report.mean_by_size.size(); ++k)
    *out.os << "mean k=" << k << " " << fmt(report.mean_by_size[k]) << "\n";
  return 0;
}

// --- soa --------------------------------------------------------------

struct SoaArgs {
  std::uint64_t seed = 0;
  int nt = 2, vocab = 6, i = 0, j = 1;
  double a = 0.3, b = 0.7;
  int sentences = 100, min_len = 3, max_len = 8;
  std::string out = "-";
};

int run_soa(const SoaArgs& args, const std::string& prov) {
  if (args.min_len < 1 || args.max_len < args.min_len)
    throw UsageError("bad sentence length range");
  SoaPair pair = build_soa_pair(args.seed, args.nt, args.vocab, args.a, args.b,
                                args.i, args.j);
  std::mt19937_64 rng(args.seed ^ 0x5deece66dull);
  std::vector<Sentence> sentences;
  for (int s = 0; s < args.sentences; ++s) {
    int len = args.min_len +
              static_cast<int>(uniform01(rng) * (args.max_len - args.min_len + 1));
    if (len > args.max_len) len = args.max_len;
    Sentence sent(len);
    for (int& w : sent) {
      w = static_cast<int>(uniform01(rng) * args.vocab);
      if (w >= args.vocab) w = args.vocab - 1;
    }
    sentences.push_back(std::move(sent));
  }
  SoaReport report = verify_soa(pair, sentences);
  OutStream out(args.out);
  *out.os << "# " << prov << "\n";
  *out.os << "pair i=" << args.i << " j=" << args.j << " a=" << fmtg(args.a)
          << " b=" << fmtg(args.b) << "\n";
  *out.os << "sentences " << report.sentences << "\n";
  *out.os << "zero_measure " << report.zero_measure << "\n";
  *out.os << "max_abs_logp_diff " << fmtg(report.max_abs_logp_diff) << "\n";
  *out.os << "parses_differ " << (report.parses_differ ? "yes" : "no") << "\n";
  *out.os << "alpha_spans " << report.alpha_spans << "\n";
  *out.os << "max_alpha_err " << fmtg(report.max_alpha_err) << "\n";
  return 0;
}

void add_preprocess_flags(CLI::App* cmd, std::vector<std::string>* punct,
                          bool* keep_punct, bool* lowercase) {
  cmd->add_option("--punct", *punct,
                  "Punctuation labels to strip (replaces the default set)")
      ->delimiter(',');
  cmd->add_flag("--keep-punct", *keep_punct, "Keep punctuation leaves");
  cmd->add_flag("--lowercase", *lowercase, "Lowercase tokens");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  std::string prov = provenance(argc, argv);
  CLI::App app{"Span-focused PCFG induction toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("fpcfg ") + kVersion);
  // One config file for the whole tool, with a section per subcommand
  // ([induce], [parse], ...). Explicit flags always win. Subcommands get
  // fallthrough so `--config` works in any position.
  app.set_config("--config", "",
                 "Config file with per-subcommand sections, e.g. [induce]");

  InduceArgs induce;
  CLI::App* cmd_induce =
      app.add_subcommand("induce", "Train grammars with EM");
  cmd_induce->fallthrough();
  cmd_induce->add_option("--corpus", induce.corpus, "Training corpus")
      ->required();
  cmd_induce->add_option("--val", induce.val, "Validation corpus");
  cmd_induce->add_option("--bias", induce.bias, "Focusing bias file");
  cmd_induce->add_option("--format", induce.format, "Corpus format")
      ->check(CLI::IsMember({"brackets", "tokens"}));
  cmd_induce->add_option("--out-dir", induce.out_dir, "Output directory");
  cmd_induce->add_option("--nt", induce.nt, "Nonterminal count")
      ->check(CLI::PositiveNumber);
  cmd_induce->add_option("--pt", induce.pt, "Preterminal count")
      ->check(CLI::PositiveNumber);
  cmd_induce->add_option("--vocab-size", induce.vocab_size, "Vocabulary cap")
      ->check(CLI::PositiveNumber);
  cmd_induce->add_option("--seeds", induce.seeds,
                         "Seed list: 7 | 0..3 | 1,4,9");
  cmd_induce->add_option("--epochs", induce.epochs, "Max epochs")
      ->check(CLI::PositiveNumber);
  cmd_induce->add_option("--patience", induce.patience,
                         "Early-stop patience (epochs)")
      ->check(CLI::PositiveNumber);
  cmd_induce->add_option("--concentration", induce.concentration,
                         "Dirichlet concentration");
  cmd_induce->add_option("--epsilon", induce.epsilon, "Count smoothing");
  cmd_induce->add_option("--threads", induce.threads, "Worker threads")
      ->check(CLI::Range(1, 64));
  add_preprocess_flags(cmd_induce, &induce.punct, &induce.keep_punct,
                       &induce.lowercase);

  BiasArgs bias;
  CLI::App* cmd_bias =
      app.add_subcommand("bias", "Build a focusing-bias file from parses");
  cmd_bias->fallthrough();
  cmd_bias->add_option("--corpus", bias.corpus, "Corpus the bias aligns to")
      ->required();
  cmd_bias->add_option("--out", bias.out, "Bias file to write")->required();
  cmd_bias->add_option("--format", bias.format, "Corpus format")
      ->check(CLI::IsMember({"brackets", "tokens"}));
  cmd_bias->add_option("files", bias.parser_files,
                       "Parser output files (one tree per line)");
  cmd_bias->add_option("--kind", bias.kind, "Synthetic bias kind")
      ->check(CLI::IsMember({"left", "right", "random"}));
  cmd_bias->add_option("--seed", bias.seed, "Seed for --kind random");
  add_preprocess_flags(cmd_bias, &bias.punct, &bias.keep_punct,
                       &bias.lowercase);

  ParseArgs parse;
  CLI::App* cmd_parse = app.add_subcommand("parse", "Decode a corpus");
  cmd_parse->fallthrough();
  cmd_parse->add_option("--grammar", parse.grammar, "Grammar file")
      ->required();
  cmd_parse->add_option("--corpus", parse.corpus, "Corpus to parse")
      ->required();
  cmd_parse->add_option("--format", parse.format, "Corpus format")
      ->check(CLI::IsMember({"brackets", "tokens"}));
  cmd_parse->add_option("--decoder", parse.decoder, "mbr or cyk")
      ->check(CLI::IsMember({"mbr", "cyk"}));
  cmd_parse->add_option("--bias", parse.bias,
                        "Decode under this bias's soft weights");
  cmd_parse->add_option("--out", parse.out, "Output file (- for stdout)");
  cmd_parse->add_option("--threads", parse.threads, "Worker threads")
      ->check(CLI::Range(1, 64));
  add_preprocess_flags(cmd_parse, &parse.punct, &parse.keep_punct,
                       &parse.lowercase);

  EvalArgs eval;
  CLI::App* cmd_eval =
      app.add_subcommand("eval", "Score predicted trees against gold");
  cmd_eval->fallthrough();
  cmd_eval->add_option("--pred", eval.pred, "Predicted trees")->required();
  cmd_eval->add_option("--gold", eval.gold, "Gold trees")->required();
  cmd_eval->add_option("--out", eval.out, "Report file (- for stdout)");
  cmd_eval->add_option("--records", eval.records, "Per-sentence JSONL file");
  add_preprocess_flags(cmd_eval, &eval.punct, &eval.keep_punct,
                       &eval.lowercase);

  CLI::App* cmd_analyze =
      app.add_subcommand("analyze", "Structure and correlation reports");
  cmd_analyze->require_subcommand(1);
  cmd_analyze->fallthrough();

  std::string an_trees, an_out = "-";
  bool an_lexical = false;
  CLI::App* an_div = cmd_analyze->add_subcommand(
      "diversity", "Mean unique rules per parse, by sentence length");
  an_div->add_option("--trees", an_trees, "Labeled parse file")->required();
  an_div->fallthrough();
  an_div->add_flag("--lexical", an_lexical, "Count lexical rules too");
  an_div->add_option("--out", an_out, "Report file");

  std::string fr_trees, fr_out = "-";
  int fr_top = 3, fr_limit = 20;
  CLI::App* an_freq = cmd_analyze->add_subcommand(
      "freq", "Binary-rule frequency profile of parses");
  an_freq->add_option("--trees", fr_trees, "Parse file")->required();
  an_freq->fallthrough();
  an_freq->add_option("--top", fr_top, "Top-k mass to report")
      ->check(CLI::PositiveNumber);
  an_freq->add_option("--limit", fr_limit, "Rules to list (-1 = all)");
  an_freq->add_option("--out", fr_out, "Report file");

  std::string corr_pairs, corr_out = "-";
  CLI::App* an_corr = cmd_analyze->add_subcommand(
      "corr", "Pearson correlation over (x, y) pairs");
  an_corr->add_option("--pairs", corr_pairs, "File with two numbers per line")
      ->required();
  an_corr->fallthrough();
  an_corr->add_option("--out", corr_out, "Report file");

  std::string iou_a, iou_b, iou_out = "-";
  std::vector<std::string> iou_punct;
  bool iou_keep = false, iou_lower = false;
  CLI::App* an_iou = cmd_analyze->add_subcommand(
      "iou", "Pooled span intersection-over-union of two parse files");
  an_iou->add_option("--a", iou_a, "First parse file")->required();
  an_iou->fallthrough();
  an_iou->add_option("--b", iou_b, "Second parse file")->required();
  an_iou->add_option("--out", iou_out, "Report file");
  add_preprocess_flags(an_iou, &iou_punct, &iou_keep, &iou_lower);

  std::string common_gold, common_out = "-";
  std::vector<std::string> common_parsers, common_punct;
  bool common_keep = false, common_lower = false;
  CLI::App* an_common = cmd_analyze->add_subcommand(
      "common", "Parser-intersection spans found in gold");
  an_common->add_option("--gold", common_gold, "Gold trees")->required();
  an_common->fallthrough();
  an_common->add_option("files", common_parsers, "Parser files")
      ->expected(-1)
      ->required();
  an_common->add_option("--out", common_out, "Report file");
  add_preprocess_flags(an_common, &common_punct, &common_keep, &common_lower);

  SoaArgs soa;
  CLI::App* cmd_soa = app.add_subcommand(
      "soa", "Flipped-rule-pair equivalence check on random sentences");
  cmd_soa->fallthrough();
  cmd_soa->add_option("--seed", soa.seed, "Base grammar / sentence seed");
  cmd_soa->add_option("--nt", soa.nt, "Nonterminal count")
      ->check(CLI::PositiveNumber);
  cmd_soa->add_option("--vocab", soa.vocab, "Vocabulary size")
      ->check(CLI::PositiveNumber);
  cmd_soa->add_option("--a", soa.a, "p(N_i -> N_j T)");
  cmd_soa->add_option("--b", soa.b, "p(N_i -> T N_j)");
  cmd_soa->add_option("--i", soa.i, "Parent nonterminal index");
  cmd_soa->add_option("--j", soa.j, "Child nonterminal index");
  cmd_soa->add_option("--sentences", soa.sentences, "Sample size")
      ->check(CLI::PositiveNumber);
  cmd_soa->add_option("--min-len", soa.min_len, "Shortest sentence");
  cmd_soa->add_option("--max-len", soa.max_len, "Longest sentence");
  cmd_soa->add_option("--out", soa.out, "Report file");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_induce) return run_induce(induce, prov);
    if (*cmd_bias) return run_bias(bias, prov);
    if (*cmd_parse) return run_parse(parse, prov);
    if (*cmd_eval) return run_eval(eval, prov);
    if (*cmd_analyze) {
      if (*an_div)
        return run_analyze_diversity(an_trees, an_lexical, an_out, prov);
      if (*an_freq)
        return run_analyze_freq(fr_trees, fr_top, fr_limit, fr_out, prov);
      if (*an_corr) return run_analyze_corr(corr_pairs, corr_out, prov);
      if (*an_iou)
        return run_analyze_iou(
            iou_a, iou_b, make_preprocess(iou_punct, iou_keep, iou_lower),
            iou_out, prov);
      if (*an_common)
        return run_analyze_common(
            common_gold, common_parsers,
            make_preprocess(common_punct, common_keep, common_lower),
            common_out, prov);
    }
    if (*cmd_soa) return run_soa(soa, prov);
    throw UsageError("no subcommand selected");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace fpcfg

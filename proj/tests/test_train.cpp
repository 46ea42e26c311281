#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "fpcfg/chart.hpp"
#include "fpcfg/corpus.hpp"
#include "fpcfg/focusing.hpp"
#include "fpcfg/grammar.hpp"
#include "fpcfg/train.hpp"
#include "fpcfg/util.hpp"
#include "oracle.hpp"

using namespace fpcfg;

namespace {

SymbolInventory make_inv(int nt, int pt, int vocab) {
  SymbolInventory inv;
  inv.num_nonterminals = nt;
  inv.num_preterminals = pt;
  inv.terminals.push_back(inv.unk_token);
  for (int i = 1; i < vocab; ++i)
    inv.terminals.push_back("w" + std::to_string(i));
  return inv;
}

Grammar det_grammar() {
  SymbolInventory inv = make_inv(1, 1, 2);
  RuleCounts counts(inv);
  counts.root[0] = 1.0;
  counts.bin(0, 1, 1) = 1.0;
  counts.lex(1, 1) = 1.0;
  return normalize(inv, counts);
}

CorpusRecord record(std::vector<int> ids, int line) {
  CorpusRecord rec;
  rec.id = std::to_string(line);
  rec.sentence = std::move(ids);
  rec.tokens.assign(rec.sentence.size(), "w");
  return rec;
}

Corpus random_corpus(int sentences, int vocab, int max_len,
                     std::mt19937_64& rng) {
  Corpus corpus;
  for (int i = 0; i < sentences; ++i) {
    int n = 2 + static_cast<int>(rng() % (max_len - 1));
    std::vector<int> ids(n);
    for (int j = 0; j < n; ++j) ids[j] = static_cast<int>(rng() % vocab);
    corpus.push_back(record(std::move(ids), i + 1));
  }
  return corpus;
}

}  // namespace

TEST_CASE("a point-mass grammar is an EM fixed point") {
  Grammar g = det_grammar();
  Corpus corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back(record({1, 1}, i + 1));
  auto [next, obj] = em_epoch(g, corpus, {}, 0.0, 1);
  for (std::size_t i = 0; i < g.root_table().size(); ++i)
    CHECK(next.root_table()[i] == doctest::Approx(g.root_table()[i]).epsilon(1e-12));
  for (std::size_t i = 0; i < g.binary_table().size(); ++i) {
    double want = g.binary_table()[i];
    double got = next.binary_table()[i];
    if (want == kNegInf) {
      CHECK(got == kNegInf);
    } else {
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
  // Probability-1 sentences: per-token objective 0.
  CHECK(obj == 0.0);
}

TEST_CASE("one EM epoch reproduces the oracle M-step") {
  SymbolInventory inv = make_inv(2, 2, 3);
  Grammar g = random_init(inv, 404, 1.0);
  std::mt19937_64 rng(17);
  Corpus corpus = random_corpus(6, 3, 4, rng);  // lengths 2..4

  // Mixed weights: soft on even lines, off on odd.
  FocusingBias bias = synthetic_bias(corpus, BiasKind::random, 3);
  std::vector<SpanWeights> weights = corpus_weights(corpus, &bias);
  for (std::size_t i = 1; i < weights.size(); i += 2)
    weights[i] = SpanWeights::off_mode(
        static_cast<int>(corpus[i].sentence.size()));

  auto [got, obj] = em_epoch(g, corpus, weights, 0.0, 2);

  RuleCounts want_counts(inv);
  double want_nll = 0.0;
  long long want_tokens = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    want_counts.add(oracle::expected(corpus[i].sentence, g, weights[i]));
    want_nll += -std::log(oracle::score(corpus[i].sentence, g, weights[i]));
    want_tokens += static_cast<long long>(corpus[i].sentence.size());
  }
  Grammar want = normalize(inv, want_counts);
  CHECK(obj == doctest::Approx(want_nll / want_tokens).epsilon(1e-10));
  for (std::size_t i = 0; i < want.root_table().size(); ++i)
    CHECK(got.root_table()[i] ==
          doctest::Approx(want.root_table()[i]).epsilon(1e-9));
  for (std::size_t i = 0; i < want.binary_table().size(); ++i) {
    double gv = got.binary_table()[i], wv = want.binary_table()[i];
    if (wv == kNegInf) {
      CHECK(gv == kNegInf);
    } else {
      CHECK(gv == doctest::Approx(wv).epsilon(1e-9));
    }
  }
  for (std::size_t i = 0; i < want.lexical_table().size(); ++i) {
    double gv = got.lexical_table()[i], wv = want.lexical_table()[i];
    if (wv == kNegInf) {
      CHECK(gv == kNegInf);
    } else {
      CHECK(gv == doctest::Approx(wv).epsilon(1e-9));
    }
  }
}

TEST_CASE("weighted objective decreases monotonically over 20 epochs") {
  SymbolInventory inv = make_inv(2, 3, 4);
  std::mt19937_64 rng(88);
  Corpus corpus = random_corpus(25, 4, 7, rng);
  FocusingBias bias = synthetic_bias(corpus, BiasKind::random, 9);
  std::vector<SpanWeights> weights = corpus_weights(corpus, &bias);

  Grammar g = random_init(inv, 2222, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch < 20; ++epoch) {
    auto [next, obj] = em_epoch(g, corpus, weights, 0.0, 2);
    CHECK(obj <= prev + 1e-8);
    CHECK(next.validate().empty());  // every intermediate grammar is sound
    prev = obj;
    g = next;
  }
}

TEST_CASE("em_epoch objective matches corpus_nll per token") {
  SymbolInventory inv = make_inv(2, 2, 3);
  Grammar g = random_init(inv, 31, 1.0);
  std::mt19937_64 rng(5);
  Corpus corpus = random_corpus(10, 3, 6, rng);
  auto [next, obj] = em_epoch(g, corpus, {}, 1e-8, 1);
  NllReport report = corpus_nll(corpus, g, {}, 1);
  CHECK(obj == doctest::Approx(report.per_token()).epsilon(1e-12));
}

TEST_CASE("zero-measure sentences are excluded with a warning") {
  Grammar g = det_grammar();
  Corpus corpus;
  corpus.push_back(record({1, 1}, 1));
  corpus.push_back(record({1, 1, 1}, 2));  // underivable
  std::vector<std::string> warnings;
  auto [next, obj] = em_epoch(g, corpus, {}, 0.0, 1, &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("zero-measure") != std::string::npos);
  CHECK(obj == 0.0);  // only the derivable sentence counts

  Corpus hopeless;
  hopeless.push_back(record({1, 1, 1}, 1));
  CHECK_THROWS_AS(em_epoch(g, hopeless, {}, 0.0, 1), NumericError);
}

TEST_CASE("em_epoch is thread-count invariant bit for bit") {
  SymbolInventory inv = make_inv(3, 3, 4);
  Grammar g = random_init(inv, 99, 1.0);
  std::mt19937_64 rng(23);
  Corpus corpus = random_corpus(40, 4, 8, rng);
  FocusingBias bias = synthetic_bias(corpus, BiasKind::random, 7);
  std::vector<SpanWeights> weights = corpus_weights(corpus, &bias);
  auto [g1, o1] = em_epoch(g, corpus, weights, 1e-8, 1);
  auto [g4, o4] = em_epoch(g, corpus, weights, 1e-8, 4);
  CHECK(o1 == o4);
  CHECK(g1 == g4);  // bitwise table equality
}

TEST_CASE("train is deterministic per seed and thread count") {
  std::mt19937_64 rng(61);
  Corpus corpus = random_corpus(30, 3, 6, rng);
  Corpus val = random_corpus(8, 3, 6, rng);

  TrainConfig config;
  config.num_nonterminals = 2;
  config.num_preterminals = 4;
  config.max_epochs = 4;
  config.seeds = {3, 4};
  std::vector<std::string> terminals = {"<unk>", "w1", "w2"};

  auto runs_a = train(config, terminals, corpus, val, nullptr);
  auto runs_b = train(config, terminals, corpus, val, nullptr);
  TrainConfig threaded = config;
  threaded.threads = 4;
  auto runs_c = train(threaded, terminals, corpus, val, nullptr);

  REQUIRE(runs_a.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(runs_a[i].seed == config.seeds[i]);
    CHECK(runs_a[i].train_objective == runs_b[i].train_objective);
    CHECK(runs_a[i].val_nll == runs_b[i].val_nll);
    CHECK(runs_a[i].best_epoch == runs_b[i].best_epoch);
    CHECK(runs_a[i].best_grammar == runs_b[i].best_grammar);
    CHECK(runs_a[i].train_objective == runs_c[i].train_objective);
    CHECK(runs_a[i].best_grammar == runs_c[i].best_grammar);
  }
  CHECK(!(runs_a[0].best_grammar == runs_a[1].best_grammar));
}

TEST_CASE("the checkpoint is the epoch with minimum validation NLL") {
  std::mt19937_64 rng(71);
  Corpus corpus = random_corpus(25, 3, 6, rng);
  Corpus val = random_corpus(10, 3, 6, rng);
  TrainConfig config;
  config.num_nonterminals = 2;
  config.num_preterminals = 4;
  config.max_epochs = 6;
  config.patience = 6;  // never stop early
  config.seeds = {12};
  auto runs = train(config, {"<unk>", "w1", "w2"}, corpus, val, nullptr);
  REQUIRE(runs.size() == 1);
  const RunRecord& run = runs[0];
  REQUIRE(!run.val_nll.empty());
  int argmin = 0;
  for (std::size_t e = 1; e < run.val_nll.size(); ++e)
    if (run.val_nll[e] < run.val_nll[argmin]) argmin = static_cast<int>(e);
  CHECK(run.best_epoch == argmin);
  // The stored grammar really is that epoch's model.
  NllReport check = corpus_nll(val, run.best_grammar, {}, 1);
  CHECK(check.mean() == doctest::Approx(run.val_nll[argmin]).epsilon(1e-12));
  CHECK(run.best_grammar.validate().empty());
}

TEST_CASE("early stopping respects patience") {
  std::mt19937_64 rng(81);
  Corpus corpus = random_corpus(20, 3, 5, rng);
  Corpus val = random_corpus(6, 3, 5, rng);
  TrainConfig config;
  config.num_nonterminals = 1;
  config.num_preterminals = 2;
  config.max_epochs = 50;
  config.patience = 2;
  config.seeds = {5};
  auto runs = train(config, {"<unk>", "w1", "w2"}, corpus, val, nullptr);
  const RunRecord& run = runs[0];
  // Ran at most best_epoch + patience + 1 epochs before giving up.
  CHECK(run.val_nll.size() <=
        static_cast<std::size_t>(run.best_epoch + config.patience + 1));
  CHECK(run.val_nll.size() < 50);
}

TEST_CASE("training in soft mode pulls structure toward the bias") {
  // A corpus with a strong left-branching bias should reproduce that
  // objective gap over the unbiased run on the training measure.
  std::mt19937_64 rng(2211);
  Corpus corpus = random_corpus(30, 3, 6, rng);
  FocusingBias bias = synthetic_bias(corpus, BiasKind::left, 0);

  TrainConfig config;
  config.num_nonterminals = 2;
  config.num_preterminals = 4;
  config.max_epochs = 6;
  config.seeds = {1};
  auto runs = train(config, {"<unk>", "w1", "w2"}, corpus, corpus, &bias);
  REQUIRE(runs.size() == 1);
  // Objectives recorded for every epoch run.
  CHECK(runs[0].train_objective.size() == runs[0].val_nll.size());
  for (double v : runs[0].train_objective) CHECK(std::isfinite(v));
}

TEST_CASE("train warns when validation overlaps training") {
  std::mt19937_64 rng(91);
  Corpus corpus = random_corpus(10, 3, 5, rng);
  std::vector<std::string> warnings;
  TrainConfig config;
  config.num_nonterminals = 1;
  config.num_preterminals = 2;
  config.max_epochs = 1;
  config.seeds = {1};
  train(config, {"<unk>", "w1", "w2"}, corpus, corpus, nullptr, &warnings);
  bool overlap_warned = false;
  for (const auto& w : warnings)
    if (w.find("also occur in training") != std::string::npos)
      overlap_warned = true;
  CHECK(overlap_warned);
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpcfg/chart.hpp"
#include "fpcfg/corpus.hpp"
#include "fpcfg/focusing.hpp"
#include "fpcfg/grammar.hpp"

namespace fpcfg {

struct TrainConfig {
  int num_nonterminals = 15;  // 1:2 nonterminal:preterminal default
  int num_preterminals = 30;
  int max_epochs = 10;
  int patience = 3;           // epochs of no validation improvement
  double concentration = 1.0; // Dirichlet init
  double epsilon = 1e-8;      // count smoothing; 0 keeps EM exact
  std::vector<std::uint64_t> seeds = {0};
  int threads = 1;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<double> train_objective;  // per-token weighted NLL, pre-update
  std::vector<double> val_nll;          // unweighted mean per sentence
  int best_epoch = -1;                  // index of the minimum val NLL
  Grammar best_grammar;
  double wall_seconds = 0.0;
};

// One EM step: expected counts over the weighted charts, then
// normalize(counts + epsilon). Returns the new grammar and the per-token
// mean negative log weighted score of the *input* grammar. Zero-measure
// sentences are excluded (warned); all-zero-measure is a NumericError.
std::pair<Grammar, double> em_epoch(const Grammar& g, const Corpus& corpus,
                                    const std::vector<SpanWeights>& weights,
                                    double epsilon, int threads,
                                    std::vector<std::string>* warnings = nullptr);

// Full training: per seed, Dirichlet init then EM with early stopping on
// unweighted validation NLL; the checkpoint is the epoch with the smallest
// validation NLL. The inventory is built from the config's symbol counts and
// the given terminal list (unk first). Deterministic given config and
// inputs, for any thread count. Warns when training and validation share
// sentences.
std::vector<RunRecord> train(const TrainConfig& config,
                             const std::vector<std::string>& terminals,
                             const Corpus& corpus, const Corpus& validation,
                             const FocusingBias* bias,
                             std::vector<std::string>* warnings = nullptr);

}  // namespace fpcfg

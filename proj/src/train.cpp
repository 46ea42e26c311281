#include "fpcfg/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "fpcfg/util.hpp"

namespace fpcfg {

namespace {

struct BlockCounts {
  RuleCounts counts;
  double nll_total = 0.0;
  long long tokens = 0;
  std::vector<int> zero_measure;
};

}  // namespace

std::pair<Grammar, double> em_epoch(const Grammar& g, const Corpus& corpus,
                                    const std::vector<SpanWeights>& weights,
                                    double epsilon, int threads,
                                    std::vector<std::string>* warnings) {
  if (!weights.empty() && weights.size() != corpus.size())
    throw DataError("weights/corpus length mismatch");
  if (epsilon < 0) throw UsageError("negative smoothing epsilon");
  const SymbolInventory& inv = g.inventory();
  constexpr std::size_t kBlock = 16;
  std::size_t nblocks = (corpus.size() + kBlock - 1) / kBlock;
  RuleCounts total(inv);
  double nll_total = 0.0;
  long long tokens = 0;
  std::vector<int> zero_measure;
  ordered_blocks<BlockCounts>(
      nblocks, threads,
      [&](std::size_t blk) {
        BlockCounts bc;
        bc.counts = RuleCounts(inv);
        std::size_t lo = blk * kBlock;
        std::size_t hi = std::min(corpus.size(), lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) {
          const CorpusRecord& rec = corpus[i];
          if (rec.skipped) continue;
          const SpanWeights* w = weights.empty() ? nullptr : &weights[i];
          SpanWeights off =
              SpanWeights::off_mode(static_cast<int>(rec.sentence.size()));
          const SpanWeights& ww = w ? *w : off;
          Chart ins = weighted_inside(rec.sentence, g, ww);
          double z = sentence_logscore(ins, g);
          if (z == kNegInf) {
            bc.zero_measure.push_back(static_cast<int>(i));
            continue;
          }
          bc.counts.add(expected_counts(rec.sentence, g, ww));
          bc.nll_total += -z;
          bc.tokens += static_cast<long long>(rec.sentence.size());
        }
        return bc;
      },
      [&](std::size_t, const BlockCounts& bc) {
        total.add(bc.counts);
        nll_total += bc.nll_total;
        tokens += bc.tokens;
        zero_measure.insert(zero_measure.end(), bc.zero_measure.begin(),
                            bc.zero_measure.end());
      });
  if (tokens == 0)
    throw NumericError("every training sentence has zero measure");
  if (!zero_measure.empty() && warnings)
    warnings->push_back(std::to_string(zero_measure.size()) +
                        " zero-measure sentences excluded from EM");
  if (epsilon > 0) total.add_constant(epsilon);
  Grammar next = normalize(inv, total, warnings);
  return {std::move(next), nll_total / static_cast<double>(tokens)};
}

namespace {

std::uint64_t sentence_hash(const Sentence& s) {
  std::string bytes;
  bytes.reserve(s.size() * 4);
  for (int w : s) {
    for (int k = 0; k < 4; ++k)
      bytes.push_back(static_cast<char>((w >> (8 * k)) & 0xff));
  }
  return fnv1a64(bytes);
}

}  // namespace

std::vector<RunRecord> train(const TrainConfig& config,
                             const std::vector<std::string>& terminals,
                             const Corpus& corpus, const Corpus& validation,
                             const FocusingBias* bias,
                             std::vector<std::string>* warnings) {
  if (config.max_epochs < 1) throw UsageError("max_epochs must be >= 1");
  if (config.patience < 1) throw UsageError("patience must be >= 1");
  if (config.seeds.empty()) throw UsageError("no seeds given");
  SymbolInventory inv;
  inv.num_nonterminals = config.num_nonterminals;
  inv.num_preterminals = config.num_preterminals;
  inv.terminals = terminals;
  {
    std::vector<std::string> problems = inv.check();
    if (!problems.empty()) throw UsageError(problems.front());
  }

  if (warnings) {
    std::set<std::uint64_t> train_hashes;
    for (const CorpusRecord& rec : corpus)
      if (!rec.skipped) train_hashes.insert(sentence_hash(rec.sentence));
    int overlap = 0;
    for (const CorpusRecord& rec : validation)
      if (!rec.skipped && train_hashes.count(sentence_hash(rec.sentence)))
        ++overlap;
    if (overlap > 0)
      warnings->push_back(std::to_string(overlap) +
                          " validation sentences also occur in training data");
  }

  std::vector<SpanWeights> weights = corpus_weights(corpus, bias);
  std::vector<SpanWeights> no_weights;  // validation stays unweighted

  std::vector<RunRecord> records;
  for (std::uint64_t seed : config.seeds) {
    auto start = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.seed = seed;
    Grammar g = random_init(inv, seed, config.concentration);
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
      auto [next, objective] =
          em_epoch(g, corpus, weights, config.epsilon, config.threads, warnings);
      rec.train_objective.push_back(objective);
      g = std::move(next);
      NllReport val = corpus_nll(validation, g, no_weights, config.threads);
      if (val.counted == 0)
        throw NumericError("every validation sentence has zero measure");
      double v = val.mean();
      rec.val_nll.push_back(v);
      if (v < best_val) {
        best_val = v;
        rec.best_epoch = epoch;
        rec.best_grammar = g;
        since_best = 0;
      } else if (++since_best >= config.patience) {
        break;
      }
    }
    rec.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace fpcfg

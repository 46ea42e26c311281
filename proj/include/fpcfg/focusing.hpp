#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpcfg/chart.hpp"
#include "fpcfg/corpus.hpp"
#include "fpcfg/tree.hpp"

namespace fpcfg {

// Per-sentence span counts accumulated from one or more source parsers'
// trees. Only width>=2 spans are counted (the whole-sentence span included).
struct FocusingBias {
  struct SentenceBias {
    int n = 0;  // sentence length; 0 marks a skipped sentence
    std::map<Span, int> counts;
  };
  std::vector<SentenceBias> sentences;
  std::vector<std::string> source_names;
  std::vector<std::string> source_hashes;  // content hashes of the sources

  // Per-span sum of both biases; sources concatenate.
  void merge(const FocusingBias& other);
};

// Counts spans over one parser's trees, aligned by line index with the
// corpus records. A missing tree (nullopt) contributes nothing; a tree whose
// leaf count differs from the record's token count is an alignment error
// naming the line. Skipped records admit only missing trees.
FocusingBias count_spans(const std::vector<std::optional<RawTree>>& trees,
                         const Corpus& corpus, const std::string& source_name);

// Softmax over ALL width>=2 spans of the sentence; spans never observed
// count 0, so every bracketing keeps some weight. Soft mode, log domain.
SpanWeights soft_weights(const FocusingBias::SentenceBias& sb);

// Weight matrices for a whole corpus: soft from the bias when given,
// otherwise off for every sentence.
std::vector<SpanWeights> corpus_weights(const Corpus& corpus,
                                        const FocusingBias* bias);

enum class BiasKind { left, right, random };

// One synthetic tree per sentence over the record's tokens; skipped records
// give nullopt. The random kind draws each bracketing uniformly from the
// seeded stream, so a (corpus, seed) pair always generates the same trees.
std::vector<std::optional<RawTree>> synthetic_trees(const Corpus& corpus,
                                                    BiasKind kind,
                                                    std::uint64_t seed);
FocusingBias synthetic_bias(const Corpus& corpus, BiasKind kind,
                            std::uint64_t seed);

// Intersection over union of (sentence, span) pairs pooled across the
// corpus; spans of width>=2 including the whole-sentence span.
double iou(const std::vector<SpanSet>& a, const std::vector<SpanSet>& b);

// Trees to pooled span sets (width>=2 incl. whole span); missing trees give
// empty sets.
std::vector<SpanSet> tree_spans_for_iou(
    const std::vector<std::optional<RawTree>>& trees);

// For every non-empty subset of parsers: how many pooled (sentence, span)
// pairs lie in all of the subset's parsers and in gold.
struct CommonSpanReport {
  struct Row {
    std::vector<int> parsers;  // subset, by index into the input order
    long long common_in_gold = 0;
  };
  std::vector<Row> rows;                // all subsets, size-major order
  std::vector<double> mean_by_size;     // [k'] = mean over subsets of size k'
  long long gold_total = 0;             // pooled gold width>=2 spans
};
CommonSpanReport common_span_gold_frequency(
    const std::vector<std::vector<SpanSet>>& parser_spans,
    const std::vector<SpanSet>& gold_spans);

// Bias file: `#` metadata lines, then one record per corpus line:
// `<length> <k> p,q:count ...` with spans in ascending order.
void save_bias(const std::string& path, const FocusingBias& bias,
               const std::string& provenance);
FocusingBias load_bias(const std::string& path);

}  // namespace fpcfg

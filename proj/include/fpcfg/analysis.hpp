#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpcfg/grammar.hpp"
#include "fpcfg/tree.hpp"

namespace fpcfg {

// Unlabeled bracketing F1 in percent. Width-1 spans and the whole-sentence
// span are removed first; two empty sets score 100 (so length <= 2 is
// always 100). Both sets must index a length-n sentence.
double sentence_f1(const SpanSet& pred, const SpanSet& gold, int n);

struct EvalReport {
  std::vector<double> per_sentence;  // evaluated sentences only
  double mean = 0.0;
  double stddev = 0.0;  // across sentences
  int evaluated = 0;
  int skipped = 0;  // missing predictions or skipped gold rows
};

// Sentence-level macro average over aligned tree lists. A missing pred or
// gold row skips the pair; a leaf-count mismatch is an alignment error
// naming the line.
EvalReport corpus_s_f1(const std::vector<std::optional<RawTree>>& pred,
                       const std::vector<std::optional<RawTree>>& gold);

// Mean number of distinct rules per parse, grouped by sentence length.
// Counts binary (two-child) productions by label triple; lexical
// (preterminal -> token) rules join in when include_lexical is set. Trees
// must carry real labels: all-"X" trees are rejected with a pointer at the
// labeled decoder.
std::map<int, double> rule_diversity(
    const std::vector<std::optional<RawTree>>& trees, bool include_lexical);

struct RuleFrequencyProfile {
  struct Entry {
    std::string parent, left, right;
    long long count = 0;
  };
  std::vector<Entry> entries;  // count-descending, label-ascending on ties
  long long total = 0;         // all binary-rule occurrences
  double top_share(int k) const;  // mass fraction of the k most frequent
};

RuleFrequencyProfile rule_frequency_profile(
    const std::vector<std::optional<RawTree>>& trees);

struct Correlation {
  double r = 0.0;
  double p_value = 1.0;
  int n = 0;
};

// Pearson r with a two-sided t-test p-value (n-2 degrees of freedom).
// Needs >= 3 points and nonzero variance in both variables.
Correlation correlate_nll_f1(const std::vector<double>& nll,
                             const std::vector<double>& f1);

// A pair of single-preterminal grammars identical except that the
// probabilities of N_i -> N_j T and N_i -> T N_j are exchanged. Such pairs
// assign every sentence the same probability while parsing some sentences
// differently.
struct SoaPair {
  Grammar base;     // carries (a, b) on the ordered pair
  Grammar flipped;  // carries (b, a)
  int i = 0, j = 0;
  double a = 0.0, b = 0.0;
};

// Builds the pair over a random base grammar: |P| = 1, vocabulary of
// `vocab_size` synthetic terminals, row i rescaled so the named pair takes
// (a, b). Throws UsageError when a + b > 1 or sizes are degenerate.
SoaPair build_soa_pair(std::uint64_t seed, int num_nonterminals,
                       int vocab_size, double a, double b, int i, int j);

struct SoaReport {
  double max_abs_logp_diff = 0.0;  // over sentences parseable by both
  bool parses_differ = false;      // some sentence's Viterbi spans differ
  double max_alpha_err = 0.0;      // max |alpha - 1| over evaluated spans
  int alpha_spans = 0;
  int sentences = 0;
  int zero_measure = 0;  // unparseable under both grammars
};

// Checks the pair on the given sentences: probability equality, Viterbi
// disagreement, and the span ratio
//   alpha = p(T->w_p) I_j(p+1, q) / (I_j(p, q-1) p(T->w_{q-1}))
// on every width>=3 span where it is defined, which the single-preterminal
// factorization forces to 1.
SoaReport verify_soa(const SoaPair& pair,
                     const std::vector<Sentence>& sentences);

}  // namespace fpcfg

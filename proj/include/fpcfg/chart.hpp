#pragma once

#include <string>
#include <vector>

#include "fpcfg/corpus.hpp"
#include "fpcfg/grammar.hpp"
#include "fpcfg/util.hpp"

namespace fpcfg {

// Dense (n+1) x (n+1) x |symbols| table of log values over half-open spans.
// Width-1 cells hold preterminal entries only, width>=2 cells nonterminal
// entries only; everything else stays -inf.
struct Chart {
  int n = 0;
  int num_symbols = 0;
  std::vector<double> v;

  Chart() = default;
  Chart(int n_, int m)
      : n(n_), num_symbols(m),
        v(static_cast<std::size_t>(n_ + 1) * (n_ + 1) * m, kNegInf) {}

  double& at(int p, int q, int a) {
    return v[(static_cast<std::size_t>(p) * (n + 1) + q) * num_symbols + a];
  }
  double at(int p, int q, int a) const {
    return v[(static_cast<std::size_t>(p) * (n + 1) + q) * num_symbols + a];
  }
};

// Per-sentence span weights, log domain, over width>=2 spans (the
// whole-sentence span included). In off mode every weight is exactly 1.
struct SpanWeights {
  enum class Mode { off, soft };
  Mode mode = Mode::off;
  int n = 0;
  std::vector<double> log_w;  // (n+1)^2, row-major by (p, q)

  static SpanWeights off_mode(int n_) {
    SpanWeights w;
    w.n = n_;
    return w;
  }
  static SpanWeights soft_mode(int n_);  // all entries unset

  double& slot(int p, int q) {
    return log_w[static_cast<std::size_t>(p) * (n + 1) + q];
  }
  // Log weight of (p, q); 0 in off mode. Throws DataError on an unset soft
  // weight.
  double logw(int p, int q) const;
  // Soft-mode well-formedness: weights over width>=2 spans sum to 1 within
  // 1e-9 (vacuous for n < 2 and in off mode).
  bool sums_to_one() const;
};

// Weighted inside chart. Each width>=2 cell is the split-sum times the
// span's weight, so the sentence score is
// sum_trees p(tree) * prod_{width>=2 spans} w(span).
Chart weighted_inside(const Sentence& s, const Grammar& g,
                      const SpanWeights& w);
// Plain inside: identical to weighted_inside with off-mode weights.
Chart inside(const Sentence& s, const Grammar& g);

// log sum_A root_logp(A) + I_A(0, n); -inf when the sentence has no
// derivation (always for n = 1).
double sentence_logscore(const Chart& ins, const Grammar& g);

// Companion outside chart under the same weights; I*O summed over symbols
// and divided by the score gives span posteriors. Throws NumericError on a
// zero-measure sentence.
Chart outside(const Sentence& s, const Grammar& g, const SpanWeights& w,
              const Chart& ins);

// Posterior probability that (p, q) is a constituent, for width>=2 spans;
// (n+1)^2 row-major matrix, unused slots 0. Sums to n-1.
std::vector<double> span_posteriors(const Grammar& g, const SpanWeights& w,
                                    const Chart& ins, const Chart& out,
                                    double logscore);

// Posterior-expected rule counts under the weighted tree measure. Root
// counts sum to 1, binary to n-1, lexical to n. Throws NumericError on zero
// measure.
RuleCounts expected_counts(const Sentence& s, const Grammar& g,
                           const SpanWeights& w);

struct NllReport {
  std::vector<double> per_sentence;  // -log score; NaN for excluded rows
  std::vector<int> zero_measure;     // corpus indices with score 0
  int skipped = 0;                   // records flagged skipped
  double total = 0.0;                // over included sentences
  long long tokens = 0;
  int counted = 0;
  double mean() const { return counted ? total / counted : 0.0; }
  double per_token() const { return tokens ? total / tokens : 0.0; }
};

// Corpus NLL under per-sentence weights (empty vector = off mode for all).
// Zero-measure sentences are excluded from the mean and listed.
NllReport corpus_nll(const Corpus& corpus, const Grammar& g,
                     const std::vector<SpanWeights>& weights, int threads);

}  // namespace fpcfg

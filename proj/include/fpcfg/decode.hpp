#pragma once

#include <string>
#include <vector>

#include "fpcfg/chart.hpp"
#include "fpcfg/grammar.hpp"
#include "fpcfg/tree.hpp"

namespace fpcfg {

struct ViterbiResult {
  RawTree tree;  // binary, labels NT-k / T-k, leaves are the given tokens
  double logp;   // includes the root rule
};

// Maximum-probability derivation, (max,+) over the same typed recursion as
// inside. Ties break toward the smallest split, then smallest left symbol
// id, then smallest right symbol id (and smallest root symbol at the top).
// Throws NumericError when the sentence has probability zero.
ViterbiResult viterbi(const std::vector<std::string>& tokens,
                      const Sentence& s, const Grammar& g);

// Minimum-Bayes-risk bracketing: maximizes the sum of posterior span
// marginals over the tree's width>=2 spans; unlabeled output (all internal
// labels "X"). Posteriors are unweighted unless `w` is given. Ties break
// toward the smallest split. Throws NumericError on zero measure.
RawTree mbr_decode(const std::vector<std::string>& tokens, const Sentence& s,
                   const Grammar& g, const SpanWeights* w = nullptr);

}  // namespace fpcfg

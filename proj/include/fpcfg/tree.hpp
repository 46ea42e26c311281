#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fpcfg {

// Bracketed parse tree. Internal nodes carry labels; leaves carry tokens in
// `label`. Gold trees may be n-ary; decoder output is binary.
struct RawTree {
  std::string label;
  std::vector<RawTree> children;

  bool is_leaf() const { return children.empty(); }
  // Preterminal in the treebank sense: exactly one child, which is a leaf.
  bool is_preterminal() const {
    return children.size() == 1 && children[0].is_leaf();
  }
};

bool operator==(const RawTree& a, const RawTree& b);
inline bool operator!=(const RawTree& a, const RawTree& b) { return !(a == b); }

// Half-open word span, 0-based: (start, end), width = end - start.
using Span = std::pair<int, int>;
using SpanSet = std::set<Span>;

// Parses one PTB-style bracketed tree from a line. Throws DataError with the
// byte offset on unbalanced, empty, or trailing-garbage input.
RawTree parse_bracketed(const std::string& line);

// Single-line bracketed form. Parens inside labels/tokens are written as
// -LRB-/-RRB- (and read back verbatim, the usual treebank convention), so the
// round trip is exact for anything parse_bracketed can produce.
std::string serialize_bracketed(const RawTree& t);

std::vector<std::string> leaf_tokens(const RawTree& t);
int leaf_count(const RawTree& t);

// Spans of all internal nodes, leaves indexed left to right. Unary chains
// collapse to a single span via set semantics. Width-1 spans and the
// whole-sentence span are kept or dropped per the flags.
SpanSet tree_to_spans(const RawTree& t, bool include_width_one,
                      bool include_whole);

// Width>=2 spans excluding the whole-sentence span; what bracketing F1 scores.
SpanSet nontrivial_spans(const RawTree& t);

// Branching skeletons over a fixed token sequence; internal labels "X".
// Used for synthetic biases. n = 1 gives the bare leaf.
RawTree left_branching_tree(const std::vector<std::string>& tokens);
RawTree right_branching_tree(const std::vector<std::string>& tokens);
// Uniform over all binary bracketings (Catalan-weighted split choice).
RawTree random_binary_tree(const std::vector<std::string>& tokens,
                           std::mt19937_64& rng);

}  // namespace fpcfg

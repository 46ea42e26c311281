#include "fpcfg/decode.hpp"

#include <cmath>

#include "fpcfg/util.hpp"

namespace fpcfg {

namespace {

struct BackPtr {
  int d = -1, b = -1, c = -1;
};

RawTree build_viterbi_tree(const std::vector<std::string>& tokens,
                           const SymbolInventory& inv, const Chart& best,
                           const std::vector<BackPtr>& back, int p, int q,
                           int a) {
  RawTree node;
  node.label = inv.symbol_name(a);
  if (q - p == 1) {
    RawTree leaf;
    leaf.label = tokens[p];
    node.children.push_back(std::move(leaf));
    return node;
  }
  int n = best.n;
  const BackPtr& bp =
      back[(static_cast<std::size_t>(p) * (n + 1) + q) * best.num_symbols + a];
  node.children.push_back(
      build_viterbi_tree(tokens, inv, best, back, p, bp.d, bp.b));
  node.children.push_back(
      build_viterbi_tree(tokens, inv, best, back, bp.d, q, bp.c));
  return node;
}

}  // namespace

ViterbiResult viterbi(const std::vector<std::string>& tokens,
                      const Sentence& s, const Grammar& g) {
  int n = static_cast<int>(s.size());
  if (n == 0) throw UsageError("empty sentence");
  if (tokens.size() != s.size())
    throw DataError("token/id sequence length mismatch");
  const SymbolInventory& inv = g.inventory();
  int nt = inv.num_nonterminals;
  int m = inv.num_symbols();
  Chart best(n, m);
  std::vector<BackPtr> back(best.v.size());
  for (int p = 0; p < n; ++p)
    for (int b = nt; b < m; ++b) best.at(p, p + 1, b) = g.lexical_logp(b, s[p]);
  for (int width = 2; width <= n; ++width) {
    for (int p = 0; p + width <= n; ++p) {
      int q = p + width;
      for (int a = 0; a < nt; ++a) {
        double top = kNegInf;
        BackPtr arg;
        for (int d = p + 1; d < q; ++d) {
          int b0 = (d - p == 1) ? nt : 0;
          int b1 = (d - p == 1) ? m : nt;
          int c0 = (q - d == 1) ? nt : 0;
          int c1 = (q - d == 1) ? m : nt;
          for (int b = b0; b < b1; ++b) {
            double lb = best.at(p, d, b);
            if (lb == kNegInf) continue;
            for (int c = c0; c < c1; ++c) {
              double t = g.binary_logp(a, b, c) + lb + best.at(d, q, c);
              if (t > top) {
                top = t;
                arg = {d, b, c};
              }
            }
          }
        }
        best.at(p, q, a) = top;
        back[(static_cast<std::size_t>(p) * (n + 1) + q) * m + a] = arg;
      }
    }
  }
  double top = kNegInf;
  int root = -1;
  for (int a = 0; a < nt; ++a) {
    double t = g.root_logp(a) + best.at(0, n, a);
    if (t > top) {
      top = t;
      root = a;
    }
  }
  if (root < 0 || top == kNegInf)
    throw NumericError("sentence has zero probability");
  ViterbiResult res;
  res.logp = top;
  res.tree = build_viterbi_tree(tokens, inv, best, back, 0, n, root);
  return res;
}

namespace {

RawTree build_split_tree(const std::vector<std::string>& tokens,
                         const std::vector<int>& split, int n, int p, int q) {
  if (q - p == 1) {
    RawTree leaf;
    leaf.label = tokens[p];
    return leaf;
  }
  RawTree node;
  node.label = "X";
  int d = split[static_cast<std::size_t>(p) * (n + 1) + q];
  node.children.push_back(build_split_tree(tokens, split, n, p, d));
  node.children.push_back(build_split_tree(tokens, split, n, d, q));
  return node;
}

}  // namespace

RawTree mbr_decode(const std::vector<std::string>& tokens, const Sentence& s,
                   const Grammar& g, const SpanWeights* w) {
  int n = static_cast<int>(s.size());
  if (n == 0) throw UsageError("empty sentence");
  if (tokens.size() != s.size())
    throw DataError("token/id sequence length mismatch");
  SpanWeights off = SpanWeights::off_mode(n);
  const SpanWeights& weights = w ? *w : off;
  Chart ins = weighted_inside(s, g, weights);
  double z = sentence_logscore(ins, g);
  if (z == kNegInf) throw NumericError("sentence has zero measure");
  Chart out = outside(s, g, weights, ins);
  std::vector<double> mu = span_posteriors(g, weights, ins, out, z);
  // (max,+) over bracketings: value of a span is its own posterior plus the
  // best split; width-1 spans contribute nothing.
  std::vector<double> val(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  std::vector<int> split(val.size(), -1);
  for (int width = 2; width <= n; ++width) {
    for (int p = 0; p + width <= n; ++p) {
      int q = p + width;
      std::size_t idx = static_cast<std::size_t>(p) * (n + 1) + q;
      double top = kNegInf;
      int arg = -1;
      for (int d = p + 1; d < q; ++d) {
        double t = val[static_cast<std::size_t>(p) * (n + 1) + d] +
                   val[static_cast<std::size_t>(d) * (n + 1) + q];
        if (t > top) {
          top = t;
          arg = d;
        }
      }
      val[idx] = mu[idx] + top;
      split[idx] = arg;
    }
  }
  return build_split_tree(tokens, split, n, 0, n);
}

}  // namespace fpcfg

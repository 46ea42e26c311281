#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpcfg::oracle {
namespace {

// Flattened shape for assignment enumeration: node 0 is the root, children
// precede nothing in particular but indices are stable.
struct Node {
  int start = 0, end = 0;
  int li = -1, ri = -1;  // child indices; -1 for leaves
};

int flatten(const Shape& sh, std::vector<Node>& out) {
  int id = static_cast<int>(out.size());
  out.push_back({sh.start, sh.end, -1, -1});
  if (sh.split >= 0) {
    int li = flatten(*sh.left, out);
    int ri = flatten(*sh.right, out);
    out[id].li = li;
    out[id].ri = ri;
  }
  return id;
}

// Per-shape sum over symbol assignments, one entry per possible root symbol.
// Leaf values are zero on nonterminal rows and internal values zero on
// preterminal rows, so the sums below need no type-case logic.
std::vector<double> shape_values(const Shape& sh, const Sentence& s,
                                 const Grammar& g, const SpanWeights& w) {
  int m = g.num_symbols();
  int nt = g.num_nonterminals();
  std::vector<double> vals(m, 0.0);
  if (sh.split < 0) {
    for (int b = nt; b < m; ++b) vals[b] = std::exp(g.lexical_logp(b, s[sh.start]));
    return vals;
  }
  std::vector<double> lv = shape_values(*sh.left, s, g, w);
  std::vector<double> rv = shape_values(*sh.right, s, g, w);
  double wt = std::exp(w.logw(sh.start, sh.end));
  for (int a = 0; a < nt; ++a) {
    double sum = 0.0;
    for (int b = 0; b < m; ++b) {
      if (lv[b] == 0.0) continue;
      for (int c = 0; c < m; ++c) {
        if (rv[c] == 0.0) continue;
        sum += std::exp(g.binary_logp(a, b, c)) * lv[b] * rv[c];
      }
    }
    vals[a] = wt * sum;
  }
  return vals;
}

void collect_spans(const Shape& sh, SpanSet& out) {
  if (sh.split < 0) return;
  out.insert({sh.start, sh.end});
  collect_spans(*sh.left, out);
  collect_spans(*sh.right, out);
}

}  // namespace

std::vector<Shape> enumerate_shapes(int start, int end) {
  std::vector<Shape> out;
  if (end - start == 1) {
    Shape leaf;
    leaf.start = start;
    leaf.end = end;
    out.push_back(leaf);
    return out;
  }
  for (int d = start + 1; d < end; ++d) {
    for (const Shape& l : enumerate_shapes(start, d)) {
      for (const Shape& r : enumerate_shapes(d, end)) {
        Shape sh;
        sh.start = start;
        sh.end = end;
        sh.split = d;
        sh.left = std::make_shared<Shape>(l);
        sh.right = std::make_shared<Shape>(r);
        out.push_back(sh);
      }
    }
  }
  return out;
}

SpanSet shape_spans(const Shape& sh) {
  SpanSet out;
  collect_spans(sh, out);
  return out;
}

double tree_sum(const Sentence& s, const Grammar& g, const SpanWeights& w,
                int p, int q, int a) {
  double total = 0.0;
  for (const Shape& sh : enumerate_shapes(p, q))
    total += shape_values(sh, s, g, w)[a];
  return total;
}

double score(const Sentence& s, const Grammar& g, const SpanWeights& w) {
  int n = static_cast<int>(s.size());
  double total = 0.0;
  for (const Shape& sh : enumerate_shapes(0, n))
    total += shape_score(sh, s, g, w);
  return total;
}

double shape_score(const Shape& sh, const Sentence& s, const Grammar& g,
                   const SpanWeights& w) {
  std::vector<double> vals = shape_values(sh, s, g, w);
  double total = 0.0;
  for (int a = 0; a < g.num_nonterminals(); ++a)
    total += std::exp(g.root_logp(a)) * vals[a];
  return total;
}

std::map<Span, double> posteriors(const Sentence& s, const Grammar& g,
                                  const SpanWeights& w) {
  int n = static_cast<int>(s.size());
  std::map<Span, double> mu;
  for (int p = 0; p < n; ++p)
    for (int q = p + 2; q <= n; ++q) mu[{p, q}] = 0.0;
  double z = 0.0;
  for (const Shape& sh : enumerate_shapes(0, n)) {
    std::vector<double> vals = shape_values(sh, s, g, w);
    double sc = 0.0;
    for (int a = 0; a < g.num_nonterminals(); ++a)
      sc += std::exp(g.root_logp(a)) * vals[a];
    z += sc;
    for (const Span& sp : shape_spans(sh)) mu[sp] += sc;
  }
  if (z <= 0.0) throw std::runtime_error("oracle: zero-measure sentence");
  for (auto& [sp, v] : mu) v /= z;
  return mu;
}

RuleCounts expected(const Sentence& s, const Grammar& g,
                    const SpanWeights& w) {
  const SymbolInventory& inv = g.inventory();
  int n = static_cast<int>(s.size());
  int nt = inv.num_nonterminals;
  int m = inv.num_symbols();
  RuleCounts counts(inv);
  double z = 0.0;

  for (const Shape& sh : enumerate_shapes(0, n)) {
    std::vector<Node> nodes;
    flatten(sh, nodes);
    double wpro = 1.0;
    for (const Node& nd : nodes)
      if (nd.li >= 0) wpro *= std::exp(w.logw(nd.start, nd.end));

    std::vector<int> sym(nodes.size(), -1);
    // Depth-first assignment of a symbol to every node; the measure and
    // count tallies happen once per complete assignment.
    auto enumerate = [&](auto&& self, std::size_t i) -> void {
      if (i == nodes.size()) {
        double measure = wpro * std::exp(g.root_logp(sym[0]));
        for (std::size_t k = 0; k < nodes.size() && measure > 0.0; ++k) {
          const Node& nd = nodes[k];
          if (nd.li >= 0)
            measure *= std::exp(g.binary_logp(sym[k], sym[nd.li], sym[nd.ri]));
          else
            measure *= std::exp(g.lexical_logp(sym[k], s[nd.start]));
        }
        if (measure <= 0.0) return;
        z += measure;
        counts.root[sym[0]] += measure;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
          const Node& nd = nodes[k];
          if (nd.li >= 0)
            counts.bin(sym[k], sym[nd.li], sym[nd.ri]) += measure;
          else
            counts.lex(sym[k], s[nd.start]) += measure;
        }
        return;
      }
      bool internal = nodes[i].li >= 0;
      int lo = internal ? 0 : nt;
      int hi = internal ? nt : m;
      for (int a = lo; a < hi; ++a) {
        sym[i] = a;
        self(self, i + 1);
      }
      sym[i] = -1;
    };
    enumerate(enumerate, 0);
  }

  if (z <= 0.0) throw std::runtime_error("oracle: zero-measure sentence");
  for (double& v : counts.root) v /= z;
  for (double& v : counts.binary) v /= z;
  for (double& v : counts.lexical) v /= z;
  return counts;
}

Best best_parse(const Sentence& s, const Grammar& g) {
  int n = static_cast<int>(s.size());
  int nt = g.num_nonterminals();
  int m = g.num_symbols();

  // Max over assignments within one shape, by the same leaf/internal
  // zero-row trick as shape_values but with max-times instead of sum-times.
  auto shape_max = [&](auto&& self, const Shape& sh) -> std::vector<double> {
    std::vector<double> vals(m, 0.0);
    if (sh.split < 0) {
      for (int b = nt; b < m; ++b)
        vals[b] = std::exp(g.lexical_logp(b, s[sh.start]));
      return vals;
    }
    std::vector<double> lv = self(self, *sh.left);
    std::vector<double> rv = self(self, *sh.right);
    for (int a = 0; a < nt; ++a) {
      double best = 0.0;
      for (int b = 0; b < m; ++b) {
        if (lv[b] == 0.0) continue;
        for (int c = 0; c < m; ++c) {
          if (rv[c] == 0.0) continue;
          double t = std::exp(g.binary_logp(a, b, c)) * lv[b] * rv[c];
          if (t > best) best = t;
        }
      }
      vals[a] = best;
    }
    return vals;
  };

  Best out;
  double second = 0.0;
  for (const Shape& sh : enumerate_shapes(0, n)) {
    std::vector<double> vals = shape_max(shape_max, sh);
    double best = 0.0;
    for (int a = 0; a < nt; ++a) {
      double t = std::exp(g.root_logp(a)) * vals[a];
      if (t > best) best = t;
    }
    if (best > out.measure) {
      second = out.measure;
      out.measure = best;
      out.spans = shape_spans(sh);
    } else if (best > second) {
      second = best;
    }
  }
  out.unique = out.measure > 0.0 && second < out.measure * (1.0 - 1e-9);
  return out;
}

Best best_bracketing(const std::map<Span, double>& mu, int n) {
  Best out;
  out.measure = -1.0;
  double second = -1.0;
  for (const Shape& sh : enumerate_shapes(0, n)) {
    double obj = 0.0;
    for (const Span& sp : shape_spans(sh)) {
      auto it = mu.find(sp);
      if (it != mu.end()) obj += it->second;
    }
    if (obj > out.measure) {
      second = out.measure;
      out.measure = obj;
      out.spans = shape_spans(sh);
    } else if (obj > second) {
      second = obj;
    }
  }
  out.unique = out.measure - second > 1e-9 * std::max(1.0, std::abs(out.measure));
  return out;
}

}  // namespace fpcfg::oracle

#include "fpcfg/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpcfg {

SpanWeights SpanWeights::soft_mode(int n_) {
  SpanWeights w;
  w.mode = Mode::soft;
  w.n = n_;
  w.log_w.assign(static_cast<std::size_t>(n_ + 1) * (n_ + 1),
                 std::numeric_limits<double>::quiet_NaN());
  return w;
}

double SpanWeights::logw(int p, int q) const {
  if (mode == Mode::off) return 0.0;
  double v = log_w[static_cast<std::size_t>(p) * (n + 1) + q];
  if (std::isnan(v))
    throw DataError("missing span weight for (" + std::to_string(p) + "," +
                    std::to_string(q) + ")");
  return v;
}

bool SpanWeights::sums_to_one() const {
  if (mode == Mode::off || n < 2) return true;
  double total = 0.0;
  for (int p = 0; p + 2 <= n; ++p)
    for (int q = p + 2; q <= n; ++q) total += std::exp(logw(p, q));
  return std::fabs(total - 1.0) <= 1e-9;
}

namespace {

void check_tokens(const Sentence& s, const Grammar& g) {
  int vocab = g.inventory().vocab_size();
  for (int w : s) {
    if (w < 0 || w >= vocab)
      throw DataError("token id " + std::to_string(w) +
                      " outside vocabulary of size " + std::to_string(vocab));
  }
}

// Split-sum for one nonterminal cell, two-pass max-shifted log-sum-exp with
// a fixed accumulation order (split, then left symbol, then right symbol).
// Child symbols range over preterminals for width-1 sub-spans and
// nonterminals otherwise; cells hold -inf off-range, so iterating the valid
// range only is both faster and order-stable.
struct CellSum {
  const Grammar& g;
  const Chart& chart;
  int nt, m;

  double operator()(int p, int q, int a) const {
    double best = kNegInf;
    for (int d = p + 1; d < q; ++d) {
      int b0 = (d - p == 1) ? nt : 0;
      int b1 = (d - p == 1) ? m : nt;
      int c0 = (q - d == 1) ? nt : 0;
      int c1 = (q - d == 1) ? m : nt;
      for (int b = b0; b < b1; ++b) {
        double lb = chart.at(p, d, b);
        if (lb == kNegInf) continue;
        for (int c = c0; c < c1; ++c) {
          double t = g.binary_logp(a, b, c) + lb + chart.at(d, q, c);
          if (t > best) best = t;
        }
      }
    }
    if (best == kNegInf) return kNegInf;
    double sum = 0.0;
    for (int d = p + 1; d < q; ++d) {
      int b0 = (d - p == 1) ? nt : 0;
      int b1 = (d - p == 1) ? m : nt;
      int c0 = (q - d == 1) ? nt : 0;
      int c1 = (q - d == 1) ? m : nt;
      for (int b = b0; b < b1; ++b) {
        double lb = chart.at(p, d, b);
        if (lb == kNegInf) continue;
        for (int c = c0; c < c1; ++c) {
          double t = g.binary_logp(a, b, c) + lb + chart.at(d, q, c);
          if (t != kNegInf) sum += std::exp(t - best);
        }
      }
    }
    return best + std::log(sum);
  }
};

}  // namespace

Chart weighted_inside(const Sentence& s, const Grammar& g,
                      const SpanWeights& w) {
  check_tokens(s, g);
  int n = static_cast<int>(s.size());
  const SymbolInventory& inv = g.inventory();
  int nt = inv.num_nonterminals;
  int m = inv.num_symbols();
  Chart chart(n, m);
  for (int p = 0; p < n; ++p)
    for (int b = nt; b < m; ++b) chart.at(p, p + 1, b) = g.lexical_logp(b, s[p]);
  CellSum cell{g, chart, nt, m};
  for (int width = 2; width <= n; ++width) {
    for (int p = 0; p + width <= n; ++p) {
      int q = p + width;
      double lw = w.logw(p, q);
      for (int a = 0; a < nt; ++a) {
        double v = cell(p, q, a);
        chart.at(p, q, a) = (v == kNegInf) ? kNegInf : v + lw;
      }
    }
  }
  return chart;
}

Chart inside(const Sentence& s, const Grammar& g) {
  return weighted_inside(s, g, SpanWeights::off_mode(static_cast<int>(s.size())));
}

double sentence_logscore(const Chart& ins, const Grammar& g) {
  int nt = g.num_nonterminals();
  double best = kNegInf;
  for (int a = 0; a < nt; ++a) {
    double t = g.root_logp(a) + ins.at(0, ins.n, a);
    if (t > best) best = t;
  }
  if (best == kNegInf) return kNegInf;
  double sum = 0.0;
  for (int a = 0; a < nt; ++a) {
    double t = g.root_logp(a) + ins.at(0, ins.n, a);
    if (t != kNegInf) sum += std::exp(t - best);
  }
  return best + std::log(sum);
}

Chart outside(const Sentence& s, const Grammar& g, const SpanWeights& w,
              const Chart& ins) {
  int n = static_cast<int>(s.size());
  const SymbolInventory& inv = g.inventory();
  int nt = inv.num_nonterminals;
  int m = inv.num_symbols();
  if (sentence_logscore(ins, g) == kNegInf)
    throw NumericError("sentence has zero measure");
  Chart out(n, m);
  for (int a = 0; a < nt; ++a) out.at(0, n, a) = g.root_logp(a);
  // Descend by width. A parent's own span weight rides along to its
  // children, so inside * outside at any cell covers exactly the weights of
  // every span in the containing trees except those inside the cell itself
  // (the cell's inside already has them, its own span included).
  for (int width = n; width >= 2; --width) {
    for (int p = 0; p + width <= n; ++p) {
      int q = p + width;
      double lw = w.logw(p, q);
      for (int a = 0; a < nt; ++a) {
        double oa = out.at(p, q, a);
        if (oa == kNegInf) continue;
        double t0 = oa + lw;
        for (int d = p + 1; d < q; ++d) {
          int b0 = (d - p == 1) ? nt : 0;
          int b1 = (d - p == 1) ? m : nt;
          int c0 = (q - d == 1) ? nt : 0;
          int c1 = (q - d == 1) ? m : nt;
          for (int b = b0; b < b1; ++b) {
            double lb = ins.at(p, d, b);
            for (int c = c0; c < c1; ++c) {
              double rule = g.binary_logp(a, b, c);
              if (rule == kNegInf) continue;
              double lc = ins.at(d, q, c);
              if (lc != kNegInf) {
                double& ob = out.at(p, d, b);
                ob = log_add(ob, t0 + rule + lc);
              }
              if (lb != kNegInf) {
                double& oc = out.at(d, q, c);
                oc = log_add(oc, t0 + rule + lb);
              }
            }
          }
        }
      }
    }
  }
  return out;
}

std::vector<double> span_posteriors(const Grammar& g, const SpanWeights& w,
                                    const Chart& ins, const Chart& out,
                                    double logscore) {
  (void)w;
  int n = ins.n;
  int nt = g.num_nonterminals();
  std::vector<double> mu(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  if (logscore == kNegInf) throw NumericError("sentence has zero measure");
  for (int p = 0; p + 2 <= n; ++p) {
    for (int q = p + 2; q <= n; ++q) {
      double acc = kNegInf;
      for (int a = 0; a < nt; ++a)
        acc = log_add(acc, ins.at(p, q, a) + out.at(p, q, a));
      if (acc != kNegInf)
        mu[static_cast<std::size_t>(p) * (n + 1) + q] = std::exp(acc - logscore);
    }
  }
  return mu;
}

RuleCounts expected_counts(const Sentence& s, const Grammar& g,
                           const SpanWeights& w) {
  int n = static_cast<int>(s.size());
  const SymbolInventory& inv = g.inventory();
  int nt = inv.num_nonterminals;
  int m = inv.num_symbols();
  Chart ins = weighted_inside(s, g, w);
  double z = sentence_logscore(ins, g);
  if (z == kNegInf) throw NumericError("sentence has zero measure");
  Chart out = outside(s, g, w, ins);
  RuleCounts counts(inv);
  for (int a = 0; a < nt; ++a) {
    double t = g.root_logp(a) + ins.at(0, n, a);
    if (t != kNegInf) counts.root[a] += std::exp(t - z);
  }
  for (int width = 2; width <= n; ++width) {
    for (int p = 0; p + width <= n; ++p) {
      int q = p + width;
      double lw = w.logw(p, q);
      for (int a = 0; a < nt; ++a) {
        double oa = out.at(p, q, a);
        if (oa == kNegInf) continue;
        double t0 = oa + lw - z;
        for (int d = p + 1; d < q; ++d) {
          int b0 = (d - p == 1) ? nt : 0;
          int b1 = (d - p == 1) ? m : nt;
          int c0 = (q - d == 1) ? nt : 0;
          int c1 = (q - d == 1) ? m : nt;
          for (int b = b0; b < b1; ++b) {
            double lb = ins.at(p, d, b);
            if (lb == kNegInf) continue;
            for (int c = c0; c < c1; ++c) {
              double lc = ins.at(d, q, c);
              if (lc == kNegInf) continue;
              double rule = g.binary_logp(a, b, c);
              if (rule == kNegInf) continue;
              counts.bin(a, b, c) += std::exp(t0 + rule + lb + lc);
            }
          }
        }
      }
    }
  }
  for (int p = 0; p < n; ++p) {
    for (int b = nt; b < m; ++b) {
      double t = ins.at(p, p + 1, b) + out.at(p, p + 1, b);
      if (t != kNegInf) counts.lex(b, s[p]) += std::exp(t - z);
    }
  }
  return counts;
}

NllReport corpus_nll(const Corpus& corpus, const Grammar& g,
                     const std::vector<SpanWeights>& weights, int threads) {
  if (!weights.empty() && weights.size() != corpus.size())
    throw DataError("weights/corpus length mismatch");
  NllReport report;
  report.per_sentence.assign(corpus.size(),
                             std::numeric_limits<double>::quiet_NaN());
  constexpr std::size_t kBlock = 16;
  std::size_t nblocks = (corpus.size() + kBlock - 1) / kBlock;
  ordered_blocks<std::vector<double>>(
      nblocks, threads,
      [&](std::size_t blk) {
        std::size_t lo = blk * kBlock;
        std::size_t hi = std::min(corpus.size(), lo + kBlock);
        std::vector<double> vals;
        vals.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
          const CorpusRecord& rec = corpus[i];
          if (rec.skipped) {
            vals.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
          }
          Chart ins =
              weights.empty()
                  ? inside(rec.sentence, g)
                  : weighted_inside(rec.sentence, g, weights[i]);
          vals.push_back(-sentence_logscore(ins, g));
        }
        return vals;
      },
      [&](std::size_t blk, const std::vector<double>& vals) {
        std::size_t lo = blk * kBlock;
        for (std::size_t k = 0; k < vals.size(); ++k) {
          std::size_t i = lo + k;
          double v = vals[k];
          if (corpus[i].skipped) {
            ++report.skipped;
            continue;
          }
          if (std::isinf(v)) {
            report.zero_measure.push_back(static_cast<int>(i));
            continue;
          }
          report.per_sentence[i] = v;
          report.total += v;
          report.tokens += static_cast<long long>(corpus[i].sentence.size());
          ++report.counted;
        }
      });
  return report;
}

}  // namespace fpcfg

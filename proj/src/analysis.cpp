#include "fpcfg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "fpcfg/chart.hpp"
#include "fpcfg/decode.hpp"
#include "fpcfg/util.hpp"

namespace fpcfg {

namespace {

SpanSet drop_trivial(const SpanSet& spans, int n) {
  SpanSet out;
  for (const Span& s : spans) {
    if (s.second - s.first <= 1) continue;
    if (s.first == 0 && s.second == n) continue;
    out.insert(s);
  }
  return out;
}

}  // namespace

namespace {

void check_spans(const SpanSet& spans, int n, const char* which) {
  for (const Span& s : spans) {
    if (s.first < 0 || s.first >= s.second || s.second > n)
      throw DataError(std::string(which) + " span (" +
                      std::to_string(s.first) + "," + std::to_string(s.second) +
                      ") invalid for length " + std::to_string(n));
  }
}

}  // namespace

double sentence_f1(const SpanSet& pred, const SpanSet& gold, int n) {
  check_spans(pred, n, "pred");
  check_spans(gold, n, "gold");
  SpanSet p = drop_trivial(pred, n);
  SpanSet g = drop_trivial(gold, n);
  if (p.empty() && g.empty()) return 100.0;
  if (p.empty() || g.empty()) return 0.0;
  int inter = 0;
  for (const Span& s : p) inter += g.count(s);
  if (inter == 0) return 0.0;
  double prec = static_cast<double>(inter) / p.size();
  double rec = static_cast<double>(inter) / g.size();
  return 100.0 * 2.0 * prec * rec / (prec + rec);
}

EvalReport corpus_s_f1(const std::vector<std::optional<RawTree>>& pred,
                       const std::vector<std::optional<RawTree>>& gold) {
  if (pred.size() != gold.size())
    throw DataError("pred/gold line counts differ (" +
                    std::to_string(pred.size()) + " vs " +
                    std::to_string(gold.size()) + ")");
  EvalReport report;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred[i] || !gold[i]) {
      ++report.skipped;
      continue;
    }
    int np = leaf_count(*pred[i]);
    int ng = leaf_count(*gold[i]);
    if (np != ng)
      throw DataError("line " + std::to_string(i + 1) + ": pred has " +
                      std::to_string(np) + " tokens, gold has " +
                      std::to_string(ng));
    report.per_sentence.push_back(sentence_f1(tree_to_spans(*pred[i], false, true),
                                              tree_to_spans(*gold[i], false, true),
                                              ng));
  }
  report.evaluated = static_cast<int>(report.per_sentence.size());
  if (report.evaluated > 0) {
    double sum = 0.0;
    for (double v : report.per_sentence) sum += v;
    report.mean = sum / report.evaluated;
    double sq = 0.0;
    for (double v : report.per_sentence)
      sq += (v - report.mean) * (v - report.mean);
    report.stddev = std::sqrt(sq / report.evaluated);
  }
  return report;
}

namespace {

void collect_rules(const RawTree& t, std::set<std::string>& binary,
                   std::set<std::string>& lexical, bool& any_labeled) {
  if (t.is_leaf()) return;
  if (t.is_preterminal()) {
    lexical.insert(t.label + " -> " + t.children[0].label);
    if (t.label != "X") any_labeled = true;
    return;
  }
  if (t.children.size() == 2) {
    binary.insert(t.label + " -> " + t.children[0].label + " " +
                  t.children[1].label);
  }
  if (t.label != "X") any_labeled = true;
  for (const RawTree& c : t.children)
    collect_rules(c, binary, lexical, any_labeled);
}

}  // namespace

std::map<int, double> rule_diversity(
    const std::vector<std::optional<RawTree>>& trees, bool include_lexical) {
  std::map<int, long long> unique_sum;
  std::map<int, int> tree_count;
  bool any_labeled = false;
  bool any_tree = false;
  for (const auto& t : trees) {
    if (!t) continue;
    any_tree = true;
    std::set<std::string> binary, lexical;
    collect_rules(*t, binary, lexical, any_labeled);
    int n = leaf_count(*t);
    long long uniq = static_cast<long long>(binary.size());
    if (include_lexical) uniq += static_cast<long long>(lexical.size());
    unique_sum[n] += uniq;
    tree_count[n] += 1;
  }
  if (any_tree && !any_labeled)
    throw UsageError(
        "trees carry no symbol labels; decode with the labeled (cyk) decoder");
  std::map<int, double> out;
  for (const auto& [n, sum] : unique_sum)
    out[n] = static_cast<double>(sum) / tree_count[n];
  return out;
}

double RuleFrequencyProfile::top_share(int k) const {
  if (total == 0 || k <= 0) return 0.0;
  long long covered = 0;
  for (int i = 0; i < k && i < static_cast<int>(entries.size()); ++i)
    covered += entries[i].count;
  return static_cast<double>(covered) / static_cast<double>(total);
}

RuleFrequencyProfile rule_frequency_profile(
    const std::vector<std::optional<RawTree>>& trees) {
  std::map<std::tuple<std::string, std::string, std::string>, long long> counts;
  struct Walk {
    std::map<std::tuple<std::string, std::string, std::string>, long long>&
        counts;
    void operator()(const RawTree& t) {
      if (t.is_leaf() || t.is_preterminal()) return;
      if (t.children.size() == 2)
        ++counts[{t.label, t.children[0].label, t.children[1].label}];
      for (const RawTree& c : t.children) (*this)(c);
    }
  };
  Walk walk{counts};
  for (const auto& t : trees)
    if (t) walk(*t);
  RuleFrequencyProfile profile;
  for (const auto& [key, c] : counts) {
    profile.entries.push_back(
        {std::get<0>(key), std::get<1>(key), std::get<2>(key), c});
    profile.total += c;
  }
  std::stable_sort(profile.entries.begin(), profile.entries.end(),
                   [](const RuleFrequencyProfile::Entry& a,
                      const RuleFrequencyProfile::Entry& b) {
                     if (a.count != b.count) return a.count > b.count;
                     return std::tie(a.parent, a.left, a.right) <
                            std::tie(b.parent, b.left, b.right);
                   });
  return profile;
}

Correlation correlate_nll_f1(const std::vector<double>& nll,
                             const std::vector<double>& f1) {
  if (nll.size() != f1.size()) throw UsageError("x/y length mismatch");
  int n = static_cast<int>(nll.size());
  if (n < 3) throw UsageError("correlation needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += nll[i];
    my += f1[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    double dx = nll[i] - mx, dy = f1[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DataError("correlation undefined: a variable has zero variance");
  Correlation c;
  c.n = n;
  c.r = sxy / std::sqrt(sxx * syy);
  if (c.r >= 1.0 || c.r <= -1.0) {
    c.r = c.r > 0 ? 1.0 : -1.0;
    c.p_value = 0.0;
    return c;
  }
  double t = c.r * std::sqrt((n - 2) / (1.0 - c.r * c.r));
  boost::math::students_t_distribution<double> dist(n - 2);
  c.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
  return c;
}

SoaPair build_soa_pair(std::uint64_t seed, int num_nonterminals,
                       int vocab_size, double a, double b, int i, int j) {
  if (num_nonterminals < 1) throw UsageError("need at least one nonterminal");
  if (vocab_size < 1) throw UsageError("need a nonempty vocabulary");
  if (i < 0 || i >= num_nonterminals || j < 0 || j >= num_nonterminals)
    throw UsageError("flip pair indices out of range");
  if (a < 0 || b < 0 || a + b > 1.0)
    throw UsageError("pair probabilities must be nonnegative with a + b <= 1");
  SymbolInventory inv;
  inv.num_nonterminals = num_nonterminals;
  inv.num_preterminals = 1;
  inv.terminals.push_back(inv.unk_token);
  for (int w = 1; w < vocab_size; ++w)
    inv.terminals.push_back("w" + std::to_string(w));
  int nt = num_nonterminals;
  int m = inv.num_symbols();
  int T = nt;  // the single preterminal's symbol id

  std::mt19937_64 rng(seed);
  std::vector<double> root = sample_dirichlet(rng, nt, 1.0);
  std::vector<std::vector<double>> binary;
  for (int p = 0; p < nt; ++p)
    binary.push_back(sample_dirichlet(rng, static_cast<std::size_t>(m) * m, 1.0));
  std::vector<double> lexical = sample_dirichlet(rng, inv.terminals.size(), 1.0);

  // Rescale row i so the flipped pair owns exactly a + b of its mass.
  std::vector<double>& row = binary[i];
  std::size_t idx_jt = static_cast<std::size_t>(j) * m + T;  // N_j T
  std::size_t idx_tj = static_cast<std::size_t>(T) * m + j;  // T N_j
  double rest = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k)
    if (k != idx_jt && k != idx_tj) rest += row[k];
  double scale = rest > 0 ? (1.0 - a - b) / rest : 0.0;
  if (rest <= 0 && a + b < 1.0)
    throw UsageError("cannot renormalize the flip row");
  for (std::size_t k = 0; k < row.size(); ++k)
    if (k != idx_jt && k != idx_tj) row[k] *= scale;
  row[idx_jt] = a;
  row[idx_tj] = b;

  auto fill = [&](bool flip) {
    Grammar g(inv);
    for (int p = 0; p < nt; ++p) {
      double v = root[p];
      g.root_logp(p) = v > 0 ? std::log(v) : kNegInf;
    }
    for (int p = 0; p < nt; ++p) {
      for (int x = 0; x < m; ++x) {
        for (int y = 0; y < m; ++y) {
          std::size_t k = static_cast<std::size_t>(x) * m + y;
          double v = binary[p][k];
          if (flip && p == i) {
            if (k == idx_jt) v = binary[p][idx_tj];
            if (k == idx_tj) v = binary[p][idx_jt];
          }
          g.binary_logp(p, x, y) = v > 0 ? std::log(v) : kNegInf;
        }
      }
    }
    for (int w = 0; w < inv.vocab_size(); ++w) {
      double v = lexical[w];
      g.lexical_logp(T, w) = v > 0 ? std::log(v) : kNegInf;
    }
    return g;
  };

  SoaPair pair;
  pair.base = fill(false);
  pair.flipped = fill(true);
  pair.i = i;
  pair.j = j;
  pair.a = a;
  pair.b = b;
  {
    std::vector<std::string> problems = pair.base.validate();
    std::vector<std::string> more = pair.flipped.validate();
    problems.insert(problems.end(), more.begin(), more.end());
    if (!problems.empty())
      throw UsageError("flip pair grammar invalid: " + problems.front());
  }
  return pair;
}

SoaReport verify_soa(const SoaPair& pair,
                     const std::vector<Sentence>& sentences) {
  const SymbolInventory& inv = pair.base.inventory();
  if (inv.num_preterminals != 1)
    throw UsageError("flip-pair check requires a single preterminal");
  if (!(pair.flipped.inventory() == inv))
    throw UsageError("pair grammars disagree on the inventory");
  int T = inv.num_nonterminals;
  SoaReport report;
  report.sentences = static_cast<int>(sentences.size());
  std::vector<std::string> tokens;
  for (const Sentence& s : sentences) {
    tokens.clear();
    for (int w : s) tokens.push_back(inv.terminals[w]);
    Chart ins_base = inside(s, pair.base);
    Chart ins_flip = inside(s, pair.flipped);
    double zb = sentence_logscore(ins_base, pair.base);
    double zf = sentence_logscore(ins_flip, pair.flipped);
    if (zb == kNegInf && zf == kNegInf) {
      ++report.zero_measure;
      continue;
    }
    double diff = std::fabs(zb - zf);  // inf if only one side is zero
    if (diff > report.max_abs_logp_diff) report.max_abs_logp_diff = diff;
    if (zb != kNegInf && zf != kNegInf && !report.parses_differ) {
      RawTree tb = viterbi(tokens, s, pair.base).tree;
      RawTree tf = viterbi(tokens, s, pair.flipped).tree;
      if (tree_to_spans(tb, false, false) != tree_to_spans(tf, false, false))
        report.parses_differ = true;
    }
    // alpha on the base grammar's inside values.
    int n = static_cast<int>(s.size());
    for (int p = 0; p + 3 <= n; ++p) {
      for (int q = p + 3; q <= n; ++q) {
        double lex_first = pair.base.lexical_logp(T, s[p]);
        double lex_last = pair.base.lexical_logp(T, s[q - 1]);
        double up = ins_base.at(p + 1, q, pair.j);
        double dn = ins_base.at(p, q - 1, pair.j);
        if (lex_first == kNegInf || lex_last == kNegInf || up == kNegInf ||
            dn == kNegInf)
          continue;
        double log_alpha = lex_first + up - dn - lex_last;
        double err = std::fabs(std::expm1(log_alpha));
        if (err > report.max_alpha_err) report.max_alpha_err = err;
        ++report.alpha_spans;
      }
    }
  }
  return report;
}

}  // namespace fpcfg

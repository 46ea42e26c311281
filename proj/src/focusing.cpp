#include "fpcfg/focusing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fpcfg/util.hpp"

namespace fpcfg {

void FocusingBias::merge(const FocusingBias& other) {
  if (sentences.empty()) {
    sentences = other.sentences;
  } else {
    if (sentences.size() != other.sentences.size())
      throw DataError("bias merge: sentence count mismatch");
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      SentenceBias& a = sentences[i];
      const SentenceBias& b = other.sentences[i];
      if (a.n == 0) a.n = b.n;
      if (b.n != 0 && a.n != b.n)
        throw DataError("bias merge: length mismatch at line " +
                        std::to_string(i + 1));
      for (const auto& [span, c] : b.counts) a.counts[span] += c;
    }
  }
  source_names.insert(source_names.end(), other.source_names.begin(),
                      other.source_names.end());
  source_hashes.insert(source_hashes.end(), other.source_hashes.begin(),
                       other.source_hashes.end());
}

FocusingBias count_spans(const std::vector<std::optional<RawTree>>& trees,
                         const Corpus& corpus,
                         const std::string& source_name) {
  if (trees.size() != corpus.size())
    throw DataError(source_name + ": " + std::to_string(trees.size()) +
                    " trees for " + std::to_string(corpus.size()) +
                    " corpus sentences");
  FocusingBias bias;
  bias.source_names.push_back(source_name);
  bias.sentences.resize(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    FocusingBias::SentenceBias& sb = bias.sentences[i];
    const CorpusRecord& rec = corpus[i];
    if (rec.skipped) {
      if (trees[i])
        throw DataError(source_name + ": line " + std::to_string(i + 1) +
                        " has a tree for a skipped sentence");
      continue;
    }
    sb.n = static_cast<int>(rec.tokens.size());
    if (!trees[i]) continue;
    int leaves = leaf_count(*trees[i]);
    if (leaves != sb.n)
      throw DataError(source_name + ": line " + std::to_string(i + 1) + ": " +
                      std::to_string(leaves) + " leaves vs " +
                      std::to_string(sb.n) + " corpus tokens");
    for (const Span& sp : tree_to_spans(*trees[i], false, true))
      sb.counts[sp] += 1;
  }
  return bias;
}

SpanWeights soft_weights(const FocusingBias::SentenceBias& sb) {
  int n = sb.n;
  SpanWeights w = SpanWeights::soft_mode(n);
  if (n < 2) return w;
  double best = kNegInf;
  for (int p = 0; p + 2 <= n; ++p) {
    for (int q = p + 2; q <= n; ++q) {
      auto it = sb.counts.find({p, q});
      double f = it == sb.counts.end() ? 0.0 : it->second;
      if (f > best) best = f;
    }
  }
  double total = 0.0;
  for (int p = 0; p + 2 <= n; ++p) {
    for (int q = p + 2; q <= n; ++q) {
      auto it = sb.counts.find({p, q});
      double f = it == sb.counts.end() ? 0.0 : it->second;
      total += std::exp(f - best);
    }
  }
  double logz = best + std::log(total);
  for (int p = 0; p + 2 <= n; ++p) {
    for (int q = p + 2; q <= n; ++q) {
      auto it = sb.counts.find({p, q});
      double f = it == sb.counts.end() ? 0.0 : it->second;
      w.slot(p, q) = f - logz;
    }
  }
  return w;
}

std::vector<SpanWeights> corpus_weights(const Corpus& corpus,
                                        const FocusingBias* bias) {
  std::vector<SpanWeights> out;
  out.reserve(corpus.size());
  if (!bias) {
    for (const CorpusRecord& rec : corpus)
      out.push_back(
          SpanWeights::off_mode(static_cast<int>(rec.tokens.size())));
    return out;
  }
  if (bias->sentences.size() != corpus.size())
    throw DataError("bias has " + std::to_string(bias->sentences.size()) +
                    " records for " + std::to_string(corpus.size()) +
                    " corpus sentences");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CorpusRecord& rec = corpus[i];
    if (rec.skipped) {
      out.push_back(SpanWeights::off_mode(0));
      continue;
    }
    int n = static_cast<int>(rec.tokens.size());
    if (bias->sentences[i].n != 0 && bias->sentences[i].n != n)
      throw DataError("bias line " + std::to_string(i + 1) + ": length " +
                      std::to_string(bias->sentences[i].n) + " vs corpus " +
                      std::to_string(n));
    FocusingBias::SentenceBias sb = bias->sentences[i];
    sb.n = n;  // empty bias records still get the uniform softmax
    out.push_back(soft_weights(sb));
  }
  return out;
}

std::vector<std::optional<RawTree>> synthetic_trees(const Corpus& corpus,
                                                    BiasKind kind,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::optional<RawTree>> out;
  out.reserve(corpus.size());
  for (const CorpusRecord& rec : corpus) {
    if (rec.skipped) {
      out.push_back(std::nullopt);
      continue;
    }
    switch (kind) {
      case BiasKind::left:
        out.push_back(left_branching_tree(rec.tokens));
        break;
      case BiasKind::right:
        out.push_back(right_branching_tree(rec.tokens));
        break;
      case BiasKind::random:
        out.push_back(random_binary_tree(rec.tokens, rng));
        break;
    }
  }
  return out;
}

FocusingBias synthetic_bias(const Corpus& corpus, BiasKind kind,
                            std::uint64_t seed) {
  const char* name = kind == BiasKind::left    ? "synthetic:left"
                     : kind == BiasKind::right ? "synthetic:right"
                                               : "synthetic:random";
  std::string tag =
      kind == BiasKind::random ? std::string(name) + ":" + std::to_string(seed)
                               : std::string(name);
  return count_spans(synthetic_trees(corpus, kind, seed), corpus, tag);
}

double iou(const std::vector<SpanSet>& a, const std::vector<SpanSet>& b) {
  if (a.size() != b.size())
    throw DataError("iou: corpus length mismatch (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
  long long inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (const Span& sp : a[i]) {
      if (b[i].count(sp))
        ++inter;
      ++uni;
    }
    for (const Span& sp : b[i])
      if (!a[i].count(sp)) ++uni;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<SpanSet> tree_spans_for_iou(
    const std::vector<std::optional<RawTree>>& trees) {
  std::vector<SpanSet> out;
  out.reserve(trees.size());
  for (const auto& t : trees)
    out.push_back(t ? tree_to_spans(*t, false, true) : SpanSet{});
  return out;
}

CommonSpanReport common_span_gold_frequency(
    const std::vector<std::vector<SpanSet>>& parser_spans,
    const std::vector<SpanSet>& gold_spans) {
  int k = static_cast<int>(parser_spans.size());
  if (k == 0) throw UsageError("no parsers given");
  if (k > 16) throw UsageError("too many parsers for subset enumeration");
  for (const auto& ps : parser_spans) {
    if (ps.size() != gold_spans.size())
      throw DataError("parser/gold corpus length mismatch");
  }
  CommonSpanReport report;
  for (const SpanSet& g : gold_spans)
    report.gold_total += static_cast<long long>(g.size());
  std::vector<long long> sum_by_size(k + 1, 0);
  std::vector<int> n_by_size(k + 1, 0);
  // Subsets in size-major order, lexicographic within a size.
  std::vector<std::vector<int>> subsets;
  for (int size = 1; size <= k; ++size) {
    std::vector<int> pick(size);
    // First subset 0..size-1; advance odometer.
    for (int i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      subsets.push_back(pick);
      int i = size - 1;
      while (i >= 0 && pick[i] == k - size + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  for (const std::vector<int>& pick : subsets) {
    long long common = 0;
    for (std::size_t s = 0; s < gold_spans.size(); ++s) {
      for (const Span& sp : parser_spans[pick[0]][s]) {
        bool in_all = true;
        for (std::size_t j = 1; j < pick.size() && in_all; ++j)
          in_all = parser_spans[pick[j]][s].count(sp) > 0;
        if (in_all && gold_spans[s].count(sp)) ++common;
      }
    }
    CommonSpanReport::Row row;
    row.parsers = pick;
    row.common_in_gold = common;
    report.rows.push_back(std::move(row));
    sum_by_size[pick.size()] += common;
    n_by_size[pick.size()] += 1;
  }
  report.mean_by_size.assign(k + 1, 0.0);
  for (int size = 1; size <= k; ++size)
    report.mean_by_size[size] =
        static_cast<double>(sum_by_size[size]) / n_by_size[size];
  return report;
}

void save_bias(const std::string& path, const FocusingBias& bias,
               const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  for (std::size_t i = 0; i < bias.source_names.size(); ++i) {
    out << "# source " << bias.source_names[i];
    if (i < bias.source_hashes.size() && !bias.source_hashes[i].empty())
      out << " " << bias.source_hashes[i];
    out << "\n";
  }
  for (const FocusingBias::SentenceBias& sb : bias.sentences) {
    out << sb.n << " " << sb.counts.size();
    for (const auto& [span, c] : sb.counts)
      out << " " << span.first << "," << span.second << ":" << c;
    out << "\n";
  }
}

FocusingBias load_bias(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  FocusingBias bias;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string word;
      if (meta >> word && word == "source") {
        std::string name, hash;
        if (meta >> name) {
          bias.source_names.push_back(name);
          if (meta >> hash) bias.source_hashes.push_back(hash);
        }
      }
      continue;
    }
    std::istringstream ss(line);
    FocusingBias::SentenceBias sb;
    int k = 0;
    if (!(ss >> sb.n >> k) || sb.n < 0 || k < 0)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": malformed bias record");
    for (int i = 0; i < k; ++i) {
      std::string triple;
      if (!(ss >> triple))
        throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(k) + " span entries");
      int p, q, c;
      char comma, colon;
      std::istringstream ts(triple);
      if (!(ts >> p >> comma >> q >> colon >> c) || comma != ',' ||
          colon != ':' || p < 0 || q > sb.n || q - p < 2 || c < 0)
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": bad span entry '" + triple + "'");
      sb.counts[{p, q}] += c;
    }
    std::string extra;
    if (ss >> extra)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": trailing content '" + extra + "'");
    bias.sentences.push_back(std::move(sb));
  }
  return bias;
}

}  // namespace fpcfg

#include "fpcfg/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "fpcfg/util.hpp"

namespace fpcfg {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t") == std::string::npos;
}

std::string lower(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::vector<std::optional<RawTree>> load_tree_lines(const std::string& path) {
  std::vector<std::optional<RawTree>> out;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    if (is_blank(line)) {
      out.push_back(std::nullopt);
      continue;
    }
    if (line[0] == '#') continue;  // provenance headers from our own tools
    try {
      out.push_back(parse_bracketed(line));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::vector<std::string>> load_token_lines(
    const std::string& path) {
  std::vector<std::vector<std::string>> out;
  for (const std::string& line : read_lines(path)) {
    std::istringstream ss(line);
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) toks.push_back(std::move(t));
    out.push_back(std::move(toks));
  }
  return out;
}

namespace {

// Removes punctuation preterminals; drops internal nodes left childless.
std::optional<RawTree> strip_punct(const RawTree& t,
                                   const PreprocessOptions& opt) {
  if (t.is_leaf()) {
    RawTree leaf = t;
    if (opt.lowercase) leaf.label = lower(leaf.label);
    return leaf;
  }
  if (t.is_preterminal() && opt.punct_labels.count(t.label)) return std::nullopt;
  RawTree node;
  node.label = t.label;
  for (const RawTree& c : t.children) {
    if (auto kept = strip_punct(c, opt)) node.children.push_back(*std::move(kept));
  }
  if (node.children.empty()) return std::nullopt;
  return node;
}

Sentence to_ids(const std::vector<std::string>& tokens,
                const SymbolInventory& inv) {
  Sentence s;
  s.reserve(tokens.size());
  for (const std::string& t : tokens) {
    int id = inv.terminal_id(t);
    s.push_back(id >= 0 ? id : inv.unk_id());
  }
  return s;
}

}  // namespace

CorpusRecord preprocess(const RawTree& tree, const SymbolInventory& inv,
                        const PreprocessOptions& opt) {
  CorpusRecord rec;
  std::optional<RawTree> filtered = strip_punct(tree, opt);
  if (!filtered) {
    rec.skipped = true;
    return rec;
  }
  rec.gold_tree = std::move(filtered);
  rec.tokens = leaf_tokens(*rec.gold_tree);
  rec.sentence = to_ids(rec.tokens, inv);
  return rec;
}

CorpusRecord preprocess_tokens(const std::vector<std::string>& tokens,
                               const SymbolInventory& inv,
                               const PreprocessOptions& opt) {
  CorpusRecord rec;
  for (const std::string& t : tokens)
    rec.tokens.push_back(opt.lowercase ? lower(t) : t);
  if (rec.tokens.empty()) {
    rec.skipped = true;
    return rec;
  }
  rec.sentence = to_ids(rec.tokens, inv);
  return rec;
}

std::vector<std::vector<std::string>> corpus_token_lines(
    const std::string& path, bool bracketed, const PreprocessOptions& opt) {
  std::vector<std::vector<std::string>> out;
  if (bracketed) {
    for (const auto& t : load_tree_lines(path)) {
      if (!t) {
        out.emplace_back();
        continue;
      }
      if (auto filtered = strip_punct(*t, opt))
        out.push_back(leaf_tokens(*filtered));
      else
        out.emplace_back();
    }
  } else {
    out = load_token_lines(path);
    if (opt.lowercase) {
      for (auto& row : out)
        for (std::string& t : row) t = lower(t);
    }
  }
  return out;
}

Corpus load_corpus(const std::string& path, bool bracketed,
                   const SymbolInventory& inv, const PreprocessOptions& opt) {
  Corpus corpus;
  if (bracketed) {
    std::size_t lineno = 0;
    for (const auto& t : load_tree_lines(path)) {
      ++lineno;
      CorpusRecord rec;
      if (t)
        rec = preprocess(*t, inv, opt);
      else
        rec.skipped = true;
      rec.id = std::to_string(lineno);
      corpus.push_back(std::move(rec));
    }
  } else {
    std::size_t lineno = 0;
    for (const auto& toks : load_token_lines(path)) {
      ++lineno;
      CorpusRecord rec = preprocess_tokens(toks, inv, opt);
      rec.id = std::to_string(lineno);
      corpus.push_back(std::move(rec));
    }
  }
  return corpus;
}

Corpus load_corpus_surface(const std::string& path, bool bracketed,
                           const PreprocessOptions& opt) {
  Corpus corpus;
  std::size_t lineno = 0;
  if (bracketed) {
    for (const auto& t : load_tree_lines(path)) {
      ++lineno;
      CorpusRecord rec;
      if (t) {
        if (auto filtered = strip_punct(*t, opt)) {
          rec.gold_tree = std::move(filtered);
          rec.tokens = leaf_tokens(*rec.gold_tree);
        } else {
          rec.skipped = true;
        }
      } else {
        rec.skipped = true;
      }
      rec.id = std::to_string(lineno);
      corpus.push_back(std::move(rec));
    }
  } else {
    for (const auto& toks : load_token_lines(path)) {
      ++lineno;
      CorpusRecord rec;
      for (const std::string& t : toks)
        rec.tokens.push_back(opt.lowercase ? lower(t) : t);
      rec.skipped = rec.tokens.empty();
      rec.id = std::to_string(lineno);
      corpus.push_back(std::move(rec));
    }
  }
  return corpus;
}

std::vector<std::optional<RawTree>> preprocess_trees(
    const std::vector<std::optional<RawTree>>& trees,
    const PreprocessOptions& opt) {
  std::vector<std::optional<RawTree>> out;
  out.reserve(trees.size());
  for (const auto& t : trees)
    out.push_back(t ? strip_punct(*t, opt) : std::nullopt);
  return out;
}

std::vector<std::string> build_vocab(
    const std::vector<std::vector<std::string>>& lines, int max_size,
    const std::string& unk_token) {
  if (max_size < 1) throw UsageError("vocabulary size must be >= 1");
  std::map<std::string, long long> counts;
  for (const auto& row : lines)
    for (const std::string& t : row) ++counts[t];
  if (counts.empty()) throw DataError("corpus has no tokens");
  std::vector<std::pair<std::string, long long>> by_freq(counts.begin(),
                                                         counts.end());
  std::stable_sort(by_freq.begin(), by_freq.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  std::vector<std::string> terms;
  terms.push_back(unk_token);
  for (std::size_t i = 0;
       i < by_freq.size() && i < static_cast<std::size_t>(max_size); ++i)
    terms.push_back(by_freq[i].first);
  return terms;
}

void save_vocab(const std::string& path, const std::vector<std::string>& terms,
                const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  for (const std::string& t : terms) out << t << "\n";
}

std::vector<std::string> load_vocab(const std::string& path) {
  std::vector<std::string> terms;
  for (const std::string& line : read_lines(path)) {
    if (is_blank(line) || line[0] == '#') continue;
    terms.push_back(line);
  }
  if (terms.empty()) throw DataError("empty vocabulary file " + path);
  return terms;
}

namespace {

// Expands `sym` under the grammar, appending leaves; returns false once the
// leaf budget is exceeded. A binary tree deeper than its leaf budget must
// blow the budget, so depth doubles as the recursion guard.
bool expand(const Grammar& g, std::mt19937_64& rng, int sym, int max_len,
            int depth, int& leaves, RawTree& out) {
  if (depth > max_len + 1) return false;
  const SymbolInventory& inv = g.inventory();
  out.label = inv.symbol_name(sym);
  if (inv.is_preterminal(sym)) {
    if (++leaves > max_len) return false;
    double u = uniform01(rng);
    double acc = 0.0;
    int w = inv.vocab_size() - 1;
    for (int k = 0; k < inv.vocab_size(); ++k) {
      acc += std::exp(g.lexical_logp(sym, k));
      if (u < acc) {
        w = k;
        break;
      }
    }
    RawTree leaf;
    leaf.label = inv.terminals[w];
    out.children.push_back(std::move(leaf));
    return true;
  }
  double u = uniform01(rng);
  double acc = 0.0;
  int m = inv.num_symbols();
  int bb = m - 1, cc = m - 1;
  for (int b = 0; b < m && acc <= u; ++b) {
    for (int c = 0; c < m; ++c) {
      acc += std::exp(g.binary_logp(sym, b, c));
      if (u < acc) {
        bb = b;
        cc = c;
        break;
      }
    }
  }
  out.children.emplace_back();
  if (!expand(g, rng, bb, max_len, depth + 1, leaves, out.children.back()))
    return false;
  out.children.emplace_back();
  return expand(g, rng, cc, max_len, depth + 1, leaves, out.children.back());
}

}  // namespace

std::optional<RawTree> sample_derivation(const Grammar& g,
                                         std::mt19937_64& rng, int max_len) {
  const SymbolInventory& inv = g.inventory();
  double u = uniform01(rng);
  double acc = 0.0;
  int root = inv.num_nonterminals - 1;
  for (int a = 0; a < inv.num_nonterminals; ++a) {
    acc += std::exp(g.root_logp(a));
    if (u < acc) {
      root = a;
      break;
    }
  }
  RawTree t;
  int leaves = 0;
  if (!expand(g, rng, root, max_len, 0, leaves, t)) return std::nullopt;
  return t;
}

}  // namespace fpcfg

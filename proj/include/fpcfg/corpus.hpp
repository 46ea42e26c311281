#pragma once

#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fpcfg/grammar.hpp"
#include "fpcfg/tree.hpp"

namespace fpcfg {

struct PreprocessOptions {
  // Preterminal labels treated as punctuation and removed. Defaults to the
  // PTB punctuation POS tags.
  std::set<std::string> punct_labels = {"#",     "$",     "''",
                                        ",",     "-LRB-", "-RRB-",
                                        ".",     ":",     "``"};
  bool lowercase = false;
};

// One corpus sentence after preprocessing. `tokens` are the surface forms
// kept after punctuation removal (lowercased if configured); `sentence` is
// the same sequence as vocabulary ids with unknowns mapped to the unk token.
// `gold_tree`, when present, has had its punctuation leaves removed, so its
// leaves equal `tokens` and its spans index the filtered sequence.
struct CorpusRecord {
  std::string id;
  std::vector<std::string> tokens;
  Sentence sentence;
  std::optional<RawTree> gold_tree;
  bool skipped = false;  // empty after filtering; excluded downstream
};

using Corpus = std::vector<CorpusRecord>;

// --- file loading ------------------------------------------------------

// One bracketed tree per line; blank lines load as nullopt (a parser that
// skipped the sentence). Parse errors name the line.
std::vector<std::optional<RawTree>> load_tree_lines(const std::string& path);

// Whitespace-tokenized sentences, one per line; blank lines give empty rows.
std::vector<std::vector<std::string>> load_token_lines(const std::string& path);

// --- preprocessing -----------------------------------------------------

CorpusRecord preprocess(const RawTree& tree, const SymbolInventory& inv,
                        const PreprocessOptions& opt);
CorpusRecord preprocess_tokens(const std::vector<std::string>& tokens,
                               const SymbolInventory& inv,
                               const PreprocessOptions& opt);

// Token rows after punctuation filtering and lowercasing but before unk-ing;
// the input to vocabulary building. `bracketed` picks the tree reader.
std::vector<std::vector<std::string>> corpus_token_lines(
    const std::string& path, bool bracketed, const PreprocessOptions& opt);

// Loads and preprocesses a whole corpus file; record ids are 1-based line
// numbers.
Corpus load_corpus(const std::string& path, bool bracketed,
                   const SymbolInventory& inv, const PreprocessOptions& opt);

// Like load_corpus but without a vocabulary: records carry tokens (and gold
// trees) only, `sentence` stays empty. Enough for bias building and span
// work.
Corpus load_corpus_surface(const std::string& path, bool bracketed,
                           const PreprocessOptions& opt);

// Applies the punctuation/lowercase filter to already-parsed trees (parser
// outputs share the corpus's preprocessing); trees that vanish entirely
// become nullopt.
std::vector<std::optional<RawTree>> preprocess_trees(
    const std::vector<std::optional<RawTree>>& trees,
    const PreprocessOptions& opt);

// --- vocabulary --------------------------------------------------------

// Terminal list for SymbolInventory: unk first, then the most frequent
// max_size tokens, count-descending with lexicographic tie-break. Throws on
// a corpus with no tokens.
std::vector<std::string> build_vocab(
    const std::vector<std::vector<std::string>>& lines, int max_size,
    const std::string& unk_token = "<unk>");

// Vocabulary file: one token per line in terminal-list order (unk first).
void save_vocab(const std::string& path, const std::vector<std::string>& terms,
                const std::string& header_comment);
std::vector<std::string> load_vocab(const std::string& path);

// --- sampling ----------------------------------------------------------

// Samples one derivation from the grammar: labels NT-k/T-k, leaves are
// terminal strings. Returns nullopt if the derivation exceeds max_len leaves
// (callers retry with fresh randomness).
std::optional<RawTree> sample_derivation(const Grammar& g,
                                         std::mt19937_64& rng, int max_len);

}  // namespace fpcfg

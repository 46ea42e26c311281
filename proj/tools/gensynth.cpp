// Generates the bundled synthetic treebank: a 2-nonterminal grammar whose
// sentences are runs of short noun-phrase-like chunks hung off a spine that
// branches left or right per expansion. The mix keeps either pure chain
// from matching the gold bracketing well, which is what the bias
// experiments need.

#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"

#include "fpcfg/corpus.hpp"
#include "fpcfg/grammar.hpp"
#include "fpcfg/tree.hpp"
#include "fpcfg/util.hpp"

namespace {

fpcfg::Grammar generator_grammar() {
  using namespace fpcfg;
  SymbolInventory inv;
  inv.num_nonterminals = 2;  // 0 spine, 1 chunk
  inv.num_preterminals = 3;  // 2 det, 3 noun, 4 adj
  inv.terminals = {"<unk>", "the", "a",   "cat", "dog",
                   "fox",   "big", "red", "old"};
  RuleCounts counts(inv);
  counts.root[0] = 1.0;
  counts.bin(0, 1, 0) = 0.30;  // chunk then more spine
  counts.bin(0, 0, 1) = 0.30;  // spine then trailing chunk
  counts.bin(0, 1, 1) = 0.40;  // exactly two chunks
  counts.bin(1, 2, 3) = 0.65;  // det noun
  counts.bin(1, 1, 4) = 0.35;  // chunk + adj
  auto lex = [&](int b, const char* w, double p) {
    counts.lex(b, inv.terminal_id(w)) = p;
  };
  lex(2, "the", 0.5);
  lex(2, "a", 0.5);
  lex(3, "cat", 0.4);
  lex(3, "dog", 0.35);
  lex(3, "fox", 0.25);
  lex(4, "big", 0.5);
  lex(4, "red", 0.3);
  lex(4, "old", 0.2);
  return normalize(inv, counts);
}

void write_corpus(const std::string& path, const fpcfg::Grammar& g,
                  std::mt19937_64& rng, int count, int min_len, int max_len) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(3);
  }
  int written = 0;
  while (written < count) {
    auto tree = fpcfg::sample_derivation(g, rng, max_len);
    if (!tree || fpcfg::leaf_count(*tree) < min_len) continue;
    out << fpcfg::serialize_bracketed(*tree) << "\n";
    ++written;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic treebank generator"};
  std::string out_dir = ".";
  int train = 500, val = 100;
  int min_len = 4, max_len = 12;
  std::uint64_t seed = 1;
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_option("--train", train, "Training sentences");
  app.add_option("--val", val, "Validation sentences");
  app.add_option("--min-len", min_len, "Shortest sentence kept");
  app.add_option("--max-len", max_len, "Longest sentence kept");
  app.add_option("--seed", seed, "Sampler seed");
  CLI11_PARSE(app, argc, argv);

  fpcfg::Grammar g = generator_grammar();
  std::mt19937_64 rng(seed);
  write_corpus(out_dir + "/synth-train.trees", g, rng, train, min_len, max_len);
  write_corpus(out_dir + "/synth-val.trees", g, rng, val, min_len, max_len);
  std::cout << "wrote " << train << " train and " << val
            << " val sentences to " << out_dir << "\n";
  return 0;
}

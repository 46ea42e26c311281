#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fpcfg/corpus.hpp"
#include "fpcfg/tree.hpp"
#include "fpcfg/util.hpp"

using namespace fpcfg;

namespace {

// Constituency analysis of a short market commentary, punctuation included.
const char* kSample1 =
    "(ROOT (S (NP-SBJ (PRP It)) (VP (VBZ 's) (NP-PRD (NP (NN nothing) (JJ "
    "dramatic)) (NP (RB just) (DT a) (JJ routine) (NN sell-off)))) (. .)))";

SymbolInventory inv_with(const std::vector<std::string>& words) {
  SymbolInventory inv;
  inv.num_nonterminals = 1;
  inv.num_preterminals = 1;
  inv.terminals.push_back(inv.unk_token);
  for (const auto& w : words) inv.terminals.push_back(w);
  return inv;
}

std::string write_temp(const std::string& name, const std::string& body) {
  std::string path = "/tmp/fpcfg-corpus-" + name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("parse_bracketed basics") {
  RawTree t = parse_bracketed("(S (NP (PRP It)) (VP (VBZ is)))");
  CHECK(t.label == "S");
  CHECK(leaf_count(t) == 2);
  CHECK(leaf_tokens(t) == std::vector<std::string>{"It", "is"});

  RawTree single = parse_bracketed("(X a)");
  CHECK(single.label == "X");
  CHECK(leaf_count(single) == 1);
  CHECK(single.children.size() == 1);
  CHECK(single.children[0].is_leaf());
}

TEST_CASE("sample market-commentary tree has nine leaves under ROOT") {
  RawTree t = parse_bracketed(kSample1);
  CHECK(t.label == "ROOT");
  CHECK(leaf_count(t) == 9);
  auto toks = leaf_tokens(t);
  REQUIRE(toks.size() == 9);
  CHECK(toks.front() == "It");
  CHECK(toks.back() == ".");
}

TEST_CASE("parse_bracketed rejects malformed input with byte offsets") {
  CHECK_THROWS_AS(parse_bracketed(""), DataError);
  CHECK_THROWS_AS(parse_bracketed("(S (NP it)"), DataError);   // unbalanced
  CHECK_THROWS_AS(parse_bracketed("(S (NP it)))"), DataError); // trailing
  CHECK_THROWS_AS(parse_bracketed("()"), DataError);           // childless
  CHECK_THROWS_WITH_AS(parse_bracketed("(S it) x"),
                       doctest::Contains("byte 7"), DataError);
}

TEST_CASE("serialize then parse is identity") {
  for (const char* text :
       {"(S (NP (PRP It)) (VP (VBZ is)))", kSample1, "(X a)",
        "(A (B b) (C (D d) (E e)) (F f))"}) {
    RawTree t = parse_bracketed(text);
    CHECK(parse_bracketed(serialize_bracketed(t)) == t);
  }
}

TEST_CASE("parenthesis tokens survive a round trip escaped") {
  RawTree t;
  t.label = "S";
  RawTree leafnode;
  leafnode.label = "(";
  t.children.push_back(leafnode);
  std::string text = serialize_bracketed(t);
  CHECK(text.find("-LRB-") != std::string::npos);
  RawTree back = parse_bracketed(text);
  CHECK(back.children[0].label == "-LRB-");
}

TEST_CASE("tree_to_spans on three-word branchings") {
  std::vector<std::string> words = {"a", "b", "c"};
  SpanSet left = tree_to_spans(left_branching_tree(words), false, true);
  CHECK(left == SpanSet{{0, 2}, {0, 3}});
  SpanSet right = tree_to_spans(right_branching_tree(words), false, true);
  CHECK(right == SpanSet{{1, 3}, {0, 3}});
  SpanSet no_whole = tree_to_spans(left_branching_tree(words), false, false);
  CHECK(no_whole == SpanSet{{0, 2}});
  // Bare-token leaves are not internal nodes, so a synthetic branching tree
  // has no width-1 spans even when they are requested...
  SpanSet with_width1 = tree_to_spans(right_branching_tree(words), true, true);
  CHECK(with_width1 == SpanSet{{1, 3}, {0, 3}});
  // ...while treebank preterminals are.
  RawTree tagged = parse_bracketed("(S (A a) (X (B b) (C c)))");
  CHECK(tree_to_spans(tagged, true, true) ==
        SpanSet{{0, 1}, {1, 2}, {2, 3}, {1, 3}, {0, 3}});
}

TEST_CASE("unary chains collapse to one span") {
  RawTree plain = parse_bracketed("(S (A (x x) (y y)) (B (z z)))");
  RawTree chained = parse_bracketed("(S (U (A (x x) (y y))) (B (V (z z))))");
  CHECK(tree_to_spans(plain, true, true) == tree_to_spans(chained, true, true));
}

TEST_CASE("market-commentary gold spans after punctuation removal") {
  RawTree t = parse_bracketed(kSample1);
  SymbolInventory inv = inv_with(leaf_tokens(t));
  CorpusRecord rec = preprocess(t, inv, PreprocessOptions{});
  REQUIRE(!rec.skipped);
  CHECK(rec.tokens == std::vector<std::string>{"It", "'s", "nothing",
                                               "dramatic", "just", "a",
                                               "routine", "sell-off"});
  REQUIRE(rec.gold_tree.has_value());
  CHECK(leaf_tokens(*rec.gold_tree) == rec.tokens);
  SpanSet spans = tree_to_spans(*rec.gold_tree, false, true);
  CHECK(spans == SpanSet{{0, 8}, {1, 8}, {2, 8}, {2, 4}, {4, 8}});
}

TEST_CASE("preprocess re-indexes spans around removed punctuation") {
  // 12 leaves, two of them punctuation.
  RawTree t = parse_bracketed(
      "(S (NP (DT the) (JJ big) (NN cat)) (, ,) (VP (VBD sat) (PP (IN on) "
      "(NP (DT the) (JJ old) (NN mat))) (ADVP (RB quite) (RB happily))) "
      "(. .))");
  REQUIRE(leaf_count(t) == 12);
  SymbolInventory inv = inv_with(leaf_tokens(t));
  CorpusRecord rec = preprocess(t, inv, PreprocessOptions{});
  REQUIRE(rec.tokens.size() == 10);
  SpanSet spans = tree_to_spans(*rec.gold_tree, false, true);
  CHECK(spans ==
        SpanSet{{0, 10}, {0, 3}, {3, 10}, {4, 8}, {5, 8}, {8, 10}});
}

TEST_CASE("punctuation-only sentences are flagged skipped") {
  RawTree t = parse_bracketed("(S (. .) (, ,))");
  SymbolInventory inv = inv_with({"x"});
  CorpusRecord rec = preprocess(t, inv, PreprocessOptions{});
  CHECK(rec.skipped);
  CHECK(rec.tokens.empty());
}

TEST_CASE("out-of-vocabulary tokens map to unk") {
  SymbolInventory inv = inv_with({"known"});
  CorpusRecord rec = preprocess_tokens({"known", "unknown-word"}, inv,
                                       PreprocessOptions{});
  REQUIRE(rec.sentence.size() == 2);
  CHECK(rec.sentence[0] == inv.terminal_id("known"));
  CHECK(rec.sentence[1] == inv.unk_id());
}

TEST_CASE("lowercasing is applied when configured") {
  SymbolInventory inv = inv_with({"it"});
  PreprocessOptions opt;
  opt.lowercase = true;
  CorpusRecord rec = preprocess_tokens({"It"}, inv, opt);
  CHECK(rec.tokens == std::vector<std::string>{"it"});
  CHECK(rec.sentence[0] == inv.terminal_id("it"));
}

TEST_CASE("build_vocab frequency order and ties") {
  std::vector<std::vector<std::string>> lines = {
      {"a", "b", "a"}, {"c", "b"}, {"a"}};
  // {a:3, b:2, c:1}, two slots
  CHECK(build_vocab(lines, 2) ==
        std::vector<std::string>{"<unk>", "a", "b"});
  // plenty of room: everything kept
  CHECK(build_vocab(lines, 10) ==
        std::vector<std::string>{"<unk>", "a", "b", "c"});
  // tie at count 1 with one slot: lexicographically smaller wins
  std::vector<std::vector<std::string>> tied = {{"d"}, {"c"}};
  CHECK(build_vocab(tied, 1) == std::vector<std::string>{"<unk>", "c"});
  CHECK_THROWS_AS(build_vocab({}, 3), DataError);
  CHECK_THROWS_AS(build_vocab(lines, 0), UsageError);
}

TEST_CASE("vocab file round trip") {
  auto terms = std::vector<std::string>{"<unk>", "b", "a"};
  std::string path = write_temp("vocab.txt", "");
  save_vocab(path, terms, "note");
  CHECK(load_vocab(path) == terms);
  std::remove(path.c_str());
}

TEST_CASE("load_tree_lines keeps blanks as missing parses") {
  std::string path = write_temp(
      "trees.txt", "(S (A a) (B b))\n\n(X x)\n");
  auto trees = load_tree_lines(path);
  REQUIRE(trees.size() == 3);
  CHECK(trees[0].has_value());
  CHECK(!trees[1].has_value());
  CHECK(trees[2].has_value());
  std::remove(path.c_str());

  std::string bad = write_temp("bad.txt", "(S (A a)\n");
  CHECK_THROWS_WITH_AS(load_tree_lines(bad), doctest::Contains(":1"),
                       DataError);
  std::remove(bad.c_str());
}

TEST_CASE("load_corpus aligns records with line numbers") {
  std::string path = write_temp(
      "corpus.trees",
      "(S (NP (DT the) (NN cat)) (VP (VBD sat)))\n"
      "(S (. .))\n"
      "(S (X the) (Y cat))\n");
  SymbolInventory inv = inv_with({"the", "cat", "sat"});
  Corpus corpus = load_corpus(path, true, inv, PreprocessOptions{});
  REQUIRE(corpus.size() == 3);
  CHECK(corpus[0].id == "1");
  CHECK(!corpus[0].skipped);
  CHECK(corpus[0].sentence.size() == 3);
  CHECK(corpus[1].skipped);
  CHECK(corpus[2].tokens == std::vector<std::string>{"the", "cat"});
  std::remove(path.c_str());
}

TEST_CASE("raw token corpora load without trees") {
  std::string path = write_temp("corpus.tokens", "the cat sat\n\nthe cat\n");
  SymbolInventory inv = inv_with({"the", "cat", "sat"});
  Corpus corpus = load_corpus(path, false, inv, PreprocessOptions{});
  REQUIRE(corpus.size() == 3);
  CHECK(!corpus[0].gold_tree.has_value());
  CHECK(corpus[0].sentence.size() == 3);
  CHECK(corpus[1].skipped);
  CHECK(corpus[2].sentence.size() == 2);
  std::remove(path.c_str());
}

TEST_CASE("surface loading skips vocabulary work") {
  std::string path = write_temp("surf.trees", "(S (A a) (. .) (B b))\n");
  Corpus corpus = load_corpus_surface(path, true, PreprocessOptions{});
  REQUIRE(corpus.size() == 1);
  CHECK(corpus[0].tokens == std::vector<std::string>{"a", "b"});
  CHECK(corpus[0].sentence.empty());
  std::remove(path.c_str());
}

TEST_CASE("preprocess_trees mirrors corpus preprocessing") {
  auto trees = std::vector<std::optional<RawTree>>{
      parse_bracketed("(S (A a) (. .) (B b))"), std::nullopt,
      parse_bracketed("(S (. .))")};
  auto out = preprocess_trees(trees, PreprocessOptions{});
  REQUIRE(out.size() == 3);
  REQUIRE(out[0].has_value());
  CHECK(leaf_tokens(*out[0]) == std::vector<std::string>{"a", "b"});
  CHECK(!out[1].has_value());
  CHECK(!out[2].has_value());  // vanished entirely
}

TEST_CASE("sample_derivation respects the length cap") {
  SymbolInventory inv;
  inv.num_nonterminals = 2;
  inv.num_preterminals = 2;
  inv.terminals = {"<unk>", "x", "y"};
  Grammar g = random_init(inv, 4, 1.0);
  std::mt19937_64 rng(99);
  int produced = 0;
  for (int i = 0; i < 200; ++i) {
    auto t = sample_derivation(g, rng, 8);
    if (!t) continue;
    ++produced;
    CHECK(leaf_count(*t) >= 1);
    CHECK(leaf_count(*t) <= 8);
    for (const auto& tok : leaf_tokens(*t))
      CHECK(inv.terminal_id(tok) >= 0);
  }
  CHECK(produced > 0);
}

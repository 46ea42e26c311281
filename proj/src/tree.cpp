#include "fpcfg/tree.hpp"

#include <cmath>
#include <cstddef>

#include "fpcfg/util.hpp"

namespace fpcfg {

bool operator==(const RawTree& a, const RawTree& b) {
  if (a.label != b.label || a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!(a.children[i] == b.children[i])) return false;
  }
  return true;
}

namespace {

[[noreturn]] void parse_fail(const std::string& what, std::size_t at) {
  throw DataError("tree parse error at byte " + std::to_string(at) + ": " +
                  what);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }
bool is_token_char(char c) { return c != '(' && c != ')' && !is_space(c); }

void skip_space(const std::string& s, std::size_t& i) {
  while (i < s.size() && is_space(s[i])) ++i;
}

std::string read_token(const std::string& s, std::size_t& i) {
  std::size_t start = i;
  while (i < s.size() && is_token_char(s[i])) ++i;
  return s.substr(start, i - start);
}

RawTree parse_node(const std::string& s, std::size_t& i) {
  // s[i] == '('
  std::size_t open = i;
  ++i;
  skip_space(s, i);
  RawTree node;
  node.label = read_token(s, i);  // may be empty, as in PTB's outer "( ... )"
  while (true) {
    skip_space(s, i);
    if (i >= s.size()) parse_fail("unbalanced '('", open);
    if (s[i] == ')') {
      ++i;
      break;
    }
    if (s[i] == '(') {
      node.children.push_back(parse_node(s, i));
    } else {
      RawTree leaf;
      leaf.label = read_token(s, i);
      node.children.push_back(std::move(leaf));
    }
  }
  if (node.children.empty())
    parse_fail("node '" + node.label + "' has no children", open);
  return node;
}

}  // namespace

RawTree parse_bracketed(const std::string& line) {
  std::size_t i = 0;
  skip_space(line, i);
  if (i >= line.size()) parse_fail("empty input", i);
  if (line[i] != '(') parse_fail("expected '('", i);
  RawTree t = parse_node(line, i);
  skip_space(line, i);
  if (i < line.size()) parse_fail("trailing input after tree", i);
  // An outer wrapper with empty label and a single subtree, as in raw PTB
  // files, is unwrapped unless the wrapper itself is meaningful.
  if (t.label.empty() && t.children.size() == 1 && !t.children[0].is_leaf())
    return t.children[0];
  return t;
}

namespace {

void append_escaped(std::string& out, const std::string& s) {
  for (char c : s) {
    if (c == '(')
      out += "-LRB-";
    else if (c == ')')
      out += "-RRB-";
    else
      out += c;
  }
}

void serialize_node(std::string& out, const RawTree& t) {
  if (t.is_leaf()) {
    append_escaped(out, t.label);
    return;
  }
  out += '(';
  append_escaped(out, t.label);
  for (const RawTree& c : t.children) {
    out += ' ';
    serialize_node(out, c);
  }
  out += ')';
}

}  // namespace

std::string serialize_bracketed(const RawTree& t) {
  std::string out;
  serialize_node(out, t);
  return out;
}

namespace {

void collect_leaves(const RawTree& t, std::vector<std::string>& out) {
  if (t.is_leaf()) {
    out.push_back(t.label);
    return;
  }
  for (const RawTree& c : t.children) collect_leaves(c, out);
}

// Returns (start, end) of the subtree given the index of its first leaf.
Span collect_spans(const RawTree& t, int first, SpanSet& out) {
  if (t.is_leaf()) return {first, first + 1};
  int at = first;
  for (const RawTree& c : t.children) at = collect_spans(c, at, out).second;
  out.insert({first, at});
  return {first, at};
}

}  // namespace

std::vector<std::string> leaf_tokens(const RawTree& t) {
  std::vector<std::string> out;
  collect_leaves(t, out);
  return out;
}

int leaf_count(const RawTree& t) {
  if (t.is_leaf()) return 1;
  int n = 0;
  for (const RawTree& c : t.children) n += leaf_count(c);
  return n;
}

SpanSet tree_to_spans(const RawTree& t, bool include_width_one,
                      bool include_whole) {
  SpanSet all;
  int n = collect_spans(t, 0, all).second;
  SpanSet out;
  for (const Span& s : all) {
    if (!include_width_one && s.second - s.first == 1) continue;
    if (!include_whole && s.first == 0 && s.second == n) continue;
    out.insert(s);
  }
  return out;
}

SpanSet nontrivial_spans(const RawTree& t) {
  return tree_to_spans(t, false, false);
}

namespace {

RawTree leaf_node(const std::string& tok) {
  RawTree t;
  t.label = tok;
  return t;
}

RawTree branch(RawTree left, RawTree right) {
  RawTree t;
  t.label = "X";
  t.children.push_back(std::move(left));
  t.children.push_back(std::move(right));
  return t;
}

}  // namespace

RawTree left_branching_tree(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw UsageError("empty token sequence");
  RawTree t = leaf_node(tokens[0]);
  for (std::size_t i = 1; i < tokens.size(); ++i)
    t = branch(std::move(t), leaf_node(tokens[i]));
  return t;
}

RawTree right_branching_tree(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw UsageError("empty token sequence");
  RawTree t = leaf_node(tokens.back());
  for (std::size_t i = tokens.size() - 1; i-- > 0;)
    t = branch(leaf_node(tokens[i]), std::move(t));
  return t;
}

namespace {

// catalan(k) = number of binary trees with k+1 leaves; doubles are exact up
// to k = 30-ish and stay proportionally right beyond, which is all the
// sampler needs.
const std::vector<double>& catalan_table() {
  static const std::vector<double> table = [] {
    std::vector<double> c(128);
    c[0] = 1.0;
    for (std::size_t k = 1; k < c.size(); ++k)
      c[k] = c[k - 1] * 2.0 * (2.0 * k - 1.0) / (k + 1.0);
    return c;
  }();
  return table;
}

RawTree random_tree_over(const std::vector<std::string>& tokens, int start,
                         int end, std::mt19937_64& rng) {
  int w = end - start;
  if (w == 1) return leaf_node(tokens[start]);
  const std::vector<double>& cat = catalan_table();
  if (static_cast<std::size_t>(w) > cat.size())
    throw UsageError("sentence too long for random bracketing");
  double total = cat[w - 1];
  double u = uniform01(rng) * total;
  int split = start + 1;
  for (; split < end - 1; ++split) {
    double mass = cat[split - start - 1] * cat[end - split - 1];
    if (u < mass) break;
    u -= mass;
  }
  return branch(random_tree_over(tokens, start, split, rng),
                random_tree_over(tokens, split, end, rng));
}

}  // namespace

RawTree random_binary_tree(const std::vector<std::string>& tokens,
                           std::mt19937_64& rng) {
  if (tokens.empty()) throw UsageError("empty token sequence");
  return random_tree_over(tokens, 0, static_cast<int>(tokens.size()), rng);
}

}  // namespace fpcfg

#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace fpcfg {

// Symbol layout: nonterminals occupy ids [0, num_nonterminals), preterminals
// [num_nonterminals, num_symbols()). The root S is a distinguished symbol
// outside both ranges with its own unary distribution over nonterminals.
struct SymbolInventory {
  int num_nonterminals = 0;
  int num_preterminals = 0;
  std::vector<std::string> terminals;  // includes the unknown token
  std::string unk_token = "<unk>";

  int num_symbols() const { return num_nonterminals + num_preterminals; }
  int vocab_size() const { return static_cast<int>(terminals.size()); }
  bool is_nonterminal(int sym) const {
    return sym >= 0 && sym < num_nonterminals;
  }
  bool is_preterminal(int sym) const {
    return sym >= num_nonterminals && sym < num_symbols();
  }
  int unk_id() const;
  int terminal_id(const std::string& tok) const;  // -1 if absent
  // "NT-i" for nonterminals, "T-j" for preterminals (j counted within P).
  std::string symbol_name(int sym) const;
  std::vector<std::string> check() const;
};

bool operator==(const SymbolInventory& a, const SymbolInventory& b);

// A sentence is a sequence of terminal ids into the inventory vocabulary.
using Sentence = std::vector<int>;

// Raw linear-domain scores with the same shape as the grammar tables.
// Produced by the E-step and consumed by normalize().
struct RuleCounts {
  explicit RuleCounts(const SymbolInventory& inv);
  RuleCounts() = default;

  int num_nt = 0;
  int num_sym = 0;
  int vocab = 0;
  std::vector<double> root;     // |N|
  std::vector<double> binary;   // |N| * M * M
  std::vector<double> lexical;  // |P| * |Sigma|

  double& bin(int a, int b, int c) {
    return binary[(static_cast<std::size_t>(a) * num_sym + b) * num_sym + c];
  }
  double bin(int a, int b, int c) const {
    return binary[(static_cast<std::size_t>(a) * num_sym + b) * num_sym + c];
  }
  double& lex(int b, int w) {
    return lexical[static_cast<std::size_t>(b - num_nt) * vocab + w];
  }
  double lex(int b, int w) const {
    return lexical[static_cast<std::size_t>(b - num_nt) * vocab + w];
  }

  void add(const RuleCounts& other);
  void add_constant(double eps);
  double root_total() const;
  double binary_total() const;
  double lexical_total() const;
};

// PCFG with rule probabilities stored in the natural-log domain. Zero
// probability is -inf; NaN never appears in a valid table. Immutable in
// spirit: training builds new grammars rather than editing shared ones.
class Grammar {
 public:
  Grammar() = default;
  explicit Grammar(SymbolInventory inv);  // all rules at probability zero

  const SymbolInventory& inventory() const { return inv_; }
  int num_nonterminals() const { return inv_.num_nonterminals; }
  int num_symbols() const { return inv_.num_symbols(); }

  double root_logp(int a) const { return root_[a]; }
  double& root_logp(int a) { return root_[a]; }
  double binary_logp(int a, int b, int c) const {
    return binary_[index3(a, b, c)];
  }
  double& binary_logp(int a, int b, int c) { return binary_[index3(a, b, c)]; }
  double lexical_logp(int b, int word) const {
    return lexical_[index_lex(b, word)];
  }
  double& lexical_logp(int b, int word) { return lexical_[index_lex(b, word)]; }

  const std::vector<double>& root_table() const { return root_; }
  const std::vector<double>& binary_table() const { return binary_; }
  const std::vector<double>& lexical_table() const { return lexical_; }

  // Empty iff every distribution sums to one within 1e-9 and no entry is NaN.
  std::vector<std::string> validate() const;

 private:
  std::size_t index3(int a, int b, int c) const {
    int m = inv_.num_symbols();
    return (static_cast<std::size_t>(a) * m + b) * m + c;
  }
  std::size_t index_lex(int b, int word) const {
    return static_cast<std::size_t>(b - inv_.num_nonterminals) *
               inv_.terminals.size() +
           word;
  }

  SymbolInventory inv_;
  std::vector<double> root_;
  std::vector<double> binary_;
  std::vector<double> lexical_;
};

bool operator==(const Grammar& a, const Grammar& b);

// Every distribution drawn from a symmetric Dirichlet. Pure function of
// (inventory, seed, concentration).
Grammar random_init(const SymbolInventory& inv, std::uint64_t seed,
                    double concentration);

// Per-distribution renormalization of linear-domain scores. All-zero
// distributions fall back to uniform and are reported through `warnings`.
Grammar normalize(const SymbolInventory& inv, const RuleCounts& counts,
                  std::vector<std::string>* warnings = nullptr);

void serialize(const Grammar& g, std::ostream& out);
Grammar deserialize(std::istream& in);
std::string serialize_to_string(const Grammar& g);
Grammar deserialize_from_string(const std::string& text);

}  // namespace fpcfg

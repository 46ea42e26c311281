#include "fpcfg/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "fpcfg/util.hpp"

namespace fpcfg {

int SymbolInventory::unk_id() const {
  for (int i = 0; i < vocab_size(); ++i) {
    if (terminals[i] == unk_token) return i;
  }
  return -1;
}

int SymbolInventory::terminal_id(const std::string& tok) const {
  for (int i = 0; i < vocab_size(); ++i) {
    if (terminals[i] == tok) return i;
  }
  return -1;
}

std::string SymbolInventory::symbol_name(int sym) const {
  if (is_nonterminal(sym)) return "NT-" + std::to_string(sym);
  return "T-" + std::to_string(sym - num_nonterminals);
}

std::vector<std::string> SymbolInventory::check() const {
  std::vector<std::string> bad;
  if (num_nonterminals < 1) bad.push_back("need at least one nonterminal");
  if (num_preterminals < 1) bad.push_back("need at least one preterminal");
  if (terminals.empty()) bad.push_back("empty terminal vocabulary");
  int unk_count = 0;
  for (std::size_t i = 0; i < terminals.size(); ++i) {
    if (terminals[i] == unk_token) ++unk_count;
    for (std::size_t j = i + 1; j < terminals.size(); ++j) {
      if (terminals[i] == terminals[j]) {
        bad.push_back("duplicate terminal: " + terminals[i]);
      }
    }
  }
  if (unk_count != 1) {
    bad.push_back("unknown token must appear exactly once, found " +
                  std::to_string(unk_count));
  }
  return bad;
}

bool operator==(const SymbolInventory& a, const SymbolInventory& b) {
  return a.num_nonterminals == b.num_nonterminals &&
         a.num_preterminals == b.num_preterminals &&
         a.terminals == b.terminals && a.unk_token == b.unk_token;
}

RuleCounts::RuleCounts(const SymbolInventory& inv)
    : num_nt(inv.num_nonterminals),
      num_sym(inv.num_symbols()),
      vocab(inv.vocab_size()),
      root(inv.num_nonterminals, 0.0),
      binary(static_cast<std::size_t>(inv.num_nonterminals) *
                 inv.num_symbols() * inv.num_symbols(),
             0.0),
      lexical(static_cast<std::size_t>(inv.num_preterminals) *
                  inv.vocab_size(),
              0.0) {}

void RuleCounts::add(const RuleCounts& other) {
  for (std::size_t i = 0; i < root.size(); ++i) root[i] += other.root[i];
  for (std::size_t i = 0; i < binary.size(); ++i) binary[i] += other.binary[i];
  for (std::size_t i = 0; i < lexical.size(); ++i)
    lexical[i] += other.lexical[i];
}

void RuleCounts::add_constant(double eps) {
  for (auto& v : root) v += eps;
  for (auto& v : binary) v += eps;
  for (auto& v : lexical) v += eps;
}

double RuleCounts::root_total() const {
  double t = 0.0;
  for (double v : root) t += v;
  return t;
}

double RuleCounts::binary_total() const {
  double t = 0.0;
  for (double v : binary) t += v;
  return t;
}

double RuleCounts::lexical_total() const {
  double t = 0.0;
  for (double v : lexical) t += v;
  return t;
}

Grammar::Grammar(SymbolInventory inv) : inv_(std::move(inv)) {
  int n = inv_.num_nonterminals;
  int m = inv_.num_symbols();
  root_.assign(n, kNegInf);
  binary_.assign(static_cast<std::size_t>(n) * m * m, kNegInf);
  lexical_.assign(
      static_cast<std::size_t>(inv_.num_preterminals) * inv_.vocab_size(),
      kNegInf);
}

namespace {

// Mass of one log-domain distribution; flags NaN entries.
bool distribution_ok(const double* begin, std::size_t len, double* mass) {
  double m = 0.0;
  bool clean = true;
  for (std::size_t i = 0; i < len; ++i) {
    if (std::isnan(begin[i]) || begin[i] > 0.0) clean = false;
    m += std::exp(begin[i]);
  }
  *mass = m;
  return clean && std::abs(m - 1.0) <= 1e-9;
}

std::string mass_message(const std::string& what, double mass) {
  std::ostringstream ss;
  ss << what << ": mass " << mass;
  return ss.str();
}

}  // namespace

std::vector<std::string> Grammar::validate() const {
  std::vector<std::string> bad = inv_.check();
  int n = inv_.num_nonterminals;
  int m = inv_.num_symbols();
  double mass = 0.0;
  if (!distribution_ok(root_.data(), root_.size(), &mass)) {
    bad.push_back(mass_message("root distribution", mass));
  }
  for (int a = 0; a < n; ++a) {
    const double* row = binary_.data() + static_cast<std::size_t>(a) * m * m;
    if (!distribution_ok(row, static_cast<std::size_t>(m) * m, &mass)) {
      bad.push_back(
          mass_message("binary distribution for " + inv_.symbol_name(a),
                       mass));
    }
  }
  for (int b = 0; b < inv_.num_preterminals; ++b) {
    const double* row =
        lexical_.data() + static_cast<std::size_t>(b) * inv_.vocab_size();
    if (!distribution_ok(row, inv_.terminals.size(), &mass)) {
      bad.push_back(mass_message(
          "lexical distribution for " + inv_.symbol_name(n + b), mass));
    }
  }
  return bad;
}

bool operator==(const Grammar& a, const Grammar& b) {
  return a.inventory() == b.inventory() && a.root_table() == b.root_table() &&
         a.binary_table() == b.binary_table() &&
         a.lexical_table() == b.lexical_table();
}

Grammar random_init(const SymbolInventory& inv, std::uint64_t seed,
                    double concentration) {
  if (!(concentration > 0.0)) {
    throw UsageError("dirichlet concentration must be positive");
  }
  auto bad = inv.check();
  if (!bad.empty()) throw UsageError("bad inventory: " + bad.front());

  std::mt19937_64 rng(seed);
  Grammar g(inv);
  int n = inv.num_nonterminals;
  int m = inv.num_symbols();

  auto draws = sample_dirichlet(rng, n, concentration);
  for (int a = 0; a < n; ++a) g.root_logp(a) = std::log(draws[a]);
  for (int a = 0; a < n; ++a) {
    draws = sample_dirichlet(rng, static_cast<std::size_t>(m) * m,
                             concentration);
    std::size_t i = 0;
    for (int b = 0; b < m; ++b) {
      for (int c = 0; c < m; ++c) g.binary_logp(a, b, c) = std::log(draws[i++]);
    }
  }
  for (int b = 0; b < inv.num_preterminals; ++b) {
    draws = sample_dirichlet(rng, inv.terminals.size(), concentration);
    for (int w = 0; w < inv.vocab_size(); ++w) {
      g.lexical_logp(n + b, w) = std::log(draws[w]);
    }
  }
  return g;
}

namespace {

void normalize_one(const double* counts, std::size_t len, double* out_logp,
                   const std::string& what,
                   std::vector<std::string>* warnings) {
  double total = 0.0;
  for (std::size_t i = 0; i < len; ++i) total += counts[i];
  if (total <= 0.0) {
    if (warnings) warnings->push_back("all-zero distribution: " + what);
    double u = std::log(1.0 / static_cast<double>(len));
    for (std::size_t i = 0; i < len; ++i) out_logp[i] = u;
    return;
  }
  double log_total = std::log(total);
  for (std::size_t i = 0; i < len; ++i) {
    out_logp[i] = counts[i] > 0.0 ? std::log(counts[i]) - log_total : kNegInf;
  }
}

}  // namespace

Grammar normalize(const SymbolInventory& inv, const RuleCounts& counts,
                  std::vector<std::string>* warnings) {
  Grammar g(inv);
  int n = inv.num_nonterminals;
  int m = inv.num_symbols();
  std::vector<double> buf;

  buf.resize(counts.root.size());
  normalize_one(counts.root.data(), counts.root.size(), buf.data(), "root",
                warnings);
  for (int a = 0; a < n; ++a) g.root_logp(a) = buf[a];

  buf.resize(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < n; ++a) {
    std::size_t off = static_cast<std::size_t>(a) * m * m;
    normalize_one(counts.binary.data() + off, buf.size(), buf.data(),
                  "binary " + inv.symbol_name(a), warnings);
    std::size_t i = 0;
    for (int b = 0; b < m; ++b) {
      for (int c = 0; c < m; ++c) g.binary_logp(a, b, c) = buf[i++];
    }
  }

  buf.resize(inv.terminals.size());
  for (int b = 0; b < inv.num_preterminals; ++b) {
    std::size_t off = static_cast<std::size_t>(b) * inv.vocab_size();
    normalize_one(counts.lexical.data() + off, buf.size(), buf.data(),
                  "lexical " + inv.symbol_name(n + b), warnings);
    for (int w = 0; w < inv.vocab_size(); ++w) {
      g.lexical_logp(n + b, w) = buf[w];
    }
  }
  return g;
}

namespace {

void print_logp(std::ostream& out, double v) {
  if (v == kNegInf) {
    out << "-inf";
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void serialize(const Grammar& g, std::ostream& out) {
  const SymbolInventory& inv = g.inventory();
  out << "pcfg v1 " << inv.num_nonterminals << ' ' << inv.num_preterminals
      << ' ' << inv.vocab_size() << '\n';
  for (const auto& t : inv.terminals) out << t << '\n';
  int n = inv.num_nonterminals;
  int m = inv.num_symbols();
  for (int a = 0; a < n; ++a) {
    if (g.root_logp(a) == kNegInf) continue;
    out << "root " << a << ' ';
    print_logp(out, g.root_logp(a));
    out << '\n';
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < m; ++b) {
      for (int c = 0; c < m; ++c) {
        if (g.binary_logp(a, b, c) == kNegInf) continue;
        out << "bin " << a << ' ' << b << ' ' << c << ' ';
        print_logp(out, g.binary_logp(a, b, c));
        out << '\n';
      }
    }
  }
  for (int b = n; b < m; ++b) {
    for (int w = 0; w < inv.vocab_size(); ++w) {
      if (g.lexical_logp(b, w) == kNegInf) continue;
      out << "lex " << b << ' ' << w << ' ';
      print_logp(out, g.lexical_logp(b, w));
      out << '\n';
    }
  }
}

namespace {

double parse_logp(const std::string& field, int line_no) {
  if (field == "-inf") return kNegInf;
  try {
    std::size_t used = 0;
    double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw DataError("grammar file line " + std::to_string(line_no) +
                    ": bad log probability '" + field + "'");
  }
}

int parse_int(const std::string& field, int line_no, int lo, int hi,
              const char* what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    if (v < lo || v >= hi) throw std::out_of_range(field);
    return v;
  } catch (const std::exception&) {
    throw DataError("grammar file line " + std::to_string(line_no) +
                    ": bad " + std::string(what) + " '" + field + "'");
  }
}

}  // namespace

Grammar deserialize(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&](std::string* out) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      *out = line;
      return true;
    }
    return false;
  };

  std::string header;
  if (!next_line(&header)) throw DataError("grammar file: empty input");
  std::istringstream hs(header);
  std::string magic, version;
  int num_nt = 0, num_pt = 0, num_terms = 0;
  hs >> magic >> version >> num_nt >> num_pt >> num_terms;
  if (!hs || magic != "pcfg" || version != "v1" || num_nt < 1 || num_pt < 1 ||
      num_terms < 1) {
    throw DataError("grammar file line " + std::to_string(line_no) +
                    ": bad header '" + header + "'");
  }

  SymbolInventory inv;
  inv.num_nonterminals = num_nt;
  inv.num_preterminals = num_pt;
  for (int i = 0; i < num_terms; ++i) {
    std::string t;
    if (!next_line(&t)) {
      throw DataError("grammar file: expected " + std::to_string(num_terms) +
                      " terminals, got " + std::to_string(i));
    }
    inv.terminals.push_back(t);
  }
  if (inv.unk_id() < 0) {
    // Tolerated here; validate() reports it so parsing stays separate
    // from validation.
  }

  Grammar g(inv);
  int m = inv.num_symbols();
  std::string row;
  while (next_line(&row)) {
    std::istringstream rs(row);
    std::string kind;
    rs >> kind;
    std::vector<std::string> fields;
    std::string f;
    while (rs >> f) fields.push_back(f);
    if (kind == "root" && fields.size() == 2) {
      int a = parse_int(fields[0], line_no, 0, num_nt, "nonterminal");
      g.root_logp(a) = parse_logp(fields[1], line_no);
    } else if (kind == "bin" && fields.size() == 4) {
      int a = parse_int(fields[0], line_no, 0, num_nt, "nonterminal");
      int b = parse_int(fields[1], line_no, 0, m, "symbol");
      int c = parse_int(fields[2], line_no, 0, m, "symbol");
      g.binary_logp(a, b, c) = parse_logp(fields[3], line_no);
    } else if (kind == "lex" && fields.size() == 3) {
      int b = parse_int(fields[0], line_no, num_nt, m, "preterminal");
      int w = parse_int(fields[1], line_no, 0, num_terms, "terminal index");
      g.lexical_logp(b, w) = parse_logp(fields[2], line_no);
    } else {
      throw DataError("grammar file line " + std::to_string(line_no) +
                      ": unrecognized rule line '" + row + "'");
    }
  }
  return g;
}

std::string serialize_to_string(const Grammar& g) {
  std::ostringstream out;
  serialize(g, out);
  return out.str();
}

Grammar deserialize_from_string(const std::string& text) {
  std::istringstream in(text);
  return deserialize(in);
}

}  // namespace fpcfg

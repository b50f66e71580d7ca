// ============================================================================
// hylosat/fol.hpp — first-order logic over (N,<)
// ============================================================================
//
// FolFormula is first-order logic with < and = over variables and numerals.
// This header provides:
//
//   * translate_H   — the standard translation from hybrid formulas,
//   * close_sentence— the satisfiability sentence  E x1..xk H(f | <>f, 0),
//   * qe_decide     — a decision procedure for closed sentences over (N,<)
//                     by quantifier elimination on difference constraints,
//   * eval_bounded  — an independent oracle with quantifiers over {0..B},
//   * decide_at     — "g,n |= f" through H and qe_decide.
//
// Quantifier elimination works on conjunctions of difference bounds
// v - w <= c over variables plus a zero point Z (v - Z <= c encodes v <= c,
// Z - v <= 0 encodes v >= 0).  Negation flips a bound exactly:
// not(a - b <= c)  ==  b - a <= -c-1.  Eliminating an innermost E distributes
// to DNF and projects the variable out of each cube by combining bounds
// through it, which is exact for integer difference constraints; A goes
// through double negation.  A configurable cube ceiling aborts with
// QeLimitError rather than ever reporting a wrong verdict.
//
// Text syntax (for `translate --to fol` output and test input):
//
//   or   := and ('|' and)* ;  and := un ('&' un)*
//   un   := '!' un | 'exists' NAME '.' un | 'forall' NAME '.' un
//         | 'true' | 'false' | atom | '(' or ')'
//   atom := term '<' term | term '=' term ;  term := NAME | NUMBER
//
// ============================================================================

#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hylosat/formula.hpp"

namespace hylosat {

// Ill-formed FOL input: free variables where a sentence is required, a
// missing assignment entry, or an unbound variable during evaluation.
struct FolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The quantifier-elimination cube ceiling was exceeded; the caller gets no
// verdict.  HYLOSAT_QE_LIMIT overrides the default ceiling in the CLI.
struct QeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultQeCubeLimit = 1000000;

// ── syntax ──────────────────────────────────────────────────────────────────

struct FolTerm {
  bool is_num = false;
  std::string var;
  long long num = 0;

  static FolTerm v(std::string name) { return FolTerm{false, std::move(name), 0}; }
  static FolTerm n(long long k) { return FolTerm{true, "", k}; }
  friend bool operator==(const FolTerm&, const FolTerm&) = default;
};

enum class FolOp { True, False, Less, Eq, Not, And, Or, Exists, Forall };

struct FolNode {
  FolOp op;
  FolTerm t1, t2;   // Less / Eq
  std::string var;  // Exists / Forall
  NodeId left = -1, right = -1;
};

class FolFormula {
 public:
  FolFormula() = default;

  NodeId root() const { return 0; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const FolNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<FolNode>& nodes() const { return nodes_; }

  static FolFormula t() { return leaf(FolNode{FolOp::True, {}, {}, "", -1, -1}); }
  static FolFormula f() { return leaf(FolNode{FolOp::False, {}, {}, "", -1, -1}); }
  static FolFormula less(FolTerm a, FolTerm b) {
    return leaf(FolNode{FolOp::Less, std::move(a), std::move(b), "", -1, -1});
  }
  static FolFormula eq(FolTerm a, FolTerm b) {
    return leaf(FolNode{FolOp::Eq, std::move(a), std::move(b), "", -1, -1});
  }
  static FolFormula lnot(FolFormula x) { return unary(FolOp::Not, "", std::move(x)); }
  static FolFormula exists(std::string v, FolFormula x) {
    return unary(FolOp::Exists, std::move(v), std::move(x));
  }
  static FolFormula forall(std::string v, FolFormula x) {
    return unary(FolOp::Forall, std::move(v), std::move(x));
  }
  static FolFormula land(FolFormula a, FolFormula b) {
    return binary(FolOp::And, std::move(a), std::move(b));
  }
  static FolFormula lor(FolFormula a, FolFormula b) {
    return binary(FolOp::Or, std::move(a), std::move(b));
  }

  friend bool operator==(const FolFormula& a, const FolFormula& b) {
    if (a.nodes_.size() != b.nodes_.size()) return false;
    for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
      const FolNode& x = a.nodes_[i];
      const FolNode& y = b.nodes_[i];
      if (x.op != y.op || !(x.t1 == y.t1) || !(x.t2 == y.t2) || x.var != y.var ||
          x.left != y.left || x.right != y.right)
        return false;
    }
    return true;
  }

 private:
  std::vector<FolNode> nodes_;

  static FolFormula leaf(FolNode n) {
    FolFormula out;
    out.nodes_.push_back(std::move(n));
    return out;
  }
  static FolFormula unary(FolOp op, std::string var, FolFormula child) {
    FolFormula out;
    out.nodes_.push_back(FolNode{op, {}, {}, std::move(var), 1, -1});
    out.splice(std::move(child));
    return out;
  }
  static FolFormula binary(FolOp op, FolFormula l, FolFormula r) {
    FolFormula out;
    NodeId right = 1 + static_cast<NodeId>(l.nodes_.size());
    out.nodes_.push_back(FolNode{op, {}, {}, "", 1, right});
    out.splice(std::move(l));
    out.splice(std::move(r));
    return out;
  }
  void splice(FolFormula child) {
    NodeId off = static_cast<NodeId>(nodes_.size());
    for (FolNode& n : child.nodes_) {
      if (n.left >= 0) n.left += off;
      if (n.right >= 0) n.right += off;
      nodes_.push_back(std::move(n));
    }
  }
};

// Free variables (numerals contribute nothing).
inline void fol_free_vars_rec(const FolFormula& s, NodeId id,
                              std::set<std::string>& bound,
                              std::set<std::string>& out) {
  const FolNode& n = s.node(id);
  switch (n.op) {
    case FolOp::True:
    case FolOp::False:
      return;
    case FolOp::Less:
    case FolOp::Eq:
      if (!n.t1.is_num && !bound.count(n.t1.var)) out.insert(n.t1.var);
      if (!n.t2.is_num && !bound.count(n.t2.var)) out.insert(n.t2.var);
      return;
    case FolOp::Not:
      fol_free_vars_rec(s, n.left, bound, out);
      return;
    case FolOp::And:
    case FolOp::Or:
      fol_free_vars_rec(s, n.left, bound, out);
      fol_free_vars_rec(s, n.right, bound, out);
      return;
    case FolOp::Exists:
    case FolOp::Forall: {
      bool fresh = bound.insert(n.var).second;
      fol_free_vars_rec(s, n.left, bound, out);
      if (fresh) bound.erase(n.var);
      return;
    }
  }
}

inline std::set<std::string> fol_free_vars(const FolFormula& s) {
  std::set<std::string> bound, out;
  fol_free_vars_rec(s, s.root(), bound, out);
  return out;
}

// Substitutes numerals for free occurrences of the given variables.
inline FolFormula fol_substitute(const FolFormula& s,
                                 const std::map<std::string, long long>& values) {
  struct Sub {
    const FolFormula& s;
    const std::map<std::string, long long>& values;
    std::set<std::string> shadowed;

    FolTerm term(const FolTerm& t) const {
      if (t.is_num || shadowed.count(t.var)) return t;
      auto it = values.find(t.var);
      return it == values.end() ? t : FolTerm::n(it->second);
    }
    FolFormula go(NodeId id) {
      const FolNode& n = s.node(id);
      switch (n.op) {
        case FolOp::True: return FolFormula::t();
        case FolOp::False: return FolFormula::f();
        case FolOp::Less: return FolFormula::less(term(n.t1), term(n.t2));
        case FolOp::Eq: return FolFormula::eq(term(n.t1), term(n.t2));
        case FolOp::Not: return FolFormula::lnot(go(n.left));
        case FolOp::And: return FolFormula::land(go(n.left), go(n.right));
        case FolOp::Or: return FolFormula::lor(go(n.left), go(n.right));
        case FolOp::Exists:
        case FolOp::Forall: {
          bool fresh = shadowed.insert(n.var).second;
          FolFormula body = go(n.left);
          if (fresh) shadowed.erase(n.var);
          return n.op == FolOp::Exists ? FolFormula::exists(n.var, std::move(body))
                                       : FolFormula::forall(n.var, std::move(body));
        }
      }
      throw FolError("unreachable");
    }
  };
  Sub sub{s, values, {}};
  return sub.go(s.root());
}

// ── text form ───────────────────────────────────────────────────────────────

namespace detail {

inline void print_fol_term(const FolTerm& t, std::string& out) {
  if (t.is_num) out += std::to_string(t.num);
  else out += t.var;
}

inline void print_fol_node(const FolFormula& s, NodeId id, std::string& out) {
  const FolNode& n = s.node(id);
  switch (n.op) {
    case FolOp::True: out += "true"; return;
    case FolOp::False: out += "false"; return;
    case FolOp::Less:
      print_fol_term(n.t1, out); out += " < "; print_fol_term(n.t2, out);
      return;
    case FolOp::Eq:
      print_fol_term(n.t1, out); out += " = "; print_fol_term(n.t2, out);
      return;
    case FolOp::Not:
      out += "! ";
      out += '(';
      print_fol_node(s, n.left, out);
      out += ')';
      return;
    case FolOp::And:
    case FolOp::Or:
      out += '(';
      print_fol_node(s, n.left, out);
      out += n.op == FolOp::And ? " & " : " | ";
      print_fol_node(s, n.right, out);
      out += ')';
      return;
    case FolOp::Exists:
    case FolOp::Forall:
      out += n.op == FolOp::Exists ? "exists " : "forall ";
      out += n.var;
      out += ". ";
      print_fol_node(s, n.left, out);
      return;
  }
}

struct FolParser {
  std::string_view in;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }
  void skip_ws() {
    while (pos < in.size() && std::isspace(static_cast<unsigned char>(in[pos]))) ++pos;
  }
  bool eat(std::string_view tok) {
    skip_ws();
    if (in.substr(pos, tok.size()) == tok) {
      if (std::isalpha(static_cast<unsigned char>(tok.front()))) {
        std::size_t after = pos + tok.size();
        if (after < in.size() && (std::isalnum(static_cast<unsigned char>(in[after])) ||
                                  in[after] == '_'))
          return false;
      }
      pos += tok.size();
      return true;
    }
    return false;
  }
  std::string name() {
    skip_ws();
    if (pos >= in.size() || !(in[pos] >= 'a' && in[pos] <= 'z')) fail("expected a name");
    std::size_t start = pos;
    while (pos < in.size() && ((in[pos] >= 'a' && in[pos] <= 'z') ||
                               (in[pos] >= '0' && in[pos] <= '9') || in[pos] == '_'))
      ++pos;
    return std::string(in.substr(start, pos - start));
  }
  FolTerm term() {
    skip_ws();
    if (pos < in.size() && std::isdigit(static_cast<unsigned char>(in[pos]))) {
      long long v = 0;
      while (pos < in.size() && std::isdigit(static_cast<unsigned char>(in[pos])))
        v = v * 10 + (in[pos++] - '0');
      return FolTerm::n(v);
    }
    return FolTerm::v(name());
  }

  FolFormula disj() {
    FolFormula x = conj();
    while (eat("|")) x = FolFormula::lor(std::move(x), conj());
    return x;
  }
  FolFormula conj() {
    FolFormula x = unary();
    while (eat("&")) x = FolFormula::land(std::move(x), unary());
    return x;
  }
  FolFormula unary() {
    skip_ws();
    if (pos >= in.size()) fail("unexpected end of input");
    if (eat("true")) return FolFormula::t();
    if (eat("false")) return FolFormula::f();
    if (eat("!")) return FolFormula::lnot(unary());
    if (eat("exists")) {
      std::string v = name();
      if (!eat(".")) fail("expected '.'");
      return FolFormula::exists(std::move(v), unary());
    }
    if (eat("forall")) {
      std::string v = name();
      if (!eat(".")) fail("expected '.'");
      return FolFormula::forall(std::move(v), unary());
    }
    if (eat("(")) {
      FolFormula x = disj();
      if (!eat(")")) fail("expected ')'");
      return x;
    }
    FolTerm a = term();
    skip_ws();
    if (eat("<")) return FolFormula::less(std::move(a), term());
    if (eat("=")) return FolFormula::eq(std::move(a), term());
    fail("expected '<' or '='");
  }
};

}  // namespace detail

inline std::string print_fol(const FolFormula& s) {
  std::string out;
  detail::print_fol_node(s, s.root(), out);
  return out;
}

inline FolFormula parse_fol(std::string_view text) {
  detail::FolParser p{text};
  FolFormula s = p.disj();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return s;
}

// ── standard translation H ──────────────────────────────────────────────────

namespace detail {

struct HTranslator {
  std::set<std::string> used;
  std::map<std::string, std::string> nominal_names;
  int counter = 0;

  std::string fresh_t() {
    for (;;) {
      std::string cand = "t" + std::to_string(++counter);
      if (!used.count(cand)) {
        used.insert(cand);
        return cand;
      }
    }
  }

  // Nominals act as existentially interpreted constants; they live in the
  // same term namespace as state variables, so a clashing name gets mangled.
  std::string nominal_var(const std::string& i) {
    auto it = nominal_names.find(i);
    if (it != nominal_names.end()) return it->second;
    std::string cand = i;
    while (used.count(cand)) cand = "n_" + cand;
    used.insert(cand);
    nominal_names.emplace(i, cand);
    return cand;
  }

  FolFormula go(const Formula& f, NodeId id, const FolTerm& z) {
    const Node& n = f.node(id);
    switch (n.op) {
      case Op::Prop: return FolFormula::t();
      case Op::Top: return FolFormula::t();
      case Op::Bottom: return FolFormula::f();
      case Op::SVar: return FolFormula::eq(FolTerm::v(n.name), z);
      case Op::Nominal: return FolFormula::eq(FolTerm::v(nominal_var(n.name)), z);
      case Op::And:
      case Op::Or: {
        FolFormula l = go(f, n.left, z);
        FolFormula r = go(f, n.right, z);
        return n.op == Op::And ? FolFormula::land(std::move(l), std::move(r))
                               : FolFormula::lor(std::move(l), std::move(r));
      }
      case Op::Diamond: {
        std::string t = fresh_t();
        return FolFormula::exists(
            t, FolFormula::land(FolFormula::less(z, FolTerm::v(t)),
                                go(f, n.left, FolTerm::v(t))));
      }
      case Op::Box: {
        // forall t ((t < z | t = z) | H(body, t)) — the implication
        // not(z < t) -> H expanded over (N,<).
        std::string t = fresh_t();
        FolTerm tv = FolTerm::v(t);
        FolFormula guard = FolFormula::lor(FolFormula::less(tv, z), FolFormula::eq(tv, z));
        return FolFormula::forall(
            t, FolFormula::lor(std::move(guard), go(f, n.left, tv)));
      }
      case Op::Down: {
        FolFormula body = go(f, n.left, z);
        return FolFormula::exists(
            n.name, FolFormula::land(FolFormula::eq(FolTerm::v(n.name), z), std::move(body)));
      }
      case Op::At: {
        FolTerm target =
            n.at_svar ? FolTerm::v(n.name) : FolTerm::v(nominal_var(n.name));
        return go(f, n.left, target);
      }
      case Op::Neg:
        throw FragmentError("translate_H: formula contains negation");
    }
    throw FragmentError("unreachable");
  }
};

inline detail::HTranslator make_h_translator(const Formula& f) {
  detail::HTranslator h;
  for (const Node& n : f.nodes())
    if (n.op == Op::SVar || n.op == Op::Down || (n.op == Op::At && n.at_svar))
      h.used.insert(n.name);
  return h;
}

}  // namespace detail

// H(f, z): the standard translation with a fresh t per modal operator.
// Expects a renamed-apart monotone formula.
inline FolFormula translate_H(const Formula& f, const FolTerm& z) {
  detail::HTranslator h = detail::make_h_translator(f);
  return h.go(f, f.root(), z);
}

// E x1..xk H(f | <>f, 0): satisfiable over N iff the sentence is true.
// Free state variables and nominals are closed existentially.
inline FolFormula close_sentence(const Formula& f) {
  Formula q = Formula::disj(f, Formula::diamond(f));
  detail::HTranslator h = detail::make_h_translator(q);
  FolFormula body = h.go(q, q.root(), FolTerm::n(0));
  std::set<std::string> vars = analyze(f).free_svars;
  for (const auto& [nom, mangled] : h.nominal_names) vars.insert(mangled);
  for (auto it = vars.rbegin(); it != vars.rend(); ++it)
    body = FolFormula::exists(*it, std::move(body));
  return body;
}

// ── bounded evaluation oracle ───────────────────────────────────────────────

namespace detail {

inline bool eval_bounded_rec(const FolFormula& s, NodeId id, long long bound,
                             std::map<std::string, long long>& env) {
  const FolNode& n = s.node(id);
  auto value = [&](const FolTerm& t) -> long long {
    if (t.is_num) return t.num;
    auto it = env.find(t.var);
    if (it == env.end()) throw FolError("unbound variable '" + t.var + "'");
    return it->second;
  };
  switch (n.op) {
    case FolOp::True: return true;
    case FolOp::False: return false;
    case FolOp::Less: return value(n.t1) < value(n.t2);
    case FolOp::Eq: return value(n.t1) == value(n.t2);
    case FolOp::Not: return !eval_bounded_rec(s, n.left, bound, env);
    case FolOp::And:
      return eval_bounded_rec(s, n.left, bound, env) &&
             eval_bounded_rec(s, n.right, bound, env);
    case FolOp::Or:
      return eval_bounded_rec(s, n.left, bound, env) ||
             eval_bounded_rec(s, n.right, bound, env);
    case FolOp::Exists:
    case FolOp::Forall: {
      bool want = n.op == FolOp::Exists;
      auto saved = env.find(n.var) == env.end()
                       ? std::optional<long long>()
                       : std::optional<long long>(env[n.var]);
      bool hit = !want;
      for (long long v = 0; v <= bound; ++v) {
        env[n.var] = v;
        if (eval_bounded_rec(s, n.left, bound, env) == want) {
          hit = want;
          break;
        }
      }
      if (saved) env[n.var] = *saved;
      else env.erase(n.var);
      return hit;
    }
  }
  return false;
}

}  // namespace detail

// Evaluates a closed sentence with every quantifier ranging over {0..B}.
inline bool eval_bounded(const FolFormula& s, long long B) {
  std::map<std::string, long long> env;
  return detail::eval_bounded_rec(s, s.root(), B, env);
}

// The quantifier bound B* used when cross-checking qe_decide against the
// bounded oracle: (max numeral) + (quantifier count) + 2.
inline long long bounded_eval_bound(const FolFormula& s) {
  long long max_num = 0;
  long long quants = 0;
  for (const FolNode& n : s.nodes()) {
    if (n.op == FolOp::Exists || n.op == FolOp::Forall) ++quants;
    if (n.t1.is_num) max_num = std::max(max_num, n.t1.num);
    if (n.t2.is_num) max_num = std::max(max_num, n.t2.num);
  }
  return max_num + quants + 2;
}

namespace detail {

inline int quantifier_rank(const FolFormula& s, NodeId id) {
  const FolNode& n = s.node(id);
  switch (n.op) {
    case FolOp::Exists:
    case FolOp::Forall: return 1 + quantifier_rank(s, n.left);
    case FolOp::Not: return quantifier_rank(s, n.left);
    case FolOp::And:
    case FolOp::Or:
      return std::max(quantifier_rank(s, n.left), quantifier_rank(s, n.right));
    default: return 0;
  }
}

inline bool eval_nat_rec(const FolFormula& s, NodeId id, long long max_numeral,
                         std::map<std::string, long long>& env) {
  const FolNode& n = s.node(id);
  auto value = [&](const FolTerm& t) -> long long {
    if (t.is_num) return t.num;
    auto it = env.find(t.var);
    if (it == env.end()) throw FolError("unbound variable '" + t.var + "'");
    return it->second;
  };
  switch (n.op) {
    case FolOp::True: return true;
    case FolOp::False: return false;
    case FolOp::Less: return value(n.t1) < value(n.t2);
    case FolOp::Eq: return value(n.t1) == value(n.t2);
    case FolOp::Not: return !eval_nat_rec(s, n.left, max_numeral, env);
    case FolOp::And:
      return eval_nat_rec(s, n.left, max_numeral, env) &&
             eval_nat_rec(s, n.right, max_numeral, env);
    case FolOp::Or:
      return eval_nat_rec(s, n.left, max_numeral, env) ||
             eval_nat_rec(s, n.right, max_numeral, env);
    case FolOp::Exists:
    case FolOp::Forall: {
      // Values past every numeral, every already-chosen value, and 2^rank
      // extra room are order-indistinguishable for the remaining rank, so
      // the window below is exhaustive.
      long long base = max_numeral;
      for (const auto& [v, x] : env) base = std::max(base, x);
      long long window = base + (1ll << quantifier_rank(s, id)) + 1;
      bool want = n.op == FolOp::Exists;
      auto saved = env.find(n.var) == env.end()
                       ? std::optional<long long>()
                       : std::optional<long long>(env[n.var]);
      bool hit = !want;
      for (long long v = 0; v <= window; ++v) {
        env[n.var] = v;
        if (eval_nat_rec(s, n.left, max_numeral, env) == want) {
          hit = want;
          break;
        }
      }
      if (saved) env[n.var] = *saved;
      else env.erase(n.var);
      return hit;
    }
  }
  return false;
}

}  // namespace detail

// Exact evaluation of a closed sentence over (N,<): like eval_bounded, but
// every quantifier's window adapts to the values already fixed, which is
// what the fixed uniform box cannot express (no finite chain satisfies
// "forall x. exists y. x < y").
inline bool eval_nat(const FolFormula& s) {
  long long max_num = 0;
  for (const FolNode& n : s.nodes()) {
    if (n.t1.is_num) max_num = std::max(max_num, n.t1.num);
    if (n.t2.is_num) max_num = std::max(max_num, n.t2.num);
  }
  std::map<std::string, long long> env;
  return detail::eval_nat_rec(s, s.root(), max_num, env);
}

// ── difference systems ──────────────────────────────────────────────────────

// v(a) - v(b) <= c over variable indices; index 0 is the zero point Z.
struct DiffConstraint {
  int a = 0, b = 0;
  long long c = 0;
  friend auto operator<=>(const DiffConstraint&, const DiffConstraint&) = default;
};

// A conjunction of difference bounds over N (index 0 is Z; every variable is
// implicitly >= 0).
struct DifferenceSystem {
  int num_vars = 0;  // variables 1..num_vars
  std::vector<DiffConstraint> constraints;

  // Bellman-Ford negative-cycle test, with the implicit Z - v <= 0 edges.
  bool feasible() const {
    int n = num_vars + 1;
    std::vector<long long> dist(n, 0);
    std::vector<DiffConstraint> edges = constraints;
    for (int v = 1; v < n; ++v) edges.push_back(DiffConstraint{0, v, 0});
    for (int round = 0; round < n; ++round) {
      bool changed = false;
      for (const DiffConstraint& e : edges) {
        if (dist[e.b] + e.c < dist[e.a]) {
          dist[e.a] = dist[e.b] + e.c;
          changed = true;
        }
      }
      if (!changed) return true;
    }
    return false;
  }

  // Existentially projects variable v by combining every lower bound on v
  // with every upper bound on v; exact over N because coefficients are
  // units and v >= 0 enters as Z - v <= 0.
  DifferenceSystem project(int v) const {
    DifferenceSystem out;
    out.num_vars = num_vars;
    std::vector<DiffConstraint> lowers, uppers;  // a - v <= c ; v - b <= c
    lowers.push_back(DiffConstraint{0, v, 0});
    for (const DiffConstraint& k : constraints) {
      if (k.a == v && k.b == v) {
        if (k.c < 0) {
          out.constraints.push_back(DiffConstraint{0, 0, -1});  // unsatisfiable
          return out;
        }
        continue;
      }
      if (k.b == v) lowers.push_back(k);
      else if (k.a == v) uppers.push_back(k);
      else out.constraints.push_back(k);
    }
    for (const DiffConstraint& lo : lowers)
      for (const DiffConstraint& up : uppers) {
        if (lo.a == up.b) {
          if (lo.c + up.c < 0) {
            out.constraints.push_back(DiffConstraint{0, 0, -1});
            return out;
          }
          continue;
        }
        out.constraints.push_back(DiffConstraint{lo.a, up.b, lo.c + up.c});
      }
    return out;
  }
};

// ── quantifier elimination ──────────────────────────────────────────────────

namespace detail {

// A cube keeps the tightest bound per ordered variable pair.
using Cube = std::map<std::pair<int, int>, long long>;

struct QeState {
  std::size_t max_cubes;

  void check(std::size_t count) const {
    if (count > max_cubes)
      throw QeLimitError("quantifier elimination exceeded the cube ceiling");
  }

  static bool add_atom(Cube& cube, int a, int b, long long c) {
    if (a == b) return c >= 0;  // tautology or contradiction
    auto key = std::make_pair(a, b);
    auto it = cube.find(key);
    if (it == cube.end()) cube.emplace(key, c);
    else it->second = std::min(it->second, c);
    return true;
  }

  static bool cube_feasible(const Cube& cube) {
    std::set<int> vars;
    for (const auto& [k, c] : cube) {
      vars.insert(k.first);
      vars.insert(k.second);
    }
    vars.insert(0);
    std::map<int, long long> dist;
    for (int v : vars) dist[v] = 0;
    for (std::size_t round = 0; round <= vars.size(); ++round) {
      bool changed = false;
      for (const auto& [k, c] : cube) {
        if (dist[k.second] + c < dist[k.first]) {
          dist[k.first] = dist[k.second] + c;
          changed = true;
        }
      }
      for (int v : vars) {  // Z - v <= 0
        if (v != 0 && dist[v] < dist[0]) {
          dist[0] = dist[v];
          changed = true;
        }
      }
      if (!changed) return true;
    }
    return false;
  }

  std::vector<Cube> dedupe(std::vector<Cube> dnf) const {
    std::sort(dnf.begin(), dnf.end());
    dnf.erase(std::unique(dnf.begin(), dnf.end()), dnf.end());
    return dnf;
  }

  std::vector<Cube> dnf_and(const std::vector<Cube>& l, const std::vector<Cube>& r) const {
    check(l.size() * r.size());
    std::vector<Cube> out;
    for (const Cube& a : l)
      for (const Cube& b : r) {
        Cube merged = a;
        bool ok = true;
        for (const auto& [k, c] : b)
          if (!add_atom(merged, k.first, k.second, c)) {
            ok = false;
            break;
          }
        if (ok && cube_feasible(merged)) out.push_back(std::move(merged));
      }
    return dedupe(std::move(out));
  }

  std::vector<Cube> dnf_or(std::vector<Cube> l, const std::vector<Cube>& r) const {
    l.insert(l.end(), r.begin(), r.end());
    check(l.size());
    return dedupe(std::move(l));
  }

  // not (C1 | ... | Ck) distributed back to DNF.
  std::vector<Cube> dnf_not(const std::vector<Cube>& dnf) const {
    std::vector<Cube> acc;
    acc.emplace_back();  // true
    for (const Cube& cube : dnf) {
      std::vector<Cube> next;
      for (const auto& [k, c] : cube) {
        // not(a - b <= c)  ==  b - a <= -c-1
        std::vector<Cube> lit(1);
        if (!add_atom(lit[0], k.second, k.first, -c - 1)) continue;
        for (const Cube& a : acc) {
          Cube merged = a;
          bool ok = true;
          for (const auto& [k2, c2] : lit[0])
            if (!add_atom(merged, k2.first, k2.second, c2)) {
              ok = false;
              break;
            }
          if (ok && cube_feasible(merged)) next.push_back(std::move(merged));
        }
        check(next.size());
      }
      acc = dedupe(std::move(next));
      if (acc.empty()) return acc;
    }
    return acc;
  }

  // Projects variable v out of a cube (the E step).
  static std::optional<Cube> project(const Cube& cube, int v) {
    Cube out;
    std::vector<std::pair<int, long long>> lowers = {{0, 0}};  // a - v <= c
    std::vector<std::pair<int, long long>> uppers;             // v - b <= c
    for (const auto& [k, c] : cube) {
      if (k.first == v) uppers.emplace_back(k.second, c);
      else if (k.second == v) lowers.emplace_back(k.first, c);
      else if (!add_atom(out, k.first, k.second, c)) return std::nullopt;
    }
    for (const auto& [a, c1] : lowers)
      for (const auto& [b, c2] : uppers)
        if (!add_atom(out, a, b, c1 + c2)) return std::nullopt;
    return out;
  }

  std::vector<Cube> eliminate(const std::vector<Cube>& dnf, int v) const {
    std::vector<Cube> out;
    for (const Cube& cube : dnf) {
      std::optional<Cube> p = project(cube, v);
      if (p && cube_feasible(*p)) out.push_back(std::move(*p));
    }
    check(out.size());
    return dedupe(std::move(out));
  }
};

struct QeRun {
  QeState st;
  std::map<std::string, std::vector<int>> scopes;  // name -> stack of indices
  int next_var = 1;

  int var_index(const std::string& name) {
    auto it = scopes.find(name);
    if (it == scopes.end() || it->second.empty())
      throw FolError("qe_decide: sentence is not closed (free '" + name + "')");
    return it->second.back();
  }

  // polarity=false negates the subformula on the fly (NNF over atoms).
  std::vector<Cube> go(const FolFormula& s, NodeId id, bool polarity) {
    const FolNode& n = s.node(id);
    auto tru = [] { return std::vector<Cube>{Cube{}}; };
    auto fls = [] { return std::vector<Cube>{}; };
    switch (n.op) {
      case FolOp::True: return polarity ? tru() : fls();
      case FolOp::False: return polarity ? fls() : tru();
      case FolOp::Not: return go(s, n.left, !polarity);
      case FolOp::And:
      case FolOp::Or: {
        bool conj = (n.op == FolOp::And) == polarity;
        std::vector<Cube> l = go(s, n.left, polarity);
        std::vector<Cube> r = go(s, n.right, polarity);
        return conj ? st.dnf_and(l, r) : st.dnf_or(std::move(l), r);
      }
      case FolOp::Less:
      case FolOp::Eq: {
        auto idx = [&](const FolTerm& t) { return t.is_num ? -1 : var_index(t.var); };
        int a = idx(n.t1), b = idx(n.t2);
        // Build the positive atom set, then negate if needed.
        std::vector<Cube> pos;
        Cube cube;
        bool ok = true;
        bool is_less = n.op == FolOp::Less;
        if (a < 0 && b < 0) {
          long long x = n.t1.num, y = n.t2.num;
          bool truth = is_less ? x < y : x == y;
          if (!polarity) truth = !truth;
          return truth ? tru() : fls();
        }
        auto add = [&](int p, int q, long long c) { ok = ok && QeState::add_atom(cube, p, q, c); };
        if (is_less) {
          if (a >= 0 && b >= 0) add(a, b, -1);            // a < b
          else if (a >= 0) add(a, 0, n.t2.num - 1);        // a < k
          else add(0, b, -n.t1.num - 1);                   // k < b
        } else {
          if (a >= 0 && b >= 0) { add(a, b, 0); add(b, a, 0); }
          else if (a >= 0) { add(a, 0, n.t2.num); add(0, a, -n.t2.num); }
          else { add(b, 0, n.t1.num); add(0, b, -n.t1.num); }
        }
        if (ok) pos.push_back(std::move(cube));
        if (polarity) return pos;
        return st.dnf_not(pos);
      }
      case FolOp::Exists:
      case FolOp::Forall: {
        bool exist = (n.op == FolOp::Exists) == polarity;
        int v = next_var++;
        scopes[n.var].push_back(v);
        // A v phi  ==  not E v not phi; the inner negation is folded into
        // the body polarity, the outer one is applied after projection.
        std::vector<Cube> body = go(s, n.left, exist ? polarity : !polarity);
        scopes[n.var].pop_back();
        std::vector<Cube> projected = st.eliminate(body, v);
        return exist ? projected : st.dnf_not(projected);
      }
    }
    throw FolError("unreachable");
  }
};

}  // namespace detail

// Decides the truth of a closed sentence over (N,<).  Throws QeLimitError
// when the cube ceiling is exceeded; never returns a wrong verdict.
inline bool qe_decide(const FolFormula& s, std::size_t max_cubes = kDefaultQeCubeLimit) {
  if (!fol_free_vars(s).empty())
    throw FolError("qe_decide: sentence has free variables");
  detail::QeRun run{detail::QeState{max_cubes}, {}, 1};
  std::vector<detail::Cube> dnf = run.go(s, s.root(), true);
  // All variables are projected away, so surviving cubes are variable-free
  // and tautological.
  return !dnf.empty();
}

// ── decide_at ───────────────────────────────────────────────────────────────

// g,n |= f over (N,<), via H and quantifier elimination.  `assignment`
// interprets free state variables, `valuation` interprets nominals.
inline bool decide_at(const Formula& f, const std::map<std::string, int>& assignment,
                      const std::map<std::string, int>& valuation, int n,
                      std::size_t max_cubes = kDefaultQeCubeLimit) {
  Formula renamed = rename_apart(f);
  detail::HTranslator h = detail::make_h_translator(renamed);
  FolFormula body = h.go(renamed, renamed.root(), FolTerm::n(n));
  std::map<std::string, long long> values;
  for (const std::string& x : analyze(renamed).free_svars) {
    auto it = assignment.find(x);
    if (it == assignment.end())
      throw FolError("decide_at: missing assignment entry for '$" + x + "'");
    values[x] = it->second;
  }
  for (const auto& [nom, mangled] : h.nominal_names) {
    auto it = valuation.find(nom);
    if (it == valuation.end())
      throw FolError("decide_at: missing valuation entry for '#" + nom + "'");
    values[mangled] = it->second;
  }
  return qe_decide(fol_substitute(body, values), max_cubes);
}

inline bool decide_at(const Formula& f, const std::map<std::string, int>& assignment,
                      int n, std::size_t max_cubes = kDefaultQeCubeLimit) {
  return decide_at(f, assignment, {}, n, max_cubes);
}

}  // namespace hylosat

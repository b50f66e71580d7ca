// ============================================================================
// hylosat/reductions.hpp — encoders between source problems and hybrid logic
// ============================================================================
//
// QBF -> MHL(<>,[],down,@) over N, 3SAT -> MHL(<>), ORD -> MHL([],down,@),
// and prenex FOL(<,P) -> MHL(<>,[],down,@) over linear orders, together with
// brute-force oracles for the source problems and the two binder-elimination
// transformations (skolemization for the existential fragment, distance-based
// elimination for the @-free fragment).
//
// ============================================================================

#pragma once

#include <array>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hylosat/formula.hpp"

namespace hylosat {

// ── QBF ─────────────────────────────────────────────────────────────────────

enum class Quant { Exists, Forall };

// Prenex QBF; the matrix is in NNF (negation on atoms only).
struct QbfInstance {
  struct MNode {
    enum class Kind { Var, NegVar, And, Or } kind;
    std::string var;
    NodeId left = -1, right = -1;
  };
  std::vector<std::pair<Quant, std::string>> prefix;
  std::vector<MNode> matrix;  // preorder, root 0

  void validate() const {
    std::set<std::string> quantified;
    for (const auto& [q, v] : prefix) quantified.insert(v);
    for (const MNode& n : matrix)
      if ((n.kind == MNode::Kind::Var || n.kind == MNode::Kind::NegVar) &&
          !quantified.count(n.var))
        throw FragmentError("QBF is not closed: unquantified '" + n.var + "'");
  }
};

namespace detail {

// QBF text: quantifier prefix, then an NNF matrix over '&' '|' and literals.
struct QbfParser {
  std::string_view in;
  std::size_t pos = 0;
  std::vector<QbfInstance::MNode>* out = nullptr;

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

  NodeId add(QbfInstance::MNode n) {
    out->push_back(std::move(n));
    return static_cast<NodeId>(out->size() - 1);
  }

  // Builds nodes in preorder: reserve the parent slot before the children.
  // Nodes are appended children-first and relocated to preorder afterwards.
  NodeId disj() {
    NodeId l = conj();
    while (eat("|")) {
      NodeId r = conj();
      l = add({QbfInstance::MNode::Kind::Or, "", l, r});
    }
    return l;
  }
  NodeId conj() {
    NodeId l = unary();
    while (eat("&")) {
      NodeId r = unary();
      l = add({QbfInstance::MNode::Kind::And, "", l, r});
    }
    return l;
  }
  NodeId unary() {
    skip_ws();
    if (pos >= in.size()) fail("unexpected end of input");
    if (eat("!")) {
      skip_ws();
      if (eat("(")) fail("negation is allowed on atoms only");
      return add({QbfInstance::MNode::Kind::NegVar, name(), -1, -1});
    }
    if (eat("(")) {
      NodeId x = disj();
      if (!eat(")")) fail("expected ')'");
      return x;
    }
    if (eat("exists") || eat("forall")) fail("quantifier inside the matrix");
    return add({QbfInstance::MNode::Kind::Var, name(), -1, -1});
  }
};

}  // namespace detail

inline QbfInstance parse_qbf(std::string_view text) {
  QbfInstance q;
  detail::QbfParser p{text, 0, &q.matrix};
  for (;;) {
    if (p.eat("exists")) {
      std::string v = p.name();
      if (!p.eat(".")) p.fail("expected '.'");
      q.prefix.emplace_back(Quant::Exists, std::move(v));
    } else if (p.eat("forall")) {
      std::string v = p.name();
      if (!p.eat(".")) p.fail("expected '.'");
      q.prefix.emplace_back(Quant::Forall, std::move(v));
    } else {
      break;
    }
  }
  p.disj();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  // The parser appends parents after children; relocate so the root is 0.
  // Rebuild in preorder.
  QbfInstance fixed;
  fixed.prefix = q.prefix;
  auto rebuild = [&](auto&& self, NodeId id) -> NodeId {
    const QbfInstance::MNode n = q.matrix[id];
    NodeId slot = static_cast<NodeId>(fixed.matrix.size());
    fixed.matrix.push_back({n.kind, n.var, -1, -1});
    if (n.left >= 0) fixed.matrix[slot].left = self(self, n.left);
    if (n.right >= 0) fixed.matrix[slot].right = self(self, n.right);
    return slot;
  };
  rebuild(rebuild, static_cast<NodeId>(q.matrix.size() - 1));
  fixed.validate();
  return fixed;
}

// ── CNF (DIMACS) ────────────────────────────────────────────────────────────

// Exactly three literals per clause; literals are signed 1-based indices.
struct CnfInstance {
  int num_vars = 0;
  std::vector<std::array<int, 3>> clauses;

  void validate() const {
    for (const auto& c : clauses)
      for (int lit : c) {
        if (lit == 0 || std::abs(lit) > num_vars)
          throw FragmentError("literal out of range in CNF instance");
      }
  }
};

inline CnfInstance parse_dimacs(std::string_view text) {
  CnfInstance cnf;
  std::istringstream in{std::string(text)};
  std::string tok;
  bool have_header = false;
  std::vector<int> lits;
  while (in >> tok) {
    if (tok == "c") {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (tok == "p") {
      std::string kind;
      int nv = 0, nc = 0;
      if (!(in >> kind >> nv >> nc) || kind != "cnf")
        throw ParseError("malformed DIMACS header", 0);
      cnf.num_vars = nv;
      have_header = true;
      continue;
    }
    int lit = 0;
    try {
      lit = std::stoi(tok);
    } catch (const std::exception&) {
      throw ParseError("unexpected DIMACS token '" + tok + "'", 0);
    }
    if (lit == 0) {
      if (lits.size() != 3)
        throw FragmentError("DIMACS clause must have exactly 3 literals");
      cnf.clauses.push_back({lits[0], lits[1], lits[2]});
      lits.clear();
    } else {
      lits.push_back(lit);
    }
  }
  if (!have_header) throw ParseError("missing DIMACS header", 0);
  if (!lits.empty()) throw ParseError("unterminated DIMACS clause", 0);
  cnf.validate();
  return cnf;
}

// ── ORD ─────────────────────────────────────────────────────────────────────

// A directed line graph (V,S) with designated vertices s and t; the question
// is whether s <=_S t in the order induced by S.
struct OrdInstance {
  std::vector<std::string> vertices;
  std::vector<std::pair<std::string, std::string>> successor;
  std::string s, t;

  void validate() const {
    std::set<std::string> vs(vertices.begin(), vertices.end());
    if (vs.size() != vertices.size()) throw FragmentError("duplicate vertex");
    if (!vs.count(s) || !vs.count(t)) throw FragmentError("s or t not a vertex");
    std::map<std::string, std::string> succ;
    std::set<std::string> has_pred;
    for (const auto& [a, b] : successor) {
      if (!vs.count(a) || !vs.count(b)) throw FragmentError("edge endpoint not a vertex");
      if (!succ.emplace(a, b).second) throw FragmentError("vertex with two successors");
      if (!has_pred.insert(b).second) throw FragmentError("vertex with two predecessors");
    }
    if (successor.size() + 1 != vertices.size())
      throw FragmentError("successor relation does not form a single chain");
    // exactly one start, and the chain must reach every vertex
    std::string start;
    for (const std::string& v : vertices)
      if (!has_pred.count(v)) {
        if (!start.empty()) throw FragmentError("successor relation is disconnected");
        start = v;
      }
    if (start.empty()) throw FragmentError("successor relation has a cycle");
    std::set<std::string> seen;
    for (std::string v = start;;) {
      seen.insert(v);
      auto it = succ.find(v);
      if (it == succ.end()) break;
      v = it->second;
    }
    if (seen.size() != vertices.size())
      throw FragmentError("successor relation is disconnected");
  }
};

// ── FOL(<,P) ────────────────────────────────────────────────────────────────

// Prenex FOL over < and one unary predicate P; matrix in NNF.
struct FolPFormula {
  struct MNode {
    enum class Kind { Pred, NegPred, Less, NegLess, And, Or } kind;
    std::string x, y;
    NodeId left = -1, right = -1;
  };
  std::vector<std::pair<Quant, std::string>> prefix;
  std::vector<MNode> matrix;

  void validate() const {
    std::set<std::string> quantified;
    for (const auto& [q, v] : prefix) quantified.insert(v);
    for (const MNode& n : matrix) {
      switch (n.kind) {
        case MNode::Kind::Pred:
        case MNode::Kind::NegPred:
          if (!quantified.count(n.x))
            throw FragmentError("free variable '" + n.x + "' in FOL(<,P) input");
          break;
        case MNode::Kind::Less:
        case MNode::Kind::NegLess:
          if (!quantified.count(n.x) || !quantified.count(n.y))
            throw FragmentError("free variable in FOL(<,P) input");
          break;
        default:
          break;
      }
    }
  }
};

namespace detail {

struct FolPParser {
  std::string_view in;
  std::size_t pos = 0;
  std::vector<FolPFormula::MNode> nodes;

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }
  void skip_ws() {
    while (pos < in.size() && std::isspace(static_cast<unsigned char>(in[pos]))) ++pos;
  }
  bool eat(std::string_view tok) {
    skip_ws();
    if (in.substr(pos, tok.size()) == tok) {
      if (std::isalpha(static_cast<unsigned char>(tok.front())) &&
          std::islower(static_cast<unsigned char>(tok.front()))) {
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

  NodeId add(FolPFormula::MNode n) {
    nodes.push_back(std::move(n));
    return static_cast<NodeId>(nodes.size() - 1);
  }
  NodeId atom(bool negated) {
    using K = FolPFormula::MNode::Kind;
    skip_ws();
    if (eat("P")) {
      if (!eat("(")) fail("expected '('");
      std::string x = name();
      if (!eat(")")) fail("expected ')'");
      return add({negated ? K::NegPred : K::Pred, x, "", -1, -1});
    }
    std::string x = name();
    if (!eat("<")) fail("expected '<'");
    std::string y = name();
    return add({negated ? K::NegLess : K::Less, x, y, -1, -1});
  }
  NodeId disj() {
    NodeId l = conj();
    while (eat("|")) {
      NodeId r = conj();
      l = add({FolPFormula::MNode::Kind::Or, "", "", l, r});
    }
    return l;
  }
  NodeId conj() {
    NodeId l = unary();
    while (eat("&")) {
      NodeId r = unary();
      l = add({FolPFormula::MNode::Kind::And, "", "", l, r});
    }
    return l;
  }
  NodeId unary() {
    skip_ws();
    if (pos >= in.size()) fail("unexpected end of input");
    if (eat("!")) {
      skip_ws();
      if (pos < in.size() && in[pos] == '(') fail("negation is allowed on atoms only");
      return atom(true);
    }
    if (eat("(")) {
      NodeId x = disj();
      if (!eat(")")) fail("expected ')'");
      return x;
    }
    if (eat("exists") || eat("forall")) fail("input is not prenex");
    return atom(false);
  }
};

}  // namespace detail

inline FolPFormula parse_folp(std::string_view text) {
  FolPFormula f;
  detail::FolPParser p{text, 0, {}};
  for (;;) {
    if (p.eat("exists")) {
      std::string v = p.name();
      if (!p.eat(".")) p.fail("expected '.'");
      f.prefix.emplace_back(Quant::Exists, std::move(v));
    } else if (p.eat("forall")) {
      std::string v = p.name();
      if (!p.eat(".")) p.fail("expected '.'");
      f.prefix.emplace_back(Quant::Forall, std::move(v));
    } else {
      break;
    }
  }
  NodeId root = p.disj();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  // relocate so the root sits at index 0 (children were appended first)
  auto rebuild = [&](auto&& self, NodeId id) -> NodeId {
    const FolPFormula::MNode n = p.nodes[id];
    NodeId slot = static_cast<NodeId>(f.matrix.size());
    f.matrix.push_back({n.kind, n.x, n.y, -1, -1});
    if (n.left >= 0) f.matrix[slot].left = self(self, n.left);
    if (n.right >= 0) f.matrix[slot].right = self(self, n.right);
    return slot;
  };
  rebuild(rebuild, root);
  f.validate();
  return f;
}

// ── oracles ─────────────────────────────────────────────────────────────────

namespace detail {

inline bool qbf_matrix_eval(const QbfInstance& q, NodeId id,
                            const std::map<std::string, bool>& env) {
  const QbfInstance::MNode& n = q.matrix[id];
  using K = QbfInstance::MNode::Kind;
  switch (n.kind) {
    case K::Var: return env.at(n.var);
    case K::NegVar: return !env.at(n.var);
    case K::And: return qbf_matrix_eval(q, n.left, env) && qbf_matrix_eval(q, n.right, env);
    case K::Or: return qbf_matrix_eval(q, n.left, env) || qbf_matrix_eval(q, n.right, env);
  }
  return false;
}

inline bool qbf_eval_rec(const QbfInstance& q, std::size_t depth,
                         std::map<std::string, bool>& env) {
  if (depth == q.prefix.size()) return qbf_matrix_eval(q, 0, env);
  const auto& [quant, var] = q.prefix[depth];
  for (bool v : {false, true}) {
    env[var] = v;
    bool r = qbf_eval_rec(q, depth + 1, env);
    if (quant == Quant::Exists && r) return true;
    if (quant == Quant::Forall && !r) return false;
  }
  return quant == Quant::Forall;
}

}  // namespace detail

// Recursive expansion.
inline bool oracle_eval(const QbfInstance& q) {
  if (q.prefix.size() > 12) throw FragmentError("QBF oracle limited to 12 variables");
  std::map<std::string, bool> env;
  return detail::qbf_eval_rec(q, 0, env);
}

// Assignment enumeration.
inline bool oracle_eval(const CnfInstance& c) {
  if (c.num_vars > 16) throw FragmentError("CNF oracle limited to 16 variables");
  for (unsigned long a = 0; a < (1ul << c.num_vars); ++a) {
    bool all = true;
    for (const auto& clause : c.clauses) {
      bool any = false;
      for (int lit : clause) {
        bool v = (a >> (std::abs(lit) - 1)) & 1;
        if (lit < 0) v = !v;
        any = any || v;
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return c.clauses.empty();
}

// Chain walk: s <=_S t.
inline bool oracle_eval(const OrdInstance& o) {
  o.validate();
  if (o.s == o.t) return true;
  std::map<std::string, std::string> succ(o.successor.begin(), o.successor.end());
  for (std::string v = o.s;;) {
    auto it = succ.find(v);
    if (it == succ.end()) return false;
    v = it->second;
    if (v == o.t) return true;
  }
}

// ── encode_qbf ──────────────────────────────────────────────────────────────

namespace detail {

inline Formula qbf_h(const QbfInstance& q, NodeId id,
                     const std::map<std::string, std::string>& rename) {
  const QbfInstance::MNode& n = q.matrix[id];
  using K = QbfInstance::MNode::Kind;
  switch (n.kind) {
    case K::Var: return Formula::at_var("s", Formula::svar(rename.at(n.var)));
    case K::NegVar:
      return Formula::at_var("s", Formula::diamond(Formula::svar(rename.at(n.var))));
    case K::And:
      return Formula::conj(qbf_h(q, n.left, rename), qbf_h(q, n.right, rename));
    case K::Or:
      return Formula::disj(qbf_h(q, n.left, rename), qbf_h(q, n.right, rename));
  }
  throw FragmentError("unreachable");
}

}  // namespace detail

// f : phi |-> down r. <> down s. <> h(phi), with
//   h(E xk psi) = @r <> down xk. h(psi)     h(xk)  = @s xk
//   h(A xk psi) = @r [] down xk. h(psi)     h(!xk) = @s <> xk
// The k-th prefix variable is renamed to x<k>.
inline Formula encode_qbf(const QbfInstance& q) {
  q.validate();
  std::map<std::string, std::string> rename;
  for (std::size_t k = 0; k < q.prefix.size(); ++k)
    rename[q.prefix[k].second] = "x" + std::to_string(k);
  Formula body = detail::qbf_h(q, 0, rename);
  for (std::size_t k = q.prefix.size(); k-- > 0;) {
    const auto& [quant, var] = q.prefix[k];
    Formula bound = Formula::down(rename.at(var), std::move(body));
    body = quant == Quant::Exists
               ? Formula::at_var("r", Formula::diamond(std::move(bound)))
               : Formula::at_var("r", Formula::box(std::move(bound)));
  }
  return Formula::down(
      "r", Formula::diamond(Formula::down("s", Formula::diamond(std::move(body)))));
}

// ── encode_3sat ─────────────────────────────────────────────────────────────

// f : phi |-> <>(i0 & <>i1)  &  AND_l (<>(i0 & xl) | <>(i1 & xl))  &  h(phi)
// with h(c) = <>(h(l1) | h(l2) | h(l3)), h(x) = (i1 & x), h(!x) = (i0 & x);
// every atom is a nominal.
inline Formula encode_3sat(const CnfInstance& c) {
  c.validate();
  auto var_nom = [](int v) { return Formula::nominal("x" + std::to_string(v)); };
  std::vector<Formula> parts;
  parts.push_back(Formula::diamond(
      Formula::conj(Formula::nominal("i0"), Formula::diamond(Formula::nominal("i1")))));
  for (int v = 1; v <= c.num_vars; ++v)
    parts.push_back(Formula::disj(
        Formula::diamond(Formula::conj(Formula::nominal("i0"), var_nom(v))),
        Formula::diamond(Formula::conj(Formula::nominal("i1"), var_nom(v)))));
  for (const auto& clause : c.clauses) {
    std::vector<Formula> lits;
    for (int lit : clause)
      lits.push_back(Formula::conj(Formula::nominal(lit > 0 ? "i1" : "i0"),
                                   var_nom(std::abs(lit))));
    parts.push_back(Formula::diamond(Formula::disj_all(std::move(lits))));
  }
  return Formula::conj_all(std::move(parts));
}

// ── encode_ord ──────────────────────────────────────────────────────────────

// phi = down v0...down vn (all vertices except s) . [] down s . alpha^n @s t
// where alpha is the chain of @vk down vl for (vk,vl) in S with vl != s,
// and n = |V| - 1.
inline Formula encode_ord(const OrdInstance& o) {
  o.validate();
  Formula body = Formula::at_var(o.s, Formula::svar(o.t));
  std::vector<std::pair<std::string, std::string>> alpha;
  for (const auto& [a, b] : o.successor)
    if (b != o.s) alpha.emplace_back(a, b);
  int n = static_cast<int>(o.vertices.size()) - 1;
  for (int rep = 0; rep < n; ++rep)
    for (auto it = alpha.rbegin(); it != alpha.rend(); ++it)
      body = Formula::at_var(it->first, Formula::down(it->second, std::move(body)));
  body = Formula::box(Formula::down(o.s, std::move(body)));
  for (auto it = o.vertices.rbegin(); it != o.vertices.rend(); ++it)
    if (*it != o.s) body = Formula::down(*it, std::move(body));
  return body;
}

// ── encode_folp ─────────────────────────────────────────────────────────────

namespace detail {

// Macro library for the FOL(<,P) reduction.  Every use draws fresh bound
// variables from the counter; `a` is the free anchor variable.
struct FolPMacros {
  std::set<std::string> used;
  int counter = 0;

  std::string fresh(const char* base) {
    for (;;) {
      std::string cand = std::string(base) + std::to_string(++counter);
      if (!used.count(cand)) return cand;
    }
  }

  static Formula sv(const std::string& x) { return Formula::svar(x); }
  static Formula at(const std::string& x, Formula f) {
    return Formula::at_var(x, std::move(f));
  }

  // all successors of x are equal to, or after, y
  Formula dir_suc(const std::string& x, const std::string& y) {
    std::string z = fresh("z");
    return at(x, Formula::box(Formula::down(
                     z, Formula::disj(at(y, sv(z)), at(y, Formula::diamond(sv(z)))))));
  }

  // every r after a is after x, equal to x, or at least two before x
  Formula no_dir_pred(const std::string& x) {
    std::string r = fresh("r");
    return at("a", Formula::box(Formula::down(
                       r, Formula::disj_all({at(x, Formula::diamond(sv(r))), at(x, sv(r)),
                                             at(r, Formula::diamond(Formula::diamond(
                                                       sv(x))))}))));
  }

  Formula dir_pred(const std::string& x) {
    std::string r = fresh("r");
    return at("a", Formula::diamond(Formula::down(r, dir_suc(r, x))));
  }

  Formula dense(const std::string& x, const std::string& y) {
    std::string r = fresh("r");
    return at(x, Formula::box(Formula::down(
                     r, Formula::disj(at(y, Formula::diamond(sv(r))), no_dir_pred(r)))));
  }

  Formula sep(const std::string& x) {
    std::string r = fresh("r");
    return at(x, Formula::diamond(Formula::down(r, dense(x, r))));
  }

  Formula neg(const std::string& x) {
    std::string r = fresh("r");
    return Formula::conj(
        at(x, Formula::diamond(Formula::down(r, Formula::conj(dir_suc(x, r), sep(r))))),
        no_dir_pred(x));
  }

  Formula pos(const std::string& x) {
    std::string r = fresh("r");
    std::string s = fresh("s");
    return Formula::conj(
        at(x, Formula::diamond(Formula::down(
                  r, Formula::conj(dir_suc(x, r),
                                   Formula::diamond(Formula::down(
                                       s, Formula::conj(dir_suc(r, s), sep(s)))))))),
        no_dir_pred(x));
  }

  Formula sep_m(const std::string& x) {
    std::string r = fresh("r");
    return at(x, Formula::diamond(Formula::down(
                     r, Formula::conj(dense(x, r), Formula::disj(neg(r), pos(r))))));
  }

  // a is in a separator that ends with a marker
  Formula psi1() { return sep_m("a"); }

  // every marker has a direct successor marker (four-disjunct reading)
  Formula psi2() {
    std::string r = fresh("r");
    std::string s1 = fresh("s");
    std::string s2 = fresh("s");
    std::string t1 = fresh("t");
    std::string s3 = fresh("s");
    std::string t2 = fresh("t");
    Formula d1 = sep_m(r);
    Formula d2 = Formula::conj(
        neg(r), Formula::diamond(Formula::down(
                    s1, Formula::conj(dir_suc(r, s1), sep_m(s1)))));
    Formula d3 = Formula::conj(
        pos(r),
        Formula::diamond(Formula::down(
            s2, Formula::conj(dir_suc(r, s2),
                              Formula::diamond(Formula::down(
                                  t1, Formula::conj(dir_suc(s2, t1), sep_m(t1))))))));
    Formula d4 = Formula::conj(
        at("a", Formula::diamond(Formula::down(
                    s3, Formula::conj(dir_suc(s3, r), pos(s3))))),
        Formula::diamond(
            Formula::down(t2, Formula::conj(dir_suc(r, t2), sep_m(t2)))));
    return at("a", Formula::box(Formula::down(
                       r, Formula::disj_all({std::move(d1), std::move(d2), std::move(d3),
                                             std::move(d4)}))));
  }

  Formula translate(const FolPFormula& f, NodeId id) {
    const FolPFormula::MNode& n = f.matrix[id];
    using K = FolPFormula::MNode::Kind;
    switch (n.kind) {
      case K::Pred: return pos(n.x);
      case K::NegPred: return neg(n.x);
      case K::Less: return at(n.x, Formula::diamond(sv(n.y)));
      case K::NegLess:
        return Formula::disj(at(n.x, sv(n.y)), at(n.y, Formula::diamond(sv(n.x))));
      case K::And:
      case K::Or: {
        Formula l = translate(f, n.left);
        Formula r = translate(f, n.right);
        return n.kind == K::And ? Formula::conj(std::move(l), std::move(r))
                                : Formula::disj(std::move(l), std::move(r));
      }
    }
    throw FragmentError("unreachable");
  }

  Formula quantify(const FolPFormula& f, std::size_t depth) {
    if (depth == f.prefix.size()) return translate(f, 0);
    const auto& [quant, var] = f.prefix[depth];
    Formula body = quantify(f, depth + 1);
    if (quant == Quant::Exists)
      return at("a", Formula::diamond(Formula::down(
                         var, Formula::conj(Formula::disj(neg(var), pos(var)),
                                            std::move(body)))));
    return at("a", Formula::box(Formula::down(
                       var, Formula::disj_all({sep(var), dir_pred(var), std::move(body)}))));
  }
};

}  // namespace detail

// g(phi) = psi1 & psi2 & f(phi): markers of length 2 or 3 separated by dense
// intervals encode the predicate P along a linear order; `a` is the single
// free anchor variable.
inline Formula encode_folp(const FolPFormula& f) {
  f.validate();
  detail::FolPMacros m;
  m.used.insert("a");
  for (const auto& [q, v] : f.prefix) {
    if (v == "a") throw FragmentError("input variable 'a' collides with the anchor");
    m.used.insert(v);
  }
  Formula psi1 = m.psi1();
  Formula psi2 = m.psi2();
  return Formula::conj(Formula::conj(std::move(psi1), std::move(psi2)),
                       m.quantify(f, 0));
}

// ── skolemize ───────────────────────────────────────────────────────────────

namespace detail {

struct Skolemizer {
  std::set<std::string> taken;  // nominal names already in use
  std::map<std::string, std::string> nominal_for;

  std::string fresh_for(const std::string& var) {
    auto it = nominal_for.find(var);
    if (it != nominal_for.end()) return it->second;
    std::string cand = "i" + var;
    for (int k = 1; taken.count(cand); ++k) cand = "i" + var + std::to_string(k);
    taken.insert(cand);
    nominal_for.emplace(var, cand);
    return cand;
  }

  Formula go(const Formula& f, NodeId id) {
    const Node& n = f.node(id);
    switch (n.op) {
      case Op::Prop: return Formula::prop(n.name);
      case Op::Nominal: return Formula::nominal(n.name);
      case Op::SVar: return Formula::nominal(fresh_for(n.name));
      case Op::Top: return Formula::top();
      case Op::Bottom: return Formula::bottom();
      case Op::And:
      case Op::Or: {
        Formula l = go(f, n.left);
        Formula r = go(f, n.right);
        return n.op == Op::And ? Formula::conj(std::move(l), std::move(r))
                               : Formula::disj(std::move(l), std::move(r));
      }
      case Op::Diamond: return Formula::diamond(go(f, n.left));
      case Op::At: {
        Formula body = go(f, n.left);
        return n.at_svar ? Formula::at_nom(fresh_for(n.name), std::move(body))
                         : Formula::at_nom(n.name, std::move(body));
      }
      case Op::Down:
        return Formula::conj(Formula::nominal(fresh_for(n.name)), go(f, n.left));
      case Op::Box:
        throw FragmentError("skolemize: [] is outside the existential fragment");
      case Op::Neg:
        throw FragmentError("skolemize: formula contains negation");
    }
    throw FragmentError("unreachable");
  }
};

}  // namespace detail

// down x.psi  |->  (#ix & psi[x -> #ix]) with a fresh nominal per variable;
// free state variables become fresh nominals too.  Valid for (<>,down,@)
// only; the output fragment is (<>,@).  Expects a renamed-apart formula.
inline Formula skolemize(const Formula& f) {
  detail::Skolemizer sk;
  for (const Node& n : f.nodes())
    if (n.op == Op::Nominal || (n.op == Op::At && !n.at_svar)) sk.taken.insert(n.name);
  return sk.go(f, f.root());
}

// ── eliminate_down_no_at ────────────────────────────────────────────────────

namespace detail {

// modal_between[x] counts <>/[] operators crossed since x's binder.
inline Formula eliminate_down_rec(const Formula& f, NodeId id,
                                  std::map<std::string, int>& modal_between) {
  const Node& n = f.node(id);
  switch (n.op) {
    case Op::Prop: return Formula::prop(n.name);
    case Op::Top: return Formula::top();
    case Op::Bottom: return Formula::bottom();
    case Op::SVar: {
      auto it = modal_between.find(n.name);
      if (it == modal_between.end()) return Formula::svar(n.name);  // free: keep
      return it->second == 0 ? Formula::top() : Formula::bottom();
    }
    case Op::And:
      return Formula::conj(eliminate_down_rec(f, n.left, modal_between),
                           eliminate_down_rec(f, n.right, modal_between));
    case Op::Or:
      return Formula::disj(eliminate_down_rec(f, n.left, modal_between),
                           eliminate_down_rec(f, n.right, modal_between));
    case Op::Diamond:
    case Op::Box: {
      for (auto& [var, dist] : modal_between) ++dist;
      Formula body = eliminate_down_rec(f, n.left, modal_between);
      for (auto& [var, dist] : modal_between) --dist;
      return n.op == Op::Diamond ? Formula::diamond(std::move(body))
                                 : Formula::box(std::move(body));
    }
    case Op::Down: {
      modal_between[n.name] = 0;
      Formula body = eliminate_down_rec(f, n.left, modal_between);
      modal_between.erase(n.name);
      return body;
    }
    case Op::At: throw FragmentError("eliminate_down_no_at: @ present");
    case Op::Nominal: throw FragmentError("eliminate_down_no_at: nominal present");
    case Op::Neg: throw FragmentError("eliminate_down_no_at: negation present");
  }
  throw FragmentError("unreachable");
}

}  // namespace detail

// Removes binders from (<>,[],down)-formulas.  A bound occurrence evaluates
// at its binding state exactly when no modal operator separates it from its
// binder (evaluation on irreflexive transitive orders only moves strictly
// forward), so it resolves to true at distance zero and false otherwise.
// Free state variables stay: like nominals, they name one existentially
// chosen state, which no constant can express.  Expects a renamed-apart,
// nominal-free formula.
inline Formula eliminate_down_no_at(const Formula& f) {
  std::map<std::string, int> modal_between;
  return detail::eliminate_down_rec(f, f.root(), modal_between);
}

}  // namespace hylosat

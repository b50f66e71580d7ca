// ============================================================================
// hylosat/formula.hpp — hybrid-logic formulas
// ============================================================================
//
// Syntax tree, concrete syntax (parser + canonical printer), and the static
// analyses shared by every decision procedure.
//
// A Formula is an immutable pool of nodes stored in preorder; a NodeId is the
// index of a node in that pool, so ids are unique and preorder-contiguous
// from 0 at the root.  @-targets are stored on the At node itself (they are
// not child nodes and carry no NodeId of their own).
//
// Concrete syntax:
//
//   formula := disj
//   disj    := conj ('|' conj)*
//   conj    := unary ('&' unary)*
//   unary   := 'true' | 'false' | atom | '<>' unary | '[]' unary | '!' unary
//            | 'down' NAME '.' unary | '@' target unary | '(' formula ')'
//   atom    := PROP | '#'NAME | '$'NAME
//   target  := '$'NAME | '#'NAME | NAME          (bare NAME reads as a state
//                                                 variable, as in "@x $y")
//   PROP, NAME := [a-z][a-z0-9_]*
//
// The canonical printer writes '@$x' / '@#i' targets with their sigil and
// parenthesizes every binary connective, so parse(print(f)) == f.
//
// ============================================================================

#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hylosat {

// ── errors ──────────────────────────────────────────────────────────────────

// Concrete-syntax error; `offset` is the byte position in the input.
struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(std::string msg, std::size_t off)
      : std::runtime_error(std::move(msg)), offset(off) {}
};

// Operation applied outside its fragment (negation in a monotone pipeline,
// a forbidden operator, a malformed argument).
struct FragmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ── nodes ───────────────────────────────────────────────────────────────────

using NodeId = int;

enum class Op {
  Prop,     // atomic proposition, `name`
  Nominal,  // nominal, `name`
  SVar,     // state variable, `name`
  Top,
  Bottom,
  Neg,      // child: left
  And,      // children: left, right
  Or,       // children: left, right
  Diamond,  // child: left
  Box,      // child: left
  Down,     // binder for `name`; child: left
  At        // jump to `name` (state variable iff at_svar); child: left
};

struct Node {
  Op op;
  std::string name;      // atom name, bound variable, or @-target
  bool at_svar = false;  // At only: target is a state variable
  NodeId left = -1;
  NodeId right = -1;
};

inline bool is_atom(Op op) {
  return op == Op::Prop || op == Op::Nominal || op == Op::SVar;
}
inline bool is_binary(Op op) { return op == Op::And || op == Op::Or; }
inline bool is_modal(Op op) { return op == Op::Diamond || op == Op::Box; }

// ── Formula ─────────────────────────────────────────────────────────────────

class Formula {
 public:
  Formula() = default;

  NodeId root() const { return 0; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Node>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }

  // Structural equality.  NodeIds are positional, so comparing the node
  // sequences compares the trees.
  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.nodes_.size() != b.nodes_.size()) return false;
    for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
      const Node& x = a.nodes_[i];
      const Node& y = b.nodes_[i];
      if (x.op != y.op || x.name != y.name || x.at_svar != y.at_svar ||
          x.left != y.left || x.right != y.right)
        return false;
    }
    return true;
  }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
  friend bool operator<(const Formula& a, const Formula& b) {
    return a.key() < b.key();
  }

  // builders -----------------------------------------------------------------

  static Formula prop(std::string n) { return leaf(Op::Prop, std::move(n)); }
  static Formula nominal(std::string n) { return leaf(Op::Nominal, std::move(n)); }
  static Formula svar(std::string n) { return leaf(Op::SVar, std::move(n)); }
  static Formula top() { return leaf(Op::Top, ""); }
  static Formula bottom() { return leaf(Op::Bottom, ""); }

  static Formula neg(Formula f) { return unary(Op::Neg, std::move(f)); }
  static Formula diamond(Formula f) { return unary(Op::Diamond, std::move(f)); }
  static Formula box(Formula f) { return unary(Op::Box, std::move(f)); }
  static Formula down(std::string x, Formula f) {
    return unary(Op::Down, std::move(f), std::move(x));
  }
  static Formula at_var(std::string x, Formula f) {
    return unary(Op::At, std::move(f), std::move(x), true);
  }
  static Formula at_nom(std::string i, Formula f) {
    return unary(Op::At, std::move(f), std::move(i), false);
  }

  static Formula conj(Formula l, Formula r) {
    return binary(Op::And, std::move(l), std::move(r));
  }
  static Formula disj(Formula l, Formula r) {
    return binary(Op::Or, std::move(l), std::move(r));
  }

  // Left-associated chain; requires a nonempty list.
  static Formula conj_all(std::vector<Formula> fs) { return fold(Op::And, std::move(fs)); }
  static Formula disj_all(std::vector<Formula> fs) { return fold(Op::Or, std::move(fs)); }

  // The subtree rooted at `id`, as its own Formula.
  Formula subtree(NodeId id) const {
    Formula out;
    NodeId e = end(id);
    out.nodes_.reserve(e - id);
    for (NodeId i = id; i < e; ++i) {
      Node n = nodes_[i];
      if (n.left >= 0) n.left -= id;
      if (n.right >= 0) n.right -= id;
      out.nodes_.push_back(std::move(n));
    }
    return out;
  }

  // One past the last NodeId of the subtree rooted at `id`.
  NodeId end(NodeId id) const {
    const Node& n = nodes_.at(id);
    if (n.right >= 0) return end(n.right);
    if (n.left >= 0) return end(n.left);
    return id + 1;
  }

 private:
  std::vector<Node> nodes_;

  static Formula leaf(Op op, std::string name) {
    Formula f;
    f.nodes_.push_back(Node{op, std::move(name), false, -1, -1});
    return f;
  }

  static Formula unary(Op op, Formula child, std::string name = "",
                       bool at_svar = false) {
    Formula f;
    f.nodes_.reserve(child.nodes_.size() + 1);
    f.nodes_.push_back(Node{op, std::move(name), at_svar, 1, -1});
    f.splice(std::move(child));
    return f;
  }

  static Formula binary(Op op, Formula l, Formula r) {
    Formula f;
    f.nodes_.reserve(l.nodes_.size() + r.nodes_.size() + 1);
    NodeId right = 1 + static_cast<NodeId>(l.nodes_.size());
    f.nodes_.push_back(Node{op, "", false, 1, right});
    f.splice(std::move(l));
    f.splice(std::move(r));
    return f;
  }

  static Formula fold(Op op, std::vector<Formula> fs) {
    if (fs.empty()) throw FragmentError("empty connective chain");
    Formula acc = std::move(fs.front());
    for (std::size_t i = 1; i < fs.size(); ++i)
      acc = binary(op, std::move(acc), std::move(fs[i]));
    return acc;
  }

  void splice(Formula child) {
    NodeId off = static_cast<NodeId>(nodes_.size());
    for (Node& n : child.nodes_) {
      if (n.left >= 0) n.left += off;
      if (n.right >= 0) n.right += off;
      nodes_.push_back(std::move(n));
    }
  }

  // Total order key, for use in std::map / std::set.
  std::vector<std::tuple<int, std::string, bool, int, int>> key() const {
    std::vector<std::tuple<int, std::string, bool, int, int>> k;
    k.reserve(nodes_.size());
    for (const Node& n : nodes_)
      k.emplace_back(static_cast<int>(n.op), n.name, n.at_svar, n.left, n.right);
    return k;
  }
};

// Parent of every node (-1 at the root).
inline std::vector<NodeId> parents(const Formula& f) {
  std::vector<NodeId> p(f.size(), -1);
  for (NodeId i = 0; i < f.size(); ++i) {
    const Node& n = f.node(i);
    if (n.left >= 0) p[n.left] = i;
    if (n.right >= 0) p[n.right] = i;
  }
  return p;
}

// ── parser ──────────────────────────────────────────────────────────────────

namespace detail {

struct Parser {
  std::string_view in;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  void skip_ws() {
    while (pos < in.size() && std::isspace(static_cast<unsigned char>(in[pos]))) ++pos;
  }

  bool eat(std::string_view tok) {
    skip_ws();
    if (in.substr(pos, tok.size()) == tok) {
      // A keyword must not run into a longer identifier.
      if (std::isalpha(static_cast<unsigned char>(tok.front()))) {
        std::size_t after = pos + tok.size();
        if (after < in.size() && is_name_char(in[after])) return false;
      }
      pos += tok.size();
      return true;
    }
    return false;
  }

  static bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  }

  std::string name() {
    skip_ws();
    if (pos >= in.size() || !(in[pos] >= 'a' && in[pos] <= 'z'))
      fail("expected a name");
    std::size_t start = pos;
    while (pos < in.size() && is_name_char(in[pos])) ++pos;
    return std::string(in.substr(start, pos - start));
  }

  Formula formula() {
    Formula f = conj();
    while (eat("|")) f = Formula::disj(std::move(f), conj());
    return f;
  }

  Formula conj() {
    Formula f = unary();
    while (eat("&")) f = Formula::conj(std::move(f), unary());
    return f;
  }

  Formula unary() {
    skip_ws();
    if (pos >= in.size()) fail("unexpected end of input");
    if (eat("true")) return Formula::top();
    if (eat("false")) return Formula::bottom();
    if (eat("<>")) return Formula::diamond(unary());
    if (eat("[]")) return Formula::box(unary());
    if (eat("!")) return Formula::neg(unary());
    if (eat("down")) {
      std::string x = name();
      skip_ws();
      if (!eat(".")) fail("expected '.' after 'down " + x + "'");
      return Formula::down(std::move(x), unary());
    }
    if (eat("@")) {
      skip_ws();
      bool nominal_target = eat("#");
      if (!nominal_target) eat("$");  // bare targets read as state variables
      std::string t = name();
      Formula body = unary();
      return nominal_target ? Formula::at_nom(std::move(t), std::move(body))
                            : Formula::at_var(std::move(t), std::move(body));
    }
    if (eat("(")) {
      Formula f = formula();
      if (!eat(")")) fail("expected ')'");
      return f;
    }
    if (eat("#")) return Formula::nominal(name());
    if (eat("$")) return Formula::svar(name());
    char c = in[pos];
    if (c >= 'a' && c <= 'z') return Formula::prop(name());
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      fail(std::string("unknown sigil '") + c + "'");
    fail("expected a formula");
  }
};

}  // namespace detail

inline Formula parse(std::string_view text) {
  detail::Parser p{text};
  Formula f = p.formula();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return f;
}

// ── printer ─────────────────────────────────────────────────────────────────

namespace detail {

inline void print_node(const Formula& f, NodeId id, std::string& out) {
  const Node& n = f.node(id);
  switch (n.op) {
    case Op::Prop: out += n.name; return;
    case Op::Nominal: out += '#'; out += n.name; return;
    case Op::SVar: out += '$'; out += n.name; return;
    case Op::Top: out += "true"; return;
    case Op::Bottom: out += "false"; return;
    case Op::Neg: out += "! "; print_node(f, n.left, out); return;
    case Op::Diamond: out += "<> "; print_node(f, n.left, out); return;
    case Op::Box: out += "[] "; print_node(f, n.left, out); return;
    case Op::Down:
      out += "down ";
      out += n.name;
      out += ". ";
      print_node(f, n.left, out);
      return;
    case Op::At:
      out += '@';
      out += n.at_svar ? '$' : '#';
      out += n.name;
      out += ' ';
      print_node(f, n.left, out);
      return;
    case Op::And:
    case Op::Or:
      out += '(';
      print_node(f, n.left, out);
      out += n.op == Op::And ? " & " : " | ";
      print_node(f, n.right, out);
      out += ')';
      return;
  }
}

}  // namespace detail

inline std::string print(const Formula& f) {
  std::string out;
  detail::print_node(f, f.root(), out);
  return out;
}

// ── analyses ────────────────────────────────────────────────────────────────

// Which modal/hybrid operators a formula uses, plus the atom kinds.
struct FragmentSignature {
  bool has_diamond = false;
  bool has_box = false;
  bool has_down = false;
  bool has_at = false;
  bool monotone = true;
  bool uses_props = false;
  bool uses_nominals = false;

  bool operators_subset_of(bool dia, bool box, bool dna, bool at) const {
    return (!has_diamond || dia) && (!has_box || box) && (!has_down || dna) &&
           (!has_at || at);
  }
  friend bool operator==(const FragmentSignature&, const FragmentSignature&) = default;
};

struct Analysis {
  FragmentSignature signature;
  int modal_depth = 0;
  std::set<std::string> free_svars;
};

namespace detail {

inline int analyze_rec(const Formula& f, NodeId id, Analysis& a,
                       std::set<std::string>& bound) {
  const Node& n = f.node(id);
  switch (n.op) {
    case Op::Prop:
      a.signature.uses_props = true;
      return 0;
    case Op::Nominal:
      a.signature.uses_nominals = true;
      return 0;
    case Op::SVar:
      if (!bound.count(n.name)) a.free_svars.insert(n.name);
      return 0;
    case Op::Top:
    case Op::Bottom:
      return 0;
    case Op::Neg:
      a.signature.monotone = false;
      return analyze_rec(f, n.left, a, bound);
    case Op::And:
    case Op::Or:
      return std::max(analyze_rec(f, n.left, a, bound),
                      analyze_rec(f, n.right, a, bound));
    case Op::Diamond:
      a.signature.has_diamond = true;
      return 1 + analyze_rec(f, n.left, a, bound);
    case Op::Box:
      a.signature.has_box = true;
      return 1 + analyze_rec(f, n.left, a, bound);
    case Op::Down: {
      a.signature.has_down = true;
      bool fresh = bound.insert(n.name).second;
      int d = analyze_rec(f, n.left, a, bound);
      if (fresh) bound.erase(n.name);
      return d;
    }
    case Op::At:
      a.signature.has_at = true;
      if (n.at_svar && !bound.count(n.name)) a.free_svars.insert(n.name);
      else if (!n.at_svar) a.signature.uses_nominals = true;
      return analyze_rec(f, n.left, a, bound);
  }
  return 0;
}

}  // namespace detail

// Operator signature, modal depth (nesting of <> and []; down/@ contribute 0)
// and free state variables.  @-subscripts count as occurrences.
inline Analysis analyze(const Formula& f) {
  Analysis a;
  std::set<std::string> bound;
  a.modal_depth = detail::analyze_rec(f, f.root(), a, bound);
  return a;
}

inline int modal_depth(const Formula& f) { return analyze(f).modal_depth; }

// ── rename_apart ────────────────────────────────────────────────────────────

namespace detail {

struct Renamer {
  std::set<std::string> used;       // every name that may not be re-issued
  std::set<std::string> free_vars;  // variables with a free occurrence

  std::string fresh(const std::string& base) {
    for (int k = 1;; ++k) {
      std::string cand = base + std::to_string(k);
      if (used.insert(cand).second) return cand;
    }
  }

  Formula rebuild(const Formula& f, NodeId id,
                  std::vector<std::pair<std::string, std::string>>& scope) {
    const Node& n = f.node(id);
    auto resolve = [&](const std::string& x) -> std::string {
      for (auto it = scope.rbegin(); it != scope.rend(); ++it)
        if (it->first == x) return it->second;
      return x;
    };
    switch (n.op) {
      case Op::Prop: return Formula::prop(n.name);
      case Op::Nominal: return Formula::nominal(n.name);
      case Op::SVar: return Formula::svar(resolve(n.name));
      case Op::Top: return Formula::top();
      case Op::Bottom: return Formula::bottom();
      case Op::Neg: return Formula::neg(rebuild(f, n.left, scope));
      case Op::Diamond: return Formula::diamond(rebuild(f, n.left, scope));
      case Op::Box: return Formula::box(rebuild(f, n.left, scope));
      case Op::And:
      case Op::Or: {
        Formula l = rebuild(f, n.left, scope);
        Formula r = rebuild(f, n.right, scope);
        return n.op == Op::And ? Formula::conj(std::move(l), std::move(r))
                               : Formula::disj(std::move(l), std::move(r));
      }
      case Op::At: {
        std::string t = n.at_svar ? resolve(n.name) : n.name;
        Formula body = rebuild(f, n.left, scope);
        return n.at_svar ? Formula::at_var(std::move(t), std::move(body))
                         : Formula::at_nom(std::move(t), std::move(body));
      }
      case Op::Down: {
        std::string nn = n.name;
        if (free_vars.count(nn) || issued_binders.count(nn)) nn = fresh(nn);
        issued_binders.insert(nn);
        used.insert(nn);
        scope.emplace_back(n.name, nn);
        Formula body = rebuild(f, n.left, scope);
        scope.pop_back();
        return Formula::down(std::move(nn), std::move(body));
      }
    }
    throw FragmentError("unreachable");
  }

  std::set<std::string> issued_binders;
};

}  // namespace detail

// Renames binders so that no state variable is bound twice and no variable
// occurs both free and bound.  Semantics-preserving.
inline Formula rename_apart(const Formula& f) {
  detail::Renamer r;
  for (const Node& n : f.nodes()) {
    if (n.op == Op::SVar || n.op == Op::Down || (n.op == Op::At && n.at_svar))
      r.used.insert(n.name);
  }
  r.free_vars = analyze(f).free_svars;
  std::vector<std::pair<std::string, std::string>> scope;
  return r.rebuild(f, f.root(), scope);
}

// ── normalize_monotone ──────────────────────────────────────────────────────

namespace detail {

inline Formula normalize_rec(const Formula& f, NodeId id, bool binder_mode,
                             std::map<std::string, std::string>& nom_map,
                             std::set<std::string>& taken) {
  const Node& n = f.node(id);
  auto svar_for = [&](const std::string& i) -> std::string {
    auto it = nom_map.find(i);
    if (it != nom_map.end()) return it->second;
    std::string cand = "v" + i;
    for (int k = 1; taken.count(cand); ++k) cand = "v" + i + std::to_string(k);
    taken.insert(cand);
    nom_map.emplace(i, cand);
    return cand;
  };
  switch (n.op) {
    case Op::Prop: return Formula::top();
    case Op::Nominal:
      return binder_mode ? Formula::svar(svar_for(n.name)) : Formula::nominal(n.name);
    case Op::SVar: return Formula::svar(n.name);
    case Op::Top: return Formula::top();
    case Op::Bottom: return Formula::bottom();
    case Op::Neg: throw FragmentError("normalize_monotone: formula contains negation");
    case Op::And:
    case Op::Or: {
      Formula l = normalize_rec(f, n.left, binder_mode, nom_map, taken);
      Formula r = normalize_rec(f, n.right, binder_mode, nom_map, taken);
      return n.op == Op::And ? Formula::conj(std::move(l), std::move(r))
                             : Formula::disj(std::move(l), std::move(r));
    }
    case Op::Diamond:
      return Formula::diamond(normalize_rec(f, n.left, binder_mode, nom_map, taken));
    case Op::Box:
      return Formula::box(normalize_rec(f, n.left, binder_mode, nom_map, taken));
    case Op::Down:
      return Formula::down(n.name,
                           normalize_rec(f, n.left, binder_mode, nom_map, taken));
    case Op::At: {
      Formula body = normalize_rec(f, n.left, binder_mode, nom_map, taken);
      if (!n.at_svar && binder_mode)
        return Formula::at_var(svar_for(n.name), std::move(body));
      return n.at_svar ? Formula::at_var(n.name, std::move(body))
                       : Formula::at_nom(n.name, std::move(body));
    }
  }
  throw FragmentError("unreachable");
}

}  // namespace detail

// Replaces every atomic proposition with `true`; with binder_mode set (the
// formula's fragment contains the binder), additionally replaces nominals by
// fresh free state variables, consistently per name.  Rejects negation.
inline Formula normalize_monotone(const Formula& f, bool binder_mode) {
  std::map<std::string, std::string> nom_map;
  std::set<std::string> taken;
  for (const Node& n : f.nodes())
    if (n.op == Op::SVar || n.op == Op::Down || (n.op == Op::At && n.at_svar))
      taken.insert(n.name);
  return detail::normalize_rec(f, f.root(), binder_mode, nom_map, taken);
}

// ── classify_occurrence ─────────────────────────────────────────────────────

enum class OccurrenceClass { Free, BoundByBox, BoundByDown, BoundByAt };

inline const char* to_string(OccurrenceClass c) {
  switch (c) {
    case OccurrenceClass::Free: return "free";
    case OccurrenceClass::BoundByBox: return "bound-by-box";
    case OccurrenceClass::BoundByDown: return "bound-by-down";
    case OccurrenceClass::BoundByAt: return "bound-by-at";
  }
  return "?";
}

// Walks from an atom occurrence toward the root; the first [] yields
// BoundByBox, the first @ yields BoundByAt, the occurrence's own binder
// yields BoundByDown, and reaching the root yields Free.  Foreign binders
// are transparent.
inline OccurrenceClass classify_occurrence(const Formula& f, NodeId atom_node) {
  if (atom_node < 0 || atom_node >= f.size())
    throw std::out_of_range("classify_occurrence: invalid NodeId");
  const Node& leaf = f.node(atom_node);
  if (leaf.op != Op::Nominal && leaf.op != Op::SVar)
    throw FragmentError("classify_occurrence: node is not a nominal or state variable");
  std::vector<NodeId> par = parents(f);
  for (NodeId p = par[atom_node]; p >= 0; p = par[p]) {
    const Node& n = f.node(p);
    if (n.op == Op::Box) return OccurrenceClass::BoundByBox;
    if (n.op == Op::At) return OccurrenceClass::BoundByAt;
    if (n.op == Op::Down && leaf.op == Op::SVar && n.name == leaf.name)
      return OccurrenceClass::BoundByDown;
  }
  return OccurrenceClass::Free;
}

}  // namespace hylosat

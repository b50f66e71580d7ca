// ============================================================================
// hylosat/deciders.hpp — satisfiability procedures and fragment routing
// ============================================================================
//
// One decision procedure per fragment/frame cell:
//
//   one-state        O in {down,@}, both frames: evaluate with all atoms true.
//   lin-box-free     [] without <> over linear orders: []psi |-> true, then
//                    the one-state check.
//   nat-box-at       ([],@) over N: nominal occurrences bound by [] turn
//                    false, everything else true.
//   nat-box-down     ([],down) over N: same with state variables.
//   nat-logspace     ([],down,@) over N: the streaming BOOL/REP pipeline and
//                    its recursive counterpart bool_transform.
//   nat-qe           the full fragment over N, through the standard
//                    translation and quantifier elimination.
//   np-small-model   <>-fragments short of the full set, both frames:
//                    binder elimination plus bounded search over canonical
//                    placements (N) or segmented models (lin).
//
// The full fragment over linear orders is not implemented (its
// satisfiability problem is non-elementary); `decide` reports the route as
// unsupported, optionally falling back to the finite brute-force search as a
// one-sided check.
//
// ============================================================================

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hylosat/fol.hpp"
#include "hylosat/formula.hpp"
#include "hylosat/kripke.hpp"
#include "hylosat/reductions.hpp"

namespace hylosat {

// The requested fragment/frame combination has no decision procedure.
struct UnsupportedRouteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Frame { Nat, Lin };

inline const char* to_string(Frame f) { return f == Frame::Nat ? "nat" : "lin"; }

enum class Route {
  OneState,
  LinBoxFree,
  NatBoxAt,
  NatBoxDown,
  NatLogspace,
  NpSmallModel,
  NatQe,
  UnsupportedNonElementary,
};

inline const char* to_string(Route r) {
  switch (r) {
    case Route::OneState: return "one-state";
    case Route::LinBoxFree: return "lin-box-free";
    case Route::NatBoxAt: return "nat-box-at";
    case Route::NatBoxDown: return "nat-box-down";
    case Route::NatLogspace: return "nat-logspace";
    case Route::NpSmallModel: return "np-small-model";
    case Route::NatQe: return "nat-qe";
    case Route::UnsupportedNonElementary: return "unsupported-nonelementary";
  }
  return "?";
}

// ── routing ─────────────────────────────────────────────────────────────────

// Depends only on the operator set and the frame.
inline Route route(const FragmentSignature& sig, Frame frame) {
  if (!sig.monotone) throw FragmentError("route: non-monotone input");
  bool dia = sig.has_diamond, box = sig.has_box, dna = sig.has_down, at = sig.has_at;
  if (!dia && !box) return Route::OneState;
  if (frame == Frame::Lin && !dia) return Route::LinBoxFree;
  if (!dia) {
    if (box && at && !dna) return Route::NatBoxAt;
    if (box && dna && !at) return Route::NatBoxDown;
    return Route::NatLogspace;
  }
  if (!(box && dna && at)) return Route::NpSmallModel;
  return frame == Frame::Nat ? Route::NatQe : Route::UnsupportedNonElementary;
}

inline Route route(const Formula& f, Frame frame) {
  return route(analyze(f).signature, frame);
}

// ── verdicts ────────────────────────────────────────────────────────────────

// Finite map from state variables to natural numbers; n_g is one past the
// largest bound state (0 for the empty map).
struct PartialAssignment {
  std::map<std::string, int> values;

  int n_g() const {
    int m = -1;
    for (const auto& [x, v] : values) m = std::max(m, v);
    return m + 1;
  }
};

enum class SatResult { Sat, Unsat, Unknown };

inline const char* to_string(SatResult s) {
  switch (s) {
    case SatResult::Sat: return "sat";
    case SatResult::Unsat: return "unsat";
    case SatResult::Unknown: return "unknown";
  }
  return "?";
}

struct Witness {
  enum class Kind { Nat, Finite, Segmented };
  Kind kind = Kind::Nat;
  std::map<std::string, int> assignment;  // state variable -> state
  std::map<std::string, int> valuation;   // nominal -> state
  FiniteLinearModel finite;               // Kind::Finite
  SegmentedLinearModel segmented;         // Kind::Segmented
  int state = 0;                          // evaluation state / segment index
  Formula checked;                        // the formula this witness satisfies
};

struct Verdict {
  SatResult result = SatResult::Unsat;
  Route route = Route::OneState;
  Frame frame = Frame::Nat;
  std::optional<Witness> witness;
};

struct DecideOptions {
  std::size_t qe_cubes = kDefaultQeCubeLimit;
  bool extract_witness = true;
  int finite_fallback_states = 0;  // >0: semi-check for the unsupported route
};

// Re-checks a sat verdict's witness with the matching checker.
inline bool verify_witness(const Verdict& v) {
  if (v.result != SatResult::Sat || !v.witness) return true;
  const Witness& w = *v.witness;
  switch (w.kind) {
    case Witness::Kind::Finite:
      return check_finite(w.finite, w.state, w.checked);
    case Witness::Kind::Segmented:
      return check_segmented(w.segmented, w.state, w.checked);
    case Witness::Kind::Nat:
      if (analyze(w.checked).signature.has_down)
        return decide_at(w.checked, w.assignment, w.valuation, w.state);
      return check_nat(w.checked, w.assignment, w.valuation, w.state);
  }
  return false;
}

// ── shared helpers ──────────────────────────────────────────────────────────

namespace detail {

// Evaluates a formula whose modal content is irrelevant: every atom is true,
// down/@ are dropped.  This is the one-state check.
inline bool eval_all_atoms_true(const Formula& f, NodeId id) {
  const Node& n = f.node(id);
  switch (n.op) {
    case Op::Prop:
    case Op::Nominal:
    case Op::SVar:
    case Op::Top: return true;
    case Op::Bottom: return false;
    case Op::And:
      return eval_all_atoms_true(f, n.left) && eval_all_atoms_true(f, n.right);
    case Op::Or:
      return eval_all_atoms_true(f, n.left) || eval_all_atoms_true(f, n.right);
    case Op::Down:
    case Op::At: return eval_all_atoms_true(f, n.left);
    case Op::Diamond:
    case Op::Box: throw FragmentError("modal operator outside {down,@}");
    case Op::Neg: throw FragmentError("non-monotone input");
  }
  return false;
}

inline Witness one_state_witness(const Formula& f) {
  Witness w;
  w.kind = Witness::Kind::Finite;
  w.finite.size = 1;
  for (const Node& n : f.nodes()) {
    if (n.op == Op::Nominal || (n.op == Op::At && !n.at_svar)) w.finite.nominals[n.name] = 0;
    if (n.op == Op::Prop) w.finite.props[n.name] = {0};
  }
  for (const std::string& x : analyze(f).free_svars) w.finite.svars[x] = 0;
  w.assignment = w.finite.svars;
  w.valuation = w.finite.nominals;
  w.state = 0;
  w.checked = f;
  return w;
}

inline Formula boxes_to_top(const Formula& f, NodeId id) {
  const Node& n = f.node(id);
  switch (n.op) {
    case Op::Box: return Formula::top();
    case Op::Neg: throw FragmentError("non-monotone input");
    case Op::And: return Formula::conj(boxes_to_top(f, n.left), boxes_to_top(f, n.right));
    case Op::Or: return Formula::disj(boxes_to_top(f, n.left), boxes_to_top(f, n.right));
    case Op::Diamond: throw FragmentError("<> present in a box-free route");
    case Op::Down: return Formula::down(n.name, boxes_to_top(f, n.left));
    case Op::At: {
      Formula body = boxes_to_top(f, n.left);
      return n.at_svar ? Formula::at_var(n.name, std::move(body))
                       : Formula::at_nom(n.name, std::move(body));
    }
    default: return f.subtree(id);
  }
}

}  // namespace detail

// ── one-state and box-free routes ───────────────────────────────────────────

// O in {down,@}, both frames: satisfiable iff true with every atom read as
// true; the witness is the single-state frame with everything at 0.
inline Verdict decide_one_state(const Formula& f, Frame frame = Frame::Lin) {
  FragmentSignature sig = analyze(f).signature;
  if (sig.has_diamond || sig.has_box)
    throw FragmentError("decide_one_state: operator outside {down,@}");
  if (!sig.monotone) throw FragmentError("decide_one_state: non-monotone input");
  Verdict v;
  v.route = Route::OneState;
  v.frame = frame;
  if (detail::eval_all_atoms_true(f, f.root())) {
    v.result = SatResult::Sat;
    v.witness = detail::one_state_witness(f);
  }
  return v;
}

// Over linear orders every []-subformula is vacuous in a final state, so it
// reduces to the one-state check with []psi read as true.
inline Verdict decide_lin_box_free(const Formula& f) {
  FragmentSignature sig = analyze(f).signature;
  if (sig.has_diamond) throw FragmentError("decide_lin_box_free: <> present");
  if (!sig.monotone) throw FragmentError("decide_lin_box_free: non-monotone input");
  Formula stripped = detail::boxes_to_top(f, f.root());
  Verdict v = decide_one_state(stripped, Frame::Lin);
  v.route = Route::LinBoxFree;
  if (v.witness) {
    // the one-state model satisfies the original formula as well: [] is
    // vacuous there
    Witness w = detail::one_state_witness(f);
    v.witness = std::move(w);
  }
  return v;
}

// ── NC1 fragments over N ────────────────────────────────────────────────────

// ([],@) over N: nominal occurrences bound by [] are false under the
// canonical valuation (everything at 0); free and @-bound occurrences true.
inline Verdict decide_nat_box_at(const Formula& f) {
  FragmentSignature sig = analyze(f).signature;
  if (sig.has_diamond || sig.has_down)
    throw FragmentError("decide_nat_box_at: operator outside {box,@}");
  if (!sig.monotone) throw FragmentError("decide_nat_box_at: non-monotone input");
  bool sat = true;
  {
    struct Rec {
      const Formula& f;
      bool eval(NodeId id, bool under_box) {
        const Node& n = f.node(id);
        switch (n.op) {
          case Op::Top: return true;
          case Op::Bottom: return false;
          case Op::Prop: return true;
          case Op::Nominal:
          case Op::SVar: return !under_box;
          case Op::And: return eval(n.left, under_box) && eval(n.right, under_box);
          case Op::Or: return eval(n.left, under_box) || eval(n.right, under_box);
          case Op::Box: return eval(n.left, true);
          case Op::At: return eval(n.left, false);
          default: throw FragmentError("unexpected operator");
        }
      }
    };
    Rec r{f};
    sat = r.eval(f.root(), false);
  }
  Verdict v;
  v.route = Route::NatBoxAt;
  v.frame = Frame::Nat;
  if (sat) {
    v.result = SatResult::Sat;
    Witness w;
    w.kind = Witness::Kind::Nat;
    for (const Node& n : f.nodes())
      if (n.op == Op::Nominal || (n.op == Op::At && !n.at_svar)) w.valuation[n.name] = 0;
    for (const std::string& x : analyze(f).free_svars) w.assignment[x] = 0;
    w.state = 0;
    w.checked = f;
    v.witness = std::move(w);
  }
  return v;
}

// ([],down) over N: a bound occurrence is true exactly when no [] separates
// it from its binder; free occurrences are true at 0; []-bound ones false.
inline Verdict decide_nat_box_down(const Formula& f) {
  FragmentSignature sig = analyze(f).signature;
  if (sig.has_diamond || sig.has_at)
    throw FragmentError("decide_nat_box_down: operator outside {box,down}");
  if (sig.uses_nominals)
    throw FragmentError("decide_nat_box_down: nominal in a binder fragment");
  if (!sig.monotone) throw FragmentError("decide_nat_box_down: non-monotone input");

  Formula renamed = rename_apart(f);
  struct Rec {
    const Formula& f;
    bool eval(NodeId id) {
      const Node& n = f.node(id);
      switch (n.op) {
        case Op::Top: return true;
        case Op::Bottom: return false;
        case Op::Prop: return true;
        case Op::SVar:
          return classify_occurrence(f, id) != OccurrenceClass::BoundByBox;
        case Op::And: return eval(n.left) && eval(n.right);
        case Op::Or: return eval(n.left) || eval(n.right);
        case Op::Box:
        case Op::Down: return eval(n.left);
        default: throw FragmentError("unexpected operator");
      }
    }
  };
  Rec r{renamed};
  bool sat = r.eval(renamed.root());

  Verdict v;
  v.route = Route::NatBoxDown;
  v.frame = Frame::Nat;
  if (sat) {
    v.result = SatResult::Sat;
    Witness w;
    w.kind = Witness::Kind::Nat;
    for (const std::string& x : analyze(f).free_svars) w.assignment[x] = 0;
    w.state = 0;
    w.checked = f;
    v.witness = std::move(w);
  }
  return v;
}

// ── the ([],down,@) machinery over N ────────────────────────────────────────

// A Boolean residue: and/or over true/false only.
inline bool is_bool_residue(const Formula& f) {
  for (const Node& n : f.nodes())
    if (n.op != Op::And && n.op != Op::Or && n.op != Op::Top && n.op != Op::Bottom)
      return false;
  return true;
}

inline bool eval_residue(const Formula& f, NodeId id = 0) {
  const Node& n = f.node(id);
  switch (n.op) {
    case Op::Top: return true;
    case Op::Bottom: return false;
    case Op::And: return eval_residue(f, n.left) && eval_residue(f, n.right);
    case Op::Or: return eval_residue(f, n.left) || eval_residue(f, n.right);
    default: throw FragmentError("not a Boolean residue");
  }
}

namespace detail {

inline int n_g(const std::map<std::string, int>& g) {
  int m = -1;
  for (const auto& [x, v] : g) m = std::max(m, v);
  return m + 1;
}

// Recursive state-of-evaluation transform: every subformula has one uniquely
// determined (assignment, state) pair, starting from (g0, 0); [] steps to
// n_g, down extends the assignment, @ jumps.  State-variable occurrences
// turn into the truth of "bound state == evaluation state".
inline Formula bool_transform_rec(const Formula& f, NodeId id,
                                  std::map<std::string, int>& g, int i) {
  const Node& n = f.node(id);
  switch (n.op) {
    case Op::Top: return Formula::top();
    case Op::Bottom: return Formula::bottom();
    case Op::SVar: {
      auto it = g.find(n.name);
      if (it == g.end()) throw FragmentError("unbound state variable '$" + n.name + "'");
      return it->second == i ? Formula::top() : Formula::bottom();
    }
    case Op::And:
    case Op::Or: {
      Formula l = bool_transform_rec(f, n.left, g, i);
      Formula r = bool_transform_rec(f, n.right, g, i);
      return n.op == Op::And ? Formula::conj(std::move(l), std::move(r))
                             : Formula::disj(std::move(l), std::move(r));
    }
    case Op::Box: return bool_transform_rec(f, n.left, g, n_g(g));
    case Op::Down: {
      auto prev = g.find(n.name) == g.end() ? std::optional<int>() : std::optional<int>(g[n.name]);
      g[n.name] = i;
      Formula out = bool_transform_rec(f, n.left, g, i);
      if (prev) g[n.name] = *prev;
      else g.erase(n.name);
      return out;
    }
    case Op::At: {
      if (!n.at_svar)
        throw FragmentError("nominal in the ([],down,@) machinery: normalize first");
      auto it = g.find(n.name);
      if (it == g.end()) throw FragmentError("unbound @-target '$" + n.name + "'");
      return bool_transform_rec(f, n.left, g, it->second);
    }
    case Op::Nominal:
      throw FragmentError("nominal in the ([],down,@) machinery: normalize first");
    case Op::Prop:
      throw FragmentError("proposition in the ([],down,@) machinery: normalize first");
    case Op::Diamond: throw FragmentError("<> present in the ([],down,@) fragment");
    case Op::Neg: throw FragmentError("non-monotone input");
  }
  throw FragmentError("unreachable");
}

}  // namespace detail

// The SE/rep/bool transform for ([],down,@) over N.  The result contains
// only and/or/true/false; the input formula is satisfiable over N iff the
// residue evaluates to true.
inline Formula bool_transform(const Formula& f) {
  Formula renamed = rename_apart(f);
  std::map<std::string, int> g0;
  for (const std::string& x : analyze(renamed).free_svars) g0[x] = 0;
  return detail::bool_transform_rec(renamed, renamed.root(), g0, 0);
}

namespace detail {

// Streaming form of the same transform: a single left-to-right pass over the
// preorder emits the residue text; each state-variable occurrence is decided
// by the end-recursive REP loop over node ids and parent links, where "the
// last jumping operator between two positions" becomes "the deepest []/@
// ancestor of the occurrence strictly below the comparison node".
struct StreamingBool {
  const Formula& f;
  std::vector<NodeId> par;
  std::map<std::string, NodeId> binder_of;

  explicit StreamingBool(const Formula& formula) : f(formula), par(parents(formula)) {
    for (NodeId i = 0; i < f.size(); ++i)
      if (f.node(i).op == Op::Down) binder_of[f.node(i).name] = i;
  }

  // Do the evaluation states at anchor P (a binder node, or -1 for the root
  // anchor that stands for state 0) and at node Q agree?
  bool states_agree(NodeId P, NodeId Q) const {
    for (;;) {
      NodeId jumper = -1;
      for (NodeId a = par[Q]; a != P && a >= 0; a = par[a]) {
        Op op = f.node(a).op;
        if (op == Op::Box || op == Op::At) {
          jumper = a;
          break;
        }
      }
      if (jumper < 0) return true;
      const Node& j = f.node(jumper);
      if (j.op == Op::Box) return false;
      if (!j.at_svar)
        throw FragmentError("nominal in the ([],down,@) machinery: normalize first");
      auto it = binder_of.find(j.name);
      NodeId P2 = it == binder_of.end() ? -1 : it->second;
      if (P2 == P) return true;
      // compare the two anchors; the earlier one is the ancestor
      NodeId lo = std::min(P, P2), hi = std::max(P, P2);
      P = lo;
      Q = hi;
    }
  }

  bool rep(NodeId occurrence) const {
    const Node& leaf = f.node(occurrence);
    auto it = binder_of.find(leaf.name);
    NodeId anchor = it == binder_of.end() ? -1 : it->second;
    return states_agree(anchor, occurrence);
  }

  std::string run() const {
    std::string out;
    struct Fr {
      NodeId id;
      int phase;
    };
    std::vector<Fr> stack{{f.root(), 0}};
    while (!stack.empty()) {
      Fr fr = stack.back();
      const Node& n = f.node(fr.id);
      if (n.op == Op::And || n.op == Op::Or) {
        if (fr.phase == 0) {
          out += '(';
          stack.back().phase = 1;
          stack.push_back({n.left, 0});
        } else if (fr.phase == 1) {
          out += n.op == Op::And ? " & " : " | ";
          stack.back().phase = 2;
          stack.push_back({n.right, 0});
        } else {
          out += ')';
          stack.pop_back();
        }
        continue;
      }
      if (n.op == Op::Box || n.op == Op::Down || n.op == Op::At) {
        if (n.op == Op::At && !n.at_svar)
          throw FragmentError("nominal in the ([],down,@) machinery: normalize first");
        if (fr.phase == 0) {
          stack.back().phase = 1;
          stack.push_back({n.left, 0});
        } else {
          stack.pop_back();
        }
        continue;
      }
      switch (n.op) {
        case Op::Top: out += "true"; break;
        case Op::Bottom: out += "false"; break;
        case Op::SVar: out += rep(fr.id) ? "true" : "false"; break;
        case Op::Diamond: throw FragmentError("<> present in the ([],down,@) fragment");
        case Op::Neg: throw FragmentError("non-monotone input");
        default:
          throw FragmentError("atom in the ([],down,@) machinery: normalize first");
      }
      stack.pop_back();
    }
    return out;
  }
};

}  // namespace detail

// ([],down,@) over N via the streaming pipeline; the emitted residue must
// match bool_transform's node for node.
inline Verdict decide_nat_logspace(const Formula& f) {
  FragmentSignature sig = analyze(f).signature;
  if (sig.has_diamond) throw FragmentError("decide_nat_logspace: <> present");
  if (!sig.monotone) throw FragmentError("decide_nat_logspace: non-monotone input");
  Formula input = sig.uses_nominals || sig.uses_props ? normalize_monotone(f, true) : f;
  Formula renamed = rename_apart(input);
  detail::StreamingBool stream(renamed);
  Formula residue = parse(stream.run());
  Verdict v;
  v.route = Route::NatLogspace;
  v.frame = Frame::Nat;
  if (eval_residue(residue)) {
    v.result = SatResult::Sat;
    Witness w;
    w.kind = Witness::Kind::Nat;
    for (const std::string& x : analyze(renamed).free_svars) w.assignment[x] = 0;
    w.state = 0;
    w.checked = renamed;
    v.witness = std::move(w);
  }
  return v;
}

// The streamed residue, exposed for the streaming/recursive agreement check.
inline Formula streaming_residue(const Formula& f) {
  Formula renamed = rename_apart(f);
  detail::StreamingBool stream(renamed);
  return parse(stream.run());
}

// ── nat-qe ──────────────────────────────────────────────────────────────────

// The full fragment over N: satisfiable iff the closed sentence
// E x1..xk H(f | <>f, 0) is true over (N,<).
inline Verdict decide_nat_qe(const Formula& f, const DecideOptions& opts = {}) {
  FragmentSignature sig = analyze(f).signature;
  if (!sig.monotone) throw FragmentError("decide_nat_qe: non-monotone input");
  Formula renamed = rename_apart(f);
  Verdict v;
  v.route = Route::NatQe;
  v.frame = Frame::Nat;
  FolFormula sentence = close_sentence(renamed);
  bool sat;
  try {
    sat = qe_decide(sentence, opts.qe_cubes);
  } catch (const QeLimitError&) {
    v.result = SatResult::Unknown;
    return v;
  }
  if (!sat) return v;
  v.result = SatResult::Sat;

  if (!opts.extract_witness) return v;
  std::set<std::string> vars = analyze(renamed).free_svars;
  std::set<std::string> noms;
  for (const Node& n : renamed.nodes())
    if (n.op == Op::Nominal || (n.op == Op::At && !n.at_svar)) noms.insert(n.name);
  std::vector<std::string> names(vars.begin(), vars.end());
  names.insert(names.end(), noms.begin(), noms.end());
  long long bound = bounded_eval_bound(sentence);
  double space = 1;
  for (std::size_t i = 0; i <= names.size(); ++i) space *= static_cast<double>(bound + 1);
  if (space > 4096) return v;  // verdict stands; extraction beyond budget

  std::vector<int> vals(names.size(), 0);
  try {
    for (;;) {
      std::map<std::string, int> g, eta;
      for (std::size_t i = 0; i < names.size(); ++i)
        (vars.count(names[i]) ? g : eta)[names[i]] = vals[i];
      for (int n = 0; n <= bound; ++n) {
        if (decide_at(renamed, g, eta, n, opts.qe_cubes)) {
          Witness w;
          w.kind = Witness::Kind::Nat;
          w.assignment = g;
          w.valuation = eta;
          w.state = n;
          w.checked = renamed;
          v.witness = std::move(w);
          return v;
        }
      }
      std::size_t k = 0;
      while (k < vals.size() && ++vals[k] > bound) vals[k++] = 0;
      if (k == vals.size()) break;
    }
  } catch (const QeLimitError&) {
    // keep the sat verdict without a witness
  }
  return v;
}

// ── np-small-model ──────────────────────────────────────────────────────────

namespace detail {

struct NamedAtoms {
  std::vector<std::string> names;
  std::set<std::string> svars;  // subset of names that are state variables
};

inline NamedAtoms named_atoms(const Formula& f) {
  NamedAtoms out;
  std::set<std::string> seen;
  for (const Node& n : f.nodes()) {
    std::string name;
    bool is_svar = false;
    if (n.op == Op::Nominal || (n.op == Op::At && !n.at_svar)) name = n.name;
    else if (n.op == Op::SVar || (n.op == Op::At && n.at_svar)) {
      name = n.name;
      is_svar = true;
    } else {
      continue;
    }
    if (seen.insert(name).second) out.names.push_back(name);
    if (is_svar) out.svars.insert(name);
  }
  return out;
}

// Eliminates the binder for the <>-fragments: skolemization when @ may jump
// (or [] is absent), occurrence-distance elimination for (<>,[],down).
inline Formula np_eliminate_down(const Formula& f, const FragmentSignature& sig) {
  if (!sig.has_down) return f;
  if (sig.has_box && !sig.has_at) return eliminate_down_no_at(f);
  return skolemize(f);
}

// Calls fn for every ordered set partition of {0..k-1}, in ascending block
// count; fn(b, block_of) returns true to stop.
template <class F>
bool for_each_ordered_partition(int k, F&& fn) {
  for (int b = 1; b <= k; ++b) {
    std::vector<int> block_of(k, 0);
    for (;;) {
      std::vector<bool> hit(b, false);
      for (int x : block_of) hit[x] = true;
      bool surjective = true;
      for (bool h : hit) surjective = surjective && h;
      if (surjective && fn(b, block_of)) return true;
      int i = 0;
      while (i < k && ++block_of[i] == b) block_of[i++] = 0;
      if (i == k) break;
    }
  }
  return false;
}

}  // namespace detail

// <>-fragments short of the full operator set, over N: eliminate the binder,
// then search canonical placements of the named atoms.  Gaps wider than
// md+2 collapse under the m-inseparability quotient, so placements with gaps
// capped at md+2 are exhaustive; each candidate is checked exactly over the
// infinite frame (all states past the last named one are equivalent).
// []-free targets are existential-positive and hence preserved under
// inserting states, so for them only the ordering and collocation of the
// named atoms matters: one widest-gap candidate decides each ordering, and
// the gap odometer runs only once afterwards to shrink the witness.
inline Verdict decide_np_nat(const Formula& f, const DecideOptions& opts = {}) {
  FragmentSignature sig = analyze(f).signature;
  if (!sig.monotone) throw FragmentError("decide_np_nat: non-monotone input");
  if (!sig.has_diamond || (sig.has_box && sig.has_down && sig.has_at))
    throw FragmentError("decide_np_nat: route expects <> and a proper fragment");
  (void)opts;

  Formula renamed = rename_apart(f);
  Formula target = detail::np_eliminate_down(renamed, sig);
  detail::NamedAtoms atoms = detail::named_atoms(target);
  int k = static_cast<int>(atoms.names.size());
  int gap_cap = modal_depth(target) + 2;
  bool box_free = !analyze(target).signature.has_box;
  Formula probe = Formula::disj(target, Formula::diamond(target));

  Verdict v;
  v.route = Route::NpSmallModel;
  v.frame = Frame::Nat;

  auto satisfied = [&](const std::vector<int>& position) -> bool {
    std::map<std::string, int> g, eta;
    for (int i = 0; i < k; ++i)
      (atoms.svars.count(atoms.names[i]) ? g : eta)[atoms.names[i]] = position[i];
    return check_nat(probe, g, eta, 0);
  };
  auto record_witness = [&](const std::vector<int>& position) {
    std::map<std::string, int> g, eta;
    for (int i = 0; i < k; ++i)
      (atoms.svars.count(atoms.names[i]) ? g : eta)[atoms.names[i]] = position[i];
    int max_pos = 0;
    for (int p : position) max_pos = std::max(max_pos, p);
    int state = 0;
    for (int n = 0; n <= max_pos + 1; ++n)
      if (check_nat(target, g, eta, n)) {
        state = n;
        break;
      }
    Witness w;
    w.kind = Witness::Kind::Nat;
    w.assignment = g;
    w.valuation = eta;
    w.state = state;
    w.checked = target;
    v.witness = std::move(w);
    v.result = SatResult::Sat;
  };

  if (k == 0) {
    if (check_nat(probe, {}, {}, 0)) {
      v.result = SatResult::Sat;
      Witness w;
      w.kind = Witness::Kind::Nat;
      for (int n = 0; n <= 1; ++n)
        if (check_nat(target, {}, {}, n)) {
          w.state = n;
          break;
        }
      w.checked = target;
      v.witness = std::move(w);
    }
    return v;
  }

  auto positions_for = [&](int b, const std::vector<int>& block_of,
                           const std::vector<int>& gaps) {
    std::vector<int> block_pos(b);
    block_pos[0] = gaps[0];
    for (int j = 1; j < b; ++j) block_pos[j] = block_pos[j - 1] + gaps[j] + 1;
    std::vector<int> position(k);
    for (int i = 0; i < k; ++i) position[i] = block_pos[block_of[i]];
    return position;
  };

  // Runs the lexicographic gap odometer for one ordering; used directly for
  // []-bearing targets and once, to shrink the witness, for []-free ones.
  auto search_gaps = [&](int b, const std::vector<int>& block_of) -> bool {
    std::vector<int> gaps(b, 0);  // gaps[0] leads; gaps[j] precedes block j
    for (;;) {
      std::vector<int> position = positions_for(b, block_of, gaps);
      if (satisfied(position)) {
        record_witness(position);
        return true;
      }
      int j = 0;
      while (j < b && ++gaps[j] > gap_cap) gaps[j++] = 0;
      if (j == b) break;
    }
    return false;
  };

  detail::for_each_ordered_partition(k, [&](int b, const std::vector<int>& block_of) {
    if (!box_free) return search_gaps(b, block_of);
    std::vector<int> widest(b, gap_cap);
    if (!satisfied(positions_for(b, block_of, widest))) return false;
    return search_gaps(b, block_of);
  });
  return v;
}

// The same fragments over linear orders: search segmented models.  Gap
// shapes follow the quotient's canonical form — up to md+2 discrete points,
// or a dense block followed by up to md+1 points — for the leading gap,
// every inter-nominal gap, and the trailing gap alike (a tail of t points is
// told from t+1 by a <>-chain of depth t+1, so trailing points collapse only
// beyond md+1; points ahead of a dense block are absorbed by it).  []-free
// formulas are preserved under taking witness submodels, so their search
// skips dense blocks entirely.
inline Verdict decide_np_lin(const Formula& f, const DecideOptions& opts = {}) {
  FragmentSignature sig = analyze(f).signature;
  if (!sig.monotone) throw FragmentError("decide_np_lin: non-monotone input");
  if (!sig.has_diamond || (sig.has_box && sig.has_down && sig.has_at))
    throw FragmentError("decide_np_lin: route expects <> and a proper fragment");
  (void)opts;

  Formula renamed = rename_apart(f);
  Formula target0 = detail::np_eliminate_down(renamed, sig);

  // free state variables act as nominals; give them nominal names
  std::map<std::string, std::string> svar_nominal;
  {
    std::set<std::string> taken;
    for (const Node& n : target0.nodes())
      if (n.op == Op::Nominal || (n.op == Op::At && !n.at_svar)) taken.insert(n.name);
    for (const std::string& x : analyze(target0).free_svars) {
      std::string cand = x;
      while (taken.count(cand)) cand = "v" + cand;
      taken.insert(cand);
      svar_nominal[x] = cand;
    }
  }
  struct ToNom {
    const Formula& f;
    const std::map<std::string, std::string>& ren;
    Formula go(NodeId id) {
      const Node& n = f.node(id);
      switch (n.op) {
        case Op::SVar: return Formula::nominal(ren.at(n.name));
        case Op::At:
          if (n.at_svar) return Formula::at_nom(ren.at(n.name), go(n.left));
          return Formula::at_nom(n.name, go(n.left));
        case Op::And: return Formula::conj(go(n.left), go(n.right));
        case Op::Or: return Formula::disj(go(n.left), go(n.right));
        case Op::Diamond: return Formula::diamond(go(n.left));
        case Op::Box: return Formula::box(go(n.left));
        case Op::Down: throw FragmentError("binder survived elimination");
        default: return f.subtree(id);
      }
    }
  };
  ToNom conv{target0, svar_nominal};
  Formula target = conv.go(target0.root());

  detail::NamedAtoms atoms = detail::named_atoms(target);
  int k = static_cast<int>(atoms.names.size());
  int md = modal_depth(target);
  bool use_blocks = analyze(target).signature.has_box;
  Formula probe = Formula::disj(target, Formula::diamond(target));

  Verdict v;
  v.route = Route::NpSmallModel;
  v.frame = Frame::Lin;

  // gap shape codes: 0..md+2 -> that many points; md+3+p -> block then p
  // points (p <= md+1)
  int plain_shapes = md + 3;
  int shape_count = use_blocks ? plain_shapes + (md + 2) : plain_shapes;
  auto append_gap = [&](std::vector<Segment>& segs, int code) {
    int points = code;
    if (code >= plain_shapes) {
      segs.push_back(Segment{true, {}});
      points = code - plain_shapes;
    }
    for (int i = 0; i < points; ++i) segs.push_back(Segment{false, {}});
  };

  auto try_model = [&](const SegmentedLinearModel& m) -> bool {
    if (m.segments.empty()) return false;
    if (!check_segmented(m, 0, probe)) return false;
    int seg = 0;
    for (int e = 0; e < static_cast<int>(m.segments.size()); ++e)
      if (check_segmented(m, e, target)) {
        seg = e;
        break;
      }
    Witness w;
    w.kind = Witness::Kind::Segmented;
    w.segmented = m;
    for (const auto& [x, nom] : svar_nominal) w.assignment[x] = m.find_nominal(nom);
    for (const std::string& name : atoms.names)
      if (!atoms.svars.count(name)) w.valuation[name] = m.find_nominal(name);
    w.state = seg;
    w.checked = target;
    v.witness = std::move(w);
    v.result = SatResult::Sat;
    return true;
  };

  if (k == 0) {
    for (int code = 0; code < shape_count; ++code) {
      std::vector<Segment> segs;
      append_gap(segs, code);
      if (segs.empty()) continue;
      if (try_model(SegmentedLinearModel::make(std::move(segs)))) return v;
    }
    return v;
  }

  auto model_for = [&](int b, const std::vector<int>& block_of,
                       const std::vector<int>& shape) {
    std::vector<Segment> segs;
    for (int j = 0; j < b; ++j) {
      append_gap(segs, shape[j]);
      Segment point{false, {}};
      for (int i = 0; i < k; ++i)
        if (block_of[i] == j) point.nominals.insert(atoms.names[i]);
      segs.push_back(std::move(point));
    }
    append_gap(segs, shape[b]);
    return SegmentedLinearModel::make(std::move(segs));
  };

  auto search_shapes = [&](int b, const std::vector<int>& block_of) -> bool {
    std::vector<int> shape(b + 1, 0);  // gap before each named point + trailing
    for (;;) {
      if (try_model(model_for(b, block_of, shape))) return true;
      int j = 0;
      while (j <= b && ++shape[j] == shape_count) shape[j++] = 0;
      if (j > b) break;
    }
    return false;
  };

  detail::for_each_ordered_partition(k, [&](int b, const std::vector<int>& block_of) {
    if (use_blocks) return search_shapes(b, block_of);
    // []-free: one widest all-points candidate decides the ordering, then
    // the odometer runs once to shrink the witness
    std::vector<int> widest(b + 1, plain_shapes - 1);
    if (!check_segmented(model_for(b, block_of, widest), 0, probe)) return false;
    return search_shapes(b, block_of);
  });
  return v;
}

// ── dispatch ────────────────────────────────────────────────────────────────

// Monotone normalization as the deciders expect it: propositions vanish, and
// nominals turn into free state variables whenever a binder is around (or
// the ([],down,@) machinery will run).
inline Formula normalize_for_route(const Formula& f, Route r, const FragmentSignature& sig) {
  bool binder_mode = sig.has_down || r == Route::NatLogspace;
  return normalize_monotone(f, binder_mode);
}

inline Verdict decide(const Formula& f, Frame frame, const DecideOptions& opts = {}) {
  Analysis a = analyze(f);
  if (!a.signature.monotone) throw FragmentError("decide: non-monotone input");
  Route r = route(a.signature, frame);
  Formula g = normalize_for_route(f, r, a.signature);
  switch (r) {
    case Route::OneState: return decide_one_state(g, frame);
    case Route::LinBoxFree: return decide_lin_box_free(g);
    case Route::NatBoxAt: return decide_nat_box_at(g);
    case Route::NatBoxDown: return decide_nat_box_down(g);
    case Route::NatLogspace: return decide_nat_logspace(g);
    case Route::NatQe: return decide_nat_qe(g, opts);
    case Route::NpSmallModel:
      return frame == Frame::Nat ? decide_np_nat(g, opts) : decide_np_lin(g, opts);
    case Route::UnsupportedNonElementary: {
      if (opts.finite_fallback_states > 0) {
        auto hit = sat_search_finite(g, opts.finite_fallback_states);
        if (hit) {
          Verdict v;
          v.result = SatResult::Sat;
          v.route = Route::UnsupportedNonElementary;
          v.frame = frame;
          Witness w;
          w.kind = Witness::Kind::Finite;
          w.finite = hit->first;
          w.state = hit->second;
          w.checked = g;
          w.assignment = hit->first.svars;
          w.valuation = hit->first.nominals;
          v.witness = std::move(w);
          return v;
        }
      }
      throw UnsupportedRouteError(
          "the full operator set over linear orders is non-elementary; no "
          "decision procedure is implemented");
    }
  }
  throw FragmentError("unreachable");
}

}  // namespace hylosat

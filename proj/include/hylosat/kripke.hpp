// ============================================================================
// hylosat/kripke.hpp — ground-truth model checking
// ============================================================================
//
// Explicit finite linear Kripke structures, segmented (dense-block) linear
// models, an exact checker over (N,<) for binder-free formulas, a brute-force
// satisfiability search, and the m-inseparability quotient.
//
// States of a FiniteLinearModel are 0..size-1 ordered by <.  <> and [] range
// over strictly later states.
//
// ============================================================================

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hylosat/formula.hpp"

namespace hylosat {

// A formula mentions an atom the model does not interpret, or a state index
// is out of range.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed model (bad segment list, duplicate nominal, bad state index).
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ── FiniteLinearModel ───────────────────────────────────────────────────────

struct FiniteLinearModel {
  int size = 1;
  std::map<std::string, int> nominals;  // valuation: each nominal names one state
  std::map<std::string, int> svars;     // assignment for free state variables
  // Optional proposition valuation; only the brute-force route uses it.
  std::map<std::string, std::set<int>> props;

  void validate() const {
    if (size < 1) throw ModelError("model must have at least one state");
    for (const auto& [name, s] : nominals)
      if (s < 0 || s >= size) throw ModelError("nominal '" + name + "' out of range");
    for (const auto& [name, s] : svars)
      if (s < 0 || s >= size) throw ModelError("state variable '" + name + "' out of range");
    for (const auto& [name, ss] : props)
      for (int s : ss)
        if (s < 0 || s >= size) throw ModelError("proposition '" + name + "' out of range");
  }
};

// ── check_finite ────────────────────────────────────────────────────────────

namespace detail {

struct FiniteEnv {
  const FiniteLinearModel& m;
  std::vector<std::pair<std::string, int>> binds;  // innermost last

  int lookup_svar(const std::string& x) const {
    for (auto it = binds.rbegin(); it != binds.rend(); ++it)
      if (it->first == x) return it->second;
    auto it = m.svars.find(x);
    if (it == m.svars.end()) throw EvalError("uninterpreted state variable '$" + x + "'");
    return it->second;
  }

  int lookup_nominal(const std::string& i) const {
    auto it = m.nominals.find(i);
    if (it == m.nominals.end()) throw EvalError("uninterpreted nominal '#" + i + "'");
    return it->second;
  }
};

inline bool check_finite_rec(FiniteEnv& env, int w, const Formula& f, NodeId id) {
  const Node& n = f.node(id);
  switch (n.op) {
    case Op::Top: return true;
    case Op::Bottom: return false;
    case Op::Prop: {
      auto it = env.m.props.find(n.name);
      if (it == env.m.props.end())
        throw EvalError("uninterpreted proposition '" + n.name + "'");
      return it->second.count(w) != 0;
    }
    case Op::Nominal: return env.lookup_nominal(n.name) == w;
    case Op::SVar: return env.lookup_svar(n.name) == w;
    case Op::Neg: return !check_finite_rec(env, w, f, n.left);
    case Op::And:
      return check_finite_rec(env, w, f, n.left) && check_finite_rec(env, w, f, n.right);
    case Op::Or:
      return check_finite_rec(env, w, f, n.left) || check_finite_rec(env, w, f, n.right);
    case Op::Diamond:
      for (int v = w + 1; v < env.m.size; ++v)
        if (check_finite_rec(env, v, f, n.left)) return true;
      return false;
    case Op::Box:
      for (int v = w + 1; v < env.m.size; ++v)
        if (!check_finite_rec(env, v, f, n.left)) return false;
      return true;
    case Op::At: {
      int target = n.at_svar ? env.lookup_svar(n.name) : env.lookup_nominal(n.name);
      return check_finite_rec(env, target, f, n.left);
    }
    case Op::Down: {
      env.binds.emplace_back(n.name, w);
      bool r = check_finite_rec(env, w, f, n.left);
      env.binds.pop_back();
      return r;
    }
  }
  return false;
}

}  // namespace detail

// Literal recursion over the satisfaction clauses.
inline bool check_finite(const FiniteLinearModel& m, int w, const Formula& f) {
  if (w < 0 || w >= m.size) throw EvalError("state out of range");
  detail::FiniteEnv env{m, {}};
  return detail::check_finite_rec(env, w, f, f.root());
}

// ── check_nat ───────────────────────────────────────────────────────────────

namespace detail {

struct NatEnv {
  const std::map<std::string, int>& svars;
  const std::map<std::string, int>& nominals;
  int tail;  // represents every state beyond the largest interpreted one
  const Formula& f;
  std::map<std::pair<NodeId, int>, bool> memo;

  int value(const Node& n) const {
    const auto& m = (n.op == Op::Nominal || (n.op == Op::At && !n.at_svar)) ? nominals : svars;
    auto it = m.find(n.name);
    if (it == m.end()) throw EvalError("uninterpreted atom '" + n.name + "'");
    return it->second;
  }

  bool eval(NodeId id, int w) {
    auto key = std::make_pair(id, w);
    auto hit = memo.find(key);
    if (hit != memo.end()) return hit->second;
    const Node& n = f.node(id);
    bool r = false;
    switch (n.op) {
      case Op::Top: r = true; break;
      case Op::Bottom: r = false; break;
      case Op::Prop: throw EvalError("uninterpreted proposition '" + n.name + "'");
      case Op::Nominal:
      case Op::SVar: r = value(n) == w; break;
      case Op::Neg: r = !eval(n.left, w); break;
      case Op::And: r = eval(n.left, w) && eval(n.right, w); break;
      case Op::Or: r = eval(n.left, w) || eval(n.right, w); break;
      case Op::Diamond:
        if (w >= tail) {
          r = eval(n.left, tail);
        } else {
          for (int v = w + 1; v <= tail && !r; ++v) r = eval(n.left, v);
        }
        break;
      case Op::Box:
        if (w >= tail) {
          r = eval(n.left, tail);
        } else {
          r = true;
          for (int v = w + 1; v <= tail && r; ++v) r = eval(n.left, v);
        }
        break;
      case Op::At: r = eval(n.left, value(n)); break;
      case Op::Down: throw FragmentError("check_nat: binders are not supported");
    }
    memo.emplace(key, r);
    return r;
  }
};

}  // namespace detail

// Exact model check over (N,<) for binder-free formulas under fixed numeric
// interpretations of state variables and nominals.  All states beyond the
// largest interpreted value satisfy the same formulas, so one representative
// stands for the whole tail.
inline bool check_nat(const Formula& f, const std::map<std::string, int>& svars,
                      const std::map<std::string, int>& nominals, int w) {
  int max_val = w;
  for (const auto& [k, v] : svars) max_val = std::max(max_val, v);
  for (const auto& [k, v] : nominals) max_val = std::max(max_val, v);
  detail::NatEnv env{svars, nominals, max_val + 1, f, {}};
  return env.eval(f.root(), w);
}

// ── sat_search_finite ───────────────────────────────────────────────────────

// Brute-force oracle: enumerates every finite linear model over the atoms of
// the formula, up to `max_states` states, and returns the first witness.
// An empty result means "no model within the bound", not unsatisfiability.
inline std::optional<std::pair<FiniteLinearModel, int>> sat_search_finite(
    const Formula& f, int max_states) {
  std::set<std::string> noms, props;
  for (const Node& n : f.nodes()) {
    if (n.op == Op::Nominal || (n.op == Op::At && !n.at_svar)) noms.insert(n.name);
    if (n.op == Op::Prop) props.insert(n.name);
  }
  std::set<std::string> free_vars = analyze(f).free_svars;

  std::vector<std::string> nom_list(noms.begin(), noms.end());
  std::vector<std::string> var_list(free_vars.begin(), free_vars.end());
  std::vector<std::string> prop_list(props.begin(), props.end());

  for (int n = 1; n <= max_states; ++n) {
    std::vector<int> eta(nom_list.size(), 0);
    for (;;) {  // odometer over nominal placements
      std::vector<int> g(var_list.size(), 0);
      for (;;) {  // odometer over assignments
        std::vector<unsigned> pv(prop_list.size(), 0);
        for (;;) {  // odometer over proposition valuations (bitmask per prop)
          FiniteLinearModel m;
          m.size = n;
          for (std::size_t i = 0; i < nom_list.size(); ++i) m.nominals[nom_list[i]] = eta[i];
          for (std::size_t i = 0; i < var_list.size(); ++i) m.svars[var_list[i]] = g[i];
          for (std::size_t i = 0; i < prop_list.size(); ++i) {
            std::set<int> ss;
            for (int s = 0; s < n; ++s)
              if (pv[i] & (1u << s)) ss.insert(s);
            m.props[prop_list[i]] = std::move(ss);
          }
          for (int w = 0; w < n; ++w)
            if (check_finite(m, w, f)) return std::make_pair(m, w);

          std::size_t k = 0;
          while (k < pv.size() && ++pv[k] == (1u << n)) pv[k++] = 0;
          if (k == pv.size()) break;
        }
        std::size_t k = 0;
        while (k < g.size() && ++g[k] == n) g[k++] = 0;
        if (k == g.size()) break;
      }
      std::size_t k = 0;
      while (k < eta.size() && ++eta[k] == n) eta[k++] = 0;
      if (k == eta.size()) break;
    }
  }
  return std::nullopt;
}

// ── quotient ────────────────────────────────────────────────────────────────

// delta(w): number of states strictly between w and the next nominal state.
// When no nominal follows, a finite model measures to its end instead
// (`trailing` is set): the states past the last nominal are separated by
// their distance to the final state, which <>-chains can count.  Undefined
// on nominal states.
struct DeltaInfo {
  bool nominal_state = false;
  bool trailing = false;
  int value = 0;
};

struct QuotientResult {
  FiniteLinearModel quotient;
  std::vector<int> class_map;    // original state -> quotient state
  std::vector<int> class_sizes;  // per quotient state
  std::vector<DeltaInfo> delta;  // per original state
};

// The m-inseparability quotient: two adjacent non-nominal states merge when
// both lie more than `md` states before the next nominal (or have none
// following).  Nominal states always form singleton classes, so classes are
// convex and never span a nominal.
inline QuotientResult quotient(const FiniteLinearModel& m, int md) {
  m.validate();
  if (!m.svars.empty())
    throw ModelError("quotient: model must not carry a state-variable assignment");
  if (!m.props.empty())
    throw ModelError("quotient: model must not carry a proposition valuation");

  std::vector<bool> is_nominal(m.size, false);
  for (const auto& [name, s] : m.nominals) is_nominal[s] = true;

  QuotientResult out;
  out.delta.resize(m.size);
  int next_nominal = -1;  // nominal state following w, scanning right to left
  for (int w = m.size - 1; w >= 0; --w) {
    if (is_nominal[w]) {
      out.delta[w] = DeltaInfo{true, false, 0};
    } else if (next_nominal < 0) {
      out.delta[w] = DeltaInfo{false, true, m.size - 1 - w};
    } else {
      out.delta[w] = DeltaInfo{false, false, next_nominal - w - 1};
    }
    if (is_nominal[w]) next_nominal = w;
  }

  auto merges_left = [&](int w) {
    if (w == 0) return false;
    const DeltaInfo& a = out.delta[w - 1];
    const DeltaInfo& b = out.delta[w];
    auto big = [&](const DeltaInfo& d) { return !d.nominal_state && d.value > md; };
    return big(a) && big(b);
  };

  out.class_map.resize(m.size);
  for (int w = 0; w < m.size; ++w) {
    if (w > 0 && merges_left(w)) {
      out.class_map[w] = out.class_map[w - 1];
      ++out.class_sizes.back();
    } else {
      out.class_map[w] = static_cast<int>(out.class_sizes.size());
      out.class_sizes.push_back(1);
    }
  }

  out.quotient.size = static_cast<int>(out.class_sizes.size());
  for (const auto& [name, s] : m.nominals) out.quotient.nominals[name] = out.class_map[s];
  return out;
}

// ── SegmentedLinearModel ────────────────────────────────────────────────────

// A finite sequence of discrete points and dense blocks.  A dense block
// stands for an interval order-isomorphic to the rationals in (0,1); all of
// its points are modally indistinguishable, so it is evaluated through a
// single representative.
struct Segment {
  bool dense = false;
  std::set<std::string> nominals;  // empty on dense blocks
};

struct SegmentedLinearModel {
  std::vector<Segment> segments;

  // Validates and merges adjacent dense blocks.
  static SegmentedLinearModel make(std::vector<Segment> segs) {
    SegmentedLinearModel m;
    std::set<std::string> seen;
    for (Segment& s : segs) {
      if (s.dense && !s.nominals.empty())
        throw ModelError("dense blocks carry no nominals");
      for (const std::string& i : s.nominals)
        if (!seen.insert(i).second)
          throw ModelError("nominal '#" + i + "' placed twice");
      if (s.dense && !m.segments.empty() && m.segments.back().dense) continue;
      m.segments.push_back(std::move(s));
    }
    return m;
  }

  int find_nominal(const std::string& i) const {
    for (std::size_t e = 0; e < segments.size(); ++e)
      if (segments[e].nominals.count(i)) return static_cast<int>(e);
    return -1;
  }
};

namespace detail {

struct SegEnv {
  const SegmentedLinearModel& m;
  const Formula& f;
  std::map<std::pair<NodeId, int>, bool> memo;

  bool eval(NodeId id, int e) {
    auto key = std::make_pair(id, e);
    auto hit = memo.find(key);
    if (hit != memo.end()) return hit->second;
    const Node& n = f.node(id);
    const int count = static_cast<int>(m.segments.size());
    bool dense = m.segments[e].dense;
    bool r = false;
    switch (n.op) {
      case Op::Top: r = true; break;
      case Op::Bottom: r = false; break;
      case Op::Nominal:
        if (m.find_nominal(n.name) < 0)
          throw EvalError("uninterpreted nominal '#" + n.name + "'");
        r = m.segments[e].nominals.count(n.name) != 0;
        break;
      case Op::And: r = eval(n.left, e) && eval(n.right, e); break;
      case Op::Or: r = eval(n.left, e) || eval(n.right, e); break;
      case Op::Diamond:
        r = dense && eval(n.left, e);  // a block has successors inside itself
        for (int v = e + 1; v < count && !r; ++v) r = eval(n.left, v);
        break;
      case Op::Box:
        r = !dense || eval(n.left, e);
        for (int v = e + 1; v < count && r; ++v) r = eval(n.left, v);
        break;
      case Op::At: {
        if (n.at_svar) throw FragmentError("check_segmented: state variables not supported");
        int target = m.find_nominal(n.name);
        if (target < 0) throw EvalError("uninterpreted nominal '#" + n.name + "'");
        r = eval(n.left, target);
        break;
      }
      case Op::Prop: throw EvalError("uninterpreted proposition '" + n.name + "'");
      case Op::SVar: throw FragmentError("check_segmented: state variables not supported");
      case Op::Down: throw FragmentError("check_segmented: binders not supported");
      case Op::Neg: throw FragmentError("check_segmented: negation not supported");
    }
    memo.emplace(key, r);
    return r;
  }
};

}  // namespace detail

// Model check at segment `e`.  Points follow the standard clauses over later
// segments; a dense-block representative additionally reaches itself through
// <> and constrains itself through [].
inline bool check_segmented(const SegmentedLinearModel& m, int e, const Formula& f) {
  if (e < 0 || e >= static_cast<int>(m.segments.size()))
    throw EvalError("segment index out of range");
  detail::SegEnv env{m, f, {}};
  return env.eval(f.root(), e);
}

}  // namespace hylosat

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "generators.hpp"
#include "hylosat/formula.hpp"
#include "hylosat/kripke.hpp"

using namespace hylosat;

namespace {

// Independent modal-depth oracle: plain recursion, <> and [] step, down/@
// do not.
int depth_oracle(const Formula& f, NodeId id = 0) {
  const Node& n = f.node(id);
  switch (n.op) {
    case Op::Diamond:
    case Op::Box: return 1 + depth_oracle(f, n.left);
    case Op::And:
    case Op::Or: return std::max(depth_oracle(f, n.left), depth_oracle(f, n.right));
    case Op::Neg:
    case Op::Down:
    case Op::At: return depth_oracle(f, n.left);
    default: return 0;
  }
}

// Independent fragment-membership predicate for MHL(O)/HL(O).
bool in_fragment(const Formula& f, bool dia, bool box, bool dna, bool at, bool allow_neg) {
  for (const Node& n : f.nodes()) {
    if (n.op == Op::Diamond && !dia) return false;
    if (n.op == Op::Box && !box) return false;
    if (n.op == Op::Down && !dna) return false;
    if (n.op == Op::At && !at) return false;
    if (n.op == Op::Neg && !allow_neg) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parse examples") {
  CHECK(parse("down x. <> $x") ==
        Formula::down("x", Formula::diamond(Formula::svar("x"))));
  CHECK(parse("(#i0 & <> #i1)") ==
        Formula::conj(Formula::nominal("i0"), Formula::diamond(Formula::nominal("i1"))));
  // the @-subscript counts as an occurrence; bare targets read as variables
  CHECK(parse("down x. @x @y $z") ==
        Formula::down("x", Formula::at_var("x", Formula::at_var("y", Formula::svar("z")))));
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK_THROWS_AS(parse("down x <> $x"), ParseError);
  CHECK_THROWS_AS(parse("(a & b"), ParseError);
  CHECK_THROWS_AS(parse("%x"), ParseError);
  CHECK_THROWS_AS(parse("a & & b"), ParseError);
  try {
    parse("(a & %x)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset == 5);
  }
}

TEST_CASE("print examples") {
  CHECK(print(Formula::down("x", Formula::svar("x"))) == "down x. $x");
  CHECK(print(Formula::conj(Formula::top(), Formula::bottom())) == "(true & false)");
  CHECK(print(Formula::at_nom("i", Formula::box(Formula::nominal("i")))) == "@#i [] #i");
}

TEST_CASE("parse-print round trip, exhaustively to 5 nodes") {
  gen::Config c;
  c.diamond = c.box = c.down = c.at = c.neg = true;
  c.svars = {"x", "y"};
  c.nominals = {"i"};
  c.props = true;
  c.prop_names = {"p"};
  for (const Formula& f : gen::exhaustive(c, 5)) CHECK(parse(print(f)) == f);
}

TEST_CASE("parse-print round trip, random larger formulas") {
  std::mt19937 rng(20240809);
  gen::Config c;
  c.diamond = c.box = c.down = c.at = c.neg = true;
  c.svars = {"x", "y", "z"};
  c.nominals = {"i", "j"};
  c.props = true;
  for (int rep = 0; rep < 500; ++rep) {
    Formula f = gen::random_formula(rng, c, 20);
    CHECK(parse(print(f)) == f);
  }
}

TEST_CASE("node ids are preorder-contiguous") {
  Formula f = parse("(down x. @x $y | <> (#i & [] true))");
  for (NodeId id = 0; id < f.size(); ++id) {
    const Node& n = f.node(id);
    if (n.left >= 0) CHECK(n.left == id + 1);
    if (n.right >= 0) CHECK(n.right == f.end(n.left));
  }
}

TEST_CASE("analyze examples") {
  {
    Analysis a = analyze(parse("down x. <> $x"));
    CHECK(a.signature.has_diamond);
    CHECK(a.signature.has_down);
    CHECK_FALSE(a.signature.has_box);
    CHECK_FALSE(a.signature.has_at);
    CHECK(a.modal_depth == 1);
    CHECK(a.free_svars.empty());
  }
  {
    // @-subscripts count as free occurrences: y and z are free here
    Analysis a = analyze(parse("down x. @x @y $z"));
    CHECK(a.signature.has_down);
    CHECK(a.signature.has_at);
    CHECK(a.modal_depth == 0);
    CHECK(a.free_svars == std::set<std::string>{"y", "z"});
  }
  {
    Analysis a = analyze(parse("<> (#i0 & <> #i1)"));
    CHECK(a.signature.has_diamond);
    CHECK_FALSE(a.signature.has_box);
    CHECK(a.signature.uses_nominals);
    CHECK(a.modal_depth == 2);
    CHECK(a.free_svars.empty());
  }
}

TEST_CASE("modal depth matches the recursion oracle") {
  std::mt19937 rng(7);
  gen::Config c;
  c.diamond = c.box = c.down = c.at = true;
  c.svars = {"x", "y"};
  c.nominals = {"i"};
  for (int rep = 0; rep < 300; ++rep) {
    Formula f = gen::random_formula(rng, c, 12);
    CHECK(analyze(f).modal_depth == depth_oracle(f));
  }
}

TEST_CASE("operator signature agrees with fragment membership") {
  std::mt19937 rng(8);
  gen::Config c;
  c.diamond = c.box = c.down = c.at = c.neg = true;
  c.svars = {"x"};
  c.nominals = {"i"};
  for (int rep = 0; rep < 400; ++rep) {
    Formula f = gen::random_formula(rng, c, 8);
    FragmentSignature sig = analyze(f).signature;
    for (int mask = 0; mask < 16; ++mask) {
      bool dia = mask & 1, box = mask & 2, dna = mask & 4, at = mask & 8;
      CHECK(sig.operators_subset_of(dia, box, dna, at) ==
            in_fragment(f, dia, box, dna, at, true));
    }
    CHECK(sig.monotone == in_fragment(f, true, true, true, true, false));
  }
}

TEST_CASE("rename_apart examples") {
  CHECK(rename_apart(parse("(down x. $x & down x. $x)")) ==
        parse("(down x. $x & down x1. $x1)"));
  CHECK(rename_apart(parse("down x. <> down x. $x")) == parse("down x. <> down x1. $x1"));
  CHECK(rename_apart(parse("($y & down y. $y)")) == parse("($y & down y1. $y1)"));
}

TEST_CASE("rename_apart establishes the invariants") {
  std::mt19937 rng(9);
  gen::Config c;
  c.diamond = c.box = c.down = c.at = true;
  c.svars = {"x", "y"};
  c.nominals = {"i"};
  for (int rep = 0; rep < 500; ++rep) {
    Formula f = gen::random_formula(rng, c, 10);
    Formula r = rename_apart(f);
    std::set<std::string> binders;
    for (const Node& n : r.nodes())
      if (n.op == Op::Down) CHECK(binders.insert(n.name).second);
    std::set<std::string> free = analyze(r).free_svars;
    for (const std::string& b : binders) CHECK_FALSE(free.count(b));
  }
}

TEST_CASE("rename_apart preserves finite-model truth") {
  std::mt19937 rng(10);
  gen::Config c;
  c.diamond = c.box = c.down = c.at = true;
  c.svars = {"x", "y"};
  c.nominals = {"i"};
  for (int rep = 0; rep < 300; ++rep) {
    Formula f = gen::random_formula(rng, c, 9);
    Formula r = rename_apart(f);
    int states = 1 + static_cast<int>(rng() % 4);
    FiniteLinearModel m;
    m.size = states;
    for (const Node& n : f.nodes()) {
      if (n.op == Op::SVar || (n.op == Op::At && n.at_svar))
        m.svars[n.name] = static_cast<int>(rng() % states);
      if (n.op == Op::Nominal || (n.op == Op::At && !n.at_svar))
        m.nominals[n.name] = static_cast<int>(rng() % states);
    }
    for (int w = 0; w < states; ++w)
      CHECK(check_finite(m, w, f) == check_finite(m, w, r));
  }
}

TEST_CASE("normalize_monotone examples") {
  CHECK(normalize_monotone(parse("(p & <> q)"), false) == parse("(true & <> true)"));
  CHECK(normalize_monotone(parse("(#i & down x. @#i $x)"), true) ==
        parse("($vi & down x. @$vi $x)"));
  CHECK(normalize_monotone(parse("true"), true) == parse("true"));
  CHECK_THROWS_AS(normalize_monotone(parse("! p"), false), FragmentError);
}

TEST_CASE("normalize_monotone preserves bounded satisfiability") {
  std::mt19937 rng(11);
  gen::Config c;
  c.diamond = c.box = c.down = c.at = true;
  c.svars = {"x"};
  c.nominals = {"i"};
  c.props = true;
  c.prop_names = {"p"};
  for (int rep = 0; rep < 120; ++rep) {
    Formula f = gen::random_formula(rng, c, 6);
    bool binder_mode = analyze(f).signature.has_down;
    Formula g = normalize_monotone(f, binder_mode);
    CHECK(sat_search_finite(f, 3).has_value() == sat_search_finite(g, 3).has_value());
  }
}

TEST_CASE("classify_occurrence examples") {
  {
    Formula f = parse("down x. $x");  // occurrence of x at node 1
    CHECK(classify_occurrence(f, 1) == OccurrenceClass::BoundByDown);
  }
  {
    Formula f = parse("down x. $y");
    CHECK(classify_occurrence(f, 1) == OccurrenceClass::Free);
  }
  {
    Formula f = parse("down x. [] $x");  // [] is hit first walking up
    CHECK(classify_occurrence(f, 2) == OccurrenceClass::BoundByBox);
  }
  {
    Formula f = parse("@#i #j");
    CHECK(classify_occurrence(f, 1) == OccurrenceClass::BoundByAt);
  }
  CHECK_THROWS_AS(classify_occurrence(parse("$x"), 5), std::out_of_range);
  CHECK_THROWS_AS(classify_occurrence(parse("down x. $x"), 0), FragmentError);
}

TEST_CASE("classify_occurrence is total on atom occurrences") {
  std::mt19937 rng(12);
  gen::Config c;
  c.diamond = c.box = c.down = c.at = true;
  c.svars = {"x", "y"};
  c.nominals = {"i"};
  for (int rep = 0; rep < 300; ++rep) {
    Formula f = gen::random_formula(rng, c, 10);
    for (NodeId id = 0; id < f.size(); ++id) {
      if (f.node(id).op == Op::SVar || f.node(id).op == Op::Nominal)
        CHECK_NOTHROW(classify_occurrence(f, id));
    }
  }
}

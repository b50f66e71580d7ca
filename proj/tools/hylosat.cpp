// ============================================================================
// hylosat — satisfiability toolkit for monotone hybrid logic over linear
// orders and the natural numbers
// ============================================================================
//
//   hylosat decide   --frame nat|lin [--route auto|...] [FILE]
//   hylosat translate --to fol [FILE]
//   hylosat encode   --from qbf|dimacs|ord|folp [FILE]
//   hylosat check    --model M.json [--state K] [FILE]
//   hylosat quotient --m K M.json
//
// Formulas are read from FILE or standard input.  JSON goes to standard
// output; diagnostics go to standard error.  Exit codes: 0 decided/produced,
// 2 parse error, 3 unsupported fragment/frame route, 4 resource limit
// (verdict "unknown"), 5 invalid model file.  HYLOSAT_QE_LIMIT overrides the
// quantifier-elimination cube ceiling.
//
// ============================================================================

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hylosat/deciders.hpp"
#include "hylosat/fol.hpp"
#include "hylosat/formula.hpp"
#include "hylosat/json_io.hpp"
#include "hylosat/kripke.hpp"
#include "hylosat/reductions.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitResource = 4;
constexpr int kExitModel = 5;

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t qe_limit_from_env() {
  const char* env = std::getenv("HYLOSAT_QE_LIMIT");
  if (!env) return hylosat::kDefaultQeCubeLimit;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) {
    std::cerr << "hylosat: ignoring malformed HYLOSAT_QE_LIMIT\n";
    return hylosat::kDefaultQeCubeLimit;
  }
  return static_cast<std::size_t>(v);
}

hylosat::Verdict decide_forced(const hylosat::Formula& g, const std::string& route,
                               hylosat::Frame frame, const hylosat::DecideOptions& opts) {
  using namespace hylosat;
  if (route == "one-state") return decide_one_state(g, frame);
  if (route == "lin-box-free") return decide_lin_box_free(g);
  if (route == "nat-box-at") return decide_nat_box_at(g);
  if (route == "nat-box-down") return decide_nat_box_down(g);
  if (route == "nat-logspace") return decide_nat_logspace(g);
  if (route == "nat-qe") return decide_nat_qe(g, opts);
  if (route == "np-small-model")
    return frame == Frame::Nat ? decide_np_nat(g, opts) : decide_np_lin(g, opts);
  throw hylosat::UnsupportedRouteError("unknown route '" + route + "'");
}

void print_pretty(const hylosat::Verdict& v) {
  using namespace hylosat;
  std::cout << to_string(v.result) << "  (route " << to_string(v.route) << ", frame "
            << to_string(v.frame) << ")\n";
  if (v.witness) {
    const Witness& w = *v.witness;
    std::cout << "witness at state " << w.state;
    switch (w.kind) {
      case Witness::Kind::Nat: std::cout << " over (N,<)"; break;
      case Witness::Kind::Finite:
        std::cout << " in a " << w.finite.size << "-state chain";
        break;
      case Witness::Kind::Segmented:
        std::cout << " in a " << w.segmented.segments.size() << "-segment model";
        break;
    }
    std::cout << "\n";
    for (const auto& [name, s] : w.valuation) std::cout << "  #" << name << " -> " << s << "\n";
    for (const auto& [name, s] : w.assignment) std::cout << "  $" << name << " -> " << s << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hylosat;

  CLI::App app{"satisfiability toolkit for monotone hybrid logic over linear orders and N"};
  app.require_subcommand(1);
  app.footer(R"(formula grammar:
  formula := disj ;  disj := conj ('|' conj)* ;  conj := unary ('&' unary)*
  unary   := 'true' | 'false' | atom | '<>' unary | '[]' unary | '!' unary
           | 'down' NAME '.' unary | '@' target unary | '(' formula ')'
  atom    := PROP | '#'NAME | '$'NAME ;  target := '$'NAME | '#'NAME | NAME
  PROP, NAME := [a-z][a-z0-9_]*

model files (JSON):
  {"kind":"finite","states":3,"nominals":{"i":1},"svars":{"x":0}}
  {"kind":"segmented","segments":[{"type":"point","nominals":["i"]},
                                  {"type":"dense"}]}

encode inputs:
  qbf    prenex text: 'forall x. exists y. ((x & y) | (!x & !y))'
  dimacs 'p cnf V C' header and three literals per clause
  ord    {"vertices":["a","b"],"successor":[["a","b"]],"s":"a","t":"b"}
  folp   prenex FOL(<,P) text: 'exists x. (P(x) | ! x < y)'

fol output grammar: 'exists x.' / 'forall x.' prefixes, atoms 'x < y',
'x = y', connectives '&' '|' '!', numerals as terms.

verdicts: {"verdict":"sat|unsat|unknown","route":...,"frame":...,
           "witness":{"assignment":...,"valuation":...,"model":...,"state":...}}

exit codes: 0 decided/produced, 2 parse error, 3 unsupported fragment/route,
4 resource limit (verdict "unknown"), 5 invalid model file.
HYLOSAT_QE_LIMIT overrides the quantifier-elimination cube ceiling.)");

  std::string frame_name = "nat";
  std::string route_name = "auto";
  std::string from_format;
  std::string to_format;
  std::string model_path;
  std::string input_path;
  int state = 0;
  int quotient_md = 0;
  int fallback_states = 0;
  bool pretty = false;
  bool verify = false;

  CLI::App* cmd_decide = app.add_subcommand("decide", "decide satisfiability");
  cmd_decide->add_option("--frame", frame_name, "frame class: nat or lin")
      ->check(CLI::IsMember({"nat", "lin"}))
      ->required();
  cmd_decide->add_option("--route", route_name,
                         "force a decision procedure (default: auto)")
      ->check(CLI::IsMember({"auto", "one-state", "lin-box-free", "nat-box-at",
                             "nat-box-down", "nat-logspace", "np-small-model", "nat-qe"}));
  cmd_decide->add_option("--finite-fallback", fallback_states,
                         "semi-check the unsupported route by brute force up to N states");
  cmd_decide->add_flag("--pretty", pretty, "human-readable output");
  cmd_decide->add_flag("--verify", verify, "re-check the witness before printing");
  cmd_decide->add_option("file", input_path, "formula file (default: stdin)");

  CLI::App* cmd_translate = app.add_subcommand("translate", "translate to first-order logic");
  cmd_translate->add_option("--to", to_format, "target: fol")
      ->check(CLI::IsMember({"fol"}))
      ->required();
  cmd_translate->add_option("file", input_path, "formula file (default: stdin)");

  CLI::App* cmd_encode = app.add_subcommand("encode", "encode a source problem as a formula");
  cmd_encode->add_option("--from", from_format, "source: qbf, dimacs, ord, or folp")
      ->check(CLI::IsMember({"qbf", "dimacs", "ord", "folp"}))
      ->required();
  cmd_encode->add_option("file", input_path, "instance file (default: stdin)");

  CLI::App* cmd_check = app.add_subcommand("check", "model-check a formula");
  cmd_check->add_option("--model", model_path, "model file (JSON)")->required();
  cmd_check->add_option("--state", state, "evaluation state or segment index (default 0)");
  cmd_check->add_option("file", input_path, "formula file (default: stdin)");

  CLI::App* cmd_quotient = app.add_subcommand("quotient", "m-inseparability quotient");
  cmd_quotient->add_option("--m", quotient_md, "modal depth bound")->required();
  cmd_quotient->add_option("model", model_path, "model file (JSON)")->required();
  cmd_quotient->add_flag("--pretty", pretty, "human-readable output");

  CLI11_PARSE(app, argc, argv);

  DecideOptions opts;
  opts.qe_cubes = qe_limit_from_env();
  opts.finite_fallback_states = fallback_states;

  try {
    if (cmd_decide->parsed()) {
      Frame frame = frame_name == "nat" ? Frame::Nat : Frame::Lin;
      Formula f = parse(read_input(input_path));
      Verdict v;
      if (route_name == "auto") {
        v = decide(f, frame, opts);
      } else {
        Analysis a = analyze(f);
        if (!a.signature.monotone) throw FragmentError("non-monotone input");
        Route forced = route(a.signature, frame);  // only for normalization mode
        Formula g = normalize_for_route(
            f, route_name == "nat-logspace" ? Route::NatLogspace : forced, a.signature);
        v = decide_forced(g, route_name, frame, opts);
      }
      if (verify && !verify_witness(v)) {
        std::cerr << "hylosat: witness failed re-validation\n";
        return 1;
      }
      if (pretty) print_pretty(v);
      else std::cout << to_json(v).dump() << "\n";
      return v.result == SatResult::Unknown ? kExitResource : kExitOk;
    }

    if (cmd_translate->parsed()) {
      Formula f = parse(read_input(input_path));
      Analysis a = analyze(f);
      if (!a.signature.monotone) throw FragmentError("translate: non-monotone input");
      Formula g = normalize_monotone(rename_apart(f), a.signature.has_down);
      std::cout << print_fol(close_sentence(g)) << "\n";
      return kExitOk;
    }

    if (cmd_encode->parsed()) {
      std::string text = read_input(input_path);
      Formula out;
      if (from_format == "qbf") out = encode_qbf(parse_qbf(text));
      else if (from_format == "dimacs") out = encode_3sat(parse_dimacs(text));
      else if (from_format == "ord") out = encode_ord(ord_from_json(json::parse(text)));
      else out = encode_folp(parse_folp(text));
      std::cout << print(out) << "\n";
      return kExitOk;
    }

    if (cmd_check->parsed()) {
      ParsedModel m = model_from_json(json::parse(read_input(model_path)));
      Formula f = parse(read_input(input_path));
      bool r = m.segmented ? check_segmented(m.seg, state, f)
                           : check_finite(m.finite, state, f);
      std::cout << (r ? "true" : "false") << "\n";
      return kExitOk;
    }

    if (cmd_quotient->parsed()) {
      ParsedModel m = model_from_json(json::parse(read_input(model_path)));
      if (m.segmented) throw ModelError("quotient expects a finite model");
      QuotientResult q = quotient(m.finite, quotient_md);
      if (pretty) {
        std::cout << q.quotient.size << " classes\n";
        for (std::size_t c = 0; c < q.class_sizes.size(); ++c)
          std::cout << "  class " << c << ": " << q.class_sizes[c] << " state(s)\n";
      } else {
        std::cout << to_json(q).dump() << "\n";
      }
      return kExitOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "hylosat: parse error at byte " << e.offset << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const UnsupportedRouteError& e) {
    std::cerr << "hylosat: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const FragmentError& e) {
    std::cerr << "hylosat: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const QeLimitError& e) {
    std::cerr << "hylosat: " << e.what() << "\n";
    return kExitResource;
  } catch (const ModelError& e) {
    std::cerr << "hylosat: " << e.what() << "\n";
    return kExitModel;
  } catch (const EvalError& e) {
    std::cerr << "hylosat: " << e.what() << "\n";
    return kExitModel;
  } catch (const json::exception& e) {
    std::cerr << "hylosat: invalid JSON: " << e.what() << "\n";
    return kExitModel;
  } catch (const std::exception& e) {
    std::cerr << "hylosat: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

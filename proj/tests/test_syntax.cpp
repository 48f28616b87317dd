#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "mvred/syntax.hpp"
#include "mvred/util.hpp"

using namespace mvred;

namespace {

ErrorKind error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Parse;
}

void expect_parse_error(const std::string& text, const std::string& needle) {
  try {
    parse_program(text);
    FAIL_CHECK("no error for: " << text);
  } catch (const Error& e) {
    CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                  "message '" << e.what() << "' lacks '" << needle << "'");
  }
}

const char* kSample = R"(% basic sample
lattice belnap4.
p(a) <- @t.
r(a,b) <- @top.
q(X) :- p(X), ~r(X,Y).
s(X) :- q(X); p(X), eq(X,a).
)";

}  // namespace

TEST_CASE("programs parse into the expected shape") {
  Program p = parse_program(kSample);
  CHECK(p.lattice.name == "belnap4");
  REQUIRE(p.rules.size() == 4);

  CHECK(p.rules[0].is_fact());
  CHECK(p.rules[0].head == Atom{"p", {Term{false, "a"}}});
  CHECK(*p.rules[0].fact_value == *resolve_value_text(p.lattice, "t"));

  CHECK(p.rules[1].is_fact());
  CHECK(p.rules[1].head.pred == "r");

  const Rule& q = p.rules[2];
  CHECK_FALSE(q.is_fact());
  REQUIRE(q.body.size() == 1);
  REQUIRE(q.body[0].size() == 2);
  CHECK_FALSE(q.body[0][0].negated);
  CHECK(q.body[0][0].atom == Atom{"p", {Term{true, "X"}}});
  CHECK(q.body[0][1].negated);
  CHECK(q.body[0][1].atom == Atom{"r", {Term{true, "X"}, Term{true, "Y"}}});

  const Rule& s = p.rules[3];
  REQUIRE(s.body.size() == 2);
  CHECK(s.body[0].size() == 1);
  CHECK(s.body[1].size() == 2);
  CHECK(s.body[1][1].atom.pred == "eq");

  CHECK(p.constants == std::vector<std::string>{"a", "b"});
  REQUIRE(p.predicates.size() == 4);
  CHECK(p.predicates.at("p") == 1);
  CHECK(p.predicates.at("q") == 1);
  CHECK(p.predicates.at("r") == 2);
  CHECK(p.predicates.at("s") == 1);
  CHECK(p.predicates.count("eq") == 0);
}

TEST_CASE("propositional atoms omit parentheses") {
  Program p = parse_program("lattice belnap4.\nwet <- @t.\nslippery :- wet.\n");
  CHECK(p.rules[0].head == Atom{"wet", {}});
  CHECK(p.predicates.at("slippery") == 0);
  CHECK(p.constants.empty());
  CHECK(print_program(p) ==
        "lattice belnap4.\nwet <- @t.\nslippery :- wet.\n");
}

TEST_CASE("value literals parse in every builtin notation") {
  Program p = parse_program(
      "lattice fuzzy:5.\np(a) <- @0.25.\nq(a) <- @1/4.\nr(a) <- @1.\n");
  CHECK(p.lattice.id(*p.rules[0].fact_value) == "0.25");
  CHECK(*p.rules[0].fact_value == *p.rules[1].fact_value);
  CHECK(*p.rules[2].fact_value == p.lattice.top);

  Program iv = parse_program("lattice interval:3.\np(a) <- @[0, 0.5].\n");
  CHECK(iv.lattice.id(*iv.rules[0].fact_value) == "[0,0.5]");

  Program cf = parse_program("lattice confidence:2.\np(a) <- @([0,0],[1,1]).\n");
  CHECK(*cf.rules[0].fact_value == cf.lattice.bottom);
}

TEST_CASE("parse errors carry a useful message and kind") {
  expect_parse_error("p(a) <- @t.", "lattice declaration");
  expect_parse_error("lattice belnap4.\np(a) <- @t", "'.'");
  expect_parse_error("lattice belnap4.\np(a,b) <- @t.\np(a) <- @t.",
                     "arity mismatch");
  expect_parse_error("lattice belnap4.\nbox(a) <- @t.", "reserved");
  expect_parse_error("lattice belnap4.\neq(a,b) <- @t.", "rule head");
  expect_parse_error("lattice belnap4.\np(a) :- leq(a).", "2 arguments");
  expect_parse_error("lattice belnap4.\np(a) <- @maybe.", "unknown value");
  expect_parse_error("lattice belnap4.\np(a) <- t.", "'@'");
  expect_parse_error("lattice nosuch.\np(a) <- @t.", "selector");
  CHECK(error_kind([] { parse_program("p."); }) == ErrorKind::Parse);
  CHECK(error_kind([] {
          parse_program("lattice belnap4.\np(a) <- @zzz.");
        }) == ErrorKind::Parse);
}

TEST_CASE("herbrand base is ordered by predicate then argument tuple") {
  Program p = parse_program(kSample);
  HerbrandBase base = herbrand_base(p);
  REQUIRE(base.size() == 10);
  std::vector<std::string> want = {"p(a)", "p(b)",   "q(a)",   "q(b)",
                                   "r(a,a)", "r(a,b)", "r(b,a)", "r(b,b)",
                                   "s(a)", "s(b)"};
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(base.atom_text(i) == want[i]);
    auto back = base.index_of(base.atom(i));
    REQUIRE(back.has_value());
    CHECK(*back == i);
  }
  CHECK_FALSE(base.index_of(Atom{"p", {Term{true, "X"}}}).has_value());
  CHECK_FALSE(base.index_of(Atom{"p", {Term{false, "c"}}}).has_value());
  CHECK_FALSE(base.index_of(Atom{"eq", {Term{false, "a"}, Term{false, "a"}}})
                  .has_value());
  CHECK_FALSE(base.index_of(Atom{"zz", {}}).has_value());
}

TEST_CASE("grounding enumerates substitutions over the sorted constants") {
  Program p = parse_program(kSample);
  GroundProgram gp = ground(p);
  // 2 facts, 4 instances of the q rule (X,Y), 2 instances of the s rule.
  REQUIRE(gp.rules.size() == 8);
  CHECK(gp.rules[0].is_fact());
  CHECK(gp.base.atom_text(gp.rules[0].head) == "p(a)");
  CHECK(gp.rules[1].is_fact());
  CHECK(gp.base.atom_text(gp.rules[1].head) == "r(a,b)");

  // q instances in odometer order: (a,a), (a,b), (b,a), (b,b).
  std::vector<std::string> negs;
  for (int i = 2; i < 6; ++i) {
    const GroundRule& r = gp.rules[i];
    REQUIRE(r.body.size() == 1);
    REQUIRE(r.body[0].size() == 2);
    CHECK(r.body[0][1].negated);
    negs.push_back(gp.base.atom_text(r.body[0][1].atom));
  }
  CHECK(negs == std::vector<std::string>{"r(a,a)", "r(a,b)", "r(b,a)", "r(b,b)"});

  // s(a): the eq(a,a) literal folds away, leaving two disjuncts.
  const GroundRule& sa = gp.rules[6];
  CHECK(gp.base.atom_text(sa.head) == "s(a)");
  REQUIRE(sa.body.size() == 2);
  CHECK(sa.body[0].size() == 1);
  CHECK(sa.body[1].size() == 1);
  CHECK(gp.base.atom_text(sa.body[1][0].atom) == "p(a)");

  // s(b): eq(b,a) is false, so that disjunct disappears entirely.
  const GroundRule& sb = gp.rules[7];
  CHECK(gp.base.atom_text(sb.head) == "s(b)");
  REQUIRE(sb.body.size() == 1);
  CHECK(gp.base.atom_text(sb.body[0][0].atom) == "q(b)");
}

TEST_CASE("builtins fold to facts or drop rules entirely") {
  Program p = parse_program(
      "lattice belnap4.\nn(a) <- @t.\nn(b) <- @t.\n"
      "t1(X) :- eq(X,X).\nt2(X) :- eq(a,b).\nt3(X) :- ~eq(a,b), n(X).\n"
      "t4(X,Y) :- n(X), leq(X,Y), n(Y).\n");
  GroundProgram gp = ground(p);
  std::vector<std::string> texts;
  for (const GroundRule& r : gp.rules) {
    std::string t = gp.base.atom_text(r.head);
    if (r.is_fact()) t += " <- @" + gp.lattice.id(*r.fact_value);
    texts.push_back(t);
  }
  // t1 becomes a fact annotated with the greatest truth value per constant;
  // t2 vanishes; t3 keeps only the n(X) literal; t4 keeps the instances with
  // X <= Y.
  CHECK(texts == std::vector<std::string>{
                     "n(a) <- @t", "n(b) <- @t", "t1(a) <- @t", "t1(b) <- @t",
                     "t3(a)", "t3(b)", "t4(a,a)", "t4(a,b)", "t4(b,b)"});
  for (const GroundRule& r : gp.rules)
    if (!r.is_fact())
      for (const auto& conj : r.body)
        for (const GroundLiteral& lit : conj)
          CHECK(gp.base.atom(lit.atom).pred == "n");
}

TEST_CASE("facts with variables ground over the constant set") {
  Program p = parse_program(
      "lattice belnap4.\nc(a) <- @t.\nc(b) <- @f.\nall(X) <- @top.\n");
  GroundProgram gp = ground(p);
  REQUIRE(gp.rules.size() == 4);
  CHECK(gp.base.atom_text(gp.rules[2].head) == "all(a)");
  CHECK(gp.base.atom_text(gp.rules[3].head) == "all(b)");

  CHECK(error_kind([] {
          ground(parse_program("lattice belnap4.\nonly(X) <- @t.\n"));
        }) == ErrorKind::Semantic);
}

TEST_CASE("merging folds same-head rules into one disjunction") {
  Program p = parse_program(
      "lattice belnap4.\np(a) <- @t.\n"
      "q(a) :- p(a).\nq(a) :- r(a).\nq(b) :- p(b).\nr(a) :- q(a), p(a).\n");
  GroundProgram gp = ground(p);
  auto merged = merge_rules_by_head(gp);
  REQUIRE(merged.size() == 4);
  CHECK(merged[0].is_fact());
  CHECK(gp.base.atom_text(merged[1].head) == "q(a)");
  CHECK(merged[1].body.size() == 2);  // two disjuncts folded together
  CHECK(gp.base.atom_text(merged[2].head) == "q(b)");
  CHECK(gp.base.atom_text(merged[3].head) == "r(a)");
  CHECK(merged[3].body.size() == 1);

  // Merging twice changes nothing.
  GroundProgram gp2 = gp;
  gp2.rules = merged;
  CHECK(merge_rules_by_head(gp2) == merged);
}

TEST_CASE("program print and parse are mutually inverse") {
  for (const char* text : {kSample,
                           "lattice fuzzy:5.\np(a) <- @0.75.\nq(X) :- p(X).\n",
                           "lattice interval:3.\np(a) <- @[0.5,1].\n",
                           "lattice confidence:2.\nd(x) <- @([1,1],[0,0]).\n"}) {
    Program p = parse_program(text);
    std::string printed = print_program(p);
    Program again = parse_program(printed);
    CHECK(again.rules == p.rules);
    CHECK(again.constants == p.constants);
    CHECK(again.predicates == p.predicates);
    CHECK(print_program(again) == printed);
  }
}

// ---------------------------------------------------------------------------
// Formulas.

TEST_CASE("formula examples parse to the documented shapes") {
  Lattice lat = builtin_lattice("belnap4");
  TruthValue t = *resolve_value_text(lat, "t");

  Formula f = parse_formula(lat, "[t] p(a)");
  CHECK(f.kind == FKind::MAtom);
  CHECK(*f.value == t);
  CHECK(f.atom == Atom{"p", {Term{false, "a"}}});
  CHECK(print_formula(lat, f) == "[t]p(a)");

  f = parse_formula(lat, "box p(a)");
  CHECK(f.kind == FKind::BoxGamma);
  CHECK(f.kids[0].kind == FKind::Atom);
  CHECK(print_formula(lat, f) == "box_gamma p(a)");

  f = parse_formula(lat, "dia p_F(a, t)");
  CHECK(f.kind == FKind::Dia);
  CHECK(f.kids[0].kind == FKind::FlatAtom);
  CHECK(f.kids[0].atom.pred == "p");
  CHECK(*f.kids[0].value == t);
  CHECK(print_formula(lat, f) == "dia p_F(a, t)");

  f = parse_formula(lat, "E(p(a) and ~q(a))");
  CHECK(f.kind == FKind::Encap);
  CHECK(f.kids[0].kind == FKind::MvAnd);
  CHECK(f.kids[0].kids[1].kind == FKind::MvNeg);
  CHECK(print_formula(lat, f) == "E(p(a) and ~q(a))");

  f = parse_formula(lat, "dia (E(p(a)) andA E(q(a)))");
  CHECK(f.kind == FKind::Dia);
  CHECK(f.kids[0].kind == FKind::AndA);
  CHECK(print_formula(lat, f) == "dia (E(p(a)) andA E(q(a)))");

  f = parse_formula(lat, "p_F(a, e)");
  CHECK(f.kind == FKind::FlatAtom);
  CHECK_FALSE(f.value.has_value());
  CHECK(print_formula(lat, f) == "p_F(a, e)");

  f = parse_formula(lat, "E(p(a) <- q(a) and @top)");
  CHECK(f.kids[0].kind == FKind::MvLarr);
  CHECK(f.kids[0].kids[1].kind == FKind::MvAnd);
  CHECK(f.kids[0].kids[1].kids[1].kind == FKind::MvConst);
  CHECK(print_formula(lat, f) == "E(p(a) <- q(a) and @top)");

  f = parse_formula(lat, "E(mu(p(a)) or otimes(q(a), @bot))");
  CHECK(f.kids[0].kids[0].kind == FKind::MvOp);
  CHECK(f.kids[0].kids[0].op_name == "mu");
  CHECK(f.kids[0].kids[1].op_name == "otimes");
  CHECK(print_formula(lat, f) == "E(mu(p(a)) or otimes(q(a), @bot))");
}

TEST_CASE("formula precedence and associativity") {
  Lattice lat = builtin_lattice("belnap4");

  Formula f = parse_formula(lat, "p(a) and q(a) or r(a)");
  CHECK(f.kind == FKind::Or);
  CHECK(f.kids[0].kind == FKind::And);

  f = parse_formula(lat, "(p(a) or q(a)) and r(a)");
  CHECK(f.kind == FKind::And);
  CHECK(print_formula(lat, f) == "(p(a) or q(a)) and r(a)");

  f = parse_formula(lat, "p(a) -> q(a) -> r(a)");
  CHECK(f.kind == FKind::Impl);
  CHECK(f.kids[1].kind == FKind::Impl);
  CHECK(print_formula(lat, f) == "p(a) -> q(a) -> r(a)");

  f = parse_formula(lat, "(p(a) -> q(a)) -> r(a)");
  CHECK(print_formula(lat, f) == "(p(a) -> q(a)) -> r(a)");

  f = parse_formula(lat, "not p(a) and q(a)");
  CHECK(f.kind == FKind::And);
  CHECK(f.kids[0].kind == FKind::Not);

  f = parse_formula(lat, "not (p(a) and q(a))");
  CHECK(f.kind == FKind::Not);
  CHECK(print_formula(lat, f) == "not (p(a) and q(a))");

  // Mixed same-precedence operators keep explicit grouping.
  f = parse_formula(lat, "(E(p(a)) andA E(q(a))) and [t]p(a)");
  CHECK(f.kind == FKind::And);
  CHECK(print_formula(lat, f) == "(E(p(a)) andA E(q(a))) and [t]p(a)");

  f = parse_formula(lat, "E(p(a)) <-A E(q(a)) orA E(r(a))");
  CHECK(f.kind == FKind::LarrA);
  CHECK(f.kids[1].kind == FKind::OrA);
}

TEST_CASE("formula parse errors") {
  Lattice lat = builtin_lattice("belnap4");
  auto bad = [&](const std::string& text, const std::string& needle) {
    try {
      parse_formula(lat, text);
      FAIL_CHECK("no error for: " << text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Parse);
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                    "message '" << e.what() << "' lacks '" << needle << "'");
    }
  };
  bad("p(a) and", "unexpected");
  bad("p(a))", "trailing");
  bad("[z]p(a)", "unknown value");
  bad("[t]", "predicate");
  bad("E(p(a)", "')'");
  bad("E(not p(a))", "reserved");
  bad("[t]box(a)", "reserved");
  bad("andA(a)", "reserved");
  bad("p_F(a)", "unknown value");  // "a" is not a lattice element
  bad("dia_d", "unexpected");
}

TEST_CASE("formula classification helpers") {
  Lattice lat = builtin_lattice("belnap4");
  CHECK(is_mv_formula(parse_formula(lat, "E(p(a) and ~q(b))").kids[0]));
  CHECK_FALSE(is_mv_formula(parse_formula(lat, "[t]p(a)")));
  CHECK(has_flat_ops(parse_formula(lat, "dia p_F(a, t)")));
  CHECK_FALSE(has_flat_ops(parse_formula(lat, "[t]p(a) and not [f]q(a)")));
  CHECK(has_abstract_ops(parse_formula(lat, "box_gamma p(a)")));
  CHECK_FALSE(has_abstract_ops(parse_formula(lat, "dia E(p(a))")));
  CHECK(formula_is_ground(parse_formula(lat, "[t]p(a)")));
  CHECK_FALSE(formula_is_ground(parse_formula(lat, "[t]p(X)")));
}

// ---------------------------------------------------------------------------
// Round-trip property over generated formula trees.

namespace {

Formula make_atom(Rng& rng) {
  Formula f;
  f.kind = FKind::Atom;
  f.atom.pred = std::string(1, static_cast<char>('p' + rng.below(3)));
  if (rng.chance(3, 4))
    f.atom.args.push_back(Term{false, std::string(1, static_cast<char>('a' + rng.below(2)))});
  return f;
}

Formula gen_mv(const Lattice& lat, Rng& rng, int depth) {
  if (depth == 0 || rng.chance(1, 3)) {
    if (rng.chance(1, 4)) {
      Formula f;
      f.kind = FKind::MvConst;
      f.value = TruthValue{static_cast<std::uint32_t>(rng.below(lat.size()))};
      return f;
    }
    return make_atom(rng);
  }
  Formula f;
  switch (rng.below(6)) {
    case 0:
      f.kind = FKind::MvNeg;
      f.kids.push_back(gen_mv(lat, rng, depth - 1));
      return f;
    case 1: f.kind = FKind::MvAnd; break;
    case 2: f.kind = FKind::MvOr; break;
    case 3: f.kind = FKind::MvLarr; break;
    case 4: f.kind = FKind::MvRarr; break;
    case 5: {
      if (!lat.extras.empty()) {
        f.kind = FKind::MvOp;
        auto it = lat.extras.begin();
        std::advance(it, rng.below(lat.extras.size()));
        f.op_name = it->first;
        f.kids.push_back(gen_mv(lat, rng, depth - 1));
        if (it->second.arity == 2) f.kids.push_back(gen_mv(lat, rng, depth - 1));
        return f;
      }
      f.kind = FKind::MvAnd;
      break;
    }
  }
  f.kids.push_back(gen_mv(lat, rng, depth - 1));
  f.kids.push_back(gen_mv(lat, rng, depth - 1));
  return f;
}

Formula gen_flat(const Lattice& lat, Rng& rng, int depth) {
  if (depth == 0 || rng.chance(1, 3)) {
    if (rng.chance(1, 2)) {
      Formula f = make_atom(rng);
      f.kind = FKind::FlatAtom;
      if (rng.chance(5, 6))
        f.value = TruthValue{static_cast<std::uint32_t>(rng.below(lat.size()))};
      return f;
    }
    Formula f;
    f.kind = FKind::Encap;
    f.kids.push_back(gen_mv(lat, rng, depth > 0 ? depth - 1 : 0));
    return f;
  }
  Formula f;
  switch (rng.below(5)) {
    case 0:
      f.kind = FKind::NotA;
      f.kids.push_back(gen_flat(lat, rng, depth - 1));
      return f;
    case 1:
      f.kind = FKind::Dia;
      f.kids.push_back(gen_flat(lat, rng, depth - 1));
      return f;
    case 2: f.kind = FKind::AndA; break;
    case 3: f.kind = FKind::OrA; break;
    case 4: f.kind = FKind::LarrA; break;
  }
  f.kids.push_back(gen_flat(lat, rng, depth - 1));
  f.kids.push_back(gen_flat(lat, rng, depth - 1));
  return f;
}

Formula gen_meta(const Lattice& lat, Rng& rng, int depth) {
  if (depth == 0 || rng.chance(1, 4)) {
    switch (rng.below(4)) {
      case 0: {
        Formula f = make_atom(rng);
        f.kind = FKind::MAtom;
        f.value = TruthValue{static_cast<std::uint32_t>(rng.below(lat.size()))};
        return f;
      }
      case 1: return make_atom(rng);
      case 2: {
        Formula f;
        f.kind = rng.chance(1, 2) ? FKind::BoxGamma : FKind::DiaD;
        f.kids.push_back(gen_mv(lat, rng, depth > 0 ? depth - 1 : 0));
        return f;
      }
      default: return gen_flat(lat, rng, depth > 0 ? depth - 1 : 0);
    }
  }
  Formula f;
  switch (rng.below(4)) {
    case 0:
      f.kind = FKind::Not;
      f.kids.push_back(gen_meta(lat, rng, depth - 1));
      return f;
    case 1: f.kind = FKind::And; break;
    case 2: f.kind = FKind::Or; break;
    case 3: f.kind = FKind::Impl; break;
  }
  f.kids.push_back(gen_meta(lat, rng, depth - 1));
  f.kids.push_back(gen_meta(lat, rng, depth - 1));
  return f;
}

}  // namespace

TEST_CASE("printing then parsing reproduces generated formulas") {
  for (const char* sel : {"belnap4", "fuzzy:5", "interval:3", "confidence:2"}) {
    Lattice lat = lattice_from_selector(sel);
    Rng rng(2026);
    for (int i = 0; i < 300; ++i) {
      Formula f = gen_meta(lat, rng, 4);
      std::string text = print_formula(lat, f);
      Formula back = parse_formula(lat, text);
      if (!(back == f)) {
        CAPTURE(sel);
        CAPTURE(text);
        CHECK(back == f);
        break;
      }
      CHECK(print_formula(lat, back) == text);
    }
  }
}

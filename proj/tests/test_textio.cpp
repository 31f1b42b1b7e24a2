#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logic/corpus.hpp"
#include "logic/textio.hpp"

using namespace logic;

namespace {

void check_roundtrip(const std::string& text) {
  auto f = parse_formula(text);
  auto printed = print_formula(f);
  CHECK(printed == text);
  CHECK(equal(parse_formula(printed), f));
}

}  // namespace

TEST_CASE("formula round trips are byte exact") {
  check_roundtrip("x = y");
  check_roundtrip("!x = y");
  check_roundtrip("R(x, y, z)");
  check_roundtrip("!R()");
  check_roundtrip("?a");
  check_roundtrip("!?a");
  check_roundtrip("dep(x, y; z)");
  check_roundtrip("dep(; ?a)");
  check_roundtrip("(x = y & (?a | !x = z))");
  check_roundtrip("forall x exists y exists ?a dep(x; ?a)");
  check_roundtrip("N[x, y : ?a | z : ?b]((?a & ?b))");
  check_roundtrip("!N[x : ?a](?a)");
  check_roundtrip("D[x | y]{00 : x = y, 01 : x = y, 10 : !x = y, 11 : !x = y}");
  // Whitespace inside the brackets is accepted and normalized away.
  CHECK(print_formula(parse_formula("N[ x : ?a ]( ?a )")) == "N[x : ?a](?a)");
}

TEST_CASE("sugar expands on parse and can be folded back") {
  auto f = parse_formula("(?a -> E(x, x))");
  CHECK(print_formula(f) == "(!?a | E(x, x))");
  PrintOptions sugar;
  sugar.resugar = true;
  CHECK(print_formula(f, sugar) == "(?a -> E(x, x))");
  auto g = parse_formula("(?a <-> ?b)");
  CHECK(print_formula(g) == "((?a & ?b) | (!?a & !?b))");
  CHECK(print_formula(g, sugar) == "(?a <-> ?b)");
}

TEST_CASE("parse errors carry byte spans") {
  try {
    parse_formula("(x = y &");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.span.start <= e.span.end);
  }
  CHECK_THROWS_AS(parse_formula(""), ParseError);
  CHECK_THROWS_AS(parse_formula("x = y extra"), ParseError);
  CHECK_THROWS_AS(parse_formula("exists ?a x"), ParseError);
  // Shared connective rows must agree with the branch count.
  CHECK_THROWS_AS(parse_formula("D[ x ]{ 00 : x = x }"), ParseError);
}

TEST_CASE("reserved names are rejected in user input") {
  CHECK_THROWS_AS(parse_formula("$x = $x"), ParseError);
  // Printing machine-generated names still round-trips internally.
  auto f = mk_equal(fo_var("$w0"), fo_var("$w0"));
  CHECK(print_formula(f) == "$w0 = $w0");
}

TEST_CASE("structure text round trips") {
  Structure a;
  a.voc.add("E", 2);
  a.voc.add("C", 0);
  a.domain_size = 3;
  a.relations["E"] = {{0, 1}, {2, 2}};
  a.relations["C"] = {{}};
  auto text = print_structure(a);
  auto back = parse_structure(text);
  CHECK(back == a);
  CHECK(print_structure(back) == text);
}

TEST_CASE("structure parse errors") {
  CHECK_THROWS(parse_structure("domain -1"));
  CHECK_THROWS(parse_structure("domain 2\nrel E 2\n0 5"));
  CHECK_THROWS(parse_structure("rel E 2"));
}

TEST_CASE("corpus formulas round trip") {
  CorpusSpec spec;
  spec.voc.add("E", 2);
  spec.max_size = 4;
  spec.fo_pool = {fo_var("x"), fo_var("y")};
  spec.bool_pool = {bool_var("a")};
  Budget budget;
  int seen = 0;
  enumerate_formulas(spec, budget, [&](const Ast& f) {
    auto printed = print_formula(f);
    CHECK(equal(parse_formula(printed), f));
    CHECK(print_formula(parse_formula(printed)) == printed);
    ++seen;
    return true;
  });
  CHECK(seen > 100);
}

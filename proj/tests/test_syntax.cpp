#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "logic/ast.hpp"
#include "logic/corpus.hpp"
#include "logic/textio.hpp"

using namespace logic;

namespace {

Ast P(const std::string& s) { return parse_formula(s); }

std::set<std::string> labels(const Ast& f) {
  std::set<std::string> out;
  for (auto l : classify(f)) out.insert(label_name(l));
  return out;
}

}  // namespace

TEST_CASE("variable ordering: kind, prefix, numeric suffix") {
  CHECK(fo_var("x") < bool_var("a"));
  CHECK(fo_var("x2") < fo_var("x10"));
  CHECK(fo_var("x") < fo_var("x1"));
  CHECK(fo_var("a") < fo_var("b"));
  CHECK_FALSE(fo_var("x") < fo_var("x"));
}

TEST_CASE("constructors validate their invariants") {
  CHECK_THROWS_AS(mk_equal(fo_var("x"), bool_var("a")), std::invalid_argument);
  CHECK_THROWS_AS(mk_bool_lit(fo_var("x")), std::invalid_argument);
  CHECK_THROWS_AS(mk_dep_fo({fo_var("x")}, bool_var("a")), std::invalid_argument);
  CHECK_THROWS_AS(mk_dep_bool({bool_var("a")}, bool_var("b")), std::invalid_argument);
  CHECK_THROWS_AS(mk_exists_fo(bool_var("a"), P("x = x")), std::invalid_argument);
  CHECK_THROWS_AS(mk_exists_bool(fo_var("x"), P("x = x")), std::invalid_argument);
}

TEST_CASE("negate is an involution on literals and flips and/or") {
  auto f = P("(E(x, y) & !x = y)");
  auto n = negate(f);
  REQUIRE(n.has_value());
  CHECK(n.value()->kind == NodeKind::Or);
  auto back = negate(n.value());
  REQUIRE(back.has_value());
  CHECK(equal(back.value(), f));
  // Dependence atoms and quantifiers have no dual in the grammar.
  CHECK_FALSE(negate(P("dep(x; y)")).has_value());
  CHECK_FALSE(negate(P("exists x x = x")).has_value());
}

TEST_CASE("implication sugar expands to negation normal form") {
  auto f = mk_implies(P("?a"), P("E(x, x)"));
  CHECK(equal(f, P("(!?a | E(x, x))")));
  auto g = mk_iff(P("?a"), P("?b"));
  CHECK(equal(g, P("((?a & ?b) | (!?a & !?b))")));
  CHECK_THROWS_AS(mk_implies(P("dep(x; y)"), P("x = x")), std::invalid_argument);
}

TEST_CASE("free variables and sentences") {
  CHECK(free_variables(P("exists x E(x, y)")) ==
        std::set<Variable>{fo_var("y")});
  CHECK(free_variables(P("dep(x; ?a)")) ==
        std::set<Variable>({fo_var("x"), bool_var("a")}));
  CHECK(is_sentence(P("forall x exists ?a (?a | E(x, x))")));
  CHECK_FALSE(is_sentence(P("?a")));
  // Connective rows bind their variables.
  CHECK(is_sentence(P("N[ x : ?a ]( (?a | E(x, x)) )")));
}

TEST_CASE("occurrence paths address preorder occurrences") {
  auto host = P("(E(x, y) | (E(x, y) & x = y))");
  auto sub = P("E(x, y)");
  auto p1 = occurrence_path(host, sub, 1);
  auto p2 = occurrence_path(host, sub, 2);
  REQUIRE(p1.has_value());
  REQUIRE(p2.has_value());
  CHECK(p1.value() == OccurrencePath{0});
  CHECK(p2.value() == OccurrencePath({1, 0}));
  CHECK_FALSE(occurrence_path(host, sub, 3).has_value());
  CHECK(equal(node_at(host, p2.value()), sub));
  auto swapped = substitute_at(host, p1.value(), P("x = x"));
  CHECK(equal(swapped, P("(x = x | (E(x, y) & x = y))")));
}

TEST_CASE("visible-variable set at an occurrence") {
  auto f = P("exists z forall x (E(z, y) | E(x, x))");
  auto occ = occurrence_path(f, P("E(x, x)")).value();
  // Free y plus the quantified z and x above the occurrence.
  CHECK(v_set(f, occ) ==
        std::set<Variable>({fo_var("x"), fo_var("y"), fo_var("z")}));
  // Boolean quantifiers do not contribute first-order variables.
  auto g = P("forall x exists ?a ?a");
  auto occ2 = occurrence_path(g, P("?a")).value();
  CHECK(v_set(g, occ2) == std::set<Variable>{fo_var("x")});
}

TEST_CASE("classify on reference formulas") {
  CHECK(labels(P("exists x exists y !x = y")) ==
        std::set<std::string>({"bbd", "bd", "d", "dependence-nf", "fo",
                               "fo-poc", "fo-poc+", "q-nf", "rbd",
                               "variable-nf"}));
  CHECK(labels(P("forall x exists ?a (dep(x; ?a) & (?a | E(x, x)))")) ==
        std::set<std::string>({"bbd", "bd", "dependence-nf", "forall-bd",
                               "q-nf", "rbd", "variable-nf"}));
  CHECK(labels(P("E(x, y)")) ==
        std::set<std::string>({"bbd", "bd", "d", "fo", "fo-poc", "fo-poc+",
                               "forall-bd", "qf", "rbd", "variable-nf"}));
  CHECK(labels(P("N[ x : ?a | y : ?b ]( (?a & ?b) )")) ==
        std::set<std::string>({"fo-poc", "fo-poc+", "poc[fo]", "poc[qf]"}));
}

TEST_CASE("scope-bound fragment membership is strict") {
  // A dependence atom whose antecedent equals its visible set stays bounded.
  CHECK(labels(P("forall x exists ?a dep(x; ?a)")).count("bbd") == 1);
  // Only existential first-order quantifiers impose the bound, so a purely
  // universal prefix never disqualifies.
  CHECK(labels(P("forall x forall y exists ?a dep(x; ?a)")).count("bbd") == 1);
  // An existential above the atom whose scope variables are not all in the
  // antecedent leaves the fragment.
  auto f = P("forall y exists x exists ?a dep(x; ?a)");
  CHECK(labels(f).count("bbd") == 0);
  CHECK(labels(f).count("bd") == 1);
  // The disconnectedness sentence keeps its consequent under one universal
  // only, yet the atom sits below both universals, so it is not bounded.
  CHECK(labels(non_connectivity()).count("bd") == 1);
  CHECK(labels(non_connectivity()).count("bbd") == 0);
}

TEST_CASE("rename refuses capture and respects scope") {
  auto f = P("exists x E(x, y)");
  auto g = rename_variables(f, {{fo_var("y"), fo_var("z")}},
                            RenameScope::FreeOnly);
  CHECK(equal(g, P("exists x E(x, z)")));
  // Renaming free y onto the bound x would capture.
  CHECK_THROWS_AS(rename_variables(f, {{fo_var("y"), fo_var("x")}},
                                   RenameScope::FreeOnly),
                  std::invalid_argument);
  auto h = rename_variables(f, {{fo_var("x"), fo_var("w")}},
                            RenameScope::AllOccurrences);
  CHECK(equal(h, P("exists w E(w, y)")));
}

TEST_CASE("alpha equivalence ignores bound names only") {
  CHECK(alpha_equal(P("exists x E(x, y)"), P("exists z E(z, y)")));
  CHECK_FALSE(alpha_equal(P("exists x E(x, y)"), P("exists z E(z, w)")));
  CHECK(alpha_equal(P("forall x exists ?a (?a | E(x, x))"),
                    P("forall u exists ?b (?b | E(u, u))")));
  CHECK_FALSE(alpha_equal(P("exists x x = x"), P("forall x x = x")));
}

TEST_CASE("pattern construction and well-formedness") {
  auto p = pattern_of({{fo_var("x"), fo_var("y")}, {fo_var("x")}});
  CHECK(p.row_lengths == std::vector<int>({2, 1}));
  // Repeated variables induce identity entries beyond the diagonal.
  CHECK(p.identities.count({1, 1, 2, 1}) == 1);
  CHECK(p.well_formed());
  Pattern bad;
  bad.row_lengths = {1};
  bad.identities = {{1, 1, 2, 1}};  // out of range row index
  CHECK_FALSE(bad.well_formed());
}

TEST_CASE("canonical dependence atom lists antecedent in order") {
  auto a = canonical_dep_atom({fo_var("y"), fo_var("x")}, bool_var("c"));
  CHECK(equal(a, P("dep(x, y; ?c)")));
}

TEST_CASE("fresh names avoid the user namespace") {
  FreshSource fresh;
  auto v = fresh.fresh_fo("w");
  CHECK(v.name[0] == kFreshPrefix);
  CHECK(v.kind == VarKind::FO);
  CHECK(fresh.fresh_bool().kind == VarKind::Bool);
  CHECK(v != fresh.fresh_fo("w"));
}

TEST_CASE("ast size counts nodes") {
  CHECK(ast_size(P("x = y")) == 1);
  CHECK(ast_size(P("(x = y & E(x, y))")) == 3);
  CHECK(ast_size(P("exists x x = x")) == 2);
}

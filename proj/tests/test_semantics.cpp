#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logic/corpus.hpp"
#include "logic/semantics.hpp"
#include "logic/textio.hpp"

using namespace logic;

namespace {

Ast P(const std::string& s) { return parse_formula(s); }

Structure edge_path(int n) {
  Structure a;
  a.voc.add("E", 2);
  a.domain_size = n;
  auto& e = a.relations["E"];
  for (int i = 0; i + 1 < n; ++i) {
    e.insert({i, i + 1});
    e.insert({i + 1, i});
  }
  return a;
}

Assignment asg(std::initializer_list<std::pair<Variable, int>> xs) {
  Assignment s;
  for (const auto& [v, val] : xs) s.set(v, val);
  return s;
}

bool sat(const Structure& a, const Team& x, const std::string& text,
         EvalOptions opts = {}) {
  Budget budget;
  return sat_team(a, x, P(text), budget, opts);
}

// All subteams of x, for downward-closure sweeps.
std::vector<Team> subteams(const Team& x) {
  std::vector<Assignment> rows(x.begin(), x.end());
  std::vector<Team> out;
  for (size_t mask = 0; mask < (1u << rows.size()); ++mask) {
    Team y;
    for (size_t i = 0; i < rows.size(); ++i)
      if (mask & (1u << i)) y.insert(rows[i]);
    out.push_back(y);
  }
  return out;
}

}  // namespace

TEST_CASE("the empty team satisfies everything") {
  auto a = edge_path(2);
  for (const char* text :
       {"!x = x", "dep(x; y)", "(?a & !?a)", "forall x !E(x, x)"})
    CHECK(sat(a, {}, text));
}

TEST_CASE("dependence atom checks functional dependence rowwise") {
  auto a = edge_path(3);
  Team fn = {asg({{fo_var("x"), 0}, {fo_var("y"), 1}}),
             asg({{fo_var("x"), 1}, {fo_var("y"), 0}})};
  Team notfn = {asg({{fo_var("x"), 0}, {fo_var("y"), 1}}),
                asg({{fo_var("x"), 0}, {fo_var("y"), 0}})};
  CHECK(sat(a, fn, "dep(x; y)"));
  CHECK_FALSE(sat(a, notfn, "dep(x; y)"));
  // Empty antecedent means constancy.
  CHECK(sat(a, notfn, "dep(; x)"));
  CHECK_FALSE(sat(a, notfn, "dep(; y)"));
}

TEST_CASE("boolean dependence atoms and literals") {
  auto a = edge_path(2);
  Team x = {asg({{fo_var("x"), 0}, {bool_var("a"), 1}}),
            asg({{fo_var("x"), 1}, {bool_var("a"), 0}})};
  CHECK(sat(a, x, "dep(x; ?a)"));
  CHECK_FALSE(sat(a, x, "dep(; ?a)"));
  CHECK_FALSE(sat(a, x, "?a"));
  Team allTrue = {asg({{bool_var("a"), 1}})};
  CHECK(sat(a, allTrue, "?a"));
  CHECK_FALSE(sat(a, allTrue, "!?a"));
}

TEST_CASE("disjunction splits the team") {
  auto a = edge_path(2);
  Team x = {asg({{fo_var("x"), 0}}), asg({{fo_var("x"), 1}})};
  // Neither disjunct holds on the full team, a split makes both true.
  CHECK(sat(a, x, "(E(x, x) | !E(x, x))") ==
        sat(a, x, "(!x = x | x = x)"));
  CHECK(sat(a, x, "(x = x | !x = x)"));
  // Constancy on both sides cannot cover a two-valued team ... unless split.
  CHECK(sat(a, x, "(dep(; x) | dep(; x))"));
}

TEST_CASE("strict existential uses one value per assignment") {
  auto a = edge_path(3);
  Team x = {asg({{fo_var("x"), 0}}), asg({{fo_var("x"), 2}})};
  CHECK(sat(a, x, "exists y E(x, y)"));
  // The chosen y must be a function of the team row, and here it can be
  // constant only if some element neighbours both ends of the path.
  CHECK(sat(a, x, "exists y (dep(; y) & E(x, y))"));
  Team far = {asg({{fo_var("x"), 0}}), asg({{fo_var("x"), 1}}),
              asg({{fo_var("x"), 2}})};
  CHECK_FALSE(sat(a, far, "exists y (dep(; y) & E(x, y))"));
}

TEST_CASE("universal quantifier expands the team") {
  auto a = edge_path(3);
  Team one = {Assignment{}};
  CHECK(sat(a, one, "forall x exists y E(x, y)"));
  CHECK_FALSE(sat(a, one, "forall x E(x, x)"));
  CHECK_FALSE(sat(a, one, "forall x forall y E(x, y)"));
}

TEST_CASE("boolean existential picks a flag per assignment") {
  auto a = edge_path(2);
  Team one = {Assignment{}};
  CHECK(sat(a, one, "exists ?a ?a"));
  CHECK_FALSE(sat(a, one, "exists ?a (?a & !?a)"));
  // The flag can encode a property of the row.
  CHECK(sat(a, one, "forall x exists ?a ((?a & E(x, x)) | (!?a & !E(x, x)))"));
  // A constant flag cannot match a property that varies across rows.
  Team pair = {asg({{fo_var("x"), 0}, {fo_var("y"), 0}}),
               asg({{fo_var("x"), 0}, {fo_var("y"), 1}})};
  CHECK(sat(a, pair, "exists ?a (dep(; ?a) & ((?a & x = y) | (!?a & !x = y)))") ==
        false);
  CHECK(sat(a, one, "forall x exists ?a (!?a | E(x, x))"));
}

TEST_CASE("team dialect rejects connective nodes") {
  auto a = edge_path(2);
  Budget budget;
  CHECK_THROWS_AS(
      sat_team(a, {Assignment{}}, P("N[ x : ?a ]( ?a )"), budget),
      DialectError);
  CHECK_THROWS_AS(
      sat_assignment(a, asg({{fo_var("x"), 0}, {fo_var("y"), 0}}),
                     P("dep(x; y)"), budget),
      DialectError);
  CHECK(team_dialect(P("dep(x; y)")));
  CHECK_FALSE(team_dialect(P("N[ x : ?a ]( ?a )")));
  CHECK(assignment_dialect(P("N[ x : ?a ]( ?a )")));
  CHECK_FALSE(assignment_dialect(P("dep(x; y)")));
}

TEST_CASE("connective semantics by hand") {
  auto a = edge_path(3);
  Budget budget;
  Assignment empty;
  // A row function may mirror the loop indicator, which is all-false here.
  CHECK(sat_assignment(
      a, empty, P("N[ x : ?a ]( ((?a & E(x, x)) | (!?a & !E(x, x))) )"),
      budget));
  CHECK_FALSE(sat_assignment(a, empty, P("N[ x : ?a ]( (?a & !?a) )"), budget));
  // Negated block flips the value.
  CHECK(sat_assignment(a, empty, P("!N[ x : ?a ]( (?a & !?a) )"), budget));
  // Branch-selecting connective: all branches trivially true / false.
  CHECK(sat_assignment(
      a, empty, P("D[ x ]{ 0 : x = x, 1 : x = x }"), budget));
  CHECK_FALSE(sat_assignment(
      a, empty, P("D[ x ]{ 0 : !x = x, 1 : !x = x }"), budget));
  // Pattern rows may share variables; identities constrain the tuples.
  CHECK(sat_assignment(
      a, empty, P("N[ x : ?a | x : ?b ]( ((?a & ?b) | (!?a & !?b)) )"),
      budget));
}

TEST_CASE("downward closure and locality on a generated corpus") {
  CorpusSpec spec;
  spec.voc.add("E", 2);
  spec.max_size = 4;
  spec.fo_pool = {fo_var("x"), fo_var("y")};
  spec.bool_pool = {bool_var("a")};
  auto a = edge_path(2);
  Team full = {asg({{fo_var("x"), 0}, {fo_var("y"), 0}, {bool_var("a"), 1}}),
               asg({{fo_var("x"), 0}, {fo_var("y"), 1}, {bool_var("a"), 0}}),
               asg({{fo_var("x"), 1}, {fo_var("y"), 0}, {bool_var("a"), 1}})};
  Budget budget;
  int checked = 0;
  enumerate_formulas(spec, budget, [&](const Ast& f) {
    Budget inner;
    bool on_full = sat_team(a, full, f, inner);
    for (const auto& y : subteams(full)) {
      Budget b2;
      bool on_sub = sat_team(a, y, f, b2);
      if (on_full) CHECK(on_sub);  // downward closure
      // Locality: only the free variables matter.
      Budget b3;
      CHECK(sat_team(a, restrict(y, free_variables(f)), f, b3) == on_sub);
    }
    ++checked;
    return true;
  });
  CHECK(checked > 200);
}

TEST_CASE("optimized engine agrees with the naive engine") {
  CorpusSpec spec;
  spec.voc.add("E", 2);
  spec.max_size = 5;
  spec.fo_pool = {fo_var("x"), fo_var("y")};
  spec.bool_pool = {bool_var("a")};
  auto a = edge_path(2);
  Team start = {asg({{fo_var("x"), 0}, {fo_var("y"), 1}}),
                asg({{fo_var("x"), 1}, {fo_var("y"), 1}})};
  EvalOptions naive;
  naive.naive = true;
  Budget budget;
  enumerate_formulas(spec, budget, [&](const Ast& f) {
    for (const Variable& v : free_variables(f))
      if (v.kind == VarKind::Bool) return true;  // team lacks the flag
    Budget b1, b2;
    CHECK(sat_team(a, start, f, b1) == sat_team(a, start, f, b2, naive));
    return true;
  });
}

TEST_CASE("exhaustive covers agree with disjoint splits") {
  CorpusSpec spec;
  spec.voc.add("E", 2);
  spec.max_size = 4;
  spec.fo_pool = {fo_var("x")};
  spec.bool_pool = {};
  auto a = edge_path(2);
  Team start = {asg({{fo_var("x"), 0}}), asg({{fo_var("x"), 1}})};
  EvalOptions covers;
  covers.exhaustive_covers = true;
  covers.naive = true;
  Budget budget;
  enumerate_formulas(spec, budget, [&](const Ast& f) {
    Budget b1, b2;
    CHECK(sat_team(a, start, f, b1) == sat_team(a, start, f, b2, covers));
    return true;
  });
}

TEST_CASE("witness-table search matches the recursive checker") {
  CorpusSpec spec;
  spec.voc.add("E", 2);
  spec.max_size = 4;
  spec.fo_pool = {fo_var("x"), fo_var("y")};
  spec.bool_pool = {bool_var("a")};
  auto a = edge_path(2);
  Team start = {asg({{fo_var("x"), 0}, {fo_var("y"), 1},
                     {bool_var("a"), 0}}),
                asg({{fo_var("x"), 1}, {fo_var("y"), 1}, {bool_var("a"), 1}})};
  Budget budget;
  int seen = 0;
  enumerate_formulas(spec, budget, [&](const Ast& f) {
    Budget b1, b2;
    bool direct = sat_team(a, start, f, b1);
    auto table = find_successful_evaluation(a, start, f, b2);
    CHECK(direct == table.has_value());
    if (table) {
      // The root of a successful table carries the full team.
      CHECK(table->table.at({}) == start);
    }
    return ++seen < 400;
  });
}

TEST_CASE("sentence dispatch and mixed dialects") {
  auto a = edge_path(2);
  Budget budget;
  CHECK(sat_sentence(a, P("exists x E(x, x)"), budget) == false);
  CHECK(sat_sentence(a, P("forall x exists y E(x, y)"), budget));
  CHECK(sat_sentence(a, P("N[ x : ?a ]( (?a | !E(x, x)) )"), budget));
  CHECK_THROWS_AS(
      sat_sentence(a, P("exists x (dep(; x) & N[ y : ?a ]( ?a ))"), budget),
      DialectError);
}

TEST_CASE("quantifier rank counts nested first-order depth") {
  CHECK(quantifier_rank(P("x = y")) == 0);
  CHECK(quantifier_rank(P("exists x forall y E(x, y)")) == 2);
  CHECK(quantifier_rank(P("(exists x x = x & forall y forall z y = z)")) == 2);
  // Boolean quantifiers do not count toward the rank.
  CHECK(quantifier_rank(P("exists ?a ?a")) == 0);
}

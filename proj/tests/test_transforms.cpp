#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logic/corpus.hpp"
#include "logic/semantics.hpp"
#include "logic/textio.hpp"
#include "logic/transforms.hpp"

using namespace logic;

namespace {

Ast P(const std::string& s) { return parse_formula(s); }

// Truth comparison of two sentences over every {E/2}-structure with
// min_domain <= |A| <= max_domain.
void check_equiv(const Ast& f, const Ast& g, int min_domain, int max_domain) {
  Vocabulary voc;
  voc.add("E", 2);
  for (int n = min_domain; n <= max_domain; ++n) {
    Budget outer;
    all_structures(voc, n, outer, [&](const Structure& a) {
      Budget b1, b2;
      bool lhs = sat_sentence(a, f, b1);
      bool rhs = sat_sentence(a, g, b2);
      if (lhs != rhs) {
        CAPTURE(print_formula(f));
        CAPTURE(print_formula(g));
        CAPTURE(print_structure(a));
        CHECK(lhs == rhs);
        return false;
      }
      return true;
    });
  }
}

void for_fragment_sentences(FragmentLabel frag, int max_size,
                            const std::function<void(const Ast&)>& fn) {
  CorpusSpec spec;
  spec.voc.add("E", 2);
  spec.max_size = max_size;
  spec.fo_pool = {fo_var("x"), fo_var("y")};
  spec.bool_pool = {bool_var("a")};
  spec.fragment = frag;
  spec.sentences_only = true;
  Budget budget;
  int seen = 0;
  enumerate_formulas(spec, budget, [&](const Ast& f) {
    fn(f);
    ++seen;
    return true;
  });
  REQUIRE(seen > 0);
}

bool has(const Ast& f, FragmentLabel l) { return classify(f).count(l) == 1; }

}  // namespace

TEST_CASE("variable normal form: postcondition, idempotence, equivalence") {
  for_fragment_sentences(FragmentLabel::BD, 5, [](const Ast& f) {
    auto g = to_variable_nf(f);
    CHECK(has(g, FragmentLabel::VariableNF));
    CHECK(alpha_equal(to_variable_nf(g), g));
    check_equiv(f, g, 1, 2);
  });
  // Rebinding is forced when a variable is quantified twice.
  RewriteTrace trace;
  auto g = to_variable_nf(P("(exists x x = x & exists x E(x, x))"), &trace);
  CHECK(has(g, FragmentLabel::VariableNF));
  CHECK_FALSE(trace.steps.empty());
}

TEST_CASE("quantifier block normal form") {
  for_fragment_sentences(FragmentLabel::BBD, 5, [](const Ast& f) {
    auto g = to_q_nf(f);
    CHECK(has(g, FragmentLabel::QNF));
    CHECK(alpha_equal(to_q_nf(g), g));
    check_equiv(f, g, 1, 2);
  });
  // Pulling a Boolean existential past a universal records a dependence atom.
  auto f = P("forall x (x = x & exists ?a forall y (?a | E(y, y)))");
  CHECK_FALSE(has(f, FragmentLabel::QNF));
  auto g = to_q_nf(f);
  CHECK(has(g, FragmentLabel::QNF));
  check_equiv(f, g, 1, 2);
}

TEST_CASE("dependence normal form") {
  for_fragment_sentences(FragmentLabel::BBD, 5, [](const Ast& f) {
    auto g = to_dependence_nf(to_q_nf(f));
    CHECK(has(g, FragmentLabel::DependenceNF));
    CHECK(alpha_equal(to_dependence_nf(g), g));
    check_equiv(f, g, 1, 2);
  });
}

TEST_CASE("boolean-to-plain dependence compilation") {
  for_fragment_sentences(FragmentLabel::BD, 5, [](const Ast& f) {
    auto g = bd_to_d(f);
    CHECK(has(g, FragmentLabel::D));
    check_equiv(f, g, 2, 2);  // valid on two or more elements only
  });
}

TEST_CASE("one-element counterexample to the boolean compilation") {
  // A Boolean flag can always be false, but the two-element encoding needs
  // two distinct markers, so it fails on a singleton domain.
  auto f = P("exists ?a !?a");
  auto g = bd_to_d(f);
  Structure one;
  one.voc.add("E", 2);
  one.domain_size = 1;
  one.relations["E"] = {};
  Budget b1, b2;
  CHECK(sat_sentence(one, f, b1));
  CHECK_FALSE(sat_sentence(one, g, b2));
  check_equiv(f, g, 2, 3);
}

TEST_CASE("plain-to-boolean dependence reformulation") {
  for (const char* text : {
           "forall x exists y (dep(x; y) & E(x, y))",
           "forall x exists y (dep(; y) & (E(x, y) | x = y))",
           "forall x forall y exists z (dep(x; z) & (E(x, z) | !z = y))",
       }) {
    auto f = P(text);
    auto g = d_to_bd(f);
    CHECK(has(g, FragmentLabel::BD));
    check_equiv(f, g, 1, 2);
  }
  // The reformulation is shape restricted.
  CHECK_THROWS_AS(d_to_bd(P("exists y forall x (dep(x; y) & x = y)")),
                  std::invalid_argument);
  CHECK_THROWS_AS(d_to_bd(P("forall x (E(x, x) | exists y dep(x; y))")),
                  std::invalid_argument);
}

TEST_CASE("branch connective to partially-ordered connective") {
  for (const char* text : {
           "D[ x ]{ 0 : E(x, x), 1 : !E(x, x) }",
           "D[ x | y ]{ 00 : x = y, 01 : E(x, y), 10 : !E(x, y), 11 : !x = y }",
       }) {
    auto f = P(text);
    auto g = fod_to_fopoc(f);
    CHECK(has(g, FragmentLabel::FO_POC));
    check_equiv(f, g, 1, 2);
  }
}

TEST_CASE("partially-ordered connective to branch connective") {
  for (const char* text : {
           "N[ x : ?a ]( (?a | E(x, x)) )",
           "N[ x : ?a | y : ?b ]( ((?a & ?b) | !E(x, y)) )",
       }) {
    auto f = P(text);
    auto g = fopoc_to_fod(f);
    CHECK(classify(g).count(FragmentLabel::FO_POC) == 0);
    check_equiv(f, g, 1, 2);
  }
  // Free Boolean variables cannot be compiled away.
  CHECK_THROWS_AS(fopoc_to_fod(P("N[ x : ?a ]( (?a | ?b) )")),
                  std::invalid_argument);
}

TEST_CASE("bounded fragment to positive connective fragment and back") {
  for_fragment_sentences(FragmentLabel::BBD, 5, [](const Ast& f) {
    auto g = bbd_to_fopoc_plus(f);
    CHECK(has(g, FragmentLabel::FO_POC_plus));
    check_equiv(f, g, 1, 2);
  });
  for (const char* text : {
           "N[ x : ?a ]( (?a | E(x, x)) )",
           "N[ x : ?a | y : ?b ]( ((?a & ?b) | !E(x, y)) )",
       }) {
    auto f = P(text);
    auto g = fopoc_plus_to_bbd(f);
    CHECK(has(g, FragmentLabel::BBD));
    check_equiv(f, g, 1, 2);
  }
}

TEST_CASE("boolean quantifier elimination") {
  for (const char* text : {
           "exists ?a (?a | !?a)",
           "forall x exists ?a ((?a & E(x, x)) | (!?a & !E(x, x)))",
       }) {
    auto f = P(text);
    auto g = eliminate_bool_quantifier(f);
    CHECK(classify(g).count(FragmentLabel::FO) == 1);
    check_equiv(f, g, 2, 3);  // two reserved values needed
  }
  CHECK_THROWS_AS(eliminate_bool_quantifier(P("forall x exists ?a dep(x; ?a)")),
                  std::invalid_argument);
}

TEST_CASE("restricted fragment to connective over first-order body") {
  for_fragment_sentences(FragmentLabel::RBD, 5, [](const Ast& f) {
    auto g = rbd_to_pocfo(f);
    CHECK(has(g, FragmentLabel::POC_FO));
    check_equiv(f, g, 2, 2);
  });
}

TEST_CASE("universal fragment to connective over quantifier-free body") {
  for_fragment_sentences(FragmentLabel::ForallBD, 5, [](const Ast& f) {
    auto g = forallbd_to_pocqf(f);
    CHECK(has(g, FragmentLabel::POC_QF));
    check_equiv(f, g, 1, 2);
  });
}

TEST_CASE("universal boolean simulation and its singleton failure") {
  // Tautologies in the flag survive the simulation on every domain.
  auto taut = simulate_universal_bool(P("(?a | !?a)"), bool_var("a"));
  CHECK(is_sentence(taut));
  Vocabulary voc;
  voc.add("E", 2);
  for (int n = 1; n <= 3; ++n) {
    Budget outer;
    all_structures(voc, n, outer, [&](const Structure& a) {
      Budget b;
      CHECK(sat_sentence(a, taut, b));
      return true;
    });
  }
  // The simulated flag collapses to true on a singleton domain: the bare
  // flag looks universally valid there although it is not.
  auto bare = simulate_universal_bool(P("?a"), bool_var("a"));
  Structure one;
  one.voc.add("E", 2);
  one.domain_size = 1;
  one.relations["E"] = {};
  Structure two = one;
  two.domain_size = 2;
  Budget b1, b2;
  CHECK(sat_sentence(one, bare, b1));
  CHECK_FALSE(sat_sentence(two, bare, b2));
}

TEST_CASE("rewrite traces name their rules") {
  RewriteTrace trace;
  bd_to_d(P("exists ?a !?a"), &trace);
  CHECK_FALSE(trace.steps.empty());
  for (const auto& s : trace.steps) {
    CHECK_FALSE(s.rule.empty());
    CHECK(s.before_size > 0);
  }
}

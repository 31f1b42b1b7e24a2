#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logic/corpus.hpp"
#include "logic/sweep.hpp"
#include "logic/textio.hpp"

using namespace logic;

namespace {

std::pair<std::vector<Ast>, std::vector<Structure>> small_matrix() {
  CorpusSpec spec;
  spec.voc.add("E", 2);
  spec.max_size = 4;
  spec.fo_pool = {fo_var("x"), fo_var("y")};
  spec.bool_pool = {bool_var("a")};
  spec.sentences_only = true;
  spec.max_domain = 2;
  std::vector<Ast> sentences;
  std::vector<Structure> structures;
  Budget budget;
  enumerate_formulas(spec, budget, [&](const Ast& f) {
    sentences.push_back(f);
    return true;
  });
  enumerate_structures(spec, budget, [&](const Structure& s) {
    structures.push_back(s);
    return true;
  });
  return {sentences, structures};
}

}  // namespace

TEST_CASE("parallel kernel agrees with the serial reference") {
  auto [sentences, structures] = small_matrix();
  REQUIRE(sentences.size() > 10);
  REQUIRE(structures.size() == 18);
  auto serial = truth_sweep_serial(sentences, structures);
  auto parallel = truth_sweep(sentences, structures);
  CHECK(diff_cells(serial, parallel).empty());
  SweepOptions two_jobs;
  two_jobs.jobs = 2;
  CHECK(diff_cells(serial, truth_sweep(sentences, structures, two_jobs))
            .empty());
}

TEST_CASE("cells are independent and statuses meaningful") {
  auto t = parse_formula("forall x exists y E(x, y)");
  auto f = parse_formula("exists x E(x, x)");
  std::vector<Structure> gs = {gen_cycle(3), gen_two_cycles(3)};
  auto r = truth_sweep({t, f}, gs);
  CHECK(r.at(0, 0) == CellStatus::True);
  CHECK(r.at(0, 1) == CellStatus::True);
  CHECK(r.at(1, 0) == CellStatus::False);
  CHECK(r.at(1, 1) == CellStatus::False);
}

TEST_CASE("budget exhaustion reports an error cell") {
  SweepOptions tiny;
  tiny.budget_per_cell = 2;
  auto r = truth_sweep({non_connectivity()}, {gen_two_cycles(3)}, tiny);
  CHECK(r.at(0, 0) == CellStatus::Error);
}

TEST_CASE("shape mismatch is rejected") {
  SweepResult a, b;
  a.rows = 1;
  a.cols = 2;
  a.cells = {CellStatus::True, CellStatus::False};
  b.rows = 2;
  b.cols = 1;
  b.cells = a.cells;
  CHECK_THROWS_AS(diff_cells(a, b), std::invalid_argument);
}

#pragma once

#include <functional>
#include <optional>

#include "logic/ast.hpp"
#include "logic/model.hpp"

namespace logic {

// Cycle graph on k >= 3 nodes; both directions of every edge are present.
Structure gen_cycle(int k);
// Disjoint union of two k-cycles on 2k nodes.
Structure gen_two_cycles(int k);

// Sentence over {E/2} true exactly on disconnected graphs (of at least two
// nodes): a Boolean colouring exists that is constant on edges yet takes
// both values. Stored in the official grammar with the arrow sugar expanded.
Ast non_connectivity();

// "There are at least two elements."
Ast two_elements();

// Strong connectivity by plain breadth-first reachability (every node
// reachable from node 0 along `rel` and back); independent of the
// satisfaction engines. Coincides with ordinary connectivity on symmetric
// edge relations.
bool is_connected(const Structure& a, const std::string& rel = "E");

struct CorpusSpec {
  Vocabulary voc;
  int max_size = 3;
  std::optional<FragmentLabel> fragment;
  bool sentences_only = false;
  int max_domain = 2;
  unsigned seed = 1;
  std::vector<Variable> fo_pool;
  std::vector<Variable> bool_pool;
};

// Bounded-exhaustive formula stream: every distinct AST over the pools with
// ast_size <= max_size, built from literals, dependence atoms, &, |, and the
// three quantifiers. Deterministic order (size-major), duplicate free; the
// fragment filter and sentence filter apply at emission. The visitor returns
// false to stop.
void enumerate_formulas(const CorpusSpec& spec, Budget& budget,
                        const std::function<bool(const Ast&)>& visit);

// All structures over spec.voc with 1 <= |A| <= spec.max_domain.
void enumerate_structures(const CorpusSpec& spec, Budget& budget,
                          const std::function<bool(const Structure&)>& visit);

}  // namespace logic

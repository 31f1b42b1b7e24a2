#pragma once

#include <map>
#include <optional>

#include "logic/ast.hpp"
#include "logic/model.hpp"

namespace logic {

struct DialectError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EvalOptions {
  // Disjunction splits: disjoint splits suffice by downward closure; the
  // exhaustive mode enumerates all covers Y u Z = X as a cross check.
  bool exhaustive_covers = false;
  // Disable the engine shortcuts (pointwise evaluation of dependence-free
  // subformulas, maximal disjunction splits, dependence-guided function
  // enumeration) and run the direct recursive search. The two modes are
  // differential-tested against each other; naive mode scales poorly.
  bool naive = false;
};

// Team satisfaction per the recursive team semantics. Rejects connective
// nodes (no team semantics is defined for them).
bool sat_team(const Structure& a, const Team& x, const Ast& f, Budget& budget,
              const EvalOptions& opts = {});

// Tarskian satisfaction for formulas without dependence atoms; handles both
// connective node kinds by brute-force row-function search.
bool sat_assignment(const Structure& a, const Assignment& s, const Ast& f,
                    Budget& budget);

// Dispatch on dialect: team dialects over X = {empty}, assignment dialects
// over the empty assignment. Mixed dialects are rejected.
bool sat_sentence(const Structure& a, const Ast& f, Budget& budget,
                  const EvalOptions& opts = {});

// Occurrence-indexed witness table.
struct Evaluation {
  std::map<OccurrencePath, Team> table;
};

// Independent second checker: searches for a successful evaluation in the
// occurrence-table sense. Present iff sat_team holds.
std::optional<Evaluation> find_successful_evaluation(const Structure& a,
                                                     const Team& x,
                                                     const Ast& f,
                                                     Budget& budget);

// True when the formula uses only team-dialect nodes (no connectives).
bool team_dialect(const Ast& f);
// True when the formula uses only assignment-dialect nodes (no dep atoms).
bool assignment_dialect(const Ast& f);

int quantifier_rank(const Ast& f);

}  // namespace logic

#pragma once

#include "logic/ast.hpp"
#include "logic/model.hpp"

namespace logic {

// A pattern-prefixed comparison game between two structures over the same
// vocabulary: a function-picking phase over the pattern rows followed by an
// r-round element-picking phase.
struct GameConfig {
  Pattern pattern;
  int rounds = 0;
  Structure left;
  Structure right;
};

// All domain permutations preserving every relation. Falls back to the
// identity alone above 8 elements, where enumeration gets expensive; callers
// only use the group for sound search pruning.
std::vector<std::vector<int>> automorphisms(const Structure& a);

// Value of the r-round element-picking game from pinned tuples abar / bbar.
// At r = 0 this is the partial-isomorphism test on abar -> bbar.
bool fo_ef_duplicator_wins(const Structure& a, const std::vector<int>& abar,
                           const Structure& b, const std::vector<int>& bbar,
                           int rounds, Budget& budget);

// Exact game value by explicit minimax: for every Spoiler function tuple on
// the left there is a Duplicator function tuple on the right such that every
// pattern-conformant Spoiler tuple choice on the right has a conformant
// matching answer on the left from which the element phase is won. Function
// tuples are enumerated up to automorphism orbits on their own side.
bool duplicator_wins(const GameConfig& cfg, Budget& budget);

struct PreservationEntry {
  Ast sentence;
  bool left_true = false;
  bool right_true = false;
  bool violation = false;
};

struct PreservationReport {
  bool duplicator_win = false;
  std::vector<PreservationEntry> entries;
  int violation_count = 0;
};

// Checks the truth-preservation guarantee of a Duplicator win: no sentence
// with this pattern and body rank <= rounds may be true on the left and
// false on the right. Sentences must be non-negated outer connectives whose
// pattern matches cfg.pattern; any violation is an internal inconsistency.
PreservationReport verify_preservation(const GameConfig& cfg,
                                       const std::vector<Ast>& sentences,
                                       Budget& budget);

}  // namespace logic

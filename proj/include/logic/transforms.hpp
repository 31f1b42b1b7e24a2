#pragma once

#include <string>
#include <vector>

#include "logic/ast.hpp"

namespace logic {

struct RewriteStep {
  std::string rule;
  OccurrencePath occurrence;
  int before_size = 0;
  int after_size = 0;
};

struct RewriteTrace {
  std::vector<RewriteStep> steps;
};

// Renames so that no free variable is quantified and every quantified
// variable is quantified exactly once. Equivalence-preserving; identity on
// already-normal input.
Ast to_variable_nf(const Ast& f, RewriteTrace* trace = nullptr);

// Sorts quantifiers into the block shape: a root prefix of universal
// first-order then existential Boolean quantifiers, and every internal
// quantifier inside a block (exists-FO)+ (forall-FO)* (exists-Bool)*.
// Quantifiers are first pulled out of binary connectives, then Boolean
// existentials are pushed past universal runs at the cost of a dependence
// atom recording what they may depend on. Input: a team-dialect sentence
// whose dependence atoms satisfy the scope bound of the bounded fragment.
Ast to_q_nf(const Ast& f, RewriteTrace* trace = nullptr);

// On top of the block shape, gives every Boolean quantifier block a leading
// conjunction holding exactly one dependence atom per quantified Boolean
// variable, and no dependence atoms anywhere else.
Ast to_dependence_nf(const Ast& f, RewriteTrace* trace = nullptr);

// Compiles Boolean machinery into two reserved domain elements: fresh
// witnesses x_bot != x_top, Boolean variables become first-order variables
// compared against them. Valid on domains of size >= 2.
Ast bd_to_d(const Ast& f, RewriteTrace* trace = nullptr);

// Input must be exactly forall x.. exists y.. (/\ dep(x_i..; y_i) /\ psi)
// with psi quantifier free; emits the Boolean reformulation that checks the
// chosen y_i against every candidate value with a Boolean flag.
Ast d_to_bd(const Ast& f, RewriteTrace* trace = nullptr);

// Branch-selecting connectives to partially-ordered connectives: each D
// block becomes one N block whose body cases over the branch bit vectors
// with Boolean-literal guards.
Ast fod_to_fopoc(const Ast& f, RewriteTrace* trace = nullptr);

// The reverse compilation: each N block becomes one D block over fresh
// variable rows, with equality guards enforcing the pattern and Boolean
// literals replaced by trivially-true/false equalities. Requires no free
// Boolean variables and nonempty rows.
Ast fopoc_to_fod(const Ast& f, RewriteTrace* trace = nullptr);

// Sentence-level equivalence with the positive-connective fragment: after
// dependence normalization, each quantifier block plus its dependence atoms
// becomes a single N block (leftover universals form row 0 with a fresh
// unused witness).
Ast bbd_to_fopoc_plus(const Ast& f, RewriteTrace* trace = nullptr);

// Reverse direction: each N block becomes forall(row vars) exists(witnesses)
// with one dependence atom per row recording the visible variables.
Ast fopoc_plus_to_bbd(const Ast& f, RewriteTrace* trace = nullptr);

// Replaces every Boolean existential by two first-order existentials and an
// equality test. Valid on domains of size >= 2; errors if a dependence atom
// in scope mentions the quantified Boolean variable.
Ast eliminate_bool_quantifier(const Ast& f, RewriteTrace* trace = nullptr);

// Sentences without dependence atoms under exists-FO: eliminate Boolean
// quantifiers inside exists-FO scopes, normalize, and compile the root block
// into a single N over a first-order body. Valid on domains of size >= 2.
Ast rbd_to_pocfo(const Ast& f, RewriteTrace* trace = nullptr);

// Sentences without exists-FO at all: normalize and compile the root block
// into a single N over a quantifier-free body. Valid on all domains.
Ast forallbd_to_pocqf(const Ast& f, RewriteTrace* trace = nullptr);

// Universal Boolean quantification, simulated with a pair of fresh
// first-order universals selecting the truth value by an equality test.
// Valid on domains of size >= 2.
Ast simulate_universal_bool(const Ast& f, const Variable& alpha,
                            RewriteTrace* trace = nullptr);

}  // namespace logic

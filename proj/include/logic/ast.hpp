#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace logic {

// Names starting with this prefix are reserved for machine-generated
// variables; the parser rejects them in user input.
inline constexpr char kFreshPrefix = '$';

enum class VarKind : uint8_t { FO, Bool };

struct Variable {
  VarKind kind = VarKind::FO;
  std::string name;

  Variable() = default;
  Variable(VarKind k, std::string n) : kind(k), name(std::move(n)) {}

  bool operator==(const Variable& o) const {
    return kind == o.kind && name == o.name;
  }
  bool operator!=(const Variable& o) const { return !(*this == o); }
  // Order: FO before Bool, then name prefix, then numeric suffix.
  bool operator<(const Variable& o) const;
};

Variable fo_var(std::string name);
Variable bool_var(std::string name);

struct Vocabulary {
  // (symbol, arity), symbols unique, arity >= 0.
  std::vector<std::pair<std::string, int>> relations;

  int arity(const std::string& symbol) const;
  bool has(const std::string& symbol) const;
  void add(const std::string& symbol, int arity);
};

// Row-length vector plus the identity kernel E over positions.
// Positions are 1-based (i, j) with 1 <= i <= m, 1 <= j <= row_lengths[i-1].
struct Pattern {
  std::vector<int> row_lengths;
  std::set<std::array<int, 4>> identities;

  bool operator==(const Pattern& o) const {
    return row_lengths == o.row_lengths && identities == o.identities;
  }
  bool operator<(const Pattern& o) const {
    if (row_lengths != o.row_lengths) return row_lengths < o.row_lengths;
    return identities < o.identities;
  }
  // Checks reflexivity, symmetry, transitivity and index bounds.
  bool well_formed() const;
};

enum class NodeKind : uint8_t {
  Equal,        // x = y
  NotEqual,     // !x = y
  RelAtom,      // R(x...)
  NegRelAtom,   // !R(x...)
  BoolLit,      // ?a
  NegBoolLit,   // !?a
  DepFO,        // dep(x...; y)
  DepBool,      // dep(x...; ?a)
  And,
  Or,
  ExistsFO,
  ForallFO,
  ExistsBool,
  NPi,          // partially-ordered connective over universal rows
  SVConn,       // branch-selecting connective (one formula per bit vector)
};

struct Formula;
using Ast = std::shared_ptr<const Formula>;

struct NpiRow {
  std::vector<Variable> vars;  // FO variables, possibly empty
  Variable witness;            // the Boolean variable of the row
};

struct Formula {
  NodeKind kind;

  // Equal/NotEqual: args = {x, y}. RelAtom: rel + args.
  // DepFO/DepBool: args = antecedent, consequent set.
  // BoolLit/NegBoolLit: consequent is the variable.
  // Quantifiers: consequent is the bound variable, left is the body.
  std::string rel;
  std::vector<Variable> args;
  Variable consequent;
  Ast left, right;

  // NPi fields.
  Pattern pattern;
  std::vector<NpiRow> rows;
  bool negated = false;

  // SVConn fields: rows of pairwise distinct FO variables and a map
  // from every bit vector of length |sv_rows| to a branch formula.
  std::vector<std::vector<Variable>> sv_rows;
  std::map<std::vector<int>, Ast> branches;
};

// Node constructors. They validate the structural invariants and throw
// std::invalid_argument on violations.
Ast mk_equal(Variable x, Variable y);
Ast mk_not_equal(Variable x, Variable y);
Ast mk_rel(std::string rel, std::vector<Variable> args, bool negated = false);
Ast mk_bool_lit(Variable a, bool negated = false);
Ast mk_dep_fo(std::vector<Variable> antecedent, Variable y);
Ast mk_dep_bool(std::vector<Variable> antecedent, Variable a);
Ast mk_and(Ast l, Ast r);
Ast mk_or(Ast l, Ast r);
Ast mk_exists_fo(Variable x, Ast body);
Ast mk_forall_fo(Variable x, Ast body);
Ast mk_exists_bool(Variable a, Ast body);
Ast mk_npi(std::vector<NpiRow> rows, Ast body, bool negated = false);
Ast mk_sv(std::vector<std::vector<Variable>> rows,
          std::map<std::vector<int>, Ast> branches, bool negated = false);

// Sugar, expanded at construction time. Both operands must be negatable
// (literals and and/or combinations of them); throws otherwise.
Ast mk_implies(Ast a, Ast b);
Ast mk_iff(Ast a, Ast b);
// Dual of a literal / and-or combination of literals; nullopt when the
// formula has no negation in the official grammar.
std::optional<Ast> negate(const Ast& f);

// Conjunction/disjunction of a list; empty conjunction is x = x over the
// given variable, empty disjunction its negation.
Ast mk_and_all(const std::vector<Ast>& fs);
Ast mk_or_all(const std::vector<Ast>& fs);

// Child index sequence from the root. For SVConn nodes the index is the
// rank of the branch bit vector in lexicographic order.
using OccurrencePath = std::vector<int>;

std::vector<Ast> children(const Ast& f);
Ast child_at(const Ast& f, int index);
Ast node_at(const Ast& f, const OccurrencePath& path);
// Replaces the node at `path`; throws on invalid paths.
Ast substitute_at(const Ast& f, const OccurrencePath& path, const Ast& repl);

// Converts the textual "n-th occurrence of psi" convention to a path via
// left-to-right preorder traversal; n is 1-based.
std::optional<OccurrencePath> occurrence_path(const Ast& host, const Ast& sub,
                                              int n = 1);

int cmp(const Ast& a, const Ast& b);
bool equal(const Ast& a, const Ast& b);
// Structural equality modulo uniform renaming of bound variables.
bool alpha_equal(const Ast& a, const Ast& b);

int ast_size(const Ast& f);

std::set<Variable> free_variables(const Ast& f);
bool is_sentence(const Ast& f);
// All variables occurring anywhere (free or bound) in f.
std::set<Variable> all_variables(const Ast& f);

// Def 4.2 analogue: FO variables free in f or quantified on the path
// strictly above `occ` (by first-order quantifiers or connective rows).
std::set<Variable> v_set(const Ast& f, const OccurrencePath& occ);

enum class FragmentLabel : uint8_t {
  FO,
  QF,
  D,
  BD,
  BBD,
  RBD,
  ForallBD,
  FO_POC,
  FO_POC_plus,
  POC_FO,
  POC_QF,
  VariableNF,
  QNF,
  DependenceNF,
};

const char* label_name(FragmentLabel l);
std::set<FragmentLabel> classify(const Ast& f);

enum class RenameScope : uint8_t { FreeOnly, AllOccurrences };

// Injective kind-preserving renaming; targets must not occur in f.
Ast rename_variables(const Ast& f,
                     const std::map<Variable, Variable>& mapping,
                     RenameScope scope);

// Dependence atom over V listed in the canonical variable order.
Ast canonical_dep_atom(const std::set<Variable>& antecedent,
                       const Variable& consequent);

Pattern pattern_of(const std::vector<std::vector<Variable>>& rows);

// Session-local fresh variable source; names use the reserved prefix.
class FreshSource {
 public:
  Variable fresh_fo(const std::string& hint = "x");
  Variable fresh_bool(const std::string& hint = "a");

 private:
  int counter_ = 0;
};

}  // namespace logic

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "logic/ast.hpp"

namespace logic {

// Shared work-budget guard. Exponential searches tick it and fail loudly
// instead of hanging when the limit is reached.
struct BudgetExceeded : std::runtime_error {
  BudgetExceeded() : std::runtime_error("work budget exceeded") {}
};

class Budget {
 public:
  explicit Budget(long long limit = kDefaultLimit) : limit_(limit) {}
  void tick(long long amount = 1) {
    used_ += amount;
    if (used_ > limit_) throw BudgetExceeded();
  }
  long long used() const { return used_; }
  static constexpr long long kDefaultLimit = 100'000'000;

 private:
  long long limit_;
  long long used_ = 0;
};

// Finite relational structure with domain 0..n-1.
struct Structure {
  Vocabulary voc;
  int domain_size = 0;
  std::map<std::string, std::set<std::vector<int>>> relations;

  bool well_formed() const;
  bool holds(const std::string& rel, const std::vector<int>& tuple) const;
  bool operator==(const Structure& o) const {
    return domain_size == o.domain_size && relations == o.relations;
  }
  bool operator<(const Structure& o) const {
    if (domain_size != o.domain_size) return domain_size < o.domain_size;
    return relations < o.relations;
  }
};

// FO variables take domain elements; Boolean variables take 0 (false) / 1
// (true). The kind split is enforced at write time.
constexpr int kBoolFalse = 0;
constexpr int kBoolTrue = 1;

class Assignment {
 public:
  Assignment() = default;

  bool has(const Variable& v) const { return bindings_.count(v) > 0; }
  int value(const Variable& v) const;
  const std::map<Variable, int>& bindings() const { return bindings_; }
  std::set<Variable> domain() const;
  size_t size() const { return bindings_.size(); }

  void set(const Variable& v, int value);
  std::vector<int> values(const std::vector<Variable>& vars) const;

  bool operator==(const Assignment& o) const { return bindings_ == o.bindings_; }
  bool operator<(const Assignment& o) const { return bindings_ < o.bindings_; }

 private:
  std::map<Variable, int> bindings_;
};

// s(v/x): functional extension-or-override.
Assignment extend(const Assignment& s, const Variable& v, int value);

using Team = std::set<Assignment>;

std::set<Variable> team_domain(const Team& x);

// X(F/x) for a team function F.
Team team_map(const Team& x, const Variable& v,
              const std::function<int(const Assignment&)>& f);
// X(A/x): duplicating extension over the whole domain.
Team team_expand(const Team& x, const Variable& v, const Structure& a);
// X restricted to V, duplicates collapsing.
Team restrict(const Team& x, const std::set<Variable>& vars);

bool is_w_determined(const std::function<int(const Assignment&)>& f,
                     const Team& x, const std::set<Variable>& w);

bool matches_pattern(const std::vector<std::vector<int>>& tuples,
                     const Pattern& pattern);

Structure induced_substructure(const Structure& a, const std::set<int>& keep);

// Exhaustive enumerators. Deterministic order, duplicate free; the visitor
// returns false to stop early. Each visited item ticks the budget.
void all_team_functions(const Team& x, const std::vector<int>& codomain,
                        Budget& budget,
                        const std::function<bool(const std::map<Assignment, int>&)>& visit);
// Every map from domain^n to {0,1}, encoded as a flat vector indexed by the
// mixed-radix rank of the tuple.
void all_row_functions(int domain_size, int n, Budget& budget,
                       const std::function<bool(const std::vector<int>&)>& visit);
void all_structures(const Vocabulary& voc, int domain_size, Budget& budget,
                    const std::function<bool(const Structure&)>& visit);

// Tuple helpers shared by the semantics and the game solver.
long long int_pow(long long base, int exp);
std::vector<int> tuple_at(int domain_size, int n, long long rank);
long long tuple_rank(int domain_size, const std::vector<int>& tuple);

}  // namespace logic

#include "logic/model.hpp"

#include <stdexcept>

namespace logic {

bool Structure::well_formed() const {
  if (domain_size <= 0) return false;
  for (const auto& [name, ar] : voc.relations) {
    auto it = relations.find(name);
    if (it == relations.end()) continue;
    for (const auto& t : it->second) {
      if (static_cast<int>(t.size()) != ar) return false;
      for (int e : t)
        if (e < 0 || e >= domain_size) return false;
    }
  }
  for (const auto& [name, tuples] : relations)
    if (!voc.has(name)) return false;
  return true;
}

bool Structure::holds(const std::string& rel, const std::vector<int>& tuple) const {
  auto it = relations.find(rel);
  return it != relations.end() && it->second.count(tuple) > 0;
}

int Assignment::value(const Variable& v) const {
  auto it = bindings_.find(v);
  if (it == bindings_.end())
    throw std::invalid_argument("unbound variable: " + v.name);
  return it->second;
}

std::set<Variable> Assignment::domain() const {
  std::set<Variable> out;
  for (const auto& [v, val] : bindings_) out.insert(v);
  return out;
}

void Assignment::set(const Variable& v, int value) {
  if (v.kind == VarKind::Bool && value != kBoolFalse && value != kBoolTrue)
    throw std::invalid_argument("Boolean variable assigned a non-Boolean value");
  bindings_[v] = value;
}

std::vector<int> Assignment::values(const std::vector<Variable>& vars) const {
  std::vector<int> out;
  out.reserve(vars.size());
  for (const auto& v : vars) out.push_back(value(v));
  return out;
}

Assignment extend(const Assignment& s, const Variable& v, int value) {
  Assignment out = s;
  out.set(v, value);
  return out;
}

std::set<Variable> team_domain(const Team& x) {
  if (x.empty()) return {};
  return x.begin()->domain();
}

Team team_map(const Team& x, const Variable& v,
              const std::function<int(const Assignment&)>& f) {
  Team out;
  for (const auto& s : x) out.insert(extend(s, v, f(s)));
  return out;
}

Team team_expand(const Team& x, const Variable& v, const Structure& a) {
  if (v.kind != VarKind::FO)
    throw std::invalid_argument("team_expand needs an FO variable");
  Team out;
  for (const auto& s : x)
    for (int e = 0; e < a.domain_size; ++e) out.insert(extend(s, v, e));
  return out;
}

Team restrict(const Team& x, const std::set<Variable>& vars) {
  Team out;
  for (const auto& s : x) {
    Assignment r;
    for (const auto& v : vars) r.set(v, s.value(v));
    out.insert(r);
  }
  return out;
}

bool is_w_determined(const std::function<int(const Assignment&)>& f,
                     const Team& x, const std::set<Variable>& w) {
  std::map<std::vector<int>, int> seen;
  std::vector<Variable> ws(w.begin(), w.end());
  for (const auto& s : x) {
    auto key = s.values(ws);
    int val = f(s);
    auto [it, inserted] = seen.emplace(key, val);
    if (!inserted && it->second != val) return false;
  }
  return true;
}

bool matches_pattern(const std::vector<std::vector<int>>& tuples,
                     const Pattern& pattern) {
  if (tuples.size() != pattern.row_lengths.size())
    throw std::invalid_argument("pattern row count mismatch");
  for (size_t i = 0; i < tuples.size(); ++i)
    if (static_cast<int>(tuples[i].size()) != pattern.row_lengths[i])
      throw std::invalid_argument("pattern row length mismatch");
  for (const auto& q : pattern.identities)
    if (tuples[q[0] - 1][q[1] - 1] != tuples[q[2] - 1][q[3] - 1]) return false;
  return true;
}

Structure induced_substructure(const Structure& a, const std::set<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("empty substructure domain");
  std::map<int, int> relabel;
  for (int e : keep) {
    if (e < 0 || e >= a.domain_size)
      throw std::invalid_argument("substructure element outside the domain");
    int next = static_cast<int>(relabel.size());
    relabel[e] = next;
  }
  Structure out;
  out.voc = a.voc;
  out.domain_size = static_cast<int>(keep.size());
  for (const auto& [name, tuples] : a.relations) {
    auto& dst = out.relations[name];
    for (const auto& t : tuples) {
      std::vector<int> mapped;
      mapped.reserve(t.size());
      bool inside = true;
      for (int e : t) {
        auto it = relabel.find(e);
        if (it == relabel.end()) {
          inside = false;
          break;
        }
        mapped.push_back(it->second);
      }
      if (inside) dst.insert(mapped);
    }
  }
  return out;
}

long long int_pow(long long base, int exp) {
  long long out = 1;
  for (int i = 0; i < exp; ++i) {
    out *= base;
    if (out < 0) throw std::overflow_error("int_pow overflow");
  }
  return out;
}

std::vector<int> tuple_at(int domain_size, int n, long long rank) {
  std::vector<int> out(n);
  for (int i = n - 1; i >= 0; --i) {
    out[i] = static_cast<int>(rank % domain_size);
    rank /= domain_size;
  }
  return out;
}

long long tuple_rank(int domain_size, const std::vector<int>& tuple) {
  long long rank = 0;
  for (int e : tuple) rank = rank * domain_size + e;
  return rank;
}

void all_team_functions(const Team& x, const std::vector<int>& codomain,
                        Budget& budget,
                        const std::function<bool(const std::map<Assignment, int>&)>& visit) {
  std::vector<Assignment> members(x.begin(), x.end());
  const int n = static_cast<int>(members.size());
  const int k = static_cast<int>(codomain.size());
  if (k == 0 && n > 0) return;
  std::vector<int> choice(n, 0);
  for (;;) {
    budget.tick();
    std::map<Assignment, int> f;
    for (int i = 0; i < n; ++i) f[members[i]] = codomain[choice[i]];
    if (!visit(f)) return;
    int i = n - 1;
    while (i >= 0 && choice[i] == k - 1) choice[i--] = 0;
    if (i < 0) return;
    ++choice[i];
  }
}

void all_row_functions(int domain_size, int n, Budget& budget,
                       const std::function<bool(const std::vector<int>&)>& visit) {
  const long long cells = int_pow(domain_size, n);
  if (cells > 62) throw BudgetExceeded();
  std::vector<int> table(cells, 0);
  for (;;) {
    budget.tick();
    if (!visit(table)) return;
    long long i = cells - 1;
    while (i >= 0 && table[i] == 1) table[i--] = 0;
    if (i < 0) return;
    table[i] = 1;
  }
}

void all_structures(const Vocabulary& voc, int domain_size, Budget& budget,
                    const std::function<bool(const Structure&)>& visit) {
  if (domain_size <= 0) throw std::invalid_argument("domain must be nonempty");
  // Flat list of (relation, tuple) cells, toggled as one big counter.
  std::vector<std::pair<std::string, std::vector<int>>> cells;
  for (const auto& [name, ar] : voc.relations) {
    const long long count = int_pow(domain_size, ar);
    for (long long r = 0; r < count; ++r)
      cells.emplace_back(name, tuple_at(domain_size, ar, r));
  }
  if (cells.size() > 62) throw BudgetExceeded();
  std::vector<int> bits(cells.size(), 0);
  for (;;) {
    budget.tick();
    Structure s;
    s.voc = voc;
    s.domain_size = domain_size;
    for (const auto& [name, ar] : voc.relations) s.relations[name];
    for (size_t i = 0; i < cells.size(); ++i)
      if (bits[i]) s.relations[cells[i].first].insert(cells[i].second);
    if (!visit(s)) return;
    int i = static_cast<int>(cells.size()) - 1;
    while (i >= 0 && bits[i] == 1) bits[i--] = 0;
    if (i < 0) return;
    bits[i] = 1;
  }
}

}  // namespace logic

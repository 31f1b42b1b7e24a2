#include "logic/corpus.hpp"

#include <deque>
#include <stdexcept>

namespace logic {

namespace {

Structure cycle_like(int nodes, int k) {
  Structure a;
  a.voc.add("E", 2);
  a.domain_size = nodes;
  auto& e = a.relations["E"];
  for (int base = 0; base < nodes; base += k)
    for (int i = 0; i < k; ++i) {
      int u = base + i, v = base + (i + 1) % k;
      e.insert({u, v});
      e.insert({v, u});
    }
  return a;
}

}  // namespace

Structure gen_cycle(int k) {
  if (k < 3) throw std::invalid_argument("cycles need k >= 3");
  return cycle_like(k, k);
}

Structure gen_two_cycles(int k) {
  if (k < 3) throw std::invalid_argument("cycles need k >= 3");
  return cycle_like(2 * k, k);
}

Ast non_connectivity() {
  Variable u = fo_var("u"), v = fo_var("v");
  Variable x = fo_var("x"), y = fo_var("y");
  Variable a = bool_var("a"), b = bool_var("b");
  Ast body = mk_and_all({
      mk_dep_bool({x}, a),
      mk_dep_bool({y}, b),
      mk_implies(mk_equal(x, y), mk_iff(mk_bool_lit(a), mk_bool_lit(b))),
      mk_implies(mk_equal(x, u), mk_bool_lit(a)),
      mk_implies(mk_equal(x, v), mk_bool_lit(a, true)),
      mk_implies(mk_and(mk_bool_lit(a), mk_bool_lit(b, true)),
                 mk_rel("E", {x, y}, true)),
  });
  return mk_exists_fo(
      u, mk_exists_fo(
             v, mk_forall_fo(
                    x, mk_forall_fo(
                           y, mk_exists_bool(a, mk_exists_bool(b, body))))));
}

Ast two_elements() {
  Variable x = fo_var("x"), y = fo_var("y");
  return mk_exists_fo(x, mk_exists_fo(y, mk_not_equal(x, y)));
}

bool is_connected(const Structure& a, const std::string& rel) {
  if (a.domain_size <= 1) return true;
  std::vector<std::vector<int>> fwd(a.domain_size), bwd(a.domain_size);
  auto it = a.relations.find(rel);
  if (it != a.relations.end())
    for (const auto& t : it->second)
      if (t.size() == 2) {
        fwd[t[0]].push_back(t[1]);
        bwd[t[1]].push_back(t[0]);
      }
  auto reaches_all = [&](const std::vector<std::vector<int>>& adj) {
    std::vector<bool> seen(a.domain_size, false);
    std::deque<int> queue = {0};
    seen[0] = true;
    int reached = 1;
    while (!queue.empty()) {
      int n = queue.front();
      queue.pop_front();
      for (int m : adj[n])
        if (!seen[m]) {
          seen[m] = true;
          ++reached;
          queue.push_back(m);
        }
    }
    return reached == a.domain_size;
  };
  return reaches_all(fwd) && reaches_all(bwd);
}

namespace {

std::vector<Ast> atoms_for(const CorpusSpec& spec, Budget& budget) {
  std::vector<Ast> out;
  auto emit = [&](Ast f) {
    budget.tick();
    out.push_back(std::move(f));
  };
  const auto& pool = spec.fo_pool;
  for (const auto& x : pool)
    for (const auto& y : pool) {
      emit(mk_equal(x, y));
      emit(mk_not_equal(x, y));
    }
  for (const auto& [name, ar] : spec.voc.relations) {
    std::vector<Variable> args(ar, pool.empty() ? Variable{} : pool[0]);
    std::vector<size_t> idx(ar, 0);
    if (ar > 0 && pool.empty()) continue;
    for (;;) {
      for (int i = 0; i < ar; ++i) args[i] = pool[idx[i]];
      emit(mk_rel(name, args, false));
      emit(mk_rel(name, args, true));
      int i = ar - 1;
      while (i >= 0 && idx[i] == pool.size() - 1) idx[i--] = 0;
      if (i < 0) break;
      ++idx[i];
    }
  }
  for (const auto& a : spec.bool_pool) {
    emit(mk_bool_lit(a, false));
    emit(mk_bool_lit(a, true));
  }
  // Dependence antecedents: subsets of the pool in sorted order.
  const size_t p = pool.size();
  for (size_t mask = 0; mask < (size_t{1} << p); ++mask) {
    std::vector<Variable> antecedent;
    for (size_t i = 0; i < p; ++i)
      if (mask & (size_t{1} << i)) antecedent.push_back(pool[i]);
    for (const auto& y : pool) emit(mk_dep_fo(antecedent, y));
    for (const auto& a : spec.bool_pool) emit(mk_dep_bool(antecedent, a));
  }
  return out;
}

}  // namespace

void enumerate_formulas(const CorpusSpec& spec, Budget& budget,
                        const std::function<bool(const Ast&)>& visit) {
  if (spec.max_size <= 0) throw std::invalid_argument("max_size must be positive");
  std::vector<std::vector<Ast>> by_size(spec.max_size + 1);
  by_size[1] = atoms_for(spec, budget);
  for (int s = 2; s <= spec.max_size; ++s) {
    auto& layer = by_size[s];
    for (int a = 1; a <= s - 2; ++a) {
      int b = s - 1 - a;
      for (const auto& l : by_size[a])
        for (const auto& r : by_size[b]) {
          budget.tick();
          layer.push_back(mk_and(l, r));
          layer.push_back(mk_or(l, r));
        }
    }
    for (const auto& body : by_size[s - 1]) {
      for (const auto& x : spec.fo_pool) {
        budget.tick();
        layer.push_back(mk_exists_fo(x, body));
        layer.push_back(mk_forall_fo(x, body));
      }
      for (const auto& a : spec.bool_pool) {
        budget.tick();
        layer.push_back(mk_exists_bool(a, body));
      }
    }
  }
  for (int s = 1; s <= spec.max_size; ++s)
    for (const auto& f : by_size[s]) {
      if (spec.sentences_only && !is_sentence(f)) continue;
      if (spec.fragment && !classify(f).count(*spec.fragment)) continue;
      if (!visit(f)) return;
    }
}

void enumerate_structures(const CorpusSpec& spec, Budget& budget,
                          const std::function<bool(const Structure&)>& visit) {
  if (spec.max_domain <= 0)
    throw std::invalid_argument("max_domain must be positive");
  for (int n = 1; n <= spec.max_domain; ++n) {
    bool keep_going = true;
    all_structures(spec.voc, n, budget, [&](const Structure& s) {
      keep_going = visit(s);
      return keep_going;
    });
    if (!keep_going) return;
  }
}

}  // namespace logic

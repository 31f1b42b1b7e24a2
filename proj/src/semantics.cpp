#include "logic/semantics.hpp"

#include <algorithm>

namespace logic {

namespace {

bool has_node(const Ast& f, NodeKind k1, NodeKind k2) {
  if (f->kind == k1 || f->kind == k2) return true;
  for (const auto& c : children(f))
    if (has_node(c, k1, k2)) return true;
  return false;
}

}  // namespace

bool team_dialect(const Ast& f) {
  return !has_node(f, NodeKind::NPi, NodeKind::SVConn);
}

bool assignment_dialect(const Ast& f) {
  return !has_node(f, NodeKind::DepFO, NodeKind::DepBool);
}

int quantifier_rank(const Ast& f) {
  int inner = 0;
  for (const auto& c : children(f)) inner = std::max(inner, quantifier_rank(c));
  if (f->kind == NodeKind::ExistsFO || f->kind == NodeKind::ForallFO)
    return inner + 1;
  return inner;
}

namespace {

// Direct clause check for literals and dependence atoms on a team.
bool atom_holds(const Structure& a, const Team& x, const Ast& f) {
  switch (f->kind) {
    case NodeKind::Equal:
      for (const auto& s : x)
        if (s.value(f->args[0]) != s.value(f->args[1])) return false;
      return true;
    case NodeKind::NotEqual:
      for (const auto& s : x)
        if (s.value(f->args[0]) == s.value(f->args[1])) return false;
      return true;
    case NodeKind::RelAtom:
      for (const auto& s : x)
        if (!a.holds(f->rel, s.values(f->args))) return false;
      return true;
    case NodeKind::NegRelAtom:
      for (const auto& s : x)
        if (a.holds(f->rel, s.values(f->args))) return false;
      return true;
    case NodeKind::BoolLit:
      for (const auto& s : x)
        if (s.value(f->consequent) != kBoolTrue) return false;
      return true;
    case NodeKind::NegBoolLit:
      for (const auto& s : x)
        if (s.value(f->consequent) != kBoolFalse) return false;
      return true;
    case NodeKind::DepFO:
    case NodeKind::DepBool: {
      std::map<std::vector<int>, int> seen;
      for (const auto& s : x) {
        auto key = s.values(f->args);
        int val = s.value(f->consequent);
        auto [it, inserted] = seen.emplace(key, val);
        if (!inserted && it->second != val) return false;
      }
      return true;
    }
    default:
      throw std::logic_error("atom_holds on a non-atom");
  }
}

struct AssignmentEval {
  const Structure& a;
  Budget& budget;

  bool eval(const Assignment& s, const Ast& f) {
    budget.tick();
    switch (f->kind) {
      case NodeKind::Equal:
        return s.value(f->args[0]) == s.value(f->args[1]);
      case NodeKind::NotEqual:
        return s.value(f->args[0]) != s.value(f->args[1]);
      case NodeKind::RelAtom:
        return a.holds(f->rel, s.values(f->args));
      case NodeKind::NegRelAtom:
        return !a.holds(f->rel, s.values(f->args));
      case NodeKind::BoolLit:
        return s.value(f->consequent) == kBoolTrue;
      case NodeKind::NegBoolLit:
        return s.value(f->consequent) == kBoolFalse;
      case NodeKind::And:
        return eval(s, f->left) && eval(s, f->right);
      case NodeKind::Or:
        return eval(s, f->left) || eval(s, f->right);
      case NodeKind::ExistsFO: {
        for (int e = 0; e < a.domain_size; ++e)
          if (eval(extend(s, f->consequent, e), f->left)) return true;
        return false;
      }
      case NodeKind::ForallFO: {
        for (int e = 0; e < a.domain_size; ++e)
          if (!eval(extend(s, f->consequent, e), f->left)) return false;
        return true;
      }
      case NodeKind::ExistsBool: {
        return eval(extend(s, f->consequent, kBoolFalse), f->left) ||
               eval(extend(s, f->consequent, kBoolTrue), f->left);
      }
      case NodeKind::NPi: {
        bool value = eval_npi(s, f);
        return f->negated ? !value : value;
      }
      case NodeKind::SVConn: {
        bool value = eval_sv(s, f);
        return f->negated ? !value : value;
      }
      case NodeKind::DepFO:
      case NodeKind::DepBool:
        throw DialectError("dependence atom under assignment semantics");
    }
    throw std::logic_error("unreachable");
  }

  // Enumerates one {0,1}-valued table per row and checks the body on every
  // pattern-conformant choice of row tuples.
  bool eval_npi(const Assignment& s, const Ast& f) {
    const int m = static_cast<int>(f->rows.size());
    std::vector<long long> tuple_counts(m);
    for (int i = 0; i < m; ++i)
      tuple_counts[i] = int_pow(a.domain_size, f->rows[i].vars.size());

    // Pattern-conformant combinations, precomputed once.
    std::vector<std::vector<std::vector<int>>> conformant;
    std::vector<long long> combo(m, 0);
    for (;;) {
      budget.tick();
      std::vector<std::vector<int>> tuples(m);
      for (int i = 0; i < m; ++i)
        tuples[i] = tuple_at(a.domain_size, f->rows[i].vars.size(),
                             combo[i]);
      if (matches_pattern(tuples, f->pattern)) conformant.push_back(tuples);
      int i = m - 1;
      while (i >= 0 && combo[i] == tuple_counts[i] - 1) combo[i--] = 0;
      if (i < 0) break;
      ++combo[i];
    }

    std::vector<std::vector<int>> tables(m);
    return search_tables(s, f, 0, tables, conformant);
  }

  bool search_tables(const Assignment& s, const Ast& f, int row,
                     std::vector<std::vector<int>>& tables,
                     const std::vector<std::vector<std::vector<int>>>& conformant) {
    const int m = static_cast<int>(f->rows.size());
    if (row == m) {
      for (const auto& tuples : conformant) {
        budget.tick();
        Assignment next = s;
        for (int i = 0; i < m; ++i) {
          for (size_t j = 0; j < f->rows[i].vars.size(); ++j)
            next.set(f->rows[i].vars[j], tuples[i][j]);
          next.set(f->rows[i].witness,
                   tables[i][tuple_rank(a.domain_size, tuples[i])]);
        }
        if (!eval(next, f->left)) return false;
      }
      return true;
    }
    const long long cells = int_pow(a.domain_size, f->rows[row].vars.size());
    if (cells > 30) throw BudgetExceeded();
    tables[row].assign(cells, 0);
    for (long long mask = 0; mask < (1ll << cells); ++mask) {
      budget.tick();
      for (long long c = 0; c < cells; ++c)
        tables[row][c] = static_cast<int>((mask >> c) & 1);
      if (search_tables(s, f, row + 1, tables, conformant)) return true;
    }
    return false;
  }

  bool eval_sv(const Assignment& s, const Ast& f) {
    const int m = static_cast<int>(f->sv_rows.size());
    std::vector<std::vector<int>> tables(m);
    return search_sv_tables(s, f, 0, tables);
  }

  bool search_sv_tables(const Assignment& s, const Ast& f, int row,
                        std::vector<std::vector<int>>& tables) {
    const int m = static_cast<int>(f->sv_rows.size());
    if (row == m) {
      std::vector<long long> tuple_counts(m);
      for (int i = 0; i < m; ++i)
        tuple_counts[i] = int_pow(a.domain_size, f->sv_rows[i].size());
      std::vector<long long> combo(m, 0);
      for (;;) {
        budget.tick();
        Assignment next = s;
        std::vector<int> bits(m);
        for (int i = 0; i < m; ++i) {
          auto tuple = tuple_at(a.domain_size, f->sv_rows[i].size(), combo[i]);
          for (size_t j = 0; j < f->sv_rows[i].size(); ++j)
            next.set(f->sv_rows[i][j], tuple[j]);
          bits[i] = tables[i][combo[i]];
        }
        if (!eval(next, f->branches.at(bits))) return false;
        int i = m - 1;
        while (i >= 0 && combo[i] == tuple_counts[i] - 1) combo[i--] = 0;
        if (i < 0) return true;
        ++combo[i];
      }
    }
    const long long cells = int_pow(a.domain_size, f->sv_rows[row].size());
    if (cells > 30) throw BudgetExceeded();
    tables[row].assign(cells, 0);
    for (long long mask = 0; mask < (1ll << cells); ++mask) {
      budget.tick();
      for (long long c = 0; c < cells; ++c)
        tables[row][c] = static_cast<int>((mask >> c) & 1);
      if (search_sv_tables(s, f, row + 1, tables)) return true;
    }
    return false;
  }
};

struct TeamEval {
  const Structure& a;
  Budget& budget;
  EvalOptions opts;
  std::map<std::pair<const Formula*, Team>, bool> memo;
  std::map<const Formula*, bool> dep_cache;
  std::map<const Formula*, std::set<Variable>> fv_cache;

  // Per-quantifier split of the body conjunction into leaves that mention
  // the quantified variable and leaves that do not. Leaves mentioning the
  // variable are further split into flat (dependence-free) ones, checked by
  // per-key constraint propagation, and residual ones that still need the
  // function search. The rebuilt conjunction is cached so memo keys stay
  // stable.
  struct BodySplit {
    std::vector<Ast> without;
    Ast with;              // null when every leaf avoids the variable
    Ast dep_leaf;          // a dependence leaf keying the choice function
    std::vector<Ast> flat_with;
    Ast residual;          // null when propagation decides the quantifier
  };
  std::map<const Formula*, BodySplit> split_cache;

  bool has_dep(const Ast& f) {
    auto it = dep_cache.find(f.get());
    if (it != dep_cache.end()) return it->second;
    bool result = f->kind == NodeKind::DepFO || f->kind == NodeKind::DepBool;
    if (!result)
      for (const auto& c : children(f))
        if (has_dep(c)) {
          result = true;
          break;
        }
    dep_cache.emplace(f.get(), result);
    return result;
  }

  const std::set<Variable>& free_of(const Ast& f) {
    auto it = fv_cache.find(f.get());
    if (it == fv_cache.end())
      it = fv_cache.emplace(f.get(), free_variables(f)).first;
    return it->second;
  }

  bool eval(const Team& x, const Ast& f) {
    if (x.empty()) return true;
    budget.tick();
    // Dependence-free subformulas are flat: team truth is pointwise truth.
    if (!opts.naive && !has_dep(f)) {
      AssignmentEval flat{a, budget};
      for (const auto& s : x)
        if (!flat.eval(s, f)) return false;
      return true;
    }
    const bool use_memo = x.size() <= 16;
    auto key = std::make_pair(f.get(), x);
    if (use_memo)
      if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool result = compute(x, f);
    if (use_memo) memo.emplace(std::move(key), result);
    return result;
  }

  bool compute(const Team& x, const Ast& f) {
    switch (f->kind) {
      case NodeKind::And:
        return eval(x, f->left) && eval(x, f->right);
      case NodeKind::Or:
        return eval_or(x, f);
      case NodeKind::ForallFO:
        return eval(team_expand(x, f->consequent, a), f->left);
      case NodeKind::ExistsFO:
        return eval_exists(x, f, a.domain_size);
      case NodeKind::ExistsBool:
        return eval_exists(x, f, 2);
      case NodeKind::NPi:
      case NodeKind::SVConn:
        throw DialectError("no team semantics for partially-ordered connectives");
      default:
        return atom_holds(a, x, f);
    }
  }

  bool eval_or(const Team& x, const Ast& f) {
    if (!opts.naive && !opts.exhaustive_covers) {
      // When one disjunct is flat, the split is forced: give that side its
      // maximal satisfying subteam; downward closure makes the complement
      // the easiest team for the other side.
      const bool left_flat = !has_dep(f->left);
      const bool right_flat = !has_dep(f->right);
      if (left_flat || right_flat) {
        const Ast& flat_side = left_flat ? f->left : f->right;
        const Ast& other_side = left_flat ? f->right : f->left;
        AssignmentEval flat{a, budget};
        Team rest;
        for (const auto& s : x)
          if (!flat.eval(s, flat_side)) rest.insert(s);
        return eval(rest, other_side);
      }
    }
    std::vector<Assignment> members(x.begin(), x.end());
    const int n = static_cast<int>(members.size());
    if (n > 25) throw BudgetExceeded();
    if (!opts.exhaustive_covers) {
      for (long long mask = 0; mask < (1ll << n); ++mask) {
        budget.tick();
        Team y, z;
        for (int i = 0; i < n; ++i)
          ((mask >> i) & 1 ? y : z).insert(members[i]);
        if (eval(y, f->left) && eval(z, f->right)) return true;
      }
      return false;
    }
    // Debug mode: arbitrary covers Y u Z = X, elements possibly shared.
    std::vector<int> side(n, 0);
    for (;;) {
      budget.tick();
      Team y, z;
      for (int i = 0; i < n; ++i) {
        if (side[i] != 1) y.insert(members[i]);
        if (side[i] != 0) z.insert(members[i]);
      }
      if (eval(y, f->left) && eval(z, f->right)) return true;
      int i = n - 1;
      while (i >= 0 && side[i] == 2) side[i--] = 0;
      if (i < 0) return false;
      ++side[i];
    }
  }

  const BodySplit& body_split(const Ast& f) {
    auto it = split_cache.find(f.get());
    if (it != split_cache.end()) return it->second;
    BodySplit split;
    const Variable& v = f->consequent;
    std::vector<Ast> with;
    std::vector<Ast> leaves;
    std::function<void(const Ast&)> flatten = [&](const Ast& g) {
      if (g->kind == NodeKind::And) {
        flatten(g->left);
        flatten(g->right);
      } else {
        leaves.push_back(g);
      }
    };
    flatten(f->left);
    for (const auto& leaf : leaves) {
      if (free_of(leaf).count(v))
        with.push_back(leaf);
      else
        split.without.push_back(leaf);
    }
    if (!with.empty()) split.with = mk_and_all(with);
    // A dependence atom on v reachable through conjunctions and quantifiers
    // (never disjunctions) must hold on the whole extended team, so every
    // satisfying choice function for v is determined by its antecedent.
    // Antecedents mentioning v or an intervening binder cannot key the team.
    const NodeKind want =
        v.kind == VarKind::Bool ? NodeKind::DepBool : NodeKind::DepFO;
    std::set<Variable> binders = {v};
    std::function<Ast(const Ast&, std::set<Variable>&)> find_guide =
        [&](const Ast& g, std::set<Variable>& bound) -> Ast {
      if (g->kind == want && g->consequent == v) {
        for (const auto& arg : g->args)
          if (bound.count(arg)) return nullptr;
        return g;
      }
      if (g->kind == NodeKind::And) {
        if (Ast hit = find_guide(g->left, bound)) return hit;
        return find_guide(g->right, bound);
      }
      if (g->kind == NodeKind::ExistsFO || g->kind == NodeKind::ForallFO ||
          g->kind == NodeKind::ExistsBool) {
        if (g->consequent == v) return nullptr;  // shadowed
        bool added = bound.insert(g->consequent).second;
        Ast hit = find_guide(g->left, bound);
        if (added) bound.erase(g->consequent);
        return hit;
      }
      return nullptr;
    };
    if (split.with) split.dep_leaf = find_guide(split.with, binders);
    // Dependence-free with-leaves are flat, so they are checked exactly,
    // pointwise per candidate value; only dependence-carrying leaves couple
    // assignments and go to the residual search.
    std::vector<Ast> residual;
    for (const auto& leaf : with) {
      if (leaf == split.dep_leaf) continue;  // guaranteed by keyed search
      if (has_dep(leaf))
        residual.push_back(leaf);
      else
        split.flat_with.push_back(leaf);
    }
    if (!residual.empty()) split.residual = mk_and_all(residual);
    // Hoist flat constraints on v from the conjunctive and quantifier spine
    // inside the residual leaves (never across a disjunction): each is a
    // necessary pointwise condition on the choice for v, so it can prune the
    // per-key value sets before the search. Leaves mentioning an intervening
    // binder cannot be lifted. Pruning only; the residual is still checked.
    std::set<Variable> bound;
    std::function<void(const Ast&)> hoist = [&](const Ast& g) {
      if (g->kind == NodeKind::And) {
        hoist(g->left);
        hoist(g->right);
        return;
      }
      if (g->kind == NodeKind::ExistsFO || g->kind == NodeKind::ForallFO ||
          g->kind == NodeKind::ExistsBool) {
        if (g->consequent == v) return;  // v shadowed below
        bool added = bound.insert(g->consequent).second;
        hoist(g->left);
        if (added) bound.erase(g->consequent);
        return;
      }
      if (has_dep(g)) return;
      const auto& fv = free_of(g);
      if (!fv.count(v)) return;
      for (const auto& b : bound)
        if (fv.count(b)) return;
      split.flat_with.push_back(g);
    };
    for (const auto& leaf : residual) hoist(leaf);
    return split_cache.emplace(f.get(), std::move(split)).first->second;
  }

  bool eval_exists(const Team& x, const Ast& f, int choices) {
    if (opts.naive) return exists_search(x, f->consequent, f->left, choices);
    // Scope shrinking: leaves of the body conjunction that do not mention
    // the quantified variable are checked on the unextended team (locality),
    // pruning the function search early.
    const BodySplit& split = body_split(f);
    for (const auto& leaf : split.without)
      if (!eval(x, leaf)) return false;
    if (!split.with) return true;
    if (choices > 62) throw BudgetExceeded();

    const Variable& v = f->consequent;
    std::vector<Assignment> members(x.begin(), x.end());
    const int n = static_cast<int>(members.size());

    // A conjoined dependence atom on the quantified variable forces every
    // satisfying choice function to be determined by the antecedent, so one
    // choice per distinct antecedent value suffices; otherwise each
    // assignment keys its own choice.
    std::vector<int> key_of(n);
    int d = n;
    if (split.dep_leaf) {
      std::map<std::vector<int>, int> key_index;
      for (int i = 0; i < n; ++i) {
        auto key = members[i].values(split.dep_leaf->args);
        auto [it, inserted] = key_index.emplace(key, key_index.size());
        key_of[i] = it->second;
      }
      d = static_cast<int>(key_index.size());
    } else {
      for (int i = 0; i < n; ++i) key_of[i] = i;
    }

    // Flatness again: a dependence-free leaf constrains each assignment's
    // choice independently, so it intersects down the per-key value sets
    // instead of multiplying the search.
    std::vector<uint64_t> allowed(d, choices == 62
                                         ? ~uint64_t{0} >> 2
                                         : (uint64_t{1} << choices) - 1);
    if (!split.flat_with.empty()) {
      AssignmentEval flat{a, budget};
      for (int i = 0; i < n; ++i) {
        uint64_t ok = 0;
        for (int c = 0; c < choices; ++c) {
          Assignment ext = extend(members[i], v, c);
          bool pass = true;
          for (const auto& leaf : split.flat_with)
            if (!flat.eval(ext, leaf)) {
              pass = false;
              break;
            }
          if (pass) ok |= uint64_t{1} << c;
        }
        allowed[key_of[i]] &= ok;
        if (allowed[key_of[i]] == 0) return false;
      }
    }
    if (!split.residual) return true;

    // Residual leaves still couple assignments; search the surviving choice
    // space.
    std::vector<std::vector<int>> values(d);
    for (int k = 0; k < d; ++k)
      for (int c = 0; c < choices; ++c)
        if (allowed[k] & (uint64_t{1} << c)) values[k].push_back(c);
    std::vector<int> pick(d, 0);
    for (;;) {
      budget.tick(n);
      Team next;
      for (int i = 0; i < n; ++i)
        next.insert(extend(members[i], v, values[key_of[i]][pick[key_of[i]]]));
      if (eval(next, split.residual)) return true;
      int i = d - 1;
      while (i >= 0 &&
             pick[i] == static_cast<int>(values[i].size()) - 1)
        pick[i--] = 0;
      if (i < 0) return false;
      ++pick[i];
    }
  }

  bool exists_search(const Team& x, const Variable& v, const Ast& body,
                     int choices) {
    std::vector<Assignment> members(x.begin(), x.end());
    const int n = static_cast<int>(members.size());
    std::vector<int> pick(n, 0);
    for (;;) {
      budget.tick();
      Team next;
      for (int i = 0; i < n; ++i)
        next.insert(extend(members[i], v, pick[i]));
      if (eval(next, body)) return true;
      int i = n - 1;
      while (i >= 0 && pick[i] == choices - 1) pick[i--] = 0;
      if (i < 0) return false;
      ++pick[i];
    }
  }
};

}  // namespace

bool sat_team(const Structure& a, const Team& x, const Ast& f, Budget& budget,
              const EvalOptions& opts) {
  if (!team_dialect(f))
    throw DialectError("no team semantics for connective nodes");
  if (!x.empty()) {
    auto dom = team_domain(x);
    for (const auto& v : free_variables(f))
      if (!dom.count(v))
        throw std::invalid_argument("free variable unbound in team: " + v.name);
  }
  TeamEval engine{a, budget, opts, {}, {}, {}, {}};
  return engine.eval(x, f);
}

bool sat_assignment(const Structure& a, const Assignment& s, const Ast& f,
                    Budget& budget) {
  for (const auto& v : free_variables(f))
    if (!s.has(v))
      throw std::invalid_argument("free variable unbound: " + v.name);
  AssignmentEval engine{a, budget};
  return engine.eval(s, f);
}

bool sat_sentence(const Structure& a, const Ast& f, Budget& budget,
                  const EvalOptions& opts) {
  if (!is_sentence(f)) throw std::invalid_argument("not a sentence");
  if (team_dialect(f)) {
    Team start = {Assignment{}};
    return sat_team(a, start, f, budget, opts);
  }
  if (assignment_dialect(f)) return sat_assignment(a, Assignment{}, f, budget);
  throw DialectError("formula mixes dependence atoms and connectives");
}

namespace {

struct EvaluationSearch {
  const Structure& a;
  Budget& budget;
  Evaluation result;

  bool build(const OccurrencePath& path, const Team& y, const Ast& f) {
    budget.tick();
    result.table[path] = y;
    switch (f->kind) {
      case NodeKind::And: {
        auto lp = path, rp = path;
        lp.push_back(0);
        rp.push_back(1);
        return build(lp, y, f->left) && build(rp, y, f->right);
      }
      case NodeKind::Or: {
        std::vector<Assignment> members(y.begin(), y.end());
        const int n = static_cast<int>(members.size());
        if (n > 25) throw BudgetExceeded();
        auto lp = path, rp = path;
        lp.push_back(0);
        rp.push_back(1);
        for (long long mask = 0; mask < (1ll << n); ++mask) {
          budget.tick();
          Team y0, y1;
          for (int i = 0; i < n; ++i)
            ((mask >> i) & 1 ? y0 : y1).insert(members[i]);
          if (build(lp, y0, f->left) && build(rp, y1, f->right)) return true;
        }
        return false;
      }
      case NodeKind::ForallFO: {
        auto cp = path;
        cp.push_back(0);
        return build(cp, team_expand(y, f->consequent, a), f->left);
      }
      case NodeKind::ExistsFO:
      case NodeKind::ExistsBool: {
        const int choices =
            f->kind == NodeKind::ExistsFO ? a.domain_size : 2;
        std::vector<Assignment> members(y.begin(), y.end());
        const int n = static_cast<int>(members.size());
        auto cp = path;
        cp.push_back(0);
        std::vector<int> pick(n, 0);
        for (;;) {
          budget.tick();
          Team next;
          for (int i = 0; i < n; ++i)
            next.insert(extend(members[i], f->consequent, pick[i]));
          if (build(cp, next, f->left)) return true;
          int i = n - 1;
          while (i >= 0 && pick[i] == choices - 1) pick[i--] = 0;
          if (i < 0) return false;
          ++pick[i];
        }
      }
      case NodeKind::NPi:
      case NodeKind::SVConn:
        throw DialectError("no evaluations for partially-ordered connectives");
      default:
        return atom_holds(a, y, f);
    }
  }
};

}  // namespace

std::optional<Evaluation> find_successful_evaluation(const Structure& a,
                                                     const Team& x,
                                                     const Ast& f,
                                                     Budget& budget) {
  if (!x.empty()) {
    auto dom = team_domain(x);
    for (const auto& v : free_variables(f))
      if (!dom.count(v))
        throw std::invalid_argument("free variable unbound in team: " + v.name);
  }
  EvaluationSearch search{a, budget, {}};
  if (search.build({}, x, f)) return search.result;
  return std::nullopt;
}

}  // namespace logic

#include "logic/transforms.hpp"

#include <algorithm>
#include <functional>

#include "logic/model.hpp"

namespace logic {

namespace {

[[noreturn]] void bail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

// Fresh names that cannot collide with anything in the working formula,
// including reserved-prefix names produced by earlier transforms.
struct Fresh {
  std::set<std::string> used;
  int n = 0;

  explicit Fresh(const Ast& f) {
    for (const auto& v : all_variables(f)) used.insert(v.name);
  }
  std::string next(const std::string& hint) {
    for (;;) {
      std::string name =
          std::string(1, kFreshPrefix) + hint + std::to_string(n++);
      if (used.insert(name).second) return name;
    }
  }
  Variable fo(const std::string& hint = "x") { return fo_var(next(hint)); }
  Variable boolean(const std::string& hint = "a") {
    return bool_var(next(hint));
  }
};

void note(RewriteTrace* trace, std::string rule, OccurrencePath occ,
          const Ast& before, const Ast& after) {
  if (trace)
    trace->steps.push_back(
        {std::move(rule), std::move(occ), ast_size(before), ast_size(after)});
}

void flatten_and(const Ast& f, std::vector<Ast>& out) {
  if (f->kind == NodeKind::And) {
    flatten_and(f->left, out);
    flatten_and(f->right, out);
  } else {
    out.push_back(f);
  }
}

Ast wrap_forall(const std::vector<Variable>& xs, Ast body) {
  for (auto it = xs.rbegin(); it != xs.rend(); ++it)
    body = mk_forall_fo(*it, std::move(body));
  return body;
}

Ast wrap_exists_fo(const std::vector<Variable>& xs, Ast body) {
  for (auto it = xs.rbegin(); it != xs.rend(); ++it)
    body = mk_exists_fo(*it, std::move(body));
  return body;
}

Ast wrap_exists_bool(const std::vector<Variable>& as, Ast body) {
  for (auto it = as.rbegin(); it != as.rend(); ++it)
    body = mk_exists_bool(*it, std::move(body));
  return body;
}

bool contains_kind(const Ast& f, NodeKind k1, NodeKind k2) {
  if (f->kind == k1 || f->kind == k2) return true;
  for (const auto& c : children(f))
    if (contains_kind(c, k1, k2)) return true;
  return false;
}

bool contains_dep(const Ast& f) {
  return contains_kind(f, NodeKind::DepFO, NodeKind::DepBool);
}

// True when a dependence atom with consequent `a` occurs free (not under a
// rebinding of `a`).
bool mentions_dep_on(const Ast& f, const Variable& a) {
  if (f->kind == NodeKind::DepBool && f->consequent == a) return true;
  if (f->kind == NodeKind::ExistsBool && f->consequent == a) return false;
  if (f->kind == NodeKind::NPi)
    for (const auto& row : f->rows)
      if (row.witness == a) return false;
  for (const auto& c : children(f))
    if (mentions_dep_on(c, a)) return true;
  return false;
}

// Capture-naive simultaneous substitution: first-order variables to
// first-order variables, Boolean variables to a positive replacement formula
// (negative literals get the dual). Shadowing binders drop their entries.
Ast substitute_vars(const Ast& f, std::map<Variable, Variable> fo_map,
                    std::map<Variable, Ast> bool_map) {
  auto rv = [&](const Variable& v) {
    auto it = fo_map.find(v);
    return it == fo_map.end() ? v : it->second;
  };
  switch (f->kind) {
    case NodeKind::Equal:
      return mk_equal(rv(f->args[0]), rv(f->args[1]));
    case NodeKind::NotEqual:
      return mk_not_equal(rv(f->args[0]), rv(f->args[1]));
    case NodeKind::RelAtom:
    case NodeKind::NegRelAtom: {
      std::vector<Variable> args;
      for (const auto& v : f->args) args.push_back(rv(v));
      return mk_rel(f->rel, args, f->kind == NodeKind::NegRelAtom);
    }
    case NodeKind::BoolLit:
    case NodeKind::NegBoolLit: {
      auto it = bool_map.find(f->consequent);
      if (it == bool_map.end()) return f;
      if (f->kind == NodeKind::BoolLit) return it->second;
      auto dual = negate(it->second);
      if (!dual) bail("Boolean replacement is not negatable");
      return *dual;
    }
    case NodeKind::DepFO:
    case NodeKind::DepBool: {
      std::vector<Variable> ante;
      for (const auto& v : f->args) ante.push_back(rv(v));
      if (f->kind == NodeKind::DepFO) return mk_dep_fo(ante, rv(f->consequent));
      return mk_dep_bool(ante, f->consequent);
    }
    case NodeKind::And:
      return mk_and(substitute_vars(f->left, fo_map, bool_map),
                    substitute_vars(f->right, fo_map, bool_map));
    case NodeKind::Or:
      return mk_or(substitute_vars(f->left, fo_map, bool_map),
                   substitute_vars(f->right, fo_map, bool_map));
    case NodeKind::ExistsFO:
    case NodeKind::ForallFO: {
      auto inner_fo = fo_map;
      inner_fo.erase(f->consequent);
      Ast body = substitute_vars(f->left, inner_fo, bool_map);
      return f->kind == NodeKind::ExistsFO ? mk_exists_fo(f->consequent, body)
                                           : mk_forall_fo(f->consequent, body);
    }
    case NodeKind::ExistsBool: {
      auto inner_bool = bool_map;
      inner_bool.erase(f->consequent);
      return mk_exists_bool(f->consequent,
                            substitute_vars(f->left, fo_map, inner_bool));
    }
    case NodeKind::NPi: {
      auto inner_fo = fo_map;
      auto inner_bool = bool_map;
      for (const auto& row : f->rows) {
        for (const auto& v : row.vars) inner_fo.erase(v);
        inner_bool.erase(row.witness);
      }
      return mk_npi(f->rows, substitute_vars(f->left, inner_fo, inner_bool),
                    f->negated);
    }
    case NodeKind::SVConn: {
      auto inner_fo = fo_map;
      for (const auto& row : f->sv_rows)
        for (const auto& v : row) inner_fo.erase(v);
      std::map<std::vector<int>, Ast> branches;
      for (const auto& [bits, branch] : f->branches)
        branches[bits] = substitute_vars(branch, inner_fo, bool_map);
      return mk_sv(f->sv_rows, branches, f->negated);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

// ---------------------------------------------------------------------------
// Variable normal form.

namespace {

struct VnfWalker {
  std::set<std::string> used;
  Fresh& fresh;

  Variable bind(const Variable& v, std::map<Variable, Variable>& env,
                std::map<Variable, Variable>& saved, std::set<Variable>& fresh_binds) {
    Variable target = v;
    if (!used.insert(v.name).second)
      target = v.kind == VarKind::FO ? fresh.fo(v.name) : fresh.boolean(v.name);
    if (auto it = env.find(v); it != env.end())
      saved.emplace(v, it->second);
    else
      fresh_binds.insert(v);
    env[v] = target;
    return target;
  }

  void unbind(std::map<Variable, Variable>& env,
              const std::map<Variable, Variable>& saved,
              const std::set<Variable>& fresh_binds) {
    for (const auto& v : fresh_binds) env.erase(v);
    for (const auto& [v, old] : saved) env[v] = old;
  }

  Ast walk(const Ast& f, std::map<Variable, Variable>& env) {
    auto rv = [&](const Variable& v) {
      auto it = env.find(v);
      return it == env.end() ? v : it->second;
    };
    switch (f->kind) {
      case NodeKind::Equal:
        return mk_equal(rv(f->args[0]), rv(f->args[1]));
      case NodeKind::NotEqual:
        return mk_not_equal(rv(f->args[0]), rv(f->args[1]));
      case NodeKind::RelAtom:
      case NodeKind::NegRelAtom: {
        std::vector<Variable> args;
        for (const auto& v : f->args) args.push_back(rv(v));
        return mk_rel(f->rel, args, f->kind == NodeKind::NegRelAtom);
      }
      case NodeKind::BoolLit:
      case NodeKind::NegBoolLit:
        return mk_bool_lit(rv(f->consequent), f->kind == NodeKind::NegBoolLit);
      case NodeKind::DepFO:
      case NodeKind::DepBool: {
        std::vector<Variable> ante;
        for (const auto& v : f->args) ante.push_back(rv(v));
        return f->kind == NodeKind::DepFO
                   ? mk_dep_fo(ante, rv(f->consequent))
                   : mk_dep_bool(ante, rv(f->consequent));
      }
      case NodeKind::And:
        return mk_and(walk(f->left, env), walk(f->right, env));
      case NodeKind::Or:
        return mk_or(walk(f->left, env), walk(f->right, env));
      case NodeKind::ExistsFO:
      case NodeKind::ForallFO:
      case NodeKind::ExistsBool: {
        std::map<Variable, Variable> saved;
        std::set<Variable> fresh_binds;
        Variable target = bind(f->consequent, env, saved, fresh_binds);
        Ast body = walk(f->left, env);
        unbind(env, saved, fresh_binds);
        switch (f->kind) {
          case NodeKind::ExistsFO: return mk_exists_fo(target, body);
          case NodeKind::ForallFO: return mk_forall_fo(target, body);
          default: return mk_exists_bool(target, body);
        }
      }
      case NodeKind::NPi: {
        std::map<Variable, Variable> saved;
        std::set<Variable> fresh_binds;
        std::map<Variable, Variable> local;  // shared row vars bind once
        std::vector<NpiRow> rows;
        for (const auto& row : f->rows) {
          NpiRow out;
          for (const auto& v : row.vars) {
            auto it = local.find(v);
            if (it == local.end())
              it = local.emplace(v, bind(v, env, saved, fresh_binds)).first;
            out.vars.push_back(it->second);
          }
          out.witness = bind(row.witness, env, saved, fresh_binds);
          rows.push_back(std::move(out));
        }
        Ast body = walk(f->left, env);
        unbind(env, saved, fresh_binds);
        return mk_npi(rows, body, f->negated);
      }
      case NodeKind::SVConn: {
        std::map<Variable, Variable> saved;
        std::set<Variable> fresh_binds;
        std::map<Variable, Variable> local;
        std::vector<std::vector<Variable>> rows;
        for (const auto& row : f->sv_rows) {
          std::vector<Variable> out;
          for (const auto& v : row) {
            auto it = local.find(v);
            if (it == local.end())
              it = local.emplace(v, bind(v, env, saved, fresh_binds)).first;
            out.push_back(it->second);
          }
          rows.push_back(std::move(out));
        }
        std::map<std::vector<int>, Ast> branches;
        for (const auto& [bits, branch] : f->branches)
          branches[bits] = walk(branch, env);
        unbind(env, saved, fresh_binds);
        return mk_sv(rows, branches, f->negated);
      }
    }
    throw std::logic_error("unreachable");
  }
};

}  // namespace

Ast to_variable_nf(const Ast& f, RewriteTrace* trace) {
  Fresh fresh(f);
  VnfWalker walker{{}, fresh};
  for (const auto& v : free_variables(f)) walker.used.insert(v.name);
  std::map<Variable, Variable> env;
  Ast out = walker.walk(f, env);
  if (!equal(out, f)) note(trace, "rename-apart", {}, f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Q-normal form.

namespace {

bool is_pullable(NodeKind k) {
  return k == NodeKind::ForallFO || k == NodeKind::ExistsBool;
}

// First (preorder) binary node with a pullable quantifier child.
std::optional<OccurrencePath> find_pull_site(const Ast& f, OccurrencePath path) {
  if (f->kind == NodeKind::And || f->kind == NodeKind::Or) {
    if (is_pullable(f->left->kind) || is_pullable(f->right->kind)) return path;
  }
  auto cs = children(f);
  for (size_t i = 0; i < cs.size(); ++i) {
    path.push_back(static_cast<int>(i));
    if (auto hit = find_pull_site(cs[i], path)) return hit;
    path.pop_back();
  }
  return std::nullopt;
}

// First ExistsBool node directly above a universal quantifier.
std::optional<OccurrencePath> find_swap_site(const Ast& f, OccurrencePath path) {
  if (f->kind == NodeKind::ExistsBool && f->left->kind == NodeKind::ForallFO)
    return path;
  auto cs = children(f);
  for (size_t i = 0; i < cs.size(); ++i) {
    path.push_back(static_cast<int>(i));
    if (auto hit = find_swap_site(cs[i], path)) return hit;
    path.pop_back();
  }
  return std::nullopt;
}

}  // namespace

Ast to_q_nf(const Ast& f, RewriteTrace* trace) {
  if (!is_sentence(f)) bail("Q normal form is defined for sentences");
  if (contains_kind(f, NodeKind::NPi, NodeKind::SVConn))
    bail("Q normal form applies to the team dialect only");
  Ast g = to_variable_nf(f, trace);
  // Pull-outs and swaps feed each other (a swap can expose a quantifier
  // inside the conjunction it builds), so run both to a joint fixpoint.
  Budget guard(200000);
  for (;;) {
    guard.tick();
    if (auto site = find_pull_site(g, {})) {
      Ast node = node_at(g, *site);
      bool from_left = is_pullable(node->left->kind);
      Ast q = from_left ? node->left : node->right;
      Ast other = from_left ? node->right : node->left;
      Ast joined =
          node->kind == NodeKind::And
              ? (from_left ? mk_and(q->left, other) : mk_and(other, q->left))
              : (from_left ? mk_or(q->left, other) : mk_or(other, q->left));
      Ast repl = q->kind == NodeKind::ForallFO
                     ? mk_forall_fo(q->consequent, joined)
                     : mk_exists_bool(q->consequent, joined);
      Ast next = substitute_at(g, *site, repl);
      note(trace, "pull-quantifier", *site, g, next);
      g = next;
      continue;
    }
    auto site = find_swap_site(g, {});
    if (!site) break;
    Ast node = node_at(g, *site);
    Variable alpha = node->consequent;
    std::vector<Variable> universals, bools;
    Ast cursor = node->left;
    while (cursor->kind == NodeKind::ForallFO) {
      universals.push_back(cursor->consequent);
      cursor = cursor->left;
    }
    while (cursor->kind == NodeKind::ExistsBool) {
      bools.push_back(cursor->consequent);
      cursor = cursor->left;
    }
    Ast atom = canonical_dep_atom(v_set(g, *site), alpha);
    Ast repl = wrap_forall(
        universals,
        mk_exists_bool(alpha, wrap_exists_bool(bools, mk_and(atom, cursor))));
    Ast next = substitute_at(g, *site, repl);
    note(trace, "swap-bool-past-universal", *site, g, next);
    g = next;
  }
  if (!classify(g).count(FragmentLabel::QNF))
    throw std::runtime_error("Q normalization did not converge");
  return g;
}

// ---------------------------------------------------------------------------
// Dependence normal form.

namespace {

struct DepSite {
  OccurrencePath path;
  Ast atom;
};

// Good atoms are unique for their consequent, reachable from their Boolean
// block through conjunctions only, and their consequent is bound by that
// block.
void collect_dep_sites(const Ast& f, OccurrencePath& path,
                       std::vector<DepSite>& out) {
  if (f->kind == NodeKind::DepBool || f->kind == NodeKind::DepFO)
    out.push_back({path, f});
  auto cs = children(f);
  for (size_t i = 0; i < cs.size(); ++i) {
    path.push_back(static_cast<int>(i));
    collect_dep_sites(cs[i], path, out);
    path.pop_back();
  }
}

bool dep_site_good(const Ast& root, const DepSite& site) {
  if (site.atom->kind != NodeKind::DepBool) return false;
  OccurrencePath p = site.path;
  // Climb through conjunctions.
  while (!p.empty()) {
    OccurrencePath parent(p.begin(), p.end() - 1);
    Ast anc = node_at(root, parent);
    if (anc->kind == NodeKind::And) {
      p = parent;
      continue;
    }
    if (anc->kind != NodeKind::ExistsBool) return false;
    // Collect the whole Boolean block around this quantifier.
    std::set<Variable> block = {anc->consequent};
    OccurrencePath q = parent;
    while (!q.empty()) {
      OccurrencePath up(q.begin(), q.end() - 1);
      Ast a2 = node_at(root, up);
      if (a2->kind != NodeKind::ExistsBool) break;
      block.insert(a2->consequent);
      q = up;
    }
    return block.count(site.atom->consequent) > 0;
  }
  return false;
}

struct QuantChain {
  OccurrencePath top;                   // start of the enclosing run
  std::vector<Variable> exists_fo;      // outermost segment
  std::vector<Variable> forall;         // middle segment
  std::vector<Variable> exists_bool;    // innermost segment
  OccurrencePath forall_path;           // path of the first forall (or below)
  Ast body;                             // region below the runs
};

// The maximal quantifier chain directly above the connective region holding
// `path`, parsed as exists-FO*, forall*, exists-Bool* from the top.
QuantChain enclosing_chain(const Ast& root, const OccurrencePath& path) {
  // Climb past conjunctions/disjunctions to the nearest quantifier.
  OccurrencePath p = path;
  while (!p.empty()) {
    OccurrencePath parent(p.begin(), p.end() - 1);
    NodeKind k = node_at(root, parent)->kind;
    if (k != NodeKind::And && k != NodeKind::Or) break;
    p = parent;
  }
  // p's parent (if any) is the chain bottom; collect the contiguous
  // quantifier ancestors.
  std::vector<std::pair<OccurrencePath, Ast>> quants;
  OccurrencePath q = p;
  while (!q.empty()) {
    OccurrencePath parent(q.begin(), q.end() - 1);
    Ast anc = node_at(root, parent);
    if (anc->kind != NodeKind::ExistsFO && anc->kind != NodeKind::ForallFO &&
        anc->kind != NodeKind::ExistsBool)
      break;
    quants.push_back({parent, anc});
    q = parent;
  }
  // quants runs bottom-up; take the innermost exists-Bool run, then the
  // forall run, then the exists-FO run.
  QuantChain out;
  size_t i = 0;
  std::vector<Variable> rev;
  while (i < quants.size() && quants[i].second->kind == NodeKind::ExistsBool)
    rev.push_back(quants[i++].second->consequent);
  out.exists_bool.assign(rev.rbegin(), rev.rend());
  rev.clear();
  // Baseline: the point just below the exists-FO run, so its variables are
  // visible; overwritten with the topmost forall when a forall run exists.
  out.forall_path = i > 0 ? quants[i - 1].first : p;
  while (i < quants.size() && quants[i].second->kind == NodeKind::ForallFO) {
    out.forall_path = quants[i].first;
    rev.push_back(quants[i++].second->consequent);
  }
  out.forall.assign(rev.rbegin(), rev.rend());
  rev.clear();
  OccurrencePath top = i > 0 ? quants[i - 1].first : p;
  while (i < quants.size() && quants[i].second->kind == NodeKind::ExistsFO) {
    top = quants[i].first;
    rev.push_back(quants[i++].second->consequent);
  }
  out.exists_fo.assign(rev.rbegin(), rev.rend());
  out.top = top;
  out.body = node_at(root, p);
  return out;
}

}  // namespace

Ast to_dependence_nf(const Ast& f, RewriteTrace* trace) {
  Ast g = to_q_nf(f, trace);
  Budget guard(200000);
  for (;;) {
    guard.tick();
    if (classify(g).count(FragmentLabel::DependenceNF)) return g;
    std::vector<DepSite> sites;
    OccurrencePath scratch;
    collect_dep_sites(g, scratch, sites);

    // Uniqueness: only the first good atom per consequent stays good.
    std::set<Variable> seen_good;
    const DepSite* violating = nullptr;
    for (const auto& site : sites) {
      bool good = dep_site_good(g, site) &&
                  seen_good.insert(site.atom->consequent).second;
      if (!good) {
        violating = &site;
        break;
      }
    }

    if (violating) {
      if (violating->atom->kind != NodeKind::DepBool)
        bail("first-order dependence atoms have no Boolean normal form");
      Variable alpha = violating->atom->consequent;
      QuantChain chain = enclosing_chain(g, violating->path);
      std::set<Variable> z(chain.forall.begin(), chain.forall.end());
      std::set<Variable> ante(violating->atom->args.begin(),
                              violating->atom->args.end());
      std::vector<Variable> u;  // canonical order: as stored in the atom
      for (const auto& v : violating->atom->args)
        if (z.count(v)) u.push_back(v);
      std::set<Variable> vset = v_set(g, chain.forall_path);
      {
        std::set<Variable> expect = vset;
        for (const auto& v : u) expect.insert(v);
        if (ante != expect)
          bail("dependence atom antecedent does not match its scope bound");
      }
      Fresh fresh(g);
      std::vector<Variable> w;
      for (const auto& uv : u) w.push_back(fresh.fo(uv.name));
      Variable beta = fresh.boolean("b");
      Ast flag_match = mk_iff(mk_bool_lit(alpha), mk_bool_lit(beta));
      Ast replacement;
      if (u.empty()) {
        replacement = flag_match;
      } else {
        std::vector<Ast> eqs;
        for (size_t i = 0; i < u.size(); ++i)
          eqs.push_back(mk_equal(u[i], w[i]));
        replacement = mk_implies(mk_and_all(eqs), flag_match);
      }
      OccurrencePath rel(violating->path.begin() + chain.top.size() +
                             chain.exists_fo.size() + chain.forall.size() +
                             chain.exists_bool.size(),
                         violating->path.end());
      Ast new_body = substitute_at(chain.body, rel, replacement);
      std::set<Variable> new_ante = vset;
      for (const auto& wv : w) new_ante.insert(wv);
      Ast theta = wrap_exists_fo(
          chain.exists_fo,
          wrap_forall(chain.forall,
                      wrap_forall(w, wrap_exists_bool(
                                         chain.exists_bool,
                                         mk_exists_bool(
                                             beta,
                                             mk_and(canonical_dep_atom(new_ante,
                                                                       beta),
                                                    new_body))))));
      Ast next = substitute_at(g, chain.top, theta);
      note(trace, "split-dep-atom", chain.top, g, next);
      g = next;
      continue;
    }

    // No violating atoms: some Boolean quantifier lacks its atom. Find the
    // topmost such block and insert one below the block.
    bool patched = false;
    std::function<bool(const Ast&, OccurrencePath&)> patch =
        [&](const Ast& node, OccurrencePath& path) -> bool {
      if (node->kind == NodeKind::ExistsBool) {
        std::vector<Variable> block;
        OccurrencePath body_path = path;
        Ast cursor = node;
        while (cursor->kind == NodeKind::ExistsBool) {
          block.push_back(cursor->consequent);
          body_path.push_back(0);
          cursor = cursor->left;
        }
        std::vector<Ast> leaves;
        flatten_and(cursor, leaves);
        std::set<Variable> have;
        for (const auto& leaf : leaves)
          if (leaf->kind == NodeKind::DepBool) have.insert(leaf->consequent);
        for (const auto& beta : block)
          if (!have.count(beta)) {
            Ast atom = canonical_dep_atom(v_set(g, path), beta);
            Ast next = substitute_at(g, body_path, mk_and(atom, cursor));
            note(trace, "add-missing-atom", body_path, g, next);
            g = next;
            return true;
          }
        // Descend into the block body.
        return patch(cursor, body_path);
      }
      auto cs = children(node);
      for (size_t i = 0; i < cs.size(); ++i) {
        path.push_back(static_cast<int>(i));
        if (patch(cs[i], path)) return true;
        path.pop_back();
      }
      return false;
    };
    OccurrencePath root_path;
    patched = patch(g, root_path);
    if (!patched)
      throw std::runtime_error("dependence normalization did not converge");
  }
}

// ---------------------------------------------------------------------------
// Boolean machinery to plain dependence logic.

Ast bd_to_d(const Ast& f, RewriteTrace* trace) {
  if (!is_sentence(f)) bail("the translation is defined for sentences");
  if (contains_kind(f, NodeKind::NPi, NodeKind::SVConn))
    bail("the translation applies to the team dialect only");
  Fresh fresh(f);
  Variable xbot = fresh.fo("bot");
  Variable xtop = fresh.fo("top");
  std::map<Variable, Variable> b2f;
  auto fo_for = [&](const Variable& a) {
    auto it = b2f.find(a);
    if (it == b2f.end()) it = b2f.emplace(a, fresh.fo(a.name)).first;
    return it->second;
  };
  std::function<Ast(const Ast&)> star = [&](const Ast& node) -> Ast {
    switch (node->kind) {
      case NodeKind::BoolLit:
        return mk_equal(fo_for(node->consequent), xtop);
      case NodeKind::NegBoolLit:
        return mk_equal(fo_for(node->consequent), xbot);
      case NodeKind::DepBool:
        return mk_dep_fo(node->args, fo_for(node->consequent));
      case NodeKind::ExistsBool:
        return mk_exists_fo(fo_for(node->consequent), star(node->left));
      case NodeKind::And:
        return mk_and(star(node->left), star(node->right));
      case NodeKind::Or:
        return mk_or(star(node->left), star(node->right));
      case NodeKind::ExistsFO:
        return mk_exists_fo(node->consequent, star(node->left));
      case NodeKind::ForallFO:
        return mk_forall_fo(node->consequent, star(node->left));
      default:
        return node;
    }
  };
  Ast out = mk_exists_fo(
      xbot,
      mk_exists_fo(xtop, mk_and(mk_not_equal(xbot, xtop), star(f))));
  note(trace, "two-element-encoding", {}, f, out);
  return out;
}

Ast d_to_bd(const Ast& f, RewriteTrace* trace) {
  if (!is_sentence(f)) bail("the translation is defined for sentences");
  std::vector<Variable> xs, ys;
  Ast cursor = f;
  while (cursor->kind == NodeKind::ForallFO) {
    xs.push_back(cursor->consequent);
    cursor = cursor->left;
  }
  while (cursor->kind == NodeKind::ExistsFO) {
    ys.push_back(cursor->consequent);
    cursor = cursor->left;
  }
  std::set<Variable> xset(xs.begin(), xs.end());
  std::set<Variable> yset(ys.begin(), ys.end());
  std::vector<Ast> leaves;
  flatten_and(cursor, leaves);
  std::vector<Ast> atoms, rest;
  for (const auto& leaf : leaves) {
    if (leaf->kind == NodeKind::DepFO) {
      for (const auto& v : leaf->args)
        if (!xset.count(v))
          bail("dependence antecedent outside the universal prefix");
      if (!yset.count(leaf->consequent))
        bail("dependence consequent outside the existential prefix");
      atoms.push_back(leaf);
    } else {
      if (contains_dep(leaf) ||
          contains_kind(leaf, NodeKind::ExistsFO, NodeKind::ForallFO) ||
          contains_kind(leaf, NodeKind::ExistsBool, NodeKind::BoolLit) ||
          contains_kind(leaf, NodeKind::NegBoolLit, NodeKind::NPi) ||
          contains_kind(leaf, NodeKind::SVConn, NodeKind::SVConn))
        bail("matrix must be a quantifier-free first-order formula");
      rest.push_back(leaf);
    }
  }
  if (atoms.empty() && rest.empty()) bail("empty matrix");
  Fresh fresh(f);
  Ast out_body;
  if (atoms.empty()) {
    out_body = mk_and_all(rest);
  } else {
    std::vector<Variable> zs, alphas;
    std::vector<Ast> checks;
    for (const auto& atom : atoms) {
      Variable z = fresh.fo("z");
      Variable a = fresh.boolean("a");
      zs.push_back(z);
      alphas.push_back(a);
      std::vector<Variable> ante = atom->args;
      ante.push_back(z);
      checks.push_back(mk_and(
          mk_dep_bool(ante, a),
          mk_iff(mk_equal(z, atom->consequent), mk_bool_lit(a))));
    }
    Ast core = wrap_forall(zs, wrap_exists_bool(alphas, mk_and_all(checks)));
    out_body = rest.empty() ? core : mk_and(mk_and_all(rest), core);
  }
  Ast out = wrap_forall(xs, wrap_exists_fo(ys, out_body));
  note(trace, "flag-functional-choices", {}, f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Between the two connective dialects.

Ast fod_to_fopoc(const Ast& f, RewriteTrace* trace) {
  if (contains_kind(f, NodeKind::NPi, NodeKind::NPi) || contains_dep(f))
    bail("input must use branch-selecting connectives only");
  Fresh fresh(f);
  std::function<Ast(const Ast&)> rec = [&](const Ast& node) -> Ast {
    switch (node->kind) {
      case NodeKind::And:
        return mk_and(rec(node->left), rec(node->right));
      case NodeKind::Or:
        return mk_or(rec(node->left), rec(node->right));
      case NodeKind::ExistsFO:
        return mk_exists_fo(node->consequent, rec(node->left));
      case NodeKind::ForallFO:
        return mk_forall_fo(node->consequent, rec(node->left));
      case NodeKind::ExistsBool:
        return mk_exists_bool(node->consequent, rec(node->left));
      case NodeKind::SVConn: {
        const size_t m = node->sv_rows.size();
        std::vector<Variable> alphas;
        for (size_t i = 0; i < m; ++i) alphas.push_back(fresh.boolean("a"));
        std::vector<Ast> cases;
        for (const auto& [bits, branch] : node->branches) {
          std::vector<Ast> guards;
          for (size_t i = 0; i < m; ++i)
            guards.push_back(mk_bool_lit(alphas[i], bits[i] == 0));
          cases.push_back(mk_implies(mk_and_all(guards), rec(branch)));
        }
        std::vector<NpiRow> rows;
        for (size_t i = 0; i < m; ++i)
          rows.push_back({node->sv_rows[i], alphas[i]});
        return mk_npi(rows, mk_and_all(cases), node->negated);
      }
      default:
        return node;
    }
  };
  Ast out = rec(f);
  note(trace, "compile-branch-selection", {}, f, out);
  return out;
}

Ast fopoc_to_fod(const Ast& f, RewriteTrace* trace) {
  if (contains_kind(f, NodeKind::SVConn, NodeKind::SVConn) || contains_dep(f))
    bail("input must use partially-ordered connectives only");
  for (const auto& v : free_variables(f))
    if (v.kind == VarKind::Bool) bail("free Boolean variable: " + v.name);
  Fresh fresh(f);
  std::function<Ast(const Ast&)> rec = [&](const Ast& node) -> Ast {
    switch (node->kind) {
      case NodeKind::And:
        return mk_and(rec(node->left), rec(node->right));
      case NodeKind::Or:
        return mk_or(rec(node->left), rec(node->right));
      case NodeKind::ExistsFO:
        return mk_exists_fo(node->consequent, rec(node->left));
      case NodeKind::ForallFO:
        return mk_forall_fo(node->consequent, rec(node->left));
      case NodeKind::ExistsBool:
        bail("Boolean quantifier outside a connective");
      case NodeKind::NPi: {
        const size_t m = node->rows.size();
        std::vector<std::vector<Variable>> yrows(m);
        std::map<Variable, Variable> first_pos;
        for (size_t i = 0; i < m; ++i) {
          if (node->rows[i].vars.empty())
            bail("connective rows must be nonempty for this translation");
          for (const auto& v : node->rows[i].vars) {
            Variable y = fresh.fo("y");
            yrows[i].push_back(y);
            first_pos.emplace(v, y);  // keep the first position only
          }
        }
        std::vector<Ast> guards;
        for (const auto& q : node->pattern.identities) {
          if (std::tie(q[0], q[1]) >= std::tie(q[2], q[3])) continue;
          guards.push_back(mk_equal(yrows[q[0] - 1][q[1] - 1],
                                    yrows[q[2] - 1][q[3] - 1]));
        }
        Variable y11 = yrows[0][0];
        Ast truthy = mk_equal(y11, y11);
        Ast falsy = mk_not_equal(y11, y11);
        Ast body = rec(node->left);
        std::map<std::vector<int>, Ast> branches;
        std::vector<int> bits(m, 0);
        for (;;) {
          std::map<Variable, Ast> bool_map;
          for (size_t i = 0; i < m; ++i)
            bool_map[node->rows[i].witness] = bits[i] ? truthy : falsy;
          Ast substituted = substitute_vars(body, first_pos, bool_map);
          branches[bits] = guards.empty()
                               ? substituted
                               : mk_implies(mk_and_all(guards), substituted);
          int i = static_cast<int>(m) - 1;
          while (i >= 0 && bits[i] == 1) bits[i--] = 0;
          if (i < 0) break;
          bits[i] = 1;
        }
        return mk_sv(yrows, branches, node->negated);
      }
      default:
        return node;
    }
  };
  Ast out = rec(f);
  note(trace, "compile-pattern-guards", {}, f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Quantifier blocks to connectives and back.

namespace {

// Compiles every dependence-maximal block of a dependence-normal-form
// sentence into a connective node.
Ast blocks_to_npi(const Ast& node, std::set<Variable> scope, Fresh& fresh) {
  if (!contains_dep(node)) return node;
  switch (node->kind) {
    case NodeKind::And:
      return mk_and(blocks_to_npi(node->left, scope, fresh),
                    blocks_to_npi(node->right, scope, fresh));
    case NodeKind::Or:
      return mk_or(blocks_to_npi(node->left, scope, fresh),
                   blocks_to_npi(node->right, scope, fresh));
    case NodeKind::ExistsFO: {
      auto inner = scope;
      inner.insert(node->consequent);
      return mk_exists_fo(node->consequent,
                          blocks_to_npi(node->left, inner, fresh));
    }
    case NodeKind::ForallFO:
    case NodeKind::ExistsBool: {
      std::vector<Variable> xs, alphas;
      Ast cursor = node;
      while (cursor->kind == NodeKind::ForallFO) {
        xs.push_back(cursor->consequent);
        cursor = cursor->left;
      }
      while (cursor->kind == NodeKind::ExistsBool) {
        alphas.push_back(cursor->consequent);
        cursor = cursor->left;
      }
      if (alphas.empty()) {
        // Universal run with no Boolean block: recurse through it.
        auto inner = scope;
        for (const auto& x : xs) inner.insert(x);
        return wrap_forall(xs, blocks_to_npi(cursor, inner, fresh));
      }
      std::vector<Ast> leaves;
      flatten_and(cursor, leaves);
      std::map<Variable, Ast> atom_of;
      std::vector<Ast> rest;
      std::set<Variable> aset(alphas.begin(), alphas.end());
      for (const auto& leaf : leaves) {
        if (leaf->kind == NodeKind::DepBool && aset.count(leaf->consequent) &&
            !atom_of.count(leaf->consequent))
          atom_of[leaf->consequent] = leaf;
        else
          rest.push_back(leaf);
      }
      if (atom_of.size() != alphas.size())
        bail("Boolean block lacks its dependence atoms (not in normal form)");
      std::set<Variable> xset(xs.begin(), xs.end());
      std::vector<NpiRow> rows;
      std::set<Variable> used_x;
      for (const auto& alpha : alphas) {
        const Ast& atom = atom_of[alpha];
        NpiRow row;
        row.witness = alpha;
        for (const auto& v : atom->args) {
          if (xset.count(v)) {
            row.vars.push_back(v);
            used_x.insert(v);
          } else if (!scope.count(v)) {
            bail("dependence antecedent outside the block and its scope");
          }
        }
        rows.push_back(std::move(row));
      }
      NpiRow row0;
      for (const auto& x : xs)
        if (!used_x.count(x)) row0.vars.push_back(x);
      row0.witness = fresh.boolean("a");
      Ast body;
      if (!rest.empty()) {
        body = mk_and_all(rest);
      } else if (!xs.empty()) {
        body = mk_equal(xs[0], xs[0]);
      } else if (!scope.empty()) {
        body = mk_equal(*scope.begin(), *scope.begin());
      } else {
        // No first-order variable in sight: fall back to a tautology in the
        // spare witness.
        body = mk_or(mk_bool_lit(row0.witness),
                     mk_bool_lit(row0.witness, true));
      }
      rows.insert(rows.begin(), std::move(row0));
      auto inner = scope;
      for (const auto& x : xs) inner.insert(x);
      return mk_npi(rows, blocks_to_npi(body, inner, fresh));
    }
    case NodeKind::DepBool:
    case NodeKind::DepFO:
      bail("dependence atom outside a Boolean block (not in normal form)");
    default:
      return node;
  }
}

}  // namespace

Ast bbd_to_fopoc_plus(const Ast& f, RewriteTrace* trace) {
  Ast g = to_dependence_nf(f, trace);
  Fresh fresh(g);
  Ast out = blocks_to_npi(g, {}, fresh);
  note(trace, "blocks-to-connectives", {}, g, out);
  if (!classify(out).count(FragmentLabel::FO_POC_plus))
    throw std::runtime_error("translation left the positive fragment");
  return out;
}

Ast fopoc_plus_to_bbd(const Ast& f, RewriteTrace* trace) {
  if (!is_sentence(f)) bail("the translation is defined for sentences");
  if (!classify(f).count(FragmentLabel::FO_POC_plus))
    bail("input is not in the positive connective fragment");
  Ast g = to_variable_nf(f, trace);
  std::function<Ast(const Ast&, std::set<Variable>)> rec =
      [&](const Ast& node, std::set<Variable> scope) -> Ast {
    switch (node->kind) {
      case NodeKind::And:
        return mk_and(rec(node->left, scope), rec(node->right, scope));
      case NodeKind::Or:
        return mk_or(rec(node->left, scope), rec(node->right, scope));
      case NodeKind::ExistsFO:
      case NodeKind::ForallFO: {
        auto inner = scope;
        inner.insert(node->consequent);
        Ast body = rec(node->left, inner);
        return node->kind == NodeKind::ExistsFO
                   ? mk_exists_fo(node->consequent, body)
                   : mk_forall_fo(node->consequent, body);
      }
      case NodeKind::ExistsBool:
        return mk_exists_bool(node->consequent, rec(node->left, scope));
      case NodeKind::NPi: {
        if (node->negated) bail("negated connective outside the fragment");
        std::vector<Variable> xs;
        std::set<Variable> seen;
        for (const auto& row : node->rows)
          for (const auto& v : row.vars)
            if (seen.insert(v).second) xs.push_back(v);
        std::vector<Variable> alphas;
        std::vector<Ast> atoms;
        for (const auto& row : node->rows) {
          alphas.push_back(row.witness);
          std::set<Variable> ante = scope;
          for (const auto& v : row.vars) ante.insert(v);
          atoms.push_back(canonical_dep_atom(ante, row.witness));
        }
        auto inner = scope;
        for (const auto& x : xs) inner.insert(x);
        Ast body = rec(node->left, inner);
        return wrap_forall(
            xs, wrap_exists_bool(alphas, mk_and(mk_and_all(atoms), body)));
      }
      default:
        return node;
    }
  };
  Ast out = rec(g, {});
  note(trace, "connectives-to-blocks", {}, g, out);
  return out;
}

// ---------------------------------------------------------------------------
// Boolean quantifier elimination and the composed fragment translations.

namespace {

Ast elim_bool(const Ast& node, bool only_under_exists_fo, bool under, Fresh& fresh) {
  switch (node->kind) {
    case NodeKind::And:
      return mk_and(elim_bool(node->left, only_under_exists_fo, under, fresh),
                    elim_bool(node->right, only_under_exists_fo, under, fresh));
    case NodeKind::Or:
      return mk_or(elim_bool(node->left, only_under_exists_fo, under, fresh),
                   elim_bool(node->right, only_under_exists_fo, under, fresh));
    case NodeKind::ExistsFO:
      return mk_exists_fo(
          node->consequent,
          elim_bool(node->left, only_under_exists_fo, true, fresh));
    case NodeKind::ForallFO:
      return mk_forall_fo(
          node->consequent,
          elim_bool(node->left, only_under_exists_fo, under, fresh));
    case NodeKind::ExistsBool: {
      Ast body = elim_bool(node->left, only_under_exists_fo, under, fresh);
      if (only_under_exists_fo && !under)
        return mk_exists_bool(node->consequent, body);
      if (mentions_dep_on(body, node->consequent))
        bail("cannot eliminate a Boolean variable used in a dependence atom");
      Variable x = fresh.fo("x");
      Variable y = fresh.fo("y");
      Ast replaced =
          substitute_vars(body, {}, {{node->consequent, mk_equal(x, y)}});
      return mk_exists_fo(x, mk_exists_fo(y, replaced));
    }
    default:
      return node;
  }
}

// Compiles the root block of a normalized sentence into a single outer
// connective; sentences without dependence atoms get a trivial one-row
// connective so the result lands in the target fragment.
Ast root_block_to_npi(const Ast& g, RewriteTrace* trace) {
  Fresh fresh(g);
  Ast out = blocks_to_npi(g, {}, fresh);
  if (out->kind != NodeKind::NPi) {
    // A root universal run with no Boolean block folds into the single row;
    // the spare witness stays unused.
    NpiRow row;
    Ast cursor = out;
    while (cursor->kind == NodeKind::ForallFO) {
      row.vars.push_back(cursor->consequent);
      cursor = cursor->left;
    }
    row.witness = fresh.boolean("a");
    out = mk_npi({row}, cursor);
  }
  note(trace, "root-block-to-connective", {}, g, out);
  return out;
}

}  // namespace

Ast eliminate_bool_quantifier(const Ast& f, RewriteTrace* trace) {
  Fresh fresh(f);
  Ast out = elim_bool(f, false, false, fresh);
  note(trace, "bool-to-equality", {}, f, out);
  return out;
}

Ast rbd_to_pocfo(const Ast& f, RewriteTrace* trace) {
  if (!is_sentence(f) || !classify(f).count(FragmentLabel::RBD))
    bail("input is not a restricted-fragment sentence");
  Fresh fresh(f);
  Ast g = elim_bool(f, true, false, fresh);
  note(trace, "eliminate-bools-under-exists", {}, f, g);
  g = to_dependence_nf(g, trace);
  Ast out = root_block_to_npi(g, trace);
  if (!classify(out).count(FragmentLabel::POC_FO))
    throw std::runtime_error("translation left the target fragment");
  return out;
}

Ast forallbd_to_pocqf(const Ast& f, RewriteTrace* trace) {
  if (!is_sentence(f) || !classify(f).count(FragmentLabel::ForallBD))
    bail("input is not a universal-fragment sentence");
  Ast g = to_dependence_nf(f, trace);
  Ast out = root_block_to_npi(g, trace);
  if (!classify(out).count(FragmentLabel::POC_QF))
    throw std::runtime_error("translation left the target fragment");
  return out;
}

Ast simulate_universal_bool(const Ast& f, const Variable& alpha,
                            RewriteTrace* trace) {
  if (alpha.kind != VarKind::Bool) bail("expected a Boolean variable");
  Fresh fresh(f);
  Variable x = fresh.fo("x");
  Variable y = fresh.fo("y");
  Ast selector = mk_or(mk_and(mk_equal(x, y), mk_bool_lit(alpha)),
                       mk_and(mk_not_equal(x, y), mk_bool_lit(alpha, true)));
  Ast out = mk_forall_fo(
      x, mk_forall_fo(y, mk_exists_bool(alpha, mk_and(selector, f))));
  note(trace, "simulate-universal-bool", {}, f, out);
  return out;
}

}  // namespace logic

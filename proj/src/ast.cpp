#include "logic/ast.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace logic {

namespace {

// Splits a trailing run of digits off a name, so x2 < x10.
std::pair<std::string_view, long long> split_suffix(const std::string& name) {
  size_t i = name.size();
  while (i > 0 && isdigit(static_cast<unsigned char>(name[i - 1]))) --i;
  if (i == name.size()) return {std::string_view(name), -1};
  long long num = 0;
  for (size_t j = i; j < name.size(); ++j) {
    num = num * 10 + (name[j] - '0');
    if (num > (1ll << 40)) break;
  }
  return {std::string_view(name.data(), i), num};
}

}  // namespace

bool Variable::operator<(const Variable& o) const {
  if (kind != o.kind) return kind < o.kind;
  auto [p1, n1] = split_suffix(name);
  auto [p2, n2] = split_suffix(o.name);
  if (p1 != p2) return p1 < p2;
  if (n1 != n2) return n1 < n2;
  return name < o.name;
}

Variable fo_var(std::string name) { return Variable(VarKind::FO, std::move(name)); }
Variable bool_var(std::string name) { return Variable(VarKind::Bool, std::move(name)); }

int Vocabulary::arity(const std::string& symbol) const {
  for (const auto& [s, a] : relations)
    if (s == symbol) return a;
  throw std::invalid_argument("unknown relation symbol: " + symbol);
}

bool Vocabulary::has(const std::string& symbol) const {
  for (const auto& [s, a] : relations)
    if (s == symbol) return true;
  return false;
}

void Vocabulary::add(const std::string& symbol, int ar) {
  if (ar < 0) throw std::invalid_argument("negative arity");
  if (has(symbol)) throw std::invalid_argument("duplicate relation symbol: " + symbol);
  relations.emplace_back(symbol, ar);
}

bool Pattern::well_formed() const {
  const int m = static_cast<int>(row_lengths.size());
  auto in_bounds = [&](int i, int j) {
    return i >= 1 && i <= m && j >= 1 && j <= row_lengths[i - 1];
  };
  for (const auto& q : identities) {
    if (!in_bounds(q[0], q[1]) || !in_bounds(q[2], q[3])) return false;
    if (!identities.count({q[2], q[3], q[0], q[1]})) return false;
  }
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= row_lengths[i - 1]; ++j)
      if (!identities.count({i, j, i, j})) return false;
  for (const auto& a : identities)
    for (const auto& b : identities)
      if (a[2] == b[0] && a[3] == b[1] &&
          !identities.count({a[0], a[1], b[2], b[3]}))
        return false;
  return true;
}

namespace {

Ast make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Ast mk_equal(Variable x, Variable y) {
  require(x.kind == VarKind::FO && y.kind == VarKind::FO, "equality needs FO variables");
  Formula f;
  f.kind = NodeKind::Equal;
  f.args = {std::move(x), std::move(y)};
  return make(std::move(f));
}

Ast mk_not_equal(Variable x, Variable y) {
  require(x.kind == VarKind::FO && y.kind == VarKind::FO, "equality needs FO variables");
  Formula f;
  f.kind = NodeKind::NotEqual;
  f.args = {std::move(x), std::move(y)};
  return make(std::move(f));
}

Ast mk_rel(std::string rel, std::vector<Variable> args, bool negated) {
  for (const auto& v : args)
    require(v.kind == VarKind::FO, "relation arguments must be FO variables");
  Formula f;
  f.kind = negated ? NodeKind::NegRelAtom : NodeKind::RelAtom;
  f.rel = std::move(rel);
  f.args = std::move(args);
  return make(std::move(f));
}

Ast mk_bool_lit(Variable a, bool negated) {
  require(a.kind == VarKind::Bool, "Boolean literal needs a Boolean variable");
  Formula f;
  f.kind = negated ? NodeKind::NegBoolLit : NodeKind::BoolLit;
  f.consequent = std::move(a);
  return make(std::move(f));
}

Ast mk_dep_fo(std::vector<Variable> antecedent, Variable y) {
  for (const auto& v : antecedent)
    require(v.kind == VarKind::FO, "dependence antecedent must be FO variables");
  require(y.kind == VarKind::FO, "mk_dep_fo needs an FO consequent");
  Formula f;
  f.kind = NodeKind::DepFO;
  f.args = std::move(antecedent);
  f.consequent = std::move(y);
  return make(std::move(f));
}

Ast mk_dep_bool(std::vector<Variable> antecedent, Variable a) {
  for (const auto& v : antecedent)
    require(v.kind == VarKind::FO, "dependence antecedent must be FO variables");
  require(a.kind == VarKind::Bool, "mk_dep_bool needs a Boolean consequent");
  Formula f;
  f.kind = NodeKind::DepBool;
  f.args = std::move(antecedent);
  f.consequent = std::move(a);
  return make(std::move(f));
}

Ast mk_and(Ast l, Ast r) {
  require(l && r, "null child");
  Formula f;
  f.kind = NodeKind::And;
  f.left = std::move(l);
  f.right = std::move(r);
  return make(std::move(f));
}

Ast mk_or(Ast l, Ast r) {
  require(l && r, "null child");
  Formula f;
  f.kind = NodeKind::Or;
  f.left = std::move(l);
  f.right = std::move(r);
  return make(std::move(f));
}

namespace {

Ast mk_quant(NodeKind kind, Variable v, Ast body) {
  require(body != nullptr, "null body");
  Formula f;
  f.kind = kind;
  f.consequent = std::move(v);
  f.left = std::move(body);
  return make(std::move(f));
}

}  // namespace

Ast mk_exists_fo(Variable x, Ast body) {
  require(x.kind == VarKind::FO, "exists x needs an FO variable");
  return mk_quant(NodeKind::ExistsFO, std::move(x), std::move(body));
}

Ast mk_forall_fo(Variable x, Ast body) {
  require(x.kind == VarKind::FO, "forall x needs an FO variable");
  return mk_quant(NodeKind::ForallFO, std::move(x), std::move(body));
}

Ast mk_exists_bool(Variable a, Ast body) {
  require(a.kind == VarKind::Bool, "exists ?a needs a Boolean variable");
  return mk_quant(NodeKind::ExistsBool, std::move(a), std::move(body));
}

Pattern pattern_of(const std::vector<std::vector<Variable>>& rows) {
  Pattern p;
  for (const auto& r : rows) p.row_lengths.push_back(static_cast<int>(r.size()));
  const int m = static_cast<int>(rows.size());
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= p.row_lengths[i - 1]; ++j)
      for (int k = 1; k <= m; ++k)
        for (int l = 1; l <= p.row_lengths[k - 1]; ++l)
          if (rows[i - 1][j - 1] == rows[k - 1][l - 1])
            p.identities.insert({i, j, k, l});
  return p;
}

Ast mk_npi(std::vector<NpiRow> rows, Ast body, bool negated) {
  require(body != nullptr, "null body");
  std::vector<std::vector<Variable>> fo_rows;
  std::set<Variable> witnesses;
  for (const auto& r : rows) {
    for (const auto& v : r.vars)
      require(v.kind == VarKind::FO, "connective row variables must be FO");
    require(r.witness.kind == VarKind::Bool, "row witness must be Boolean");
    require(witnesses.insert(r.witness).second, "row witnesses must be distinct");
    fo_rows.push_back(r.vars);
  }
  Formula f;
  f.kind = NodeKind::NPi;
  f.pattern = pattern_of(fo_rows);
  f.rows = std::move(rows);
  f.left = std::move(body);
  f.negated = negated;
  return make(std::move(f));
}

Ast mk_sv(std::vector<std::vector<Variable>> rows,
          std::map<std::vector<int>, Ast> branches, bool negated) {
  std::set<Variable> seen;
  for (const auto& r : rows)
    for (const auto& v : r) {
      require(v.kind == VarKind::FO, "connective row variables must be FO");
      require(seen.insert(v).second, "branch connective row variables must be distinct");
    }
  const int m = static_cast<int>(rows.size());
  require(branches.size() == (size_t{1} << m), "branch map must cover every bit vector");
  for (const auto& [bits, body] : branches) {
    require(static_cast<int>(bits.size()) == m, "bit vector length mismatch");
    for (int b : bits) require(b == 0 || b == 1, "bits must be 0/1");
    require(body != nullptr, "null branch");
  }
  Formula f;
  f.kind = NodeKind::SVConn;
  f.sv_rows = std::move(rows);
  f.branches = std::move(branches);
  f.negated = negated;
  return make(std::move(f));
}

std::optional<Ast> negate(const Ast& f) {
  switch (f->kind) {
    case NodeKind::Equal:
      return mk_not_equal(f->args[0], f->args[1]);
    case NodeKind::NotEqual:
      return mk_equal(f->args[0], f->args[1]);
    case NodeKind::RelAtom:
      return mk_rel(f->rel, f->args, true);
    case NodeKind::NegRelAtom:
      return mk_rel(f->rel, f->args, false);
    case NodeKind::BoolLit:
      return mk_bool_lit(f->consequent, true);
    case NodeKind::NegBoolLit:
      return mk_bool_lit(f->consequent, false);
    case NodeKind::And: {
      auto l = negate(f->left), r = negate(f->right);
      if (!l || !r) return std::nullopt;
      return mk_or(*l, *r);
    }
    case NodeKind::Or: {
      auto l = negate(f->left), r = negate(f->right);
      if (!l || !r) return std::nullopt;
      return mk_and(*l, *r);
    }
    default:
      return std::nullopt;
  }
}

Ast mk_implies(Ast a, Ast b) {
  auto na = negate(a);
  require(na.has_value(), "antecedent of -> is not negatable");
  return mk_or(*na, std::move(b));
}

Ast mk_iff(Ast a, Ast b) {
  auto na = negate(a), nb = negate(b);
  require(na.has_value() && nb.has_value(), "operand of <-> is not negatable");
  return mk_or(mk_and(a, b), mk_and(*na, *nb));
}

Ast mk_and_all(const std::vector<Ast>& fs) {
  require(!fs.empty(), "empty conjunction");
  Ast acc = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) acc = mk_and(acc, fs[i]);
  return acc;
}

Ast mk_or_all(const std::vector<Ast>& fs) {
  require(!fs.empty(), "empty disjunction");
  Ast acc = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) acc = mk_or(acc, fs[i]);
  return acc;
}

std::vector<Ast> children(const Ast& f) {
  switch (f->kind) {
    case NodeKind::And:
    case NodeKind::Or:
      return {f->left, f->right};
    case NodeKind::ExistsFO:
    case NodeKind::ForallFO:
    case NodeKind::ExistsBool:
    case NodeKind::NPi:
      return {f->left};
    case NodeKind::SVConn: {
      std::vector<Ast> out;
      for (const auto& [bits, body] : f->branches) out.push_back(body);
      return out;
    }
    default:
      return {};
  }
}

Ast child_at(const Ast& f, int index) {
  auto cs = children(f);
  if (index < 0 || index >= static_cast<int>(cs.size()))
    throw std::invalid_argument("invalid occurrence path");
  return cs[index];
}

Ast node_at(const Ast& f, const OccurrencePath& path) {
  Ast cur = f;
  for (int i : path) cur = child_at(cur, i);
  return cur;
}

namespace {

Ast with_child(const Ast& f, int index, const Ast& repl) {
  Formula copy = *f;
  switch (f->kind) {
    case NodeKind::And:
    case NodeKind::Or:
      if (index == 0)
        copy.left = repl;
      else if (index == 1)
        copy.right = repl;
      else
        throw std::invalid_argument("invalid occurrence path");
      break;
    case NodeKind::ExistsFO:
    case NodeKind::ForallFO:
    case NodeKind::ExistsBool:
    case NodeKind::NPi:
      if (index != 0) throw std::invalid_argument("invalid occurrence path");
      copy.left = repl;
      break;
    case NodeKind::SVConn: {
      int i = 0;
      bool done = false;
      for (auto& [bits, body] : copy.branches) {
        if (i++ == index) {
          body = repl;
          done = true;
          break;
        }
      }
      if (!done) throw std::invalid_argument("invalid occurrence path");
      break;
    }
    default:
      throw std::invalid_argument("invalid occurrence path");
  }
  return make(std::move(copy));
}

}  // namespace

Ast substitute_at(const Ast& f, const OccurrencePath& path, const Ast& repl) {
  if (path.empty()) return repl;
  OccurrencePath rest(path.begin() + 1, path.end());
  return with_child(f, path[0], substitute_at(child_at(f, path[0]), rest, repl));
}

namespace {

bool find_occurrence(const Ast& host, const Ast& sub, int& n,
                     OccurrencePath& path) {
  if (equal(host, sub)) {
    if (--n == 0) return true;
  }
  auto cs = children(host);
  for (int i = 0; i < static_cast<int>(cs.size()); ++i) {
    path.push_back(i);
    if (find_occurrence(cs[i], sub, n, path)) return true;
    path.pop_back();
  }
  return false;
}

}  // namespace

std::optional<OccurrencePath> occurrence_path(const Ast& host, const Ast& sub,
                                              int n) {
  OccurrencePath path;
  if (n < 1) return std::nullopt;
  if (find_occurrence(host, sub, n, path)) return path;
  return std::nullopt;
}

namespace {

int cmp_vars(const std::vector<Variable>& a, const std::vector<Variable>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return -1;
    if (b[i] < a[i]) return 1;
  }
  return 0;
}

int cmp_var(const Variable& a, const Variable& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

}  // namespace

int cmp(const Ast& a, const Ast& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (a->rel != b->rel) return a->rel < b->rel ? -1 : 1;
  if (int c = cmp_vars(a->args, b->args)) return c;
  if (int c = cmp_var(a->consequent, b->consequent)) return c;
  if (a->negated != b->negated) return a->negated < b->negated ? -1 : 1;
  if (a->kind == NodeKind::NPi) {
    if (a->rows.size() != b->rows.size())
      return a->rows.size() < b->rows.size() ? -1 : 1;
    for (size_t i = 0; i < a->rows.size(); ++i) {
      if (int c = cmp_vars(a->rows[i].vars, b->rows[i].vars)) return c;
      if (int c = cmp_var(a->rows[i].witness, b->rows[i].witness)) return c;
    }
  }
  if (a->kind == NodeKind::SVConn) {
    if (a->sv_rows != b->sv_rows) return a->sv_rows < b->sv_rows ? -1 : 1;
    auto it = a->branches.begin();
    auto jt = b->branches.begin();
    for (; it != a->branches.end(); ++it, ++jt)
      if (int c = cmp(it->second, jt->second)) return c;
    return 0;
  }
  const bool al = a->left != nullptr, bl = b->left != nullptr;
  if (al != bl) return al < bl ? -1 : 1;
  if (al)
    if (int c = cmp(a->left, b->left)) return c;
  const bool ar = a->right != nullptr, br = b->right != nullptr;
  if (ar != br) return ar < br ? -1 : 1;
  if (ar)
    if (int c = cmp(a->right, b->right)) return c;
  return 0;
}

bool equal(const Ast& a, const Ast& b) { return cmp(a, b) == 0; }

namespace {

bool alpha_eq(const Ast& a, const Ast& b, std::map<Variable, Variable>& ab,
              std::map<Variable, Variable>& ba) {
  auto var_eq = [&](const Variable& x, const Variable& y) {
    if (x.kind != y.kind) return false;
    auto i = ab.find(x);
    auto j = ba.find(y);
    if (i == ab.end() && j == ba.end()) return x == y;
    return i != ab.end() && j != ba.end() && i->second == y && j->second == x;
  };
  auto bind = [&](const Variable& x, const Variable& y,
                  std::vector<std::pair<Variable, std::optional<Variable>>>& sa,
                  std::vector<std::pair<Variable, std::optional<Variable>>>& sb) {
    auto i = ab.find(x);
    sa.emplace_back(x, i == ab.end() ? std::nullopt : std::optional(i->second));
    auto j = ba.find(y);
    sb.emplace_back(y, j == ba.end() ? std::nullopt : std::optional(j->second));
    ab[x] = y;
    ba[y] = x;
  };
  auto unbind = [&](std::vector<std::pair<Variable, std::optional<Variable>>>& sa,
                    std::vector<std::pair<Variable, std::optional<Variable>>>& sb) {
    for (auto it = sa.rbegin(); it != sa.rend(); ++it) {
      if (it->second)
        ab[it->first] = *it->second;
      else
        ab.erase(it->first);
    }
    for (auto it = sb.rbegin(); it != sb.rend(); ++it) {
      if (it->second)
        ba[it->first] = *it->second;
      else
        ba.erase(it->first);
    }
  };

  if (a->kind != b->kind || a->rel != b->rel || a->negated != b->negated)
    return false;
  switch (a->kind) {
    case NodeKind::Equal:
    case NodeKind::NotEqual:
    case NodeKind::RelAtom:
    case NodeKind::NegRelAtom:
    case NodeKind::DepFO:
    case NodeKind::DepBool: {
      if (a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!var_eq(a->args[i], b->args[i])) return false;
      if (a->kind == NodeKind::DepFO || a->kind == NodeKind::DepBool)
        return var_eq(a->consequent, b->consequent);
      return true;
    }
    case NodeKind::BoolLit:
    case NodeKind::NegBoolLit:
      return var_eq(a->consequent, b->consequent);
    case NodeKind::And:
    case NodeKind::Or:
      return alpha_eq(a->left, b->left, ab, ba) &&
             alpha_eq(a->right, b->right, ab, ba);
    case NodeKind::ExistsFO:
    case NodeKind::ForallFO:
    case NodeKind::ExistsBool: {
      std::vector<std::pair<Variable, std::optional<Variable>>> sa, sb;
      bind(a->consequent, b->consequent, sa, sb);
      bool ok = alpha_eq(a->left, b->left, ab, ba);
      unbind(sa, sb);
      return ok;
    }
    case NodeKind::NPi: {
      if (a->rows.size() != b->rows.size()) return false;
      std::vector<std::pair<Variable, std::optional<Variable>>> sa, sb;
      for (size_t i = 0; i < a->rows.size(); ++i) {
        if (a->rows[i].vars.size() != b->rows[i].vars.size()) return false;
        for (size_t j = 0; j < a->rows[i].vars.size(); ++j)
          bind(a->rows[i].vars[j], b->rows[i].vars[j], sa, sb);
        bind(a->rows[i].witness, b->rows[i].witness, sa, sb);
      }
      // Row variable identities must agree, not just names pairwise.
      bool ok = a->pattern == b->pattern && alpha_eq(a->left, b->left, ab, ba);
      unbind(sa, sb);
      return ok;
    }
    case NodeKind::SVConn: {
      if (a->sv_rows.size() != b->sv_rows.size()) return false;
      std::vector<std::pair<Variable, std::optional<Variable>>> sa, sb;
      for (size_t i = 0; i < a->sv_rows.size(); ++i) {
        if (a->sv_rows[i].size() != b->sv_rows[i].size()) return false;
        for (size_t j = 0; j < a->sv_rows[i].size(); ++j)
          bind(a->sv_rows[i][j], b->sv_rows[i][j], sa, sb);
      }
      bool ok = a->branches.size() == b->branches.size();
      if (ok) {
        auto it = a->branches.begin();
        auto jt = b->branches.begin();
        for (; ok && it != a->branches.end(); ++it, ++jt)
          ok = it->first == jt->first && alpha_eq(it->second, jt->second, ab, ba);
      }
      unbind(sa, sb);
      return ok;
    }
  }
  return false;
}

}  // namespace

bool alpha_equal(const Ast& a, const Ast& b) {
  std::map<Variable, Variable> ab, ba;
  return alpha_eq(a, b, ab, ba);
}

int ast_size(const Ast& f) {
  int n = 1;
  for (const auto& c : children(f)) n += ast_size(c);
  return n;
}

namespace {

void collect_free(const Ast& f, std::set<Variable>& bound,
                  std::set<Variable>& out) {
  auto add = [&](const Variable& v) {
    if (!bound.count(v)) out.insert(v);
  };
  switch (f->kind) {
    case NodeKind::Equal:
    case NodeKind::NotEqual:
    case NodeKind::RelAtom:
    case NodeKind::NegRelAtom:
      for (const auto& v : f->args) add(v);
      return;
    case NodeKind::DepFO:
    case NodeKind::DepBool:
      for (const auto& v : f->args) add(v);
      add(f->consequent);
      return;
    case NodeKind::BoolLit:
    case NodeKind::NegBoolLit:
      add(f->consequent);
      return;
    case NodeKind::And:
    case NodeKind::Or:
      collect_free(f->left, bound, out);
      collect_free(f->right, bound, out);
      return;
    case NodeKind::ExistsFO:
    case NodeKind::ForallFO:
    case NodeKind::ExistsBool: {
      const bool was = bound.count(f->consequent) > 0;
      bound.insert(f->consequent);
      collect_free(f->left, bound, out);
      if (!was) bound.erase(f->consequent);
      return;
    }
    case NodeKind::NPi: {
      std::vector<Variable> added;
      for (const auto& r : f->rows) {
        for (const auto& v : r.vars)
          if (bound.insert(v).second) added.push_back(v);
        if (bound.insert(r.witness).second) added.push_back(r.witness);
      }
      collect_free(f->left, bound, out);
      for (const auto& v : added) bound.erase(v);
      return;
    }
    case NodeKind::SVConn: {
      std::vector<Variable> added;
      for (const auto& r : f->sv_rows)
        for (const auto& v : r)
          if (bound.insert(v).second) added.push_back(v);
      for (const auto& [bits, body] : f->branches)
        collect_free(body, bound, out);
      for (const auto& v : added) bound.erase(v);
      return;
    }
  }
}

}  // namespace

std::set<Variable> free_variables(const Ast& f) {
  std::set<Variable> bound, out;
  collect_free(f, bound, out);
  return out;
}

bool is_sentence(const Ast& f) { return free_variables(f).empty(); }

namespace {

void collect_all(const Ast& f, std::set<Variable>& out) {
  for (const auto& v : f->args) out.insert(v);
  switch (f->kind) {
    case NodeKind::DepFO:
    case NodeKind::DepBool:
    case NodeKind::BoolLit:
    case NodeKind::NegBoolLit:
    case NodeKind::ExistsFO:
    case NodeKind::ForallFO:
    case NodeKind::ExistsBool:
      out.insert(f->consequent);
      break;
    case NodeKind::NPi:
      for (const auto& r : f->rows) {
        out.insert(r.vars.begin(), r.vars.end());
        out.insert(r.witness);
      }
      break;
    case NodeKind::SVConn:
      for (const auto& r : f->sv_rows) out.insert(r.begin(), r.end());
      break;
    default:
      break;
  }
  for (const auto& c : children(f)) collect_all(c, out);
}

}  // namespace

std::set<Variable> all_variables(const Ast& f) {
  std::set<Variable> out;
  collect_all(f, out);
  return out;
}

std::set<Variable> v_set(const Ast& f, const OccurrencePath& occ) {
  std::set<Variable> out;
  for (const auto& v : free_variables(f))
    if (v.kind == VarKind::FO) out.insert(v);
  Ast cur = f;
  for (int step : occ) {
    switch (cur->kind) {
      case NodeKind::ExistsFO:
      case NodeKind::ForallFO:
        out.insert(cur->consequent);
        break;
      case NodeKind::NPi:
        for (const auto& r : cur->rows)
          out.insert(r.vars.begin(), r.vars.end());
        break;
      case NodeKind::SVConn:
        for (const auto& r : cur->sv_rows) out.insert(r.begin(), r.end());
        break;
      default:
        break;
    }
    cur = child_at(cur, step);
  }
  return out;
}

Ast canonical_dep_atom(const std::set<Variable>& antecedent,
                       const Variable& consequent) {
  std::vector<Variable> ante;
  for (const auto& v : antecedent) {
    if (v.kind != VarKind::FO)
      throw std::invalid_argument("dependence antecedent must be FO variables");
    ante.push_back(v);
  }
  // std::set iterates in the canonical variable order already.
  if (consequent.kind == VarKind::Bool) return mk_dep_bool(ante, consequent);
  return mk_dep_fo(ante, consequent);
}

namespace {

struct Features {
  bool dep_fo = false;
  bool dep_bool = false;
  bool bool_lit = false;
  bool exists_bool = false;
  bool npi = false;
  bool neg_npi = false;
  bool sv = false;
  bool fo_quant = false;
  bool exists_fo = false;
};

void scan(const Ast& f, Features& ft) {
  switch (f->kind) {
    case NodeKind::DepFO: ft.dep_fo = true; break;
    case NodeKind::DepBool: ft.dep_bool = true; break;
    case NodeKind::BoolLit:
    case NodeKind::NegBoolLit: ft.bool_lit = true; break;
    case NodeKind::ExistsBool: ft.exists_bool = true; break;
    case NodeKind::NPi:
      ft.npi = true;
      if (f->negated) ft.neg_npi = true;
      break;
    case NodeKind::SVConn: ft.sv = true; break;
    case NodeKind::ExistsFO:
      ft.fo_quant = true;
      ft.exists_fo = true;
      break;
    case NodeKind::ForallFO: ft.fo_quant = true; break;
    default: break;
  }
  for (const auto& c : children(f)) scan(c, ft);
}

// Checks the scope bound: for every occurrence of a Boolean dependence atom
// and every enclosing existential FO quantifier, the V-set of that
// quantifier's scope is contained in the atom's antecedent. Binding
// generations distinguish a rebound variable from the shadowed outer one,
// so a dead outer binder cannot satisfy the bound by name coincidence;
// membership matches the formula's image under variable normalization.
struct BbdState {
  std::map<Variable, int> gen;
  int counter = 0;
};

bool bbd_ok(const Ast& node, BbdState& st,
            std::set<std::pair<Variable, int>> vset,
            std::vector<std::set<std::pair<Variable, int>>>& scopes) {
  if (node->kind == NodeKind::DepBool) {
    std::set<std::pair<Variable, int>> ante;
    for (const auto& v : node->args) ante.insert({v, st.gen[v]});
    for (const auto& s : scopes)
      for (const auto& p : s)
        if (!ante.count(p)) return false;
  }
  switch (node->kind) {
    case NodeKind::ExistsFO:
    case NodeKind::ForallFO: {
      const Variable& v = node->consequent;
      int saved = st.gen[v];
      st.gen[v] = ++st.counter;
      vset.insert({v, st.gen[v]});
      bool ok;
      if (node->kind == NodeKind::ExistsFO) {
        scopes.push_back(vset);
        ok = bbd_ok(node->left, st, vset, scopes);
        scopes.pop_back();
      } else {
        ok = bbd_ok(node->left, st, vset, scopes);
      }
      st.gen[v] = saved;
      return ok;
    }
    default:
      for (const auto& c : children(node))
        if (!bbd_ok(c, st, vset, scopes)) return false;
      return true;
  }
}

bool rbd_ok(const Ast& node, bool under_exists) {
  if (node->kind == NodeKind::DepBool || node->kind == NodeKind::DepFO)
    return !under_exists;
  if (node->kind == NodeKind::ExistsFO) under_exists = true;
  for (const auto& c : children(node))
    if (!rbd_ok(c, under_exists)) return false;
  return true;
}

bool variable_nf(const Ast& f) {
  std::set<Variable> fr = free_variables(f);
  std::map<Variable, int> quantified;
  bool ok = true;
  auto note = [&](const Variable& v) {
    if (fr.count(v)) ok = false;
    if (++quantified[v] > 1) ok = false;
  };
  std::function<void(const Ast&)> walk = [&](const Ast& n) {
    switch (n->kind) {
      case NodeKind::ExistsFO:
      case NodeKind::ForallFO:
      case NodeKind::ExistsBool:
        note(n->consequent);
        break;
      case NodeKind::NPi: {
        // A variable shared between row positions is still bound once.
        std::set<Variable> seen;
        for (const auto& r : n->rows) {
          for (const auto& v : r.vars)
            if (seen.insert(v).second) note(v);
          note(r.witness);
        }
        break;
      }
      case NodeKind::SVConn:
        for (const auto& r : n->sv_rows)
          for (const auto& v : r) note(v);
        break;
      default:
        break;
    }
    for (const auto& c : children(n)) walk(c);
  };
  walk(f);
  return ok;
}

// Strips a maximal run of quantifiers of the given kind.
Ast strip_run(Ast f, NodeKind kind, std::vector<Variable>* vars = nullptr) {
  while (f->kind == kind) {
    if (vars) vars->push_back(f->consequent);
    f = f->left;
  }
  return f;
}

// Def 5.3 clause 2: every quantifier inside the matrix sits in a block
// exists-x* forall-y* exists-a* with a nonempty FO-existential part.
bool qnf_matrix_ok(const Ast& n) {
  switch (n->kind) {
    case NodeKind::ForallFO:
    case NodeKind::ExistsBool:
      return false;
    case NodeKind::ExistsFO: {
      Ast rest = strip_run(n, NodeKind::ExistsFO);
      rest = strip_run(rest, NodeKind::ForallFO);
      rest = strip_run(rest, NodeKind::ExistsBool);
      return qnf_matrix_ok(rest);
    }
    default:
      for (const auto& c : children(n))
        if (!qnf_matrix_ok(c)) return false;
      return true;
  }
}

bool q_nf(const Ast& f) {
  if (!variable_nf(f) || !is_sentence(f)) return false;
  Ast matrix = strip_run(f, NodeKind::ForallFO);
  matrix = strip_run(matrix, NodeKind::ExistsBool);
  return qnf_matrix_ok(matrix);
}

void flatten_and(const Ast& f, std::vector<Ast>& out) {
  if (f->kind == NodeKind::And) {
    flatten_and(f->left, out);
    flatten_and(f->right, out);
  } else {
    out.push_back(f);
  }
}

void count_dep_consequents(const Ast& n, std::map<Variable, int>& counts) {
  if (n->kind == NodeKind::DepBool) counts[n->consequent]++;
  for (const auto& c : children(n)) count_dep_consequents(c, counts);
}

// Def 5.7 clause 3 with conjunctions flattened: the body of every maximal
// Boolean-existential block is a conjunction containing exactly one
// dependence atom per quantified Boolean variable.
bool dep_blocks_ok(const Ast& n, bool in_bool_run) {
  if (n->kind == NodeKind::ExistsBool && !in_bool_run) {
    std::vector<Variable> block;
    Ast body = strip_run(n, NodeKind::ExistsBool, &block);
    std::vector<Ast> conjuncts;
    flatten_and(body, conjuncts);
    std::set<Variable> want(block.begin(), block.end());
    std::set<Variable> found;
    for (const auto& c : conjuncts)
      if (c->kind == NodeKind::DepBool && want.count(c->consequent))
        if (!found.insert(c->consequent).second) return false;
    if (found != want) return false;
    return dep_blocks_ok(n->left, true);
  }
  bool next_run = n->kind == NodeKind::ExistsBool;
  for (const auto& c : children(n))
    if (!dep_blocks_ok(c, next_run)) return false;
  return true;
}

bool dependence_nf(const Ast& f) {
  if (!q_nf(f)) return false;
  std::map<Variable, int> counts;
  count_dep_consequents(f, counts);
  for (const auto& [v, c] : counts)
    if (c > 1) return false;
  return dep_blocks_ok(f, false);
}

bool quantifier_free(const Ast& n) {
  switch (n->kind) {
    case NodeKind::ExistsFO:
    case NodeKind::ForallFO:
    case NodeKind::ExistsBool:
      return false;
    default:
      for (const auto& c : children(n))
        if (!quantifier_free(c)) return false;
      return true;
  }
}

}  // namespace

const char* label_name(FragmentLabel l) {
  switch (l) {
    case FragmentLabel::FO: return "fo";
    case FragmentLabel::QF: return "qf";
    case FragmentLabel::D: return "d";
    case FragmentLabel::BD: return "bd";
    case FragmentLabel::BBD: return "bbd";
    case FragmentLabel::RBD: return "rbd";
    case FragmentLabel::ForallBD: return "forall-bd";
    case FragmentLabel::FO_POC: return "fo-poc";
    case FragmentLabel::FO_POC_plus: return "fo-poc+";
    case FragmentLabel::POC_FO: return "poc[fo]";
    case FragmentLabel::POC_QF: return "poc[qf]";
    case FragmentLabel::VariableNF: return "variable-nf";
    case FragmentLabel::QNF: return "q-nf";
    case FragmentLabel::DependenceNF: return "dependence-nf";
  }
  return "?";
}

std::set<FragmentLabel> classify(const Ast& f) {
  Features ft;
  scan(f, ft);
  std::set<FragmentLabel> out;

  const bool has_bool = ft.bool_lit || ft.exists_bool || ft.dep_bool;
  const bool has_poc = ft.npi || ft.sv;

  if (!ft.dep_fo && !ft.dep_bool && !has_bool && !has_poc) {
    out.insert(FragmentLabel::FO);
    if (!ft.fo_quant) out.insert(FragmentLabel::QF);
  }
  if (!has_bool && !has_poc) out.insert(FragmentLabel::D);
  if (!ft.dep_fo && !has_poc) {
    out.insert(FragmentLabel::BD);
    BbdState st;
    std::set<std::pair<Variable, int>> root_vset;
    for (const auto& v : free_variables(f))
      if (v.kind == VarKind::FO) root_vset.insert({v, 0});
    std::vector<std::set<std::pair<Variable, int>>> scopes;
    if (bbd_ok(f, st, root_vset, scopes)) out.insert(FragmentLabel::BBD);
    if (rbd_ok(f, false)) out.insert(FragmentLabel::RBD);
    if (!ft.exists_fo) out.insert(FragmentLabel::ForallBD);
    if (variable_nf(f)) out.insert(FragmentLabel::VariableNF);
    if (q_nf(f)) out.insert(FragmentLabel::QNF);
    if (dependence_nf(f)) out.insert(FragmentLabel::DependenceNF);
  }
  if (!ft.dep_fo && !ft.dep_bool && !ft.sv) {
    out.insert(FragmentLabel::FO_POC);
    if (!ft.neg_npi) out.insert(FragmentLabel::FO_POC_plus);
    if (f->kind == NodeKind::NPi && !f->negated) {
      Features body;
      scan(f->left, body);
      if (!body.npi && !body.sv && !body.exists_bool) {
        out.insert(FragmentLabel::POC_FO);
        if (quantifier_free(f->left)) out.insert(FragmentLabel::POC_QF);
      }
    }
  }
  return out;
}

namespace {

Ast rename(const Ast& f, const std::map<Variable, Variable>& mapping,
           RenameScope scope, std::set<Variable>& bound) {
  auto map_var = [&](const Variable& v) -> Variable {
    auto it = mapping.find(v);
    if (it == mapping.end()) return v;
    if (scope == RenameScope::FreeOnly && bound.count(v)) return v;
    return it->second;
  };
  auto map_binder = [&](const Variable& v) -> Variable {
    if (scope == RenameScope::FreeOnly) return v;
    auto it = mapping.find(v);
    return it == mapping.end() ? v : it->second;
  };

  Formula copy = *f;
  for (auto& v : copy.args) v = map_var(v);
  switch (f->kind) {
    case NodeKind::DepFO:
    case NodeKind::DepBool:
    case NodeKind::BoolLit:
    case NodeKind::NegBoolLit:
      copy.consequent = map_var(f->consequent);
      break;
    case NodeKind::ExistsFO:
    case NodeKind::ForallFO:
    case NodeKind::ExistsBool: {
      copy.consequent = map_binder(f->consequent);
      const bool was = bound.count(f->consequent) > 0;
      bound.insert(f->consequent);
      copy.left = rename(f->left, mapping, scope, bound);
      if (!was) bound.erase(f->consequent);
      return std::make_shared<const Formula>(std::move(copy));
    }
    case NodeKind::NPi: {
      std::vector<Variable> added;
      for (auto& r : copy.rows) {
        for (auto& v : r.vars) v = map_binder(v);
        r.witness = map_binder(r.witness);
      }
      for (const auto& r : f->rows) {
        for (const auto& v : r.vars)
          if (bound.insert(v).second) added.push_back(v);
        if (bound.insert(r.witness).second) added.push_back(r.witness);
      }
      copy.left = rename(f->left, mapping, scope, bound);
      for (const auto& v : added) bound.erase(v);
      return std::make_shared<const Formula>(std::move(copy));
    }
    case NodeKind::SVConn: {
      std::vector<Variable> added;
      for (auto& r : copy.sv_rows)
        for (auto& v : r) v = map_binder(v);
      for (const auto& r : f->sv_rows)
        for (const auto& v : r)
          if (bound.insert(v).second) added.push_back(v);
      for (auto& [bits, body] : copy.branches)
        body = rename(body, mapping, scope, bound);
      for (const auto& v : added) bound.erase(v);
      return std::make_shared<const Formula>(std::move(copy));
    }
    default:
      break;
  }
  if (copy.left) copy.left = rename(f->left, mapping, scope, bound);
  if (copy.right) copy.right = rename(f->right, mapping, scope, bound);
  return std::make_shared<const Formula>(std::move(copy));
}

}  // namespace

Ast rename_variables(const Ast& f, const std::map<Variable, Variable>& mapping,
                     RenameScope scope) {
  std::set<Variable> targets;
  std::set<Variable> occurring = all_variables(f);
  for (const auto& [from, to] : mapping) {
    if (from.kind != to.kind)
      throw std::invalid_argument("renaming must preserve variable kind");
    if (!targets.insert(to).second)
      throw std::invalid_argument("renaming must be injective");
    if (from != to && occurring.count(to))
      throw std::invalid_argument("renaming target occurs in the formula");
  }
  std::set<Variable> bound;
  return rename(f, mapping, scope, bound);
}

Variable FreshSource::fresh_fo(const std::string& hint) {
  return fo_var(std::string(1, kFreshPrefix) + hint + std::to_string(counter_++));
}

Variable FreshSource::fresh_bool(const std::string& hint) {
  return bool_var(std::string(1, kFreshPrefix) + hint + std::to_string(counter_++));
}

}  // namespace logic

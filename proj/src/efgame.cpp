#include "logic/efgame.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "logic/semantics.hpp"

namespace logic {

namespace {

bool preserves_relations(const Structure& a, const std::vector<int>& perm) {
  for (const auto& [name, tuples] : a.relations) {
    for (const auto& t : tuples) {
      std::vector<int> image(t.size());
      for (size_t i = 0; i < t.size(); ++i) image[i] = perm[t[i]];
      if (!tuples.count(image)) return false;
    }
  }
  return true;
}

bool partial_isomorphism(const Structure& a, const std::vector<int>& va,
                         const Structure& b, const std::vector<int>& vb) {
  const size_t n = va.size();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if ((va[i] == va[j]) != (vb[i] == vb[j])) return false;
  for (const auto& [name, arity] : a.voc.relations) {
    std::vector<size_t> idx(arity, 0);
    if (static_cast<size_t>(arity) > 0 && n == 0) continue;
    for (;;) {
      std::vector<int> ta(arity), tb(arity);
      for (int i = 0; i < arity; ++i) {
        ta[i] = va[idx[i]];
        tb[i] = vb[idx[i]];
      }
      if (a.holds(name, ta) != b.holds(name, tb)) return false;
      int i = arity - 1;
      while (i >= 0 && idx[i] == n - 1) idx[i--] = 0;
      if (i < 0) break;
      ++idx[i];
    }
  }
  return true;
}

struct EfSolver {
  const Structure& a;
  const Structure& b;
  Budget& budget;
  std::map<std::tuple<std::vector<int>, std::vector<int>, int>, bool> memo;

  bool win(const std::vector<int>& va, const std::vector<int>& vb, int r) {
    budget.tick();
    if (r == 0) return partial_isomorphism(a, va, b, vb);
    auto key = std::make_tuple(va, vb, r);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool ok = true;
    // Spoiler plays on the left.
    for (int c = 0; ok && c < a.domain_size; ++c) {
      bool answered = false;
      for (int d = 0; !answered && d < b.domain_size; ++d) {
        auto ea = va, eb = vb;
        ea.push_back(c);
        eb.push_back(d);
        answered = win(ea, eb, r - 1);
      }
      ok = answered;
    }
    // Spoiler plays on the right.
    for (int d = 0; ok && d < b.domain_size; ++d) {
      bool answered = false;
      for (int c = 0; !answered && c < a.domain_size; ++c) {
        auto ea = va, eb = vb;
        ea.push_back(c);
        eb.push_back(d);
        answered = win(ea, eb, r - 1);
      }
      ok = answered;
    }
    memo.emplace(key, ok);
    return ok;
  }
};

// All pattern-conformant row-tuple choices, each flattened alongside its
// per-row tuples.
struct Conformant {
  std::vector<std::vector<std::vector<int>>> choices;  // [choice][row] = tuple
};

Conformant conformant_tuples(const Structure& s, const Pattern& pattern,
                             Budget& budget) {
  Conformant out;
  const size_t m = pattern.row_lengths.size();
  std::vector<long long> space(m);
  for (size_t i = 0; i < m; ++i)
    space[i] = int_pow(s.domain_size, pattern.row_lengths[i]);
  std::vector<long long> rank(m, 0);
  for (;;) {
    budget.tick();
    std::vector<std::vector<int>> tuples(m);
    for (size_t i = 0; i < m; ++i)
      tuples[i] = tuple_at(s.domain_size, pattern.row_lengths[i], rank[i]);
    if (matches_pattern(tuples, pattern)) out.choices.push_back(tuples);
    int i = static_cast<int>(m) - 1;
    while (i >= 0 && rank[i] == space[i] - 1) rank[i--] = 0;
    if (i < 0) break;
    ++rank[i];
  }
  return out;
}

std::vector<int> flatten(const std::vector<std::vector<int>>& tuples) {
  std::vector<int> out;
  for (const auto& t : tuples) out.insert(out.end(), t.begin(), t.end());
  return out;
}

// Function tuples as one bitmask per row, indexed by tuple rank. The orbit
// representative test keeps only the lexicographic minimum of each orbit
// under the structure's automorphism group acting on tuple ranks.
struct FunctionSpace {
  std::vector<long long> cells;                       // per row
  std::vector<std::vector<std::vector<long long>>> rank_perm;  // [auto][row][rank]

  FunctionSpace(const Structure& s, const Pattern& pattern,
                const std::vector<std::vector<int>>& autos) {
    const size_t m = pattern.row_lengths.size();
    cells.resize(m);
    for (size_t i = 0; i < m; ++i) {
      cells[i] = int_pow(s.domain_size, pattern.row_lengths[i]);
      if (cells[i] > 62) throw BudgetExceeded();
    }
    for (const auto& perm : autos) {
      std::vector<std::vector<long long>> per_row(m);
      for (size_t i = 0; i < m; ++i) {
        per_row[i].resize(cells[i]);
        for (long long r = 0; r < cells[i]; ++r) {
          auto t = tuple_at(s.domain_size, pattern.row_lengths[i], r);
          for (auto& e : t) e = perm[e];
          per_row[i][r] = tuple_rank(s.domain_size, t);
        }
      }
      rank_perm.push_back(std::move(per_row));
    }
  }

  bool has_smaller_orbit_member(const std::vector<uint64_t>& masks) const {
    for (const auto& per_row : rank_perm) {
      for (size_t i = 0; i < masks.size(); ++i) {
        uint64_t image = 0;
        for (long long r = 0; r < cells[i]; ++r)
          if (masks[i] & (uint64_t{1} << per_row[i][r]))
            image |= uint64_t{1} << r;
        if (image < masks[i]) return true;  // a smaller orbit member exists
        if (image > masks[i]) break;        // this automorphism is no witness
      }
    }
    return false;
  }

  // Visits every orbit-representative function tuple.
  void visit_reps(Budget& budget,
                  const std::function<bool(const std::vector<uint64_t>&)>& visit) const {
    const size_t m = cells.size();
    std::vector<uint64_t> masks(m, 0);
    for (;;) {
      budget.tick();
      if (!has_smaller_orbit_member(masks) && !visit(masks)) return;
      int i = static_cast<int>(m) - 1;
      while (i >= 0 &&
             masks[i] == (uint64_t{1} << cells[i]) - 1)
        masks[i--] = 0;
      if (i < 0) break;
      ++masks[i];
    }
  }
};

int apply_mask(const std::vector<uint64_t>& masks, size_t row, long long rank) {
  return (masks[row] >> rank) & 1;
}

}  // namespace

std::vector<std::vector<int>> automorphisms(const Structure& a) {
  std::vector<int> perm(a.domain_size);
  std::iota(perm.begin(), perm.end(), 0);
  if (a.domain_size > 8) return {perm};
  std::vector<std::vector<int>> out;
  do {
    if (preserves_relations(a, perm)) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

bool fo_ef_duplicator_wins(const Structure& a, const std::vector<int>& abar,
                           const Structure& b, const std::vector<int>& bbar,
                           int rounds, Budget& budget) {
  if (abar.size() != bbar.size())
    throw std::invalid_argument("pinned tuples must have equal length");
  EfSolver solver{a, b, budget, {}};
  return solver.win(abar, bbar, rounds);
}

bool duplicator_wins(const GameConfig& cfg, Budget& budget) {
  if (!cfg.pattern.well_formed())
    throw std::invalid_argument("malformed pattern");
  for (int len : cfg.pattern.row_lengths)
    if (len <= 0) throw std::invalid_argument("pattern rows must be nonempty");
  if (cfg.left.voc.relations != cfg.right.voc.relations)
    throw std::invalid_argument("structures must share a vocabulary");
  if (cfg.rounds < 0) throw std::invalid_argument("rounds must be nonnegative");
  if (cfg.left.domain_size == 0 || cfg.right.domain_size == 0)
    throw std::invalid_argument("empty domains are not supported");

  Conformant ca = conformant_tuples(cfg.left, cfg.pattern, budget);
  Conformant cb = conformant_tuples(cfg.right, cfg.pattern, budget);
  const size_t m = cfg.pattern.row_lengths.size();

  FunctionSpace fs_left(cfg.left, cfg.pattern, automorphisms(cfg.left));
  FunctionSpace fs_right(cfg.right, cfg.pattern, automorphisms(cfg.right));

  EfSolver phase2{cfg.left, cfg.right, budget, {}};

  // Precompute tuple ranks once per conformant choice.
  auto ranks_of = [&](const Structure& s,
                      const std::vector<std::vector<int>>& tuples) {
    std::vector<long long> r(m);
    for (size_t i = 0; i < m; ++i) r[i] = tuple_rank(s.domain_size, tuples[i]);
    return r;
  };
  std::vector<std::vector<long long>> a_ranks, b_ranks;
  std::vector<std::vector<int>> a_flat, b_flat;
  for (const auto& t : ca.choices) {
    a_ranks.push_back(ranks_of(cfg.left, t));
    a_flat.push_back(flatten(t));
  }
  for (const auto& t : cb.choices) {
    b_ranks.push_back(ranks_of(cfg.right, t));
    b_flat.push_back(flatten(t));
  }

  bool spoiler_wins = false;
  fs_left.visit_reps(budget, [&](const std::vector<uint64_t>& f) {
    bool found_g = false;
    fs_right.visit_reps(budget, [&](const std::vector<uint64_t>& g) {
      bool all_b = true;
      for (size_t bi = 0; bi < cb.choices.size() && all_b; ++bi) {
        bool answered = false;
        for (size_t ai = 0; ai < ca.choices.size() && !answered; ++ai) {
          bool match = true;
          for (size_t i = 0; i < m && match; ++i)
            match = apply_mask(f, i, a_ranks[ai][i]) ==
                    apply_mask(g, i, b_ranks[bi][i]);
          if (match)
            answered = phase2.win(a_flat[ai], b_flat[bi], cfg.rounds);
        }
        all_b = answered;
      }
      found_g = all_b;
      return !found_g;  // stop once a winning response is found
    });
    spoiler_wins = !found_g;
    return !spoiler_wins;  // stop once Spoiler has a winning function tuple
  });
  return !spoiler_wins;
}

PreservationReport verify_preservation(const GameConfig& cfg,
                                       const std::vector<Ast>& sentences,
                                       Budget& budget) {
  PreservationReport report;
  report.duplicator_win = duplicator_wins(cfg, budget);
  for (const auto& f : sentences) {
    if (f->kind != NodeKind::NPi || f->negated)
      throw std::invalid_argument(
          "sentences must be non-negated outer connectives");
    if (!is_sentence(f)) throw std::invalid_argument("free variables");
    std::vector<int> lens;
    for (const auto& row : f->rows)
      lens.push_back(static_cast<int>(row.vars.size()));
    if (lens != cfg.pattern.row_lengths ||
        f->pattern.identities != cfg.pattern.identities)
      throw std::invalid_argument("sentence pattern does not match the game");
    if (quantifier_rank(f->left) > cfg.rounds)
      throw std::invalid_argument("body quantifier rank exceeds the rounds");
    PreservationEntry entry;
    entry.sentence = f;
    entry.left_true = sat_sentence(cfg.left, f, budget);
    entry.right_true = sat_sentence(cfg.right, f, budget);
    entry.violation =
        report.duplicator_win && entry.left_true && !entry.right_true;
    if (entry.violation) ++report.violation_count;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace logic

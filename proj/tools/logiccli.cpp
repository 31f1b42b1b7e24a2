// Command-line surface over the library: model checking, translations,
// normal forms, fragment classification, the comparison game, and structure
// generators. Exit codes: 0 success, 1 negative answer, 2 usage or input
// error, 3 work budget exceeded.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "logic/corpus.hpp"
#include "logic/efgame.hpp"
#include "logic/semantics.hpp"
#include "logic/sweep.hpp"
#include "logic/textio.hpp"
#include "logic/transforms.hpp"

using namespace logic;

namespace {

struct Options {
  long long budget = Budget::kDefaultLimit;
  unsigned seed = 1;
  int jobs = 0;
  bool machine = false;
};

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vocabulary infer_vocabulary(const Ast& f) {
  Vocabulary voc;
  std::function<void(const Ast&)> walk = [&](const Ast& n) {
    if (n->kind == NodeKind::RelAtom || n->kind == NodeKind::NegRelAtom) {
      if (!voc.has(n->rel)) voc.add(n->rel, static_cast<int>(n->args.size()));
    }
    for (const auto& c : children(n)) walk(c);
    if (n->kind == NodeKind::SVConn)
      for (const auto& [bits, branch] : n->branches) walk(branch);
  };
  walk(f);
  return voc;
}

// Team files: one assignment per line, space-separated name=value pairs.
// Boolean variables keep their ? sigil and take values 0/1. Blank lines and
// lines starting with # are skipped; an empty file is the empty team.
Team parse_team(const std::string& text) {
  Team team;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    Assignment s;
    std::istringstream row(line);
    std::string pair;
    while (row >> pair) {
      auto eq = pair.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::runtime_error("bad team entry: " + pair);
      std::string name = pair.substr(0, eq);
      int value = std::stoi(pair.substr(eq + 1));
      if (name[0] == '?')
        s.set(bool_var(name.substr(1)), value);
      else
        s.set(fo_var(name), value);
    }
    team.insert(s);
  }
  return team;
}

std::string path_str(const OccurrencePath& p) {
  std::string out;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(p[i]);
  }
  return out.empty() ? "root" : out;
}

std::string team_str(const Team& x) {
  std::string out = "{";
  bool first_s = true;
  for (const auto& s : x) {
    if (!first_s) out += "; ";
    first_s = false;
    bool first_v = true;
    for (const auto& [v, val] : s.bindings()) {
      if (!first_v) out += ' ';
      first_v = false;
      out += (v.kind == VarKind::Bool ? "?" + v.name : v.name);
      out += '=';
      out += std::to_string(val);
    }
  }
  return out + "}";
}

long long elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

int cmd_check(const Options& opts, const std::string& structure_file,
              const std::string& formula_file, const std::string& team_file,
              const std::string& engine) {
  Structure a = parse_structure(read_text(structure_file));
  Ast f = parse_formula(read_text(formula_file));
  auto t0 = std::chrono::steady_clock::now();
  Budget budget(opts.budget);
  bool result = false;
  std::string dialect = "assignment";
  if (engine == "evaluation") {
    Team x;
    if (!team_file.empty()) x = parse_team(read_text(team_file));
    auto witness = find_successful_evaluation(a, x, f, budget);
    result = witness.has_value();
    dialect = "team";
    std::cout << "result=" << (result ? "true" : "false") << "\n";
    std::cout << "dialect=" << dialect << "\n";
    if (witness && !opts.machine)
      for (const auto& [occ, team] : witness->table)
        std::cout << "  " << path_str(occ) << " -> " << team_str(team) << "\n";
  } else {
    if (!team_file.empty()) {
      Team x = parse_team(read_text(team_file));
      result = sat_team(a, x, f, budget);
      dialect = "team";
    } else if (team_dialect(f)) {
      result = sat_sentence(a, f, budget);
      dialect = "team";
    } else {
      result = sat_sentence(a, f, budget);
    }
    std::cout << "result=" << (result ? "true" : "false") << "\n";
    std::cout << "dialect=" << dialect << "\n";
  }
  std::cout << "time_ms=" << elapsed_ms(t0) << "\n";
  return result ? 0 : 1;
}

using TransformFn = Ast (*)(const Ast&, RewriteTrace*);

struct TargetInfo {
  TransformFn fn = nullptr;
  int min_domain = 1;  // smallest domain on which the translation is valid
};

TargetInfo target_info(const std::string& name) {
  static const std::map<std::string, TargetInfo> table = {
      {"d", {bd_to_d, 2}},
      {"bd", {d_to_bd, 1}},
      {"fo-poc", {fod_to_fopoc, 1}},
      {"fo-d", {fopoc_to_fod, 1}},
      {"fo-poc+", {bbd_to_fopoc_plus, 1}},
      {"bbd", {fopoc_plus_to_bbd, 1}},
      {"poc-fo", {rbd_to_pocfo, 2}},
      {"poc-qf", {forallbd_to_pocqf, 1}},
      {"variable-nf", {to_variable_nf, 1}},
      {"q-nf", {to_q_nf, 1}},
      {"dependence-nf", {to_dependence_nf, 1}},
      {"no-bool-quantifiers", {eliminate_bool_quantifier, 2}},
  };
  auto it = table.find(name);
  if (it == table.end())
    throw std::runtime_error("unknown translation target: " + name);
  return it->second;
}

void print_trace(const RewriteTrace& trace) {
  for (const auto& step : trace.steps)
    std::cout << "step=" << step.rule << " at=" << path_str(step.occurrence)
              << " size=" << step.before_size << ">" << step.after_size
              << "\n";
}

int verify_equivalence(const Options& opts, const Ast& before, const Ast& after,
                       int min_domain, int max_domain) {
  Vocabulary voc = infer_vocabulary(before);
  std::vector<Structure> structures;
  Budget enum_budget(opts.budget);
  for (int n = min_domain; n <= max_domain; ++n)
    all_structures(voc, n, enum_budget, [&](const Structure& s) {
      structures.push_back(s);
      return true;
    });
  SweepOptions sopts;
  sopts.budget_per_cell = opts.budget;
  sopts.jobs = opts.jobs;
  SweepResult rb = truth_sweep({before}, structures, sopts);
  SweepResult ra = truth_sweep({after}, structures, sopts);
  for (size_t i = 0; i < structures.size(); ++i) {
    if (rb.cells[i] == CellStatus::Error || ra.cells[i] == CellStatus::Error)
      throw BudgetExceeded();
    if (rb.cells[i] != ra.cells[i]) {
      std::cout << "verified=" << i << "/" << structures.size() << "\n";
      std::cout << "counterexample=\n" << print_structure(structures[i]);
      return 1;
    }
  }
  std::cout << "verified=" << structures.size() << "/" << structures.size()
            << "\n";
  return 0;
}

int cmd_translate(const Options& opts, const std::string& formula_file,
                  const std::string& target, int verify, bool trace,
                  const std::string& sim_var) {
  Ast f = parse_formula(read_text(formula_file));
  RewriteTrace steps;
  Ast out;
  int min_domain = 1;
  if (target == "simulate-forall-bool") {
    if (sim_var.empty() || sim_var[0] != '?')
      throw std::runtime_error("--var must name a ?-variable");
    out = simulate_universal_bool(f, bool_var(sim_var.substr(1)), &steps);
    min_domain = 2;
  } else {
    TargetInfo info = target_info(target);
    out = info.fn(f, &steps);
    min_domain = info.min_domain;
  }
  std::cout << "formula=" << print_formula(out) << "\n";
  if (trace) print_trace(steps);
  if (verify > 0 && target != "simulate-forall-bool")
    return verify_equivalence(opts, f, out, min_domain, verify);
  return 0;
}

int cmd_normalize(const Options& opts, const std::string& formula_file,
                  const std::string& form, bool trace) {
  (void)opts;
  Ast f = parse_formula(read_text(formula_file));
  RewriteTrace steps;
  Ast out;
  if (form == "variable")
    out = to_variable_nf(f, &steps);
  else if (form == "q")
    out = to_q_nf(f, &steps);
  else if (form == "dependence")
    out = to_dependence_nf(f, &steps);
  else
    throw std::runtime_error("unknown normal form: " + form);
  std::cout << "formula=" << print_formula(out) << "\n";
  if (trace) print_trace(steps);
  return 0;
}

int cmd_classify(const Options& opts, const std::string& formula_file) {
  (void)opts;
  Ast f = parse_formula(read_text(formula_file));
  std::set<std::string> names;
  for (auto l : classify(f)) names.insert(label_name(l));
  std::string joined;
  for (const auto& n : names) {
    if (!joined.empty()) joined += ",";
    joined += n;
  }
  std::cout << "labels=" << joined << "\n";
  return 0;
}

// Patterns on the command line: rows separated by '|', row variables by ','.
// Repeating a variable name across positions records an identity, exactly as
// in the N prefix of the formula grammar.
Pattern parse_cli_pattern(const std::string& text) {
  std::vector<std::vector<Variable>> rows;
  std::istringstream in(text);
  std::string row_text;
  while (std::getline(in, row_text, '|')) {
    std::vector<Variable> row;
    std::istringstream rin(row_text);
    std::string name;
    while (std::getline(rin, name, ',')) {
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t") + 1);
      if (name.empty()) throw std::runtime_error("empty pattern variable");
      row.push_back(fo_var(name));
    }
    if (row.empty()) throw std::runtime_error("empty pattern row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty pattern");
  return pattern_of(rows);
}

int cmd_ef(const Options& opts, const std::string& left_file,
           const std::string& right_file, const std::string& pattern_text,
           int rounds, const std::string& corpus_file) {
  if (rounds < 0) throw CLI::ValidationError("--rounds must be nonnegative");
  GameConfig cfg;
  cfg.pattern = parse_cli_pattern(pattern_text);
  cfg.rounds = rounds;
  cfg.left = parse_structure(read_text(left_file));
  cfg.right = parse_structure(read_text(right_file));
  Budget budget(opts.budget);
  if (corpus_file.empty()) {
    bool win = duplicator_wins(cfg, budget);
    std::cout << "duplicator_wins=" << (win ? "true" : "false") << "\n";
    return win ? 0 : 1;
  }
  std::vector<Ast> sentences;
  std::istringstream in(read_text(corpus_file));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    sentences.push_back(parse_formula(line));
  }
  PreservationReport report = verify_preservation(cfg, sentences, budget);
  std::cout << "duplicator_wins=" << (report.duplicator_win ? "true" : "false")
            << "\n";
  if (!opts.machine)
    for (const auto& e : report.entries)
      std::cout << "  left=" << e.left_true << " right=" << e.right_true
                << (e.violation ? " VIOLATION " : " ")
                << print_formula(e.sentence) << "\n";
  std::cout << "violations=" << report.violation_count << "\n";
  return report.violation_count == 0 ? 0 : 1;
}

int cmd_gen(const Options& opts, const std::string& family, int k, int domain) {
  if (family == "cycle") {
    std::cout << print_structure(gen_cycle(k));
  } else if (family == "two-cycles") {
    std::cout << print_structure(gen_two_cycles(k));
  } else if (family == "all-structures") {
    Vocabulary voc;
    voc.add("E", 2);
    Budget budget(opts.budget);
    bool first = true;
    for (int n = 1; n <= domain; ++n)
      all_structures(voc, n, budget, [&](const Structure& s) {
        if (!first) std::cout << "---\n";
        first = false;
        std::cout << print_structure(s);
        return true;
      });
  } else {
    throw std::runtime_error("unknown family: " + family);
  }
  return 0;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const BudgetExceeded&) {
    std::cerr << "error=budget-exceeded\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error=parse bytes=" << e.span.start << ".." << e.span.end
              << " " << e.what() << "\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error=usage " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error=input " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boolean dependence logic toolkit"};
  app.require_subcommand(1);
  Options opts;
  app.add_option("--budget", opts.budget, "work budget (search states)");
  app.add_option("--seed", opts.seed, "random seed for sampled corpora");
  app.add_option("--jobs", opts.jobs, "parallel sweep threads (0 = default)");
  app.add_flag("--machine", opts.machine, "key=value output only");

  int rc = 0;

  std::string structure_file, formula_file, team_file, engine = "team";
  auto* check = app.add_subcommand("check", "evaluate a formula on a structure");
  check->add_option("structure", structure_file)->required();
  check->add_option("formula", formula_file)->required();
  check->add_option("--team", team_file, "team file for open formulas");
  check->add_option("--engine", engine, "team | evaluation");
  check->callback([&] {
    rc = guarded([&] {
      return cmd_check(opts, structure_file, formula_file, team_file, engine);
    });
  });

  std::string target, sim_var;
  int verify = 0;
  bool trace = false;
  auto* translate = app.add_subcommand("translate", "apply a fragment translation");
  translate->add_option("formula", formula_file)->required();
  translate->add_option("--to", target, "target fragment")->required();
  translate->add_option("--verify", verify, "differential sweep up to |A|=n");
  translate->add_option("--var", sim_var, "?-variable for simulate-forall-bool");
  translate->add_flag("--trace", trace, "print rewrite steps");
  translate->callback([&] {
    rc = guarded([&] {
      return cmd_translate(opts, formula_file, target, verify, trace, sim_var);
    });
  });

  std::string form;
  auto* normalize = app.add_subcommand("normalize", "rewrite into a normal form");
  normalize->add_option("formula", formula_file)->required();
  normalize->add_option("--form", form, "variable | q | dependence")->required();
  normalize->add_flag("--trace", trace, "print rewrite steps");
  normalize->callback([&] {
    rc = guarded([&] { return cmd_normalize(opts, formula_file, form, trace); });
  });

  auto* classify_cmd = app.add_subcommand("classify", "list fragment labels");
  classify_cmd->add_option("formula", formula_file)->required();
  classify_cmd->callback([&] {
    rc = guarded([&] { return cmd_classify(opts, formula_file); });
  });

  std::string left_file, right_file, pattern_text, corpus_file;
  int rounds = 0;
  auto* ef = app.add_subcommand("ef", "play the comparison game");
  ef->add_option("left", left_file)->required();
  ef->add_option("right", right_file)->required();
  ef->add_option("--pattern", pattern_text, "rows 'x,y|z'; repeats = identities")
      ->required();
  ef->add_option("--rounds", rounds, "element-phase rounds");
  ef->add_option("--corpus", corpus_file, "one sentence per line");
  ef->callback([&] {
    rc = guarded([&] {
      return cmd_ef(opts, left_file, right_file, pattern_text, rounds,
                    corpus_file);
    });
  });

  std::string family;
  int k = 3, domain = 2;
  auto* gen = app.add_subcommand("gen", "emit structures");
  gen->add_option("--family", family, "cycle | two-cycles | all-structures")
      ->required();
  gen->add_option("--k", k, "cycle length");
  gen->add_option("--domain", domain, "max domain for all-structures");
  gen->callback(
      [&] { rc = guarded([&] { return cmd_gen(opts, family, k, domain); }); });

  // Accept the global options after the subcommand name as well.
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help and friends are not failures
  }
  return rc;
}

#include "logic/textio.hpp"

#include <cctype>
#include <sstream>

namespace logic {

namespace {

enum class Tok : uint8_t {
  End, Ident, BoolIdent, Digits,
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  Comma, Semi, Colon, Eq, Amp, Pipe, Bang, Arrow, DArrow,
};

struct Token {
  Tok kind;
  std::string text;  // identifier name (sans sigil) or digit string
  size_t start = 0, end = 0;
};

bool ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80;
}
bool ident_char(unsigned char c) {
  return ident_start(c) || std::isdigit(c) || c == '\'';
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token out = tok_;
    advance();
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, tok_.start, tok_.end);
  }

  Token expect(Tok kind, const std::string& what) {
    if (tok_.kind != kind) fail("expected " + what);
    return take();
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    tok_.start = pos_;
    if (pos_ >= text_.size()) {
      tok_ = {Tok::End, "", pos_, pos_};
      return;
    }
    unsigned char c = text_[pos_];
    auto single = [&](Tok k) {
      tok_ = {k, std::string(1, text_[pos_]), pos_, pos_ + 1};
      ++pos_;
    };
    switch (c) {
      case '(': single(Tok::LParen); return;
      case ')': single(Tok::RParen); return;
      case '[': single(Tok::LBracket); return;
      case ']': single(Tok::RBracket); return;
      case '{': single(Tok::LBrace); return;
      case '}': single(Tok::RBrace); return;
      case ',': single(Tok::Comma); return;
      case ';': single(Tok::Semi); return;
      case ':': single(Tok::Colon); return;
      case '=': single(Tok::Eq); return;
      case '&': single(Tok::Amp); return;
      case '|': single(Tok::Pipe); return;
      case '!': single(Tok::Bang); return;
      case '<':
        if (text_.compare(pos_, 3, "<->") == 0) {
          tok_ = {Tok::DArrow, "<->", pos_, pos_ + 3};
          pos_ += 3;
          return;
        }
        throw ParseError("stray '<'", pos_, pos_ + 1);
      case '-':
        if (text_.compare(pos_, 2, "->") == 0) {
          tok_ = {Tok::Arrow, "->", pos_, pos_ + 2};
          pos_ += 2;
          return;
        }
        throw ParseError("stray '-'", pos_, pos_ + 1);
      case '?': {
        size_t s = pos_++;
        tok_ = {Tok::BoolIdent, lex_name(s), s, pos_};
        return;
      }
      default: break;
    }
    if (c == kFreshPrefix)
      throw ParseError("variable names starting with '" +
                           std::string(1, kFreshPrefix) + "' are reserved",
                       pos_, pos_ + 1);
    if (std::isdigit(c)) {
      size_t s = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      tok_ = {Tok::Digits, text_.substr(s, pos_ - s), s, pos_};
      return;
    }
    if (ident_start(c)) {
      size_t s = pos_;
      tok_ = {Tok::Ident, lex_name(s), s, pos_};
      return;
    }
    throw ParseError("unexpected character", pos_, pos_ + 1);
  }

  std::string lex_name(size_t sigil_start) {
    size_t s = pos_;
    if (pos_ >= text_.size() || text_[pos_] == kFreshPrefix ||
        !ident_start(static_cast<unsigned char>(text_[pos_])))
      throw ParseError("expected a variable name", sigil_start, pos_ + 1);
    while (pos_ < text_.size() && ident_char(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    return text_.substr(s, pos_ - s);
  }

  const std::string& text_;
  size_t pos_ = 0;
  Token tok_;
};

class FormulaParser {
 public:
  FormulaParser(const std::string& text,
                std::map<const Formula*, SourceSpan>* spans)
      : lex_(text), spans_(spans) {}

  Ast parse() {
    Ast f = formula();
    if (lex_.peek().kind != Tok::End) lex_.fail("trailing input");
    return f;
  }

 private:
  Ast note(Ast f, size_t start, size_t end) {
    if (spans_) (*spans_)[f.get()] = {start, end};
    return f;
  }

  // Wraps constructor validation errors in span-bearing diagnostics.
  template <typename Fn>
  Ast guarded(size_t start, Fn&& make) {
    try {
      return note(make(), start, lex_.peek().start);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), start, lex_.peek().start);
    }
  }

  Ast formula() {
    size_t start = lex_.peek().start;
    Ast lhs = or_expr();
    if (lex_.peek().kind == Tok::Arrow) {
      lex_.take();
      Ast rhs = formula();
      return guarded(start, [&] { return mk_implies(lhs, rhs); });
    }
    if (lex_.peek().kind == Tok::DArrow) {
      lex_.take();
      Ast rhs = formula();
      return guarded(start, [&] { return mk_iff(lhs, rhs); });
    }
    return lhs;
  }

  Ast or_expr() {
    size_t start = lex_.peek().start;
    Ast f = and_expr();
    while (lex_.peek().kind == Tok::Pipe) {
      lex_.take();
      Ast rhs = and_expr();
      f = guarded(start, [&] { return mk_or(f, rhs); });
    }
    return f;
  }

  Ast and_expr() {
    size_t start = lex_.peek().start;
    Ast f = primary();
    while (lex_.peek().kind == Tok::Amp) {
      lex_.take();
      Ast rhs = primary();
      f = guarded(start, [&] { return mk_and(f, rhs); });
    }
    return f;
  }

  Ast primary() {
    const Token& t = lex_.peek();
    size_t start = t.start;
    switch (t.kind) {
      case Tok::LParen: {
        lex_.take();
        Ast f = formula();
        lex_.expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::Bang: {
        lex_.take();
        return atom(true, start);
      }
      case Tok::BoolIdent:
        return atom(false, start);
      case Tok::Ident:
        if (t.text == "forall" || t.text == "exists") {
          bool universal = t.text == "forall";
          lex_.take();
          Variable v = variable();
          if (universal && v.kind == VarKind::Bool)
            throw ParseError("no universal Boolean quantifier", start,
                             lex_.peek().start);
          Ast body = primary();
          return guarded(start, [&] {
            if (v.kind == VarKind::Bool) return mk_exists_bool(v, body);
            return universal ? mk_forall_fo(v, body) : mk_exists_fo(v, body);
          });
        }
        return atom(false, start);
      default:
        lex_.fail("expected a formula");
    }
  }

  // Atoms and the two connective blocks; `negated` reflects a leading '!'.
  Ast atom(bool negated, size_t start) {
    const Token& t = lex_.peek();
    if (t.kind == Tok::BoolIdent) {
      Variable a = bool_var(lex_.take().text);
      return guarded(start, [&] { return mk_bool_lit(a, negated); });
    }
    if (t.kind != Tok::Ident) lex_.fail("expected an atom");
    if (t.text == "dep") {
      if (negated)
        throw ParseError("dependence atoms cannot be negated", start, t.end);
      return dep_atom(start);
    }
    if (t.text == "N" || t.text == "D") {
      // Contextual keyword: a connective block only when '[' follows.
      Token head = lex_.take();
      if (lex_.peek().kind == Tok::LBracket)
        return head.text == "N" ? npi_block(negated, start)
                                : sv_block(negated, start);
      return ident_atom(head, negated, start);
    }
    return ident_atom(lex_.take(), negated, start);
  }

  Ast ident_atom(const Token& head, bool negated, size_t start) {
    if (lex_.peek().kind == Tok::LParen) {
      lex_.take();
      std::vector<Variable> args;
      if (lex_.peek().kind != Tok::RParen) {
        args.push_back(fo_variable());
        while (lex_.peek().kind == Tok::Comma) {
          lex_.take();
          args.push_back(fo_variable());
        }
      }
      lex_.expect(Tok::RParen, "')'");
      check_arity(head, args.size());
      return guarded(start,
                     [&] { return mk_rel(head.text, args, negated); });
    }
    lex_.expect(Tok::Eq, "'=' or '('");
    Variable rhs = fo_variable();
    Variable lhs = fo_var(head.text);
    return guarded(start, [&] {
      return negated ? mk_not_equal(lhs, rhs) : mk_equal(lhs, rhs);
    });
  }

  Ast dep_atom(size_t start) {
    lex_.take();  // dep
    lex_.expect(Tok::LParen, "'('");
    std::vector<Variable> antecedent;
    if (lex_.peek().kind != Tok::Semi) {
      antecedent.push_back(fo_variable());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        antecedent.push_back(fo_variable());
      }
    }
    lex_.expect(Tok::Semi, "';'");
    Variable c = variable();
    lex_.expect(Tok::RParen, "')'");
    return guarded(start, [&] {
      return c.kind == VarKind::Bool ? mk_dep_bool(antecedent, c)
                                     : mk_dep_fo(antecedent, c);
    });
  }

  Ast npi_block(bool negated, size_t start) {
    lex_.take();  // [
    std::vector<NpiRow> rows;
    for (;;) {
      NpiRow row;
      while (lex_.peek().kind == Tok::Ident) {
        row.vars.push_back(fo_variable());
        if (lex_.peek().kind == Tok::Comma) lex_.take();
      }
      lex_.expect(Tok::Colon, "':'");
      row.witness = bool_var(lex_.expect(Tok::BoolIdent, "a '?' variable").text);
      rows.push_back(std::move(row));
      if (lex_.peek().kind != Tok::Pipe) break;
      lex_.take();
    }
    lex_.expect(Tok::RBracket, "']'");
    lex_.expect(Tok::LParen, "'('");
    Ast body = formula();
    lex_.expect(Tok::RParen, "')'");
    return guarded(start, [&] { return mk_npi(rows, body, negated); });
  }

  Ast sv_block(bool negated, size_t start) {
    lex_.take();  // [
    std::vector<std::vector<Variable>> rows;
    for (;;) {
      std::vector<Variable> row;
      row.push_back(fo_variable());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        row.push_back(fo_variable());
      }
      rows.push_back(std::move(row));
      if (lex_.peek().kind != Tok::Pipe) break;
      lex_.take();
    }
    lex_.expect(Tok::RBracket, "']'");
    lex_.expect(Tok::LBrace, "'{'");
    std::map<std::vector<int>, Ast> branches;
    for (;;) {
      Token bits = lex_.expect(Tok::Digits, "a bit string");
      std::vector<int> key;
      for (char c : bits.text) {
        if (c != '0' && c != '1')
          throw ParseError("branch labels are bit strings", bits.start, bits.end);
        key.push_back(c - '0');
      }
      if (key.size() != rows.size())
        throw ParseError("branch label length differs from the row count",
                         bits.start, bits.end);
      lex_.expect(Tok::Colon, "':'");
      Ast branch = formula();
      if (!branches.emplace(std::move(key), std::move(branch)).second)
        throw ParseError("duplicate branch label", bits.start, bits.end);
      if (lex_.peek().kind != Tok::Comma) break;
      lex_.take();
    }
    lex_.expect(Tok::RBrace, "'}'");
    return guarded(start, [&] { return mk_sv(rows, branches, negated); });
  }

  Variable variable() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::BoolIdent) return bool_var(lex_.take().text);
    if (t.kind == Tok::Ident) return fo_var(lex_.take().text);
    lex_.fail("expected a variable");
  }

  Variable fo_variable() {
    return fo_var(lex_.expect(Tok::Ident, "a first-order variable").text);
  }

  void check_arity(const Token& head, size_t arity) {
    auto [it, inserted] = arities_.emplace(head.text, arity);
    if (!inserted && it->second != arity)
      throw ParseError("relation '" + head.text + "' used with arity " +
                           std::to_string(arity) + " after arity " +
                           std::to_string(it->second),
                       head.start, head.end);
  }

  Lexer lex_;
  std::map<const Formula*, SourceSpan>* spans_;
  std::map<std::string, size_t> arities_;
};

}  // namespace

Ast parse_formula(const std::string& text,
                  std::map<const Formula*, SourceSpan>* spans) {
  return FormulaParser(text, spans).parse();
}

namespace {

std::string var_text(const Variable& v) {
  return v.kind == VarKind::Bool ? "?" + v.name : v.name;
}

void join_vars(std::ostringstream& out, const std::vector<Variable>& vars) {
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i) out << ", ";
    out << var_text(vars[i]);
  }
}

void print_rec(std::ostringstream& out, const Ast& f, const PrintOptions& opts);

// Recognizes the construction-time expansions of -> and <->.
bool try_resugar(std::ostringstream& out, const Ast& f, const PrintOptions& opts) {
  if (f->kind != NodeKind::Or) return false;
  const Ast& l = f->left;
  const Ast& r = f->right;
  if (l->kind == NodeKind::And && r->kind == NodeKind::And) {
    auto na = negate(l->left);
    auto nb = negate(l->right);
    if (na && nb && equal(*na, r->left) && equal(*nb, r->right)) {
      out << "(";
      print_rec(out, l->left, opts);
      out << " <-> ";
      print_rec(out, l->right, opts);
      out << ")";
      return true;
    }
  }
  if (auto nl = negate(l)) {
    out << "(";
    print_rec(out, *nl, opts);
    out << " -> ";
    print_rec(out, r, opts);
    out << ")";
    return true;
  }
  return false;
}

void print_rec(std::ostringstream& out, const Ast& f, const PrintOptions& opts) {
  switch (f->kind) {
    case NodeKind::Equal:
      out << f->args[0].name << " = " << f->args[1].name;
      return;
    case NodeKind::NotEqual:
      out << "!" << f->args[0].name << " = " << f->args[1].name;
      return;
    case NodeKind::RelAtom:
    case NodeKind::NegRelAtom:
      if (f->kind == NodeKind::NegRelAtom) out << "!";
      out << f->rel << "(";
      join_vars(out, f->args);
      out << ")";
      return;
    case NodeKind::BoolLit:
      out << "?" << f->consequent.name;
      return;
    case NodeKind::NegBoolLit:
      out << "!?" << f->consequent.name;
      return;
    case NodeKind::DepFO:
    case NodeKind::DepBool:
      out << "dep(";
      join_vars(out, f->args);
      out << "; " << var_text(f->consequent) << ")";
      return;
    case NodeKind::And:
      out << "(";
      print_rec(out, f->left, opts);
      out << " & ";
      print_rec(out, f->right, opts);
      out << ")";
      return;
    case NodeKind::Or:
      if (opts.resugar && try_resugar(out, f, opts)) return;
      out << "(";
      print_rec(out, f->left, opts);
      out << " | ";
      print_rec(out, f->right, opts);
      out << ")";
      return;
    case NodeKind::ExistsFO:
    case NodeKind::ForallFO:
    case NodeKind::ExistsBool:
      out << (f->kind == NodeKind::ForallFO ? "forall " : "exists ")
          << var_text(f->consequent) << " ";
      print_rec(out, f->left, opts);
      return;
    case NodeKind::NPi: {
      if (f->negated) out << "!";
      out << "N[";
      for (size_t i = 0; i < f->rows.size(); ++i) {
        if (i) out << " | ";
        join_vars(out, f->rows[i].vars);
        if (!f->rows[i].vars.empty()) out << " ";
        out << ": ?" << f->rows[i].witness.name;
      }
      out << "](";
      print_rec(out, f->left, opts);
      out << ")";
      return;
    }
    case NodeKind::SVConn: {
      if (f->negated) out << "!";
      out << "D[";
      for (size_t i = 0; i < f->sv_rows.size(); ++i) {
        if (i) out << " | ";
        join_vars(out, f->sv_rows[i]);
      }
      out << "]{";
      bool first = true;
      for (const auto& [bits, branch] : f->branches) {
        if (!first) out << ", ";
        first = false;
        for (int b : bits) out << b;
        out << " : ";
        print_rec(out, branch, opts);
      }
      out << "}";
      return;
    }
  }
}

}  // namespace

std::string print_formula(const Ast& f, const PrintOptions& opts) {
  std::ostringstream out;
  print_rec(out, f, opts);
  return out.str();
}

Structure parse_structure(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  size_t offset = 0;
  Structure out;
  bool have_domain = false;
  std::string current_rel;
  int current_arity = 0;
  while (std::getline(in, line)) {
    size_t line_start = offset;
    offset += line.size() + 1;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    auto fail = [&](const std::string& msg) -> void {
      throw ParseError(msg, line_start, line_start + line.size());
    };
    if (word == "domain") {
      int n = 0;
      if (have_domain) fail("duplicate domain line");
      if (!(ls >> n) || n <= 0) fail("domain needs a positive size");
      out.domain_size = n;
      have_domain = true;
    } else if (word == "rel") {
      std::string name;
      int ar = -1;
      if (!have_domain) fail("rel before domain");
      if (!(ls >> name >> ar) || ar < 0) fail("rel needs a name and an arity");
      if (out.voc.has(name)) fail("duplicate relation '" + name + "'");
      out.voc.add(name, ar);
      out.relations[name];
      current_rel = name;
      current_arity = ar;
    } else {
      if (current_rel.empty()) fail("tuple outside a rel section");
      std::vector<int> tuple;
      if (word == "()") {  // the 0-ary tuple has no elements to list
        if (current_arity != 0)
          fail("tuple arity differs from relation '" + current_rel + "'");
        out.relations[current_rel].insert(tuple);
        continue;
      }
      std::istringstream ts(line);
      int e = 0;
      while (ts >> e) {
        if (e < 0 || e >= out.domain_size) fail("element outside the domain");
        tuple.push_back(e);
      }
      if (!ts.eof()) fail("malformed tuple");
      if (static_cast<int>(tuple.size()) != current_arity)
        fail("tuple arity differs from relation '" + current_rel + "'");
      out.relations[current_rel].insert(tuple);
    }
  }
  if (!have_domain) throw ParseError("missing domain line", 0, text.size());
  return out;
}

std::string print_structure(const Structure& a) {
  std::ostringstream out;
  out << "domain " << a.domain_size << "\n";
  for (const auto& [name, ar] : a.voc.relations) {
    out << "rel " << name << " " << ar << "\n";
    auto it = a.relations.find(name);
    if (it == a.relations.end()) continue;
    for (const auto& tuple : it->second) {
      if (tuple.empty()) {
        out << "()\n";
        continue;
      }
      for (size_t i = 0; i < tuple.size(); ++i)
        out << (i ? " " : "") << tuple[i];
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace logic

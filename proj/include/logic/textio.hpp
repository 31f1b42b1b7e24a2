#pragma once

#include <map>
#include <string>

#include "logic/ast.hpp"
#include "logic/model.hpp"

namespace logic {

// Byte offsets into the parsed input, start <= end.
struct SourceSpan {
  size_t start = 0;
  size_t end = 0;
};

struct ParseError : std::runtime_error {
  ParseError(std::string msg, size_t start, size_t end)
      : std::runtime_error(std::move(msg)), span{start, end} {}
  SourceSpan span;
};

// Concrete formula syntax:
//   atoms        x = y   R(x, y)   ?a   dep(x1, x2; c)   dep(; c)
//   negation     leading ! on an atom or connective block
//   binary       (f & g)   (f | g); sugar (f -> g), (f <-> g) expands
//   quantifiers  forall x B   exists x B   exists ?a B   (B a primary)
//   N connective N[ x1, x2 : ?a | y : ?b ]( body )
//   D connective D[ x | y, z ]{ 00 : f, 01 : g, 10 : h, 11 : k }
// Variable names starting with the reserved prefix are rejected.
Ast parse_formula(const std::string& text,
                  std::map<const Formula*, SourceSpan>* spans = nullptr);

struct PrintOptions {
  // Fold (!a | b) back to (a -> b) and the biconditional expansion back
  // to (a <-> b) for display; the default form round-trips exactly.
  bool resugar = false;
};

std::string print_formula(const Ast& f, const PrintOptions& opts = {});

// Line format: `domain n`, then `rel NAME ARITY` headers each followed by
// one space-separated tuple per line.
Structure parse_structure(const std::string& text);
std::string print_structure(const Structure& a);

}  // namespace logic

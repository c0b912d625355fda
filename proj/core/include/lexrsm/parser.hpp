#pragma once

#include <stdexcept>
#include <string>

#include "lexrsm/ast.hpp"

namespace lexrsm {

class ParseError : public std::runtime_error {
 public:
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) +
                           ": " + msg),
        line(line_),
        col(col_) {}
};

// Statement grammar (# starts a line comment):
//   program  :=  stmt (';' stmt)*
//   stmt     :=  'skip'
//             |  ident ':=' rhs
//             |  'if' cond 'then' program ['else' program] 'fi'
//             |  'while' bexpr ['@invariant' '(' bexpr ')'] 'do' program 'od'
//   cond     :=  'star'  |  'prob' '(' number ')'  |  bexpr
//   bexpr    :=  'true'  |  atom ('and' atom)*
//   atom     :=  sum ('<'|'<='|'>'|'>='|'='|'=='|'!=') sum
//   rhs      :=  sum, where exactly one addend may be 'sample' '(' dist ')'
//                or 'ndet' '(' number ',' number ')' (coefficient 1)
//   dist     :=  'unif' '(' number ',' number ')' | 'norm' '(' number ',' number ')'
//   sum      :=  ['-'] term (('+'|'-') term)*
//   term     :=  number ['*' ident]  |  ident  |  '(' sum ')'
//   number   :=  digits ['.' digits]  |  digits '/' digits
// Multiplying two variables is a non-linearity error, not a syntax error.
StmtPtr parse_program(const std::string& text);

// One bexpr with nothing after it; used by invariant files.
BExpr parse_bexpr_text(const std::string& text);

}  // namespace lexrsm

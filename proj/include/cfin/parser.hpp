#ifndef CFIN_PARSER_HPP
#define CFIN_PARSER_HPP

#include <stdexcept>
#include <string>

#include "cfin/expr.hpp"

namespace cfin {

class ParseError : public std::runtime_error {
public:
    ParseError(size_t offset, const std::string& message)
        : std::runtime_error("parse error at byte " + std::to_string(offset) + ": " + message),
          offset(offset),
          message(message) {}
    size_t offset;
    std::string message;
};

/// Grammar:
///   expr    := term (('+'|'-') term)*
///   term    := factor (('*'|'/') factor)*
///   factor  := '-' factor | power
///   power   := atom ('^' exponent)?
///   atom    := number | ident | '(' expr ')' | ('exp'|'log'|'sqrt') '(' expr ')'
///   ident   := ('z'|'zb'|'e'|'eb') digits ; 'i' alone is the imaginary unit
///   number  := digits ['.' digits] [('e'|'E') ('+'|'-') digits] ['i']
///   exponent:= ['-'] number | '(' ['-'] number ')'
///
/// Exponent markers require an explicit sign so that e.g. "e3" always lexes
/// as the variable eta_3. Variable indices must lie in 1..n.
Expr parse(const std::string& source, int n);

/// Deterministic printer for the same grammar; children appear in the pool's
/// canonical (id-sorted) order, so parse(print(e)) == e for interned e.
std::string print(Expr e);

/// Shortest round-trip decimal form of a double (never loses precision).
std::string format_double(double x);

}  // namespace cfin

#endif

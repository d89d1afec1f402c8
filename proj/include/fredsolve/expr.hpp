#pragma once

#include <memory>
#include <string>

namespace fredsolve {

// Expression in one variable x. Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' unary)?
//   atom   := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func   := 'sin' | 'cos' | 'exp'
// Errors throw ParseError with a 1-based column; running off the end points at the last character.
class Expr {
public:
    struct Node;

    static Expr parse(const std::string& text);
    double operator()(double x) const;
    const std::string& text() const { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace fredsolve

#include "fredsolve/expr.hpp"
#include "fredsolve/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace fredsolve {

struct Expr::Node {
    enum class Kind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp } kind;
    double value = 0.0;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(double x) const {
        switch (kind) {
        case Kind::Num: return value;
        case Kind::Var: return x;
        case Kind::Neg: return -lhs->eval(x);
        case Kind::Add: return lhs->eval(x) + rhs->eval(x);
        case Kind::Sub: return lhs->eval(x) - rhs->eval(x);
        case Kind::Mul: return lhs->eval(x) * rhs->eval(x);
        case Kind::Div: return lhs->eval(x) / rhs->eval(x);
        case Kind::Pow: return std::pow(lhs->eval(x), rhs->eval(x));
        case Kind::Sin: return std::sin(lhs->eval(x));
        case Kind::Cos: return std::cos(lhs->eval(x));
        case Kind::Exp: return std::exp(lhs->eval(x));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    n->value = v;
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        skip();
        if (pos_ >= s_.size()) fail("empty expression");
        NodePtr e = expr();
        skip();
        if (pos_ < s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        const int col = static_cast<int>(pos_ < s_.size() ? pos_ + 1 : std::max<std::size_t>(s_.size(), 1));
        const std::string where = pos_ < s_.size() ? "" : " (end of input)";
        throw ParseError(col, "parse error at column " + std::to_string(col) + where + ": " + what);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Kind::Add, lhs, term());
            else if (accept('-')) lhs = make(Kind::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Kind::Mul, lhs, unary());
            else if (accept('/')) lhs = make(Kind::Div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Kind::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return make(Kind::Pow, base, unary());
        return base;
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("expected a value");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - begin);
            return make(Kind::Num, nullptr, nullptr, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return make(Kind::Var);
            if (name == "pi") return make(Kind::Num, nullptr, nullptr, std::numbers::pi);
            Kind k;
            if (name == "sin") k = Kind::Sin;
            else if (name == "cos") k = Kind::Cos;
            else if (name == "exp") k = Kind::Exp;
            else {
                pos_ = start;
                fail("unknown name '" + name + "'");
            }
            if (!accept('(')) fail("expected '(' after " + name);
            NodePtr arg = expr();
            if (!accept(')')) fail("expected ')'");
            return make(k, arg);
        }
        if (accept('(')) {
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        fail(std::string("unexpected '") + c + "'");
    }
};

} // namespace

Expr Expr::parse(const std::string& text) {
    Expr e;
    e.root_ = Parser(text).parse();
    e.text_ = text;
    return e;
}

double Expr::operator()(double x) const {
    return root_->eval(x);
}

} // namespace fredsolve

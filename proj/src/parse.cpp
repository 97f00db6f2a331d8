// Recursive-descent parser for the expression grammar:
//
//   expr     := term (('+' | '-') term)*
//   term     := unary (('*' | '/') unary)*
//   unary    := '-' unary | power
//   power    := primary ('^' exponent)*
//   exponent := ['-'] NUMBER | '(' ['-'] NUMBER ['/' NUMBER] ')'
//   primary  := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'
//
// A unary minus applied directly to a literal yields a negative constant, so
// the printer's "(-3)" round-trips.

#include <cctype>
#include <charconv>
#include <cstdlib>

#include "contactred/expr.hpp"

namespace contactred {

namespace {

std::shared_ptr<Node> make_node(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

class Parser {
public:
    Parser(std::string_view src, const Chart& chart) : src_(src), chart_(chart) {}

    NodePtr parse_all() {
        auto n = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return n;
    }

private:
    std::string_view src_;
    const Chart& chart_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    bool at_number() {
        const char c = peek();
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make_node(Op::Add, lhs, term());
            } else if (accept('-')) {
                lhs = make_node(Op::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_node(Op::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make_node(Op::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            const bool literal = at_number();
            auto operand = unary();
            if (literal && operand->op == Op::Const) {
                auto n = make_node(Op::Const);
                n->value = -operand->value;
                return n;
            }
            return make_node(Op::Neg, operand);
        }
        return power();
    }

    NodePtr power() {
        auto base = primary();
        while (accept('^')) {
            auto n = make_node(Op::Pow, base);
            n->exponent = exponent();
            base = n;
        }
        return base;
    }

    // Decimal literal read exactly as a fraction.
    Rational rational_literal() {
        skip_ws();
        const std::size_t start = pos_;
        std::int64_t num = 0;
        std::int64_t den = 1;
        bool any = false;
        bool frac = false;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                if (num > (INT64_MAX - 9) / 10 || den > INT64_MAX / 10) fail("exponent literal too long");
                num = num * 10 + (c - '0');
                if (frac) den *= 10;
                any = true;
            } else if (c == '.' && !frac) {
                frac = true;
            } else {
                break;
            }
            ++pos_;
        }
        if (!any) {
            pos_ = start;
            fail("exponent must be a rational constant");
        }
        return Rational::make(num, den);
    }

    Rational exponent() {
        if (accept('(')) {
            const bool neg = accept('-');
            Rational r = rational_literal();
            if (accept('/')) {
                const Rational d = rational_literal();
                if (d.num == 0) fail("zero denominator in exponent");
                r = Rational::make(r.num * d.den, r.den * d.num);
            }
            expect(')');
            return neg ? Rational::make(-r.num, r.den) : r;
        }
        const bool neg = accept('-');
        const Rational r = rational_literal();
        return neg ? Rational::make(-r.num, r.den) : r;
    }

    NodePtr primary() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            auto n = expr();
            expect(')');
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (c == '\0') fail("unexpected end of input");
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
            if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
                pos_ = q;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size()) {
            pos_ = start;
            fail("malformed number '" + text + "'");
        }
        auto n = make_node(Op::Const);
        n->value = v;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        const std::string name(src_.substr(start, pos_ - start));
        if (peek() == '(') {
            Op op;
            if (name == "sin") {
                op = Op::Sin;
            } else if (name == "cos") {
                op = Op::Cos;
            } else if (name == "exp") {
                op = Op::Exp;
            } else if (name == "log") {
                op = Op::Log;
            } else {
                throw UnknownIdentifier(name);
            }
            ++pos_;
            auto arg = expr();
            expect(')');
            return make_node(op, arg);
        }
        auto idx = chart_.index_of(name);
        if (!idx) throw UnknownIdentifier(name);
        auto n = make_node(Op::Var);
        n->var = *idx;
        return n;
    }
};

}  // namespace

Expr parse(std::string_view source, ChartPtr chart) {
    Parser p(source, *chart);
    auto node = p.parse_all();
    return Expr(std::move(chart), std::move(node));
}

}  // namespace contactred

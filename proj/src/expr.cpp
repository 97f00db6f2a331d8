#include "contactred/expr.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace contactred {

Chart::Chart(std::string name, std::vector<std::string> coords, std::vector<CoordDomain> domain)
    : name_(std::move(name)), coords_(std::move(coords)), domain_(std::move(domain)) {
    if (coords_.empty()) throw InvalidArgument("chart '" + name_ + "' has no coordinates");
    std::unordered_set<std::string> seen;
    for (const auto& c : coords_) {
        if (!seen.insert(c).second) throw InvalidArgument("duplicate coordinate '" + c + "' in chart '" + name_ + "'");
    }
    if (domain_.empty()) domain_.resize(coords_.size());
    if (domain_.size() != coords_.size()) throw InvalidArgument("chart '" + name_ + "': domain size mismatch");
    for (std::size_t i = 0; i < domain_.size(); ++i) {
        if (!(domain_[i].lo <= domain_[i].hi)) throw InvalidArgument("empty domain for coordinate '" + coords_[i] + "'");
    }
}

std::optional<std::size_t> Chart::index_of(std::string_view coord) const {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (coords_[i] == coord) return i;
    }
    return std::nullopt;
}

std::size_t Chart::require_index(std::string_view coord) const {
    auto idx = index_of(coord);
    if (!idx) throw UnknownIdentifier(std::string(coord));
    return *idx;
}

bool Chart::contains(std::span<const double> point) const {
    if (point.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!std::isfinite(point[i])) return false;
        if (point[i] < domain_[i].lo || point[i] > domain_[i].hi) return false;
        if (domain_[i].nonzero && point[i] == 0.0) return false;
    }
    return true;
}

ChartPtr make_chart(std::string name, std::vector<std::string> coords, std::vector<CoordDomain> domain) {
    return std::make_shared<const Chart>(std::move(name), std::move(coords), std::move(domain));
}

std::vector<Point> sample_points(const Chart& chart, const SamplingOptions& options) {
    std::mt19937_64 rng(options.seed);
    std::vector<Point> out;
    out.reserve(options.count);
    for (std::size_t n = 0; n < options.count; ++n) {
        Point x(chart.dim());
        for (std::size_t i = 0; i < chart.dim(); ++i) {
            const auto& d = chart.domain()[i];
            std::uniform_real_distribution<double> dist(d.lo, d.hi);
            if (!d.nonzero) {
                x[i] = dist(rng);
                continue;
            }
            if (std::max(std::abs(d.lo), std::abs(d.hi)) < options.nonzero_floor) {
                throw InvalidArgument("domain of '" + chart.coords()[i] + "' has no values above the nonzero floor");
            }
            do {
                x[i] = dist(rng);
            } while (std::abs(x[i]) < options.nonzero_floor);
        }
        out.push_back(std::move(x));
    }
    return out;
}

Rational Rational::make(std::int64_t num, std::int64_t den) {
    if (den == 0) throw InvalidArgument("rational exponent with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const auto g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

void require_same_chart(const Chart& a, const Chart& b, std::string_view context) {
    if (&a == &b || a.same_coords(b)) return;
    throw ChartMismatch(std::string(context) + ": charts '" + a.name() + "' and '" + b.name() + "' differ");
}

// ---------------------------------------------------------------------------
// node construction

namespace {

NodePtr raw_const(double v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

NodePtr raw_var(std::size_t i) {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->var = i;
    return n;
}

NodePtr raw_unary(Op op, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    return n;
}

NodePtr raw_binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

NodePtr raw_pow(NodePtr base, Rational e) {
    auto n = std::make_shared<Node>();
    n->op = Op::Pow;
    n->lhs = std::move(base);
    n->exponent = e;
    return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Op::Const; }

std::optional<double> real_pow(double base, Rational e) {
    if (base < 0.0) {
        if (e.den % 2 == 0) return std::nullopt;
        const double mag = std::pow(-base, e.value());
        return (e.num % 2 != 0) ? -mag : mag;
    }
    if (base == 0.0 && e.num < 0) return std::nullopt;
    return std::pow(base, e.value());
}

NodePtr f_neg(NodePtr a);

NodePtr f_add(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return raw_const(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return raw_binary(Op::Add, std::move(a), std::move(b));
}

NodePtr f_sub(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return raw_const(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return f_neg(std::move(b));
    if (a == b) return raw_const(0.0);
    return raw_binary(Op::Sub, std::move(a), std::move(b));
}

NodePtr f_mul(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return raw_const(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return raw_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a, -1.0)) return f_neg(std::move(b));
    if (is_const(b, -1.0)) return f_neg(std::move(a));
    if (a->op == Op::Neg && b->op == Op::Neg) return f_mul(a->lhs, b->lhs);
    // keep constants on the left so chains like 2*(3*x) fold
    if (is_const(b)) std::swap(a, b);
    if (is_const(a) && b->op == Op::Mul && is_const(b->lhs)) return f_mul(raw_const(a->value * b->lhs->value), b->rhs);
    return raw_binary(Op::Mul, std::move(a), std::move(b));
}

NodePtr f_div(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return raw_binary(Op::Div, std::move(a), std::move(b));
    if (is_const(a) && is_const(b)) return raw_const(a->value / b->value);
    if (is_const(a, 0.0)) return a;
    if (is_const(b, 1.0)) return a;
    if (is_const(b)) return f_mul(raw_const(1.0 / b->value), std::move(a));
    return raw_binary(Op::Div, std::move(a), std::move(b));
}

NodePtr f_neg(NodePtr a) {
    if (is_const(a)) return raw_const(-a->value);
    if (a->op == Op::Neg) return a->lhs;
    return raw_unary(Op::Neg, std::move(a));
}

NodePtr f_pow(NodePtr base, Rational e) {
    if (e.num == 0) return raw_const(1.0);
    if (e.num == 1 && e.den == 1) return base;
    if (is_const(base)) {
        if (auto v = real_pow(base->value, e)) return raw_const(*v);
    }
    if (base->op == Op::Pow) {
        // (x^a)^b = x^(ab) is only safe for integer outer exponents and odd-root inner ones
        const auto& inner = base->exponent;
        if (e.den == 1 && inner.den % 2 == 1) {
            return f_pow(base->lhs, Rational::make(inner.num * e.num, inner.den));
        }
    }
    return raw_pow(std::move(base), e);
}

NodePtr f_unary(Op op, NodePtr a) {
    if (is_const(a)) {
        const double v = a->value;
        switch (op) {
            case Op::Sin: return raw_const(std::sin(v));
            case Op::Cos: return raw_const(std::cos(v));
            case Op::Exp: return raw_const(std::exp(v));
            case Op::Log:
                if (v > 0.0) return raw_const(std::log(v));
                break;
            default: break;
        }
    }
    if (op == Op::Log && a->op == Op::Exp) return a->lhs;
    return raw_unary(op, std::move(a));
}

// ---------------------------------------------------------------------------
// printing

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string print(const Node& n, const Chart& chart);

std::string print_operand(const NodePtr& n, const Chart& chart) {
    // a bare nonnegative literal after unary minus would reparse as a negative literal
    if (n->op == Op::Const && !std::signbit(n->value)) return "(" + print(*n, chart) + ")";
    return print(*n, chart);
}

std::string print(const Node& n, const Chart& chart) {
    switch (n.op) {
        case Op::Const:
            if (std::signbit(n.value)) return "(" + format_double(n.value) + ")";
            return format_double(n.value);
        case Op::Var: return chart.coords()[n.var];
        case Op::Add: return "(" + print(*n.lhs, chart) + " + " + print(*n.rhs, chart) + ")";
        case Op::Sub: return "(" + print(*n.lhs, chart) + " - " + print(*n.rhs, chart) + ")";
        case Op::Mul: return "(" + print(*n.lhs, chart) + " * " + print(*n.rhs, chart) + ")";
        case Op::Div: return "(" + print(*n.lhs, chart) + " / " + print(*n.rhs, chart) + ")";
        case Op::Neg: return "(-" + print_operand(n.lhs, chart) + ")";
        case Op::Pow: {
            const auto& e = n.exponent;
            std::string ex;
            if (e.den == 1 && e.num >= 0) {
                ex = std::to_string(e.num);
            } else if (e.den == 1) {
                ex = "(" + std::to_string(e.num) + ")";
            } else {
                ex = "(" + std::to_string(e.num) + "/" + std::to_string(e.den) + ")";
            }
            return "(" + print(*n.lhs, chart) + " ^ " + ex + ")";
        }
        case Op::Sin: return "sin(" + print(*n.lhs, chart) + ")";
        case Op::Cos: return "cos(" + print(*n.lhs, chart) + ")";
        case Op::Exp: return "exp(" + print(*n.lhs, chart) + ")";
        case Op::Log: return "log(" + print(*n.lhs, chart) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// evaluation

double eval(const Node& n, std::span<const double> x, const Chart& chart) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var: return x[n.var];
        case Op::Add: return eval(*n.lhs, x, chart) + eval(*n.rhs, x, chart);
        case Op::Sub: return eval(*n.lhs, x, chart) - eval(*n.rhs, x, chart);
        case Op::Mul: return eval(*n.lhs, x, chart) * eval(*n.rhs, x, chart);
        case Op::Div: {
            const double num = eval(*n.lhs, x, chart);
            const double den = eval(*n.rhs, x, chart);
            if (den == 0.0) throw DomainError(print(n, chart), "division by zero");
            return num / den;
        }
        case Op::Neg: return -eval(*n.lhs, x, chart);
        case Op::Pow: {
            const double b = eval(*n.lhs, x, chart);
            auto v = real_pow(b, n.exponent);
            if (!v) {
                throw DomainError(print(n, chart), b == 0.0 ? "negative power of zero" : "even root of a negative number");
            }
            return *v;
        }
        case Op::Sin: return std::sin(eval(*n.lhs, x, chart));
        case Op::Cos: return std::cos(eval(*n.lhs, x, chart));
        case Op::Exp: return std::exp(eval(*n.lhs, x, chart));
        case Op::Log: {
            const double a = eval(*n.lhs, x, chart);
            if (!(a > 0.0)) throw DomainError(print(n, chart), "log of a nonpositive number");
            return std::log(a);
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// differentiation

using Memo = std::unordered_map<const Node*, NodePtr>;

NodePtr diff(const NodePtr& n, std::size_t k, Memo& memo) {
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    NodePtr out;
    switch (n->op) {
        case Op::Const: out = raw_const(0.0); break;
        case Op::Var: out = raw_const(n->var == k ? 1.0 : 0.0); break;
        case Op::Add: out = f_add(diff(n->lhs, k, memo), diff(n->rhs, k, memo)); break;
        case Op::Sub: out = f_sub(diff(n->lhs, k, memo), diff(n->rhs, k, memo)); break;
        case Op::Mul:
            out = f_add(f_mul(diff(n->lhs, k, memo), n->rhs), f_mul(n->lhs, diff(n->rhs, k, memo)));
            break;
        case Op::Div: {
            // (a/b)' = a'/b - a b' / b^2
            auto da = diff(n->lhs, k, memo);
            auto db = diff(n->rhs, k, memo);
            out = f_sub(f_div(da, n->rhs), f_div(f_mul(n->lhs, db), f_pow(n->rhs, Rational{2, 1})));
            break;
        }
        case Op::Neg: out = f_neg(diff(n->lhs, k, memo)); break;
        case Op::Pow: {
            const auto e = n->exponent;
            auto db = diff(n->lhs, k, memo);
            if (is_const(db, 0.0)) {
                out = raw_const(0.0);
                break;
            }
            auto lowered = f_pow(n->lhs, Rational::make(e.num - e.den, e.den));
            out = f_mul(f_mul(raw_const(e.value()), lowered), db);
            break;
        }
        case Op::Sin: out = f_mul(f_unary(Op::Cos, n->lhs), diff(n->lhs, k, memo)); break;
        case Op::Cos: out = f_neg(f_mul(f_unary(Op::Sin, n->lhs), diff(n->lhs, k, memo))); break;
        case Op::Exp: out = f_mul(n, diff(n->lhs, k, memo)); break;
        case Op::Log: out = f_div(diff(n->lhs, k, memo), n->lhs); break;
    }
    memo.emplace(n.get(), out);
    return out;
}

NodePtr refold(const NodePtr& n, Memo& memo) {
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    NodePtr out;
    switch (n->op) {
        case Op::Const:
        case Op::Var: out = n; break;
        case Op::Add: out = f_add(refold(n->lhs, memo), refold(n->rhs, memo)); break;
        case Op::Sub: out = f_sub(refold(n->lhs, memo), refold(n->rhs, memo)); break;
        case Op::Mul: out = f_mul(refold(n->lhs, memo), refold(n->rhs, memo)); break;
        case Op::Div: out = f_div(refold(n->lhs, memo), refold(n->rhs, memo)); break;
        case Op::Neg: out = f_neg(refold(n->lhs, memo)); break;
        case Op::Pow: out = f_pow(refold(n->lhs, memo), n->exponent); break;
        default: out = f_unary(n->op, refold(n->lhs, memo)); break;
    }
    memo.emplace(n.get(), out);
    return out;
}

NodePtr subst(const NodePtr& n, std::span<const NodePtr> images, Memo& memo) {
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    NodePtr out;
    switch (n->op) {
        case Op::Const: out = n; break;
        case Op::Var: out = images[n->var]; break;
        case Op::Add: out = f_add(subst(n->lhs, images, memo), subst(n->rhs, images, memo)); break;
        case Op::Sub: out = f_sub(subst(n->lhs, images, memo), subst(n->rhs, images, memo)); break;
        case Op::Mul: out = f_mul(subst(n->lhs, images, memo), subst(n->rhs, images, memo)); break;
        case Op::Div: out = f_div(subst(n->lhs, images, memo), subst(n->rhs, images, memo)); break;
        case Op::Neg: out = f_neg(subst(n->lhs, images, memo)); break;
        case Op::Pow: out = f_pow(subst(n->lhs, images, memo), n->exponent); break;
        default: out = f_unary(n->op, subst(n->lhs, images, memo)); break;
    }
    memo.emplace(n.get(), out);
    return out;
}

bool equal_nodes(const Node& a, const Node& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
        case Op::Const: return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
        case Op::Var: return a.var == b.var;
        case Op::Pow: return a.exponent == b.exponent && equal_nodes(*a.lhs, *b.lhs);
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: return equal_nodes(*a.lhs, *b.lhs) && equal_nodes(*a.rhs, *b.rhs);
        default: return equal_nodes(*a.lhs, *b.lhs);
    }
}

void count_nodes(const Node* n, std::unordered_set<const Node*>& seen) {
    if (!seen.insert(n).second) return;
    if (n->lhs) count_nodes(n->lhs.get(), seen);
    if (n->rhs) count_nodes(n->rhs.get(), seen);
}

}  // namespace

// ---------------------------------------------------------------------------
// Expr

Expr::Expr(ChartPtr chart, NodePtr node) : chart_(std::move(chart)), node_(std::move(node)) {
    if (!chart_ || !node_) throw InvalidArgument("Expr requires a chart and a node");
}

std::optional<double> Expr::constant_value() const {
    if (node_->op == Op::Const) return node_->value;
    return std::nullopt;
}

std::string Expr::to_string() const { return print(*node_, *chart_); }

double Expr::evaluate(std::span<const double> point) const {
    if (point.size() != chart_->dim()) {
        throw InvalidArgument("point has " + std::to_string(point.size()) + " entries, chart '" + chart_->name() +
                              "' has dimension " + std::to_string(chart_->dim()));
    }
    return eval(*node_, point, *chart_);
}

double Expr::evaluate(const std::map<std::string, double>& point) const {
    Point x(chart_->dim());
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto it = point.find(chart_->coords()[i]);
        if (it == point.end()) throw InvalidArgument("point does not assign coordinate '" + chart_->coords()[i] + "'");
        x[i] = it->second;
    }
    return evaluate(x);
}

std::size_t Expr::node_count() const {
    std::unordered_set<const Node*> seen;
    count_nodes(node_.get(), seen);
    return seen.size();
}

Expr constant(ChartPtr chart, double value) { return Expr(std::move(chart), raw_const(value)); }

Expr variable(ChartPtr chart, std::string_view name) {
    const auto idx = chart->require_index(name);
    return Expr(std::move(chart), raw_var(idx));
}

Expr variable(ChartPtr chart, std::size_t index) {
    if (index >= chart->dim()) throw InvalidArgument("coordinate index out of range");
    return Expr(std::move(chart), raw_var(index));
}

namespace {
const ChartPtr& common_chart(const Expr& a, const Expr& b) {
    require_same_chart(*a.chart(), *b.chart(), "expression arithmetic");
    return a.chart();
}
}  // namespace

Expr operator+(const Expr& a, const Expr& b) { return Expr(common_chart(a, b), f_add(a.node(), b.node())); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(common_chart(a, b), f_sub(a.node(), b.node())); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(common_chart(a, b), f_mul(a.node(), b.node())); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(common_chart(a, b), f_div(a.node(), b.node())); }
Expr operator-(const Expr& a) { return Expr(a.chart(), f_neg(a.node())); }
Expr operator*(double a, const Expr& b) { return Expr(b.chart(), f_mul(raw_const(a), b.node())); }
Expr operator+(const Expr& a, double b) { return Expr(a.chart(), f_add(a.node(), raw_const(b))); }
Expr pow(const Expr& base, Rational exponent) { return Expr(base.chart(), f_pow(base.node(), exponent)); }
Expr sin(const Expr& e) { return Expr(e.chart(), f_unary(Op::Sin, e.node())); }
Expr cos(const Expr& e) { return Expr(e.chart(), f_unary(Op::Cos, e.node())); }
Expr exp(const Expr& e) { return Expr(e.chart(), f_unary(Op::Exp, e.node())); }
Expr log(const Expr& e) { return Expr(e.chart(), f_unary(Op::Log, e.node())); }

Expr differentiate(const Expr& e, std::size_t coord_index) {
    if (coord_index >= e.chart()->dim()) throw InvalidArgument("coordinate index out of range");
    Memo memo;
    return Expr(e.chart(), diff(e.node(), coord_index, memo));
}

Expr differentiate(const Expr& e, std::string_view coord) {
    return differentiate(e, e.chart()->require_index(coord));
}

Expr fold_constants(const Expr& e) {
    Memo memo;
    return Expr(e.chart(), refold(e.node(), memo));
}

Expr substitute(const Expr& e, std::span<const Expr> images) {
    if (images.size() != e.chart()->dim()) {
        throw InvalidArgument("substitute: need one image per coordinate of chart '" + e.chart()->name() + "'");
    }
    if (images.empty()) return e;
    const auto& target = images.front().chart();
    std::vector<NodePtr> nodes;
    nodes.reserve(images.size());
    for (const auto& img : images) {
        require_same_chart(*img.chart(), *target, "substitute");
        nodes.push_back(img.node());
    }
    Memo memo;
    return Expr(target, subst(e.node(), nodes, memo));
}

Expr rechart(const Expr& e, ChartPtr target) {
    std::vector<Expr> images;
    images.reserve(e.chart()->dim());
    for (const auto& c : e.chart()->coords()) images.push_back(variable(target, c));
    return substitute(e, images);
}

bool structurally_equal(const Expr& a, const Expr& b) {
    return a.chart()->same_coords(*b.chart()) && equal_nodes(*a.node(), *b.node());
}

}  // namespace contactred

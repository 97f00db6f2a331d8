#pragma once

// Symbolic scalar expressions over the coordinates of a chart.
//
// An Expr is an immutable tree (a DAG once differentiated) whose leaves are
// numeric constants and chart coordinates. Parsing produces the literal tree;
// every other constructor goes through a constant-folding builder so that
// repeated differentiation stays small.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contactred/errors.hpp"

namespace contactred {

/// Closed interval for one coordinate; `nonzero` marks an ℝ^× coordinate
/// whose samples keep |value| >= floor.
struct CoordDomain {
    double lo = -1.0;
    double hi = 1.0;
    bool nonzero = false;
};

class Chart {
public:
    Chart(std::string name, std::vector<std::string> coords, std::vector<CoordDomain> domain = {});

    const std::string& name() const noexcept { return name_; }
    const std::vector<std::string>& coords() const noexcept { return coords_; }
    const std::vector<CoordDomain>& domain() const noexcept { return domain_; }
    std::size_t dim() const noexcept { return coords_.size(); }

    /// Index of a coordinate, or nullopt.
    std::optional<std::size_t> index_of(std::string_view coord) const;
    std::size_t require_index(std::string_view coord) const;

    bool contains(std::span<const double> point) const;

    /// Two charts are interchangeable when their coordinate lists agree.
    bool same_coords(const Chart& other) const noexcept { return coords_ == other.coords_; }

private:
    std::string name_;
    std::vector<std::string> coords_;
    std::vector<CoordDomain> domain_;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::string name, std::vector<std::string> coords, std::vector<CoordDomain> domain = {});

using Point = std::vector<double>;

struct SamplingOptions {
    std::size_t count = 100;
    std::uint64_t seed = 42;
    double nonzero_floor = 0.25;
};

/// Uniform samples from the chart's domain box. Deterministic in the seed.
std::vector<Point> sample_points(const Chart& chart, const SamplingOptions& options);

/// Exponent of a power node. Always stored reduced with den > 0.
struct Rational {
    std::int64_t num = 1;
    std::int64_t den = 1;

    static Rational make(std::int64_t num, std::int64_t den);
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Const;
    double value = 0.0;       // Const
    std::size_t var = 0;      // Var
    Rational exponent{};      // Pow
    NodePtr lhs;              // unary operand or left operand
    NodePtr rhs;              // right operand
};

class Expr {
public:
    Expr(ChartPtr chart, NodePtr node);

    const ChartPtr& chart() const noexcept { return chart_; }
    const NodePtr& node() const noexcept { return node_; }

    bool is_constant() const noexcept { return node_->op == Op::Const; }
    bool is_zero() const noexcept { return is_constant() && node_->value == 0.0; }
    std::optional<double> constant_value() const;

    /// Fully parenthesized infix form; parse(to_string()) is structurally equal.
    std::string to_string() const;

    double evaluate(std::span<const double> point) const;
    double evaluate(const std::map<std::string, double>& point) const;

    /// Number of distinct nodes reachable from the root.
    std::size_t node_count() const;

private:
    ChartPtr chart_;
    NodePtr node_;
};

Expr constant(ChartPtr chart, double value);
Expr variable(ChartPtr chart, std::string_view name);
Expr variable(ChartPtr chart, std::size_t index);

// Folding builders. All operands must live on the same chart.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(double a, const Expr& b);
Expr operator+(const Expr& a, double b);
Expr pow(const Expr& base, Rational exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);

Expr parse(std::string_view source, ChartPtr chart);

/// Exact partial derivative; result is constant folded.
Expr differentiate(const Expr& e, std::string_view coord);
Expr differentiate(const Expr& e, std::size_t coord_index);

/// Re-run the folding builders over a whole tree.
Expr fold_constants(const Expr& e);

/// Replace coordinate i of e's chart by images[i]; result lives on the
/// images' chart.
Expr substitute(const Expr& e, std::span<const Expr> images);

/// Move an expression to another chart by coordinate name.
Expr rechart(const Expr& e, ChartPtr target);

bool structurally_equal(const Expr& a, const Expr& b);

void require_same_chart(const Chart& a, const Chart& b, std::string_view context);

}  // namespace contactred

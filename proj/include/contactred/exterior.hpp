#pragma once

// Differential forms and vector fields with expression coefficients on a
// single chart, and the exterior calculus operations between them.

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "contactred/expr.hpp"

namespace contactred {

/// Strictly increasing coordinate indices of a basis k-form dx^{i1}∧…∧dx^{ik}.
using MultiIndex = std::vector<std::size_t>;

class DiffForm {
public:
    /// The zero form of the given degree.
    DiffForm(ChartPtr chart, std::size_t degree);

    /// Degree-0 form.
    static DiffForm scalar(const Expr& f);
    /// The basis 1-form dx^i.
    static DiffForm coordinate_differential(ChartPtr chart, std::size_t i);

    /// Adds coeff * dx^{indices}. Indices may be in any order; they are
    /// sorted with the permutation sign and repeated indices drop the term.
    void add_term(std::vector<std::size_t> indices, const Expr& coeff);

    const ChartPtr& chart() const noexcept { return chart_; }
    std::size_t degree() const noexcept { return degree_; }
    const std::map<MultiIndex, Expr>& coeffs() const noexcept { return coeffs_; }

    /// Coefficient of a normalized multi-index (zero when absent).
    Expr coeff(const MultiIndex& idx) const;

    /// True when no term survives constant folding.
    bool is_structurally_zero() const noexcept { return coeffs_.empty(); }

    /// Numeric coefficients at a point, keyed by multi-index.
    std::map<MultiIndex, double> evaluate(std::span<const double> point) const;

    /// Largest |coefficient| at a point (0 for the empty form).
    double sup_norm_at(std::span<const double> point) const;

    /// Covector of a 1-form at a point.
    Eigen::VectorXd covector_at(std::span<const double> point) const;

    std::string to_string() const;

private:
    ChartPtr chart_;
    std::size_t degree_;
    std::map<MultiIndex, Expr> coeffs_;
};

DiffForm operator+(const DiffForm& a, const DiffForm& b);
DiffForm operator-(const DiffForm& a, const DiffForm& b);
DiffForm operator*(const Expr& f, const DiffForm& a);
DiffForm operator*(double c, const DiffForm& a);

class VecField {
public:
    VecField(ChartPtr chart, std::vector<Expr> components);

    static VecField zero(ChartPtr chart);
    static VecField coordinate(ChartPtr chart, std::size_t i);

    const ChartPtr& chart() const noexcept { return chart_; }
    const std::vector<Expr>& components() const noexcept { return components_; }

    Eigen::VectorXd evaluate(std::span<const double> point) const;

    /// Directional derivative X(f) = Σ X^i ∂_i f.
    Expr apply(const Expr& f) const;

private:
    ChartPtr chart_;
    std::vector<Expr> components_;
};

VecField operator+(const VecField& a, const VecField& b);
VecField operator-(const VecField& a, const VecField& b);
VecField operator*(const Expr& f, const VecField& x);

/// Lie bracket [X, Y], computed symbolically.
VecField lie_bracket(const VecField& x, const VecField& y);

class SmoothMap {
public:
    SmoothMap(ChartPtr source, ChartPtr target, std::vector<Expr> components);

    static SmoothMap identity(ChartPtr chart);

    const ChartPtr& source() const noexcept { return source_; }
    const ChartPtr& target() const noexcept { return target_; }
    const std::vector<Expr>& components() const noexcept { return components_; }

    Point apply(std::span<const double> point) const;
    /// target.dim × source.dim Jacobian at a point.
    Eigen::MatrixXd jacobian_at(std::span<const double> point) const;

private:
    ChartPtr source_;
    ChartPtr target_;
    std::vector<Expr> components_;
};

DiffForm exterior_d(const DiffForm& alpha);
DiffForm wedge(const DiffForm& alpha, const DiffForm& beta);
/// Repeated wedge; power 0 is the constant 0-form 1.
DiffForm wedge_power(const DiffForm& alpha, std::size_t power);
DiffForm interior(const VecField& x, const DiffForm& alpha);
/// Cartan's formula i_X dα + d i_X α (for 0-forms, X(f)).
DiffForm lie_derivative(const VecField& x, const DiffForm& alpha);
DiffForm pullback(const SmoothMap& phi, const DiffForm& alpha);
/// Moves a form to another chart that contains its coordinates by name.
DiffForm rechart(const DiffForm& alpha, ChartPtr target);
VecField rechart(const VecField& x, ChartPtr target);

/// Antisymmetric matrix M[i][j] = α(∂_i, ∂_j) of a 2-form.
Eigen::MatrixXd form_matrix_at(const DiffForm& alpha, std::span<const double> point);

}  // namespace contactred

#include "contactred/exterior.hpp"

#include <algorithm>
#include <cmath>

namespace contactred {

namespace {

// Sorts indices in place, returning the permutation sign, or 0 on a repeat.
int normalize(std::vector<std::size_t>& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        for (std::size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
        }
    }
    for (std::size_t i = 1; i < idx.size(); ++i) {
        if (idx[i] == idx[i - 1]) return 0;
    }
    return sign;
}

}  // namespace

// ---------------------------------------------------------------------------
// DiffForm

DiffForm::DiffForm(ChartPtr chart, std::size_t degree) : chart_(std::move(chart)), degree_(degree) {
    if (!chart_) throw InvalidArgument("DiffForm requires a chart");
}

DiffForm DiffForm::scalar(const Expr& f) {
    DiffForm out(f.chart(), 0);
    out.add_term({}, f);
    return out;
}

DiffForm DiffForm::coordinate_differential(ChartPtr chart, std::size_t i) {
    DiffForm out(chart, 1);
    out.add_term({i}, constant(chart, 1.0));
    return out;
}

void DiffForm::add_term(std::vector<std::size_t> indices, const Expr& coeff) {
    if (indices.size() != degree_) throw InvalidArgument("term degree does not match form degree");
    require_same_chart(*coeff.chart(), *chart_, "DiffForm::add_term");
    for (auto i : indices) {
        if (i >= chart_->dim()) throw InvalidArgument("form index out of range");
    }
    const int sign = normalize(indices);
    if (sign == 0 || coeff.is_zero()) return;
    const Expr c = sign > 0 ? coeff : -coeff;
    auto it = coeffs_.find(indices);
    if (it == coeffs_.end()) {
        coeffs_.emplace(std::move(indices), Expr(chart_, c.node()));
        return;
    }
    Expr sum = it->second + c;
    if (sum.is_zero()) {
        coeffs_.erase(it);
    } else {
        it->second = sum;
    }
}

Expr DiffForm::coeff(const MultiIndex& idx) const {
    auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? constant(chart_, 0.0) : it->second;
}

std::map<MultiIndex, double> DiffForm::evaluate(std::span<const double> point) const {
    std::map<MultiIndex, double> out;
    for (const auto& [idx, c] : coeffs_) out.emplace(idx, c.evaluate(point));
    return out;
}

double DiffForm::sup_norm_at(std::span<const double> point) const {
    double m = 0.0;
    for (const auto& [idx, c] : coeffs_) m = std::max(m, std::abs(c.evaluate(point)));
    return m;
}

Eigen::VectorXd DiffForm::covector_at(std::span<const double> point) const {
    if (degree_ != 1) throw InvalidArgument("covector_at requires a 1-form");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(chart_->dim()));
    for (const auto& [idx, c] : coeffs_) v(static_cast<Eigen::Index>(idx[0])) = c.evaluate(point);
    return v;
}

std::string DiffForm::to_string() const {
    if (coeffs_.empty()) return "0";
    std::string out;
    for (const auto& [idx, c] : coeffs_) {
        if (!out.empty()) out += " + ";
        out += c.to_string();
        for (std::size_t k = 0; k < idx.size(); ++k) {
            out += (k == 0 ? " d" : "^d") + chart_->coords()[idx[k]];
        }
    }
    return out;
}

DiffForm operator+(const DiffForm& a, const DiffForm& b) {
    require_same_chart(*a.chart(), *b.chart(), "form addition");
    if (a.degree() != b.degree()) throw InvalidArgument("form addition: degree mismatch");
    DiffForm out = a;
    for (const auto& [idx, c] : b.coeffs()) out.add_term(idx, c);
    return out;
}

DiffForm operator-(const DiffForm& a, const DiffForm& b) { return a + (-1.0) * b; }

DiffForm operator*(const Expr& f, const DiffForm& a) {
    require_same_chart(*f.chart(), *a.chart(), "form scaling");
    DiffForm out(a.chart(), a.degree());
    for (const auto& [idx, c] : a.coeffs()) out.add_term(idx, f * c);
    return out;
}

DiffForm operator*(double c, const DiffForm& a) { return constant(a.chart(), c) * a; }

// ---------------------------------------------------------------------------
// VecField

VecField::VecField(ChartPtr chart, std::vector<Expr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
    if (components_.size() != chart_->dim()) throw InvalidArgument("vector field needs one component per coordinate");
    for (const auto& c : components_) require_same_chart(*c.chart(), *chart_, "VecField");
}

VecField VecField::zero(ChartPtr chart) {
    std::vector<Expr> comps(chart->dim(), constant(chart, 0.0));
    return VecField(chart, std::move(comps));
}

VecField VecField::coordinate(ChartPtr chart, std::size_t i) {
    std::vector<Expr> comps(chart->dim(), constant(chart, 0.0));
    comps.at(i) = constant(chart, 1.0);
    return VecField(chart, std::move(comps));
}

Eigen::VectorXd VecField::evaluate(std::span<const double> point) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(components_.size()));
    for (std::size_t i = 0; i < components_.size(); ++i) v(static_cast<Eigen::Index>(i)) = components_[i].evaluate(point);
    return v;
}

Expr VecField::apply(const Expr& f) const {
    require_same_chart(*f.chart(), *chart_, "VecField::apply");
    Expr out = constant(chart_, 0.0);
    for (std::size_t i = 0; i < components_.size(); ++i) {
        if (components_[i].is_zero()) continue;
        out = out + components_[i] * differentiate(f, i);
    }
    return out;
}

VecField operator+(const VecField& a, const VecField& b) {
    require_same_chart(*a.chart(), *b.chart(), "field addition");
    std::vector<Expr> c;
    for (std::size_t i = 0; i < a.components().size(); ++i) c.push_back(a.components()[i] + b.components()[i]);
    return VecField(a.chart(), std::move(c));
}

VecField operator-(const VecField& a, const VecField& b) {
    require_same_chart(*a.chart(), *b.chart(), "field subtraction");
    std::vector<Expr> c;
    for (std::size_t i = 0; i < a.components().size(); ++i) c.push_back(a.components()[i] - b.components()[i]);
    return VecField(a.chart(), std::move(c));
}

VecField operator*(const Expr& f, const VecField& x) {
    std::vector<Expr> c;
    for (const auto& comp : x.components()) c.push_back(f * comp);
    return VecField(x.chart(), std::move(c));
}

VecField lie_bracket(const VecField& x, const VecField& y) {
    require_same_chart(*x.chart(), *y.chart(), "lie_bracket");
    std::vector<Expr> c;
    for (std::size_t i = 0; i < x.components().size(); ++i) {
        c.push_back(x.apply(y.components()[i]) - y.apply(x.components()[i]));
    }
    return VecField(x.chart(), std::move(c));
}

// ---------------------------------------------------------------------------
// SmoothMap

SmoothMap::SmoothMap(ChartPtr source, ChartPtr target, std::vector<Expr> components)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
    if (components_.size() != target_->dim()) throw InvalidArgument("map needs one component per target coordinate");
    for (const auto& c : components_) require_same_chart(*c.chart(), *source_, "SmoothMap");
}

SmoothMap SmoothMap::identity(ChartPtr chart) {
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < chart->dim(); ++i) comps.push_back(variable(chart, i));
    return SmoothMap(chart, chart, std::move(comps));
}

Point SmoothMap::apply(std::span<const double> point) const {
    Point y(components_.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = components_[i].evaluate(point);
    return y;
}

Eigen::MatrixXd SmoothMap::jacobian_at(std::span<const double> point) const {
    const auto rows = static_cast<Eigen::Index>(target_->dim());
    const auto cols = static_cast<Eigen::Index>(source_->dim());
    Eigen::MatrixXd jac(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            jac(i, j) = differentiate(components_[static_cast<std::size_t>(i)], static_cast<std::size_t>(j)).evaluate(point);
        }
    }
    return jac;
}

// ---------------------------------------------------------------------------
// operations

DiffForm exterior_d(const DiffForm& alpha) {
    const auto& chart = alpha.chart();
    DiffForm out(chart, alpha.degree() + 1);
    for (const auto& [idx, c] : alpha.coeffs()) {
        for (std::size_t j = 0; j < chart->dim(); ++j) {
            if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
            Expr dc = differentiate(c, j);
            if (dc.is_zero()) continue;
            std::vector<std::size_t> merged{j};
            merged.insert(merged.end(), idx.begin(), idx.end());
            out.add_term(std::move(merged), dc);
        }
    }
    return out;
}

DiffForm wedge(const DiffForm& alpha, const DiffForm& beta) {
    require_same_chart(*alpha.chart(), *beta.chart(), "wedge");
    DiffForm out(alpha.chart(), alpha.degree() + beta.degree());
    if (out.degree() > alpha.chart()->dim()) return out;
    for (const auto& [ia, ca] : alpha.coeffs()) {
        for (const auto& [ib, cb] : beta.coeffs()) {
            std::vector<std::size_t> merged = ia;
            merged.insert(merged.end(), ib.begin(), ib.end());
            out.add_term(std::move(merged), ca * cb);
        }
    }
    return out;
}

DiffForm wedge_power(const DiffForm& alpha, std::size_t power) {
    DiffForm out = DiffForm::scalar(constant(alpha.chart(), 1.0));
    for (std::size_t k = 0; k < power; ++k) out = wedge(out, alpha);
    return out;
}

DiffForm interior(const VecField& x, const DiffForm& alpha) {
    require_same_chart(*x.chart(), *alpha.chart(), "interior");
    if (alpha.degree() == 0) throw InvalidArgument("interior product of a 0-form");
    DiffForm out(alpha.chart(), alpha.degree() - 1);
    for (const auto& [idx, c] : alpha.coeffs()) {
        for (std::size_t a = 0; a < idx.size(); ++a) {
            const Expr& xa = x.components()[idx[a]];
            if (xa.is_zero()) continue;
            std::vector<std::size_t> rest;
            for (std::size_t b = 0; b < idx.size(); ++b) {
                if (b != a) rest.push_back(idx[b]);
            }
            Expr term = xa * c;
            out.add_term(std::move(rest), a % 2 == 0 ? term : -term);
        }
    }
    return out;
}

DiffForm lie_derivative(const VecField& x, const DiffForm& alpha) {
    require_same_chart(*x.chart(), *alpha.chart(), "lie_derivative");
    if (alpha.degree() == 0) return DiffForm::scalar(x.apply(alpha.coeff({})));
    return interior(x, exterior_d(alpha)) + exterior_d(interior(x, alpha));
}

DiffForm pullback(const SmoothMap& phi, const DiffForm& alpha) {
    require_same_chart(*phi.target(), *alpha.chart(), "pullback");
    const auto& src = phi.source();
    // dφ^i as 1-forms on the source chart
    std::vector<DiffForm> dphi;
    for (const auto& comp : phi.components()) dphi.push_back(exterior_d(DiffForm::scalar(comp)));
    DiffForm out(src, alpha.degree());
    for (const auto& [idx, c] : alpha.coeffs()) {
        DiffForm term = DiffForm::scalar(substitute(c, phi.components()));
        for (auto i : idx) term = wedge(term, dphi[i]);
        out = out + term;
    }
    return out;
}

DiffForm rechart(const DiffForm& alpha, ChartPtr target) {
    const auto& src = *alpha.chart();
    std::vector<std::size_t> map(src.dim());
    for (std::size_t i = 0; i < src.dim(); ++i) map[i] = target->require_index(src.coords()[i]);
    DiffForm out(target, alpha.degree());
    for (const auto& [idx, c] : alpha.coeffs()) {
        std::vector<std::size_t> moved;
        for (auto i : idx) moved.push_back(map[i]);
        out.add_term(std::move(moved), rechart(c, target));
    }
    return out;
}

VecField rechart(const VecField& x, ChartPtr target) {
    std::vector<Expr> comps(target->dim(), constant(target, 0.0));
    const auto& src = *x.chart();
    for (std::size_t i = 0; i < src.dim(); ++i) {
        comps[target->require_index(src.coords()[i])] = rechart(x.components()[i], target);
    }
    return VecField(target, std::move(comps));
}

Eigen::MatrixXd form_matrix_at(const DiffForm& alpha, std::span<const double> point) {
    if (alpha.degree() != 2) throw InvalidArgument("form_matrix_at requires a 2-form");
    const auto n = static_cast<Eigen::Index>(alpha.chart()->dim());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [idx, c] : alpha.coeffs()) {
        const double v = c.evaluate(point);
        const auto i = static_cast<Eigen::Index>(idx[0]);
        const auto j = static_cast<Eigen::Index>(idx[1]);
        m(i, j) = v;
        m(j, i) = -v;
    }
    return m;
}

}  // namespace contactred

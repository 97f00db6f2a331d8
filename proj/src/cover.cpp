#include "contactred/cover.hpp"

#include <algorithm>
#include <cmath>

namespace contactred {

namespace {

double max_abs_difference(const DiffForm& a, const DiffForm& b, std::span<const double> x) {
    return (a - b).sup_norm_at(x);
}

}  // namespace

CoverBundle build_cover(const HyperplaneField& h, CoordDomain fibre) {
    const auto& base = *h.chart();
    if (base.index_of("s")) throw InvalidArgument("base chart already has a coordinate named 's'");
    auto coords = base.coords();
    coords.push_back("s");
    auto domain = base.domain();
    fibre.nonzero = true;
    domain.push_back(fibre);
    auto total = make_chart(base.name() + "xR*", coords, domain);
    const std::size_t s_index = coords.size() - 1;

    const DiffForm eta = rechart(h.eta(), total);
    const Expr s = variable(total, s_index);
    const DiffForm ds = DiffForm::coordinate_differential(total, s_index);
    DiffForm omega = wedge(ds, eta) + s * exterior_d(eta);
    DiffForm theta = s * eta;
    VecField euler = s * VecField::coordinate(total, s_index);
    return CoverBundle{h, total, s_index, eta, std::move(omega), std::move(theta), std::move(euler)};
}

Point lift_point(std::span<const double> y, double s) {
    Point x(y.begin(), y.end());
    x.push_back(s);
    return x;
}

Point base_point(std::span<const double> x) { return Point(x.begin(), x.end() - 1); }

DiffForm scaling_pullback(const CoverBundle& p, double lambda, const DiffForm& alpha) {
    if (lambda == 0.0) throw InvalidArgument("scaling_pullback: λ must be nonzero");
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < p.total->dim(); ++i) comps.push_back(variable(p.total, i));
    comps[p.s_index] = lambda * comps[p.s_index];
    return pullback(SmoothMap(p.total, p.total, std::move(comps)), alpha);
}

CoverReport check_cover(const CoverBundle& p, std::span<const Point> points) {
    CoverReport report;
    report.expected_rank = 2 * (p.base.claimed_r() + 1);
    const DiffForm d_theta = exterior_d(p.theta);
    const DiffForm i_euler = interior(p.euler, p.omega);
    std::vector<std::pair<double, DiffForm>> scaled;
    for (double lambda : kHomogeneityLambdas) scaled.emplace_back(lambda, scaling_pullback(p, lambda, p.omega));

    for (const auto& x : points) {
        CoverPointResult res;
        res.point = x;
        const auto rk = antisymmetric_rank(form_matrix_at(p.omega, x));
        res.omega_rank = rk.rank;
        res.omega_rank_marginal = rk.marginal;
        res.d_theta_residual = max_abs_difference(d_theta, p.omega, x);
        res.euler_residual = max_abs_difference(i_euler, p.theta, x);
        for (const auto& [lambda, pulled] : scaled) {
            res.homogeneity_residual = std::max(res.homogeneity_residual, max_abs_difference(pulled, lambda * p.omega, x));
        }
        if (res.omega_rank != report.expected_rank) report.rank_ok = false;
        report.marginal = report.marginal || rk.marginal;
        report.max_d_theta_residual = std::max(report.max_d_theta_residual, res.d_theta_residual);
        report.max_euler_residual = std::max(report.max_euler_residual, res.euler_residual);
        report.max_homogeneity_residual = std::max(report.max_homogeneity_residual, res.homogeneity_residual);
        report.points.push_back(std::move(res));
    }
    return report;
}

std::pair<bool, bool> characteristic_correspondence_check(const CoverBundle& p, std::span<const double> point,
                                                          const Eigen::VectorXd& y_vector, double a) {
    const auto n = static_cast<Eigen::Index>(p.total->dim());
    if (y_vector.size() != n - 1) throw InvalidArgument("tangent vector must live on the base chart");
    const double s = point[p.s_index];
    Eigen::VectorXd x(n);
    x.head(n - 1) = y_vector;
    x(n - 1) = -a * s;
    const Eigen::MatrixXd omega = form_matrix_at(p.omega, point);
    const bool up = (omega.transpose() * x).norm() <= 1e-8;

    const Point y = base_point(point);
    const Eigen::VectorXd eta = p.base.eta().covector_at(y);
    const Eigen::MatrixXd deta = form_matrix_at(p.base.d_eta(), y);
    // (i_Y dη)_j = Σ_i Y^i dη_{ij}
    const Eigen::VectorXd i_y_deta = deta.transpose() * y_vector;
    const bool down = std::abs(eta.dot(y_vector)) <= 1e-8 && (i_y_deta - a * eta).norm() <= 1e-8;
    return {up, down};
}

double characteristic_projection_angle(const CoverBundle& p, std::span<const double> point) {
    const Subspace up = kernel_of(form_matrix_at(p.omega, point));
    const auto n = static_cast<Eigen::Index>(p.total->dim());
    const Subspace projected = Subspace::span(up.basis().topRows(n - 1));
    const Subspace down = characteristic_subspace_at(p.base, base_point(point));
    return std::max(max_principal_angle(projected, down), max_principal_angle(down, projected));
}

bool homogeneous_hamiltonian_check(const CoverBundle& p, const Expr& hamiltonian, std::span<const Point> points) {
    require_same_chart(*hamiltonian.chart(), *p.total, "homogeneous_hamiltonian_check");
    const Expr euler_h = p.euler.apply(hamiltonian);
    return std::all_of(points.begin(), points.end(), [&](const Point& x) {
        const double h = hamiltonian.evaluate(x);
        return std::abs(euler_h.evaluate(x) - h) <= 1e-8 * (1.0 + std::abs(h));
    });
}

}  // namespace contactred

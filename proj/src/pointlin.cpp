#include "contactred/pointlin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace contactred {

namespace {

// Singular values at roundoff scale of a unit-scale problem count as zero
// even for matrices whose largest singular value is itself tiny.
constexpr double kAbsoluteFloor = 1e-13;

double threshold(double sigma_max, double tol_ratio) { return std::max(tol_ratio * sigma_max, kAbsoluteFloor); }

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return Eigen::VectorXd(0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues();
}

}  // namespace

Subspace::Subspace(Eigen::Index ambient) : ambient_(ambient), basis_(ambient, 0) {}

Subspace Subspace::span(const Eigen::MatrixXd& columns, double tol_ratio) {
    Subspace s(columns.rows());
    if (columns.cols() == 0 || columns.rows() == 0) return s;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double thr = threshold(sv.size() ? sv(0) : 0.0, tol_ratio);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > thr) ++r;
    s.basis_ = svd.matrixU().leftCols(r);
    return s;
}

Subspace Subspace::full(Eigen::Index ambient) {
    Subspace s(ambient);
    s.basis_ = Eigen::MatrixXd::Identity(ambient, ambient);
    return s;
}

Eigen::VectorXd Subspace::project(const Eigen::VectorXd& v) const { return basis_ * (basis_.transpose() * v); }

int rank_of(const Eigen::MatrixXd& m, double tol_ratio) {
    const auto sv = singular_values(m);
    if (sv.size() == 0) return 0;
    const double thr = threshold(sv(0), tol_ratio);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > thr) ++r;
    }
    return r;
}

AntisymmetricRank antisymmetric_rank(const Eigen::MatrixXd& m, double tol_ratio) {
    const auto sv = singular_values(m);
    AntisymmetricRank out;
    if (sv.size() == 0) return out;
    const double thr = threshold(sv(0), tol_ratio);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > thr) ++out.rank;
    }
    if (out.rank % 2 == 1) {
        out.marginal = true;
        if (sv(out.rank - 1) < 10.0 * thr) --out.rank;
    }
    return out;
}

Subspace kernel_of(const Eigen::MatrixXd& m, double tol_ratio) {
    const Eigen::Index n = m.cols();
    if (m.rows() == 0) return Subspace::full(n);
    Subspace s(n);
    if (n == 0) return s;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double thr = threshold(sv.size() ? sv(0) : 0.0, tol_ratio);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > thr) ++r;
    return Subspace::span(svd.matrixV().rightCols(n - r), tol_ratio);
}

Eigen::MatrixXd restrict_bilinear(const Eigen::MatrixXd& m, const Subspace& s) {
    if (m.rows() != s.ambient() || m.cols() != s.ambient()) {
        throw std::invalid_argument("restrict_bilinear: dimension mismatch");
    }
    return s.basis().transpose() * m * s.basis();
}

std::optional<AffineSolution> solve_affine(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol_ratio) {
    if (a.rows() != b.size()) throw std::invalid_argument("solve_affine: dimension mismatch");
    const Eigen::Index n = a.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (a.rows() > 0 && n > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double thr = threshold(sv.size() ? sv(0) : 0.0, tol_ratio);
        const Eigen::VectorXd utb = svd.matrixU().transpose() * b;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > thr) x += svd.matrixV().col(i) * (utb(i) / sv(i));
        }
    }
    const double residual = b.size() ? (a * x - b).norm() : 0.0;
    if (residual > 1e-8 * (1.0 + b.norm())) return std::nullopt;
    return AffineSolution{x, kernel_of(a, tol_ratio), residual};
}

double max_principal_angle(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient()) throw std::invalid_argument("principal angle: ambient mismatch");
    if (a.dim() > b.dim()) return std::numbers::pi / 2;
    if (a.empty()) return 0.0;
    const Eigen::MatrixXd residual = a.basis() - b.basis() * (b.basis().transpose() * a.basis());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
    const double s = std::min(1.0, svd.singularValues()(0));
    return std::asin(s);
}

bool contained_in(const Subspace& a, const Subspace& b, double angle_tol) {
    return max_principal_angle(a, b) <= angle_tol;
}

bool same_subspace(const Subspace& a, const Subspace& b, double angle_tol) {
    return a.dim() == b.dim() && contained_in(a, b, angle_tol) && contained_in(b, a, angle_tol);
}

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient()) throw std::invalid_argument("subspace_sum: ambient mismatch");
    Eigen::MatrixXd cols(a.ambient(), a.dim() + b.dim());
    cols << a.basis(), b.basis();
    return Subspace::span(cols);
}

Subspace orthogonal_complement(const Eigen::MatrixXd& m, const Subspace& s, double tol_ratio) {
    // Xᵀ M Y = 0 for all Y in s  <=>  (M B)ᵀ X = 0
    const Eigen::MatrixXd constraints = (m * s.basis()).transpose();
    return kernel_of(constraints, tol_ratio);
}

Subspace image(const Eigen::MatrixXd& map, const Subspace& s, double tol_ratio) {
    if (map.cols() != s.ambient()) throw std::invalid_argument("image: dimension mismatch");
    // s has an orthonormal basis, so the map's own scale bounds the image
    Subspace out(map.rows());
    if (s.empty() || map.rows() == 0) return out;
    const Eigen::MatrixXd cols = map * s.basis();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const auto scale = singular_values(map);
    const double thr = threshold(scale.size() ? scale(0) : 0.0, tol_ratio);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > thr) ++r;
    return Subspace::span(svd.matrixU().leftCols(r), tol_ratio);
}

}  // namespace contactred

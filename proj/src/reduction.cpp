#include "contactred/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace contactred {

namespace {

constexpr double kAngleTol = 1e-6;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double two_sided_angle(const Subspace& a, const Subspace& b) {
    return std::max(max_principal_angle(a, b), max_principal_angle(b, a));
}

Eigen::MatrixXd row_matrix(const Eigen::VectorXd& v) { return v.transpose(); }

// TN ∩ ker η for an orthonormal basis of TN; all of TN when η annihilates it.
Subspace hyperplane_part(const Eigen::MatrixXd& tangent, const Eigen::VectorXd& eta) {
    const Subspace coeffs = kernel_of(row_matrix(tangent.transpose() * eta));
    return Subspace::span(tangent * coeffs.basis());
}

Eigen::Index index(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

// ---------------------------------------------------------------------------
// constraint submanifolds

ConstraintSubmanifold::ConstraintSubmanifold(ChartPtr chart, std::vector<Expr> constraints)
    : chart_(std::move(chart)), constraints_(std::move(constraints)) {
    for (const auto& c : constraints_) {
        require_same_chart(*c.chart(), *chart_, "constraint");
        std::vector<Expr> grad;
        for (std::size_t i = 0; i < chart_->dim(); ++i) grad.push_back(differentiate(c, i));
        gradients_.push_back(std::move(grad));
    }
}

Eigen::VectorXd ConstraintSubmanifold::values_at(std::span<const double> point) const {
    Eigen::VectorXd v(index(codim()));
    for (std::size_t i = 0; i < codim(); ++i) v(index(i)) = constraints_[i].evaluate(point);
    return v;
}

Eigen::MatrixXd ConstraintSubmanifold::jacobian_at(std::span<const double> point) const {
    Eigen::MatrixXd j(index(codim()), index(chart_->dim()));
    for (std::size_t r = 0; r < codim(); ++r) {
        for (std::size_t c = 0; c < chart_->dim(); ++c) j(index(r), index(c)) = gradients_[r][c].evaluate(point);
    }
    return j;
}

double ConstraintSubmanifold::violation_at(std::span<const double> point) const {
    return codim() ? values_at(point).cwiseAbs().maxCoeff() : 0.0;
}

ConstraintSubmanifold lift_submanifold(const CoverBundle& p, const ConstraintSubmanifold& n) {
    require_same_chart(*n.chart(), *p.base_chart(), "lift_submanifold");
    std::vector<Expr> lifted;
    for (const auto& c : n.constraints()) lifted.push_back(rechart(c, p.total));
    return ConstraintSubmanifold(p.total, std::move(lifted));
}

ConstraintSubmanifold base_submanifold(const CoverBundle& p, const ConstraintSubmanifold& n) {
    require_same_chart(*n.chart(), *p.total, "base_submanifold");
    const auto& base = p.base_chart();
    std::vector<Expr> images;
    for (std::size_t i = 0; i < base->dim(); ++i) images.push_back(variable(base, i));
    images.push_back(constant(base, 1.0));
    std::vector<Expr> out;
    for (const auto& c : n.constraints()) out.push_back(substitute(c, images));
    return ConstraintSubmanifold(base, std::move(out));
}

std::optional<Point> project_onto(const ConstraintSubmanifold& n, Point start, int max_iterations) {
    if (n.codim() == 0) return start;
    try {
        for (int it = 0; it < max_iterations; ++it) {
            const Eigen::VectorXd c = n.values_at(start);
            if (!c.allFinite()) return std::nullopt;
            if (c.cwiseAbs().maxCoeff() <= 1e-3 * kOnSubmanifoldTol) break;
            const Eigen::VectorXd step = n.jacobian_at(start).completeOrthogonalDecomposition().solve(c);
            for (std::size_t i = 0; i < start.size(); ++i) start[i] -= step(index(i));
        }
        if (n.violation_at(start) > kOnSubmanifoldTol) return std::nullopt;
    } catch (const DomainError&) {
        return std::nullopt;
    }
    return start;
}

bool is_excluded(std::span<const Expr> excluded, std::span<const double> point) {
    for (const auto& e : excluded) {
        try {
            if (std::abs(e.evaluate(point)) < kExclusionRadius) return true;
        } catch (const DomainError&) {
            return true;
        }
    }
    return false;
}

std::vector<Point> sample_on(const ConstraintSubmanifold& n, const SamplingOptions& options,
                             std::span<const Expr> excluded) {
    const auto& chart = *n.chart();
    std::vector<Point> out;
    for (std::uint64_t batch = 0; batch < 64 && out.size() < options.count; ++batch) {
        SamplingOptions o = options;
        o.seed = options.seed + batch * 0x9E3779B97F4A7C15ULL;
        o.count = std::max<std::size_t>(options.count, 16);
        for (auto& x : sample_points(chart, o)) {
            if (out.size() >= options.count) break;
            auto y = project_onto(n, std::move(x));
            if (!y || !chart.contains(*y)) continue;
            bool below_floor = false;
            for (std::size_t i = 0; i < chart.dim(); ++i) {
                if (chart.domain()[i].nonzero && std::abs((*y)[i]) < options.nonzero_floor) below_floor = true;
            }
            if (below_floor || is_excluded(excluded, *y)) continue;
            if (n.codim() && rank_of(n.jacobian_at(*y)) != static_cast<int>(n.codim())) continue;
            out.push_back(std::move(*y));
        }
    }
    return out;
}

Subspace tangent_space_at(const ConstraintSubmanifold& n, std::span<const double> point) {
    const auto dim = index(n.chart()->dim());
    if (n.codim() == 0) return Subspace::full(dim);
    const double v = n.violation_at(point);
    if (v > kOnSubmanifoldTol) throw InvalidArgument("tangent_space_at: point violates the constraints by " + fmt(v));
    const Eigen::MatrixXd j = n.jacobian_at(point);
    const int r = rank_of(j);
    if (r != static_cast<int>(n.codim())) {
        throw InvalidArgument("tangent_space_at: constraint Jacobian has rank " + std::to_string(r) + " < " +
                              std::to_string(n.codim()));
    }
    return kernel_of(j);
}

// ---------------------------------------------------------------------------
// classification

SubmanifoldClass classify_at(const CoverBundle& p, const ConstraintSubmanifold& n, std::span<const double> y,
                             const ClassifyOptions& options) {
    require_same_chart(*n.chart(), *p.base_chart(), "classify_at");
    SubmanifoldClass out;
    out.point.assign(y.begin(), y.end());
    const double tol = options.annihilation_tol;

    const Eigen::MatrixXd b = tangent_space_at(n, y).basis();
    const Eigen::VectorXd eta = p.base.eta().covector_at(y);
    const Eigen::MatrixXd deta = form_matrix_at(p.base.d_eta(), y);
    out.eta_on_tangent = (b.transpose() * eta).norm();
    out.deta_on_tangent = max_abs(b.transpose() * deta * b);
    out.transversal = out.eta_on_tangent > tol;
    out.isotropic = out.eta_on_tangent <= tol && out.deta_on_tangent <= tol;

    const Subspace c_n = out.transversal ? hyperplane_part(b, eta) : Subspace::span(b);
    out.k_base = static_cast<int>(kernel_of(restrict_bilinear(deta, c_n)).dim());

    // TÑ = TN ⊕ ℝ∂_s: base constraints do not involve s
    const Point x = lift_point(y, options.fibre_value);
    const auto m = b.rows();
    Eigen::MatrixXd bt = Eigen::MatrixXd::Zero(m + 1, b.cols() + 1);
    bt.topLeftCorner(m, b.cols()) = b;
    bt(m, b.cols()) = 1.0;
    const Subspace t = Subspace::span(bt);
    const Eigen::MatrixXd omega = form_matrix_at(p.omega, x);
    const Subspace k_omega = kernel_of(omega);
    const Subspace w = orthogonal_complement(omega, t);
    const Subspace t_plus_k = subspace_sum(t, k_omega);
    out.coisotropy_angle = max_principal_angle(w, t_plus_k);
    out.coisotropic = out.coisotropy_angle <= kAngleTol;
    out.legendrian = out.isotropic && out.coisotropic;

    const Eigen::MatrixXd restricted = restrict_bilinear(omega, t);
    const Subspace kr = Subspace::span(t.basis() * kernel_of(restricted).basis());
    out.k_cover = static_cast<int>(kr.dim());
    Eigen::MatrixXd vertical = Eigen::MatrixXd::Zero(m + 1, 1);
    vertical(m, 0) = 1.0;
    out.vertical_kernel = !kr.empty() && contained_in(Subspace::span(vertical), kr);

    out.cover_isotropic = max_abs(restricted) <= tol;
    out.cover_lagrangian = out.cover_isotropic && same_subspace(subspace_sum(w, k_omega), t_plus_k);
    out.coherent = out.cover_isotropic == out.isotropic && out.cover_lagrangian == out.legendrian;
    return out;
}

ConstantRankReport constant_rank_check(const CoverBundle& p, const ConstraintSubmanifold& n,
                                       std::span<const Point> points, const ClassifyOptions& options) {
    ConstantRankReport report;
    for (const auto& y : points) {
        auto c = classify_at(p, n, y, options);
        report.all_transversal = report.all_transversal && c.transversal;
        report.no_vertical_kernel = report.no_vertical_kernel && !c.vertical_kernel;
        report.coherent = report.coherent && c.coherent;
        if (report.points.empty()) {
            report.k_base = c.k_base;
            report.k_cover = c.k_cover;
        } else {
            if (report.k_base && *report.k_base != c.k_base) report.k_base.reset(), report.k_base_constant = false;
            if (report.k_cover && *report.k_cover != c.k_cover) report.k_cover.reset(), report.k_cover_constant = false;
        }
        report.points.push_back(std::move(c));
    }
    return report;
}

Subspace restricted_kernel_at(const CoverBundle& p, const ConstraintSubmanifold& n_total,
                              std::span<const double> point) {
    require_same_chart(*n_total.chart(), *p.total, "restricted_kernel_at");
    const Subspace t = tangent_space_at(n_total, point);
    const Eigen::MatrixXd omega = form_matrix_at(p.omega, point);
    return Subspace::span(t.basis() * kernel_of(restrict_bilinear(omega, t)).basis());
}

// ---------------------------------------------------------------------------
// actions

StructureConstants::StructureConstants(std::size_t k) : k_(k), data_(k * k * k, 0.0) {}

void StructureConstants::set_bracket(std::size_t i, std::size_t j, std::size_t l, double value) {
    set(l, i, j, value);
    set(l, j, i, -value);
}

double StructureConstants::antisymmetry_residual() const {
    double worst = 0.0;
    for (std::size_t l = 0; l < k_; ++l) {
        for (std::size_t i = 0; i < k_; ++i) {
            for (std::size_t j = 0; j < k_; ++j) worst = std::max(worst, std::abs((*this)(l, i, j) + (*this)(l, j, i)));
        }
    }
    return worst;
}

double StructureConstants::jacobi_residual() const {
    double worst = 0.0;
    const auto& c = *this;
    for (std::size_t i = 0; i < k_; ++i) {
        for (std::size_t j = 0; j < k_; ++j) {
            for (std::size_t k = 0; k < k_; ++k) {
                for (std::size_t l = 0; l < k_; ++l) {
                    double sum = 0.0;
                    for (std::size_t m = 0; m < k_; ++m) {
                        sum += c(m, i, j) * c(l, m, k) + c(m, j, k) * c(l, m, i) + c(m, k, i) * c(l, m, j);
                    }
                    worst = std::max(worst, std::abs(sum));
                }
            }
        }
    }
    return worst;
}

ActionValidation validate_action(const ActionSpec& a, const HyperplaneField& h, std::span<const Point> base_points) {
    ActionValidation out;
    const std::size_t k = a.dim();
    if (a.constants.dim() != k || a.fields.size() != k) {
        out.failures.push_back("basis, structure constants and fields disagree in size");
        return out;
    }
    for (const auto& f : a.fields) require_same_chart(*f.chart(), *h.chart(), "action field");
    out.antisymmetry_residual = a.constants.antisymmetry_residual();
    out.jacobi_residual = a.constants.jacobi_residual();
    if (out.antisymmetry_residual > kStructureTol) {
        out.failures.push_back("structure constants not antisymmetric, residual " + fmt(out.antisymmetry_residual));
    }
    if (out.jacobi_residual > kStructureTol) {
        out.failures.push_back("structure constants violate the Jacobi identity, residual " + fmt(out.jacobi_residual));
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (const auto& y : base_points) {
            if (!conformal_factor_at(h, a.fields[i], y)) {
                out.contact = false;
                out.failures.push_back("field '" + a.basis[i] + "' is not a contact field");
                break;
            }
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            VecField diff = lie_bracket(a.fields[i], a.fields[j]);
            for (std::size_t l = 0; l < k; ++l) {
                const double c = a.constants(l, i, j);
                if (c != 0.0) diff = diff - constant(h.chart(), c) * a.fields[l];
            }
            double worst = 0.0;
            for (const auto& y : base_points) worst = std::max(worst, diff.evaluate(y).cwiseAbs().maxCoeff());
            out.closure_residual = std::max(out.closure_residual, worst);
            if (worst > kClosureTol) {
                out.failures.push_back("[" + a.basis[i] + ", " + a.basis[j] +
                                       "] does not match the structure constants, residual " + fmt(worst));
            }
        }
    }
    return out;
}

std::vector<Expr> moment_map(const ActionSpec& a, const CoverBundle& p) {
    std::vector<Expr> out;
    for (const auto& f : a.fields) {
        const Expr pairing = interior(rechart(f, p.total), p.eta).coeff({});
        out.push_back(p.s() * pairing);
    }
    return out;
}

Eigen::VectorXd moment_value_at(const ActionSpec& a, const CoverBundle& p, std::span<const double> x) {
    const Point y = base_point(x);
    const Eigen::VectorXd eta = p.base.eta().covector_at(y);
    const double s = x[p.s_index];
    Eigen::VectorXd j(index(a.dim()));
    for (std::size_t i = 0; i < a.dim(); ++i) j(index(i)) = s * eta.dot(a.fields[i].evaluate(y));
    return j;
}

Eigen::MatrixXd moment_jacobian_at(const ActionSpec& a, const CoverBundle& p, std::span<const double> x) {
    const auto moment = moment_map(a, p);
    Eigen::MatrixXd j(index(a.dim()), index(p.total->dim()));
    for (std::size_t i = 0; i < moment.size(); ++i) {
        for (std::size_t c = 0; c < p.total->dim(); ++c) j(index(i), index(c)) = differentiate(moment[i], c).evaluate(x);
    }
    return j;
}

Eigen::MatrixXd lifts_at(const ActionSpec& a, const CoverBundle& p, std::span<const double> x, bool drop_vertical) {
    const Point y = base_point(x);
    const auto n = index(p.total->dim());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, index(a.dim()));
    for (std::size_t i = 0; i < a.dim(); ++i) {
        out.col(index(i)).head(n - 1) = a.fields[i].evaluate(y);
        if (drop_vertical) continue;
        const auto g = conformal_factor_at(p.base, a.fields[i], y);
        if (!g) throw NotContact("field '" + a.basis[i] + "' is not a contact field");
        out(n - 1, index(i)) = -*g * x[p.s_index];
    }
    return out;
}

double moment_kernel_angle(const ActionSpec& a, const CoverBundle& p, std::span<const double> x, bool drop_vertical) {
    const Subspace k_j = kernel_of(moment_jacobian_at(a, p, x));
    const Subspace g_hat = Subspace::span(lifts_at(a, p, x, drop_vertical));
    const Subspace w = orthogonal_complement(form_matrix_at(p.omega, x), g_hat);
    return two_sided_angle(k_j, w);
}

bool moment_kernel_check(const ActionSpec& a, const CoverBundle& p, std::span<const double> x, bool drop_vertical) {
    return moment_kernel_angle(a, p, x, drop_vertical) <= kAngleTol;
}

Subspace g0mu(const StructureConstants& c, const Eigen::VectorXd& mu) {
    const std::size_t k = c.dim();
    if (static_cast<std::size_t>(mu.size()) != k) throw InvalidArgument("g0mu: μ has the wrong length");
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(index(k + 1), index(k));
    system.row(0) = mu.transpose();
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
            double v = 0.0;
            for (std::size_t l = 0; l < k; ++l) v += c(l, i, j) * mu(index(l));
            system(index(j + 1), index(i)) = v;
        }
    }
    return kernel_of(system);
}

double equivariance_residual(const ActionSpec& a, const CoverBundle& p, std::span<const double> x) {
    const Eigen::MatrixXd dj = moment_jacobian_at(a, p, x);
    const Eigen::MatrixXd lifts = lifts_at(a, p, x);
    const Eigen::VectorXd j = moment_value_at(a, p, x);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t k = 0; k < a.dim(); ++k) {
            double expected = 0.0;
            for (std::size_t l = 0; l < a.dim(); ++l) expected += a.constants(l, i, k) * j(index(l));
            worst = std::max(worst, std::abs(dj.row(index(k)).dot(lifts.col(index(i))) - expected));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// reductions

ReductionReport verify_reduction(const CoverBundle& p, const ConstraintSubmanifold& n_total, const QuotientData& q,
                                 std::span<const Point> samples) {
    require_same_chart(*n_total.chart(), *p.total, "verify_reduction");
    require_same_chart(*q.map.source(), *p.total, "quotient map");
    ReductionReport report;
    report.reduced_dim = q.map.target()->dim();

    std::optional<DiffForm> pulled;
    if (q.omega0) pulled = pullback(q.map, rechart(*q.omega0, q.map.target()));

    std::optional<ConstraintSubmanifold> base_n;
    std::optional<DiffForm> eta0;
    if (q.base_map && q.eta0) {
        require_same_chart(*q.base_map->source(), *p.base_chart(), "base quotient map");
        base_n = base_submanifold(p, n_total);
        eta0 = rechart(*q.eta0, q.base_map->target());
        report.reduced_base_dim = q.base_map->target()->dim();
    }

    if (samples.empty()) report.failures.push_back("no sample points on the submanifold");
    for (std::size_t idx = 0; idx < samples.size(); ++idx) {
        const auto& x = samples[idx];
        const std::string tag = "sample " + std::to_string(idx) + " ";
        ReductionSample res;
        res.point = x;
        Subspace t(0);
        try {
            t = tangent_space_at(n_total, x);
        } catch (const InvalidArgument& e) {
            report.failures.push_back(tag + e.what());
            report.samples.push_back(std::move(res));
            continue;
        }
        const Eigen::MatrixXd b = t.basis();
        const Eigen::MatrixXd jpi = q.map.jacobian_at(x);
        res.map_rank = rank_of(jpi * b);
        if (res.map_rank != static_cast<int>(report.reduced_dim)) {
            report.failures.push_back(tag + "(a): quotient map restricted to TN has rank " +
                                      std::to_string(res.map_rank) + ", expected " +
                                      std::to_string(report.reduced_dim));
        }

        const Eigen::MatrixXd omega = form_matrix_at(p.omega, x);
        const Eigen::MatrixXd kernel = b * kernel_of(b.transpose() * omega * b).basis();
        res.kernel_dim = static_cast<int>(kernel.cols());
        res.kernel_residual = max_abs(jpi * kernel);
        report.max_kernel_residual = std::max(report.max_kernel_residual, res.kernel_residual);
        if (res.kernel_residual > kReductionTol) {
            report.failures.push_back(tag + "(b): kernel of ω|N not tangent to the fibres, residual " +
                                      fmt(res.kernel_residual));
        }

        if (pulled) {
            const double r = max_abs(b.transpose() * (form_matrix_at(*pulled, x) - omega) * b);
            res.pullback_residual = r;
            report.max_pullback_residual = std::max(report.max_pullback_residual.value_or(0.0), r);
            if (r > kReductionTol) {
                report.failures.push_back(tag + "(c): pulled-back reduced form differs from ω on TN by " + fmt(r));
            }
        }

        if (base_n) {
            const Point y = base_point(x);
            const Eigen::MatrixXd tb = tangent_space_at(*base_n, y).basis();
            const Subspace c_n = hyperplane_part(tb, p.base.eta().covector_at(y));
            const Subspace mapped = image(q.base_map->jacobian_at(y), c_n);
            const Point y0 = q.base_map->apply(y);
            const Subspace c0 = kernel_of(row_matrix(eta0->covector_at(y0)));
            const double angle = two_sided_angle(mapped, c0);
            res.base_angle = angle;
            report.max_base_angle = std::max(report.max_base_angle.value_or(0.0), angle);
            if (angle > kAngleTol) {
                report.failures.push_back(tag + "(base): image of C ∩ TN differs from ker η₀, angle " + fmt(angle));
            }
        }
        report.samples.push_back(std::move(res));
    }
    return report;
}

MwmReport mwm_pipeline(const ActionSpec& a, const CoverBundle& p, const Eigen::VectorXd& mu, const QuotientData* q,
                       const MwmOptions& options) {
    const std::size_t k = a.dim();
    if (static_cast<std::size_t>(mu.size()) != k) throw InvalidArgument("mwm: μ has the wrong length");
    MwmReport report;
    report.mu = mu;
    report.moment = moment_map(a, p);
    report.g0mu_space = g0mu(a.constants, mu);
    const bool zero_level = mu.cwiseAbs().maxCoeff() == 0.0;

    {
        // a moment map vanishing on all of P has every point as a zero level
        SamplingOptions probe = options.sampling;
        probe.count = std::min<std::size_t>(probe.count, 32);
        double max_j = 0.0;
        for (const auto& x : sample_on(ConstraintSubmanifold(p.total, {}), probe, options.excluded)) {
            max_j = std::max(max_j, moment_value_at(a, p, x).cwiseAbs().maxCoeff());
        }
        if (max_j <= 1e-12) {
            report.degenerate = true;
            report.note = "degenerate: J vanishes identically, so no level is weakly regular";
            report.failures.push_back("moment map vanishes identically on the samples");
            return report;
        }
    }

    std::vector<Expr> excluded = options.excluded;
    std::size_t pivot = 0;
    if (zero_level) {
        report.level_constraints = report.moment;
    } else {
        mu.cwiseAbs().maxCoeff(&pivot);
        for (std::size_t b = 0; b < k; ++b) {
            if (b == pivot) continue;
            report.level_constraints.push_back(mu(index(pivot)) * report.moment[b] -
                                               mu(index(b)) * report.moment[pivot]);
        }
        // J = 0 is not part of P_[μ]
        excluded.push_back(report.moment[pivot]);
    }
    const ConstraintSubmanifold level(p.total, report.level_constraints);
    const auto points = sample_on(level, options.sampling, excluded);
    report.samples = points.size();
    if (points.size() < options.sampling.count) {
        report.failures.push_back("only " + std::to_string(points.size()) + " of " +
                                  std::to_string(options.sampling.count) + " sample points found on P_[mu]");
    }
    if (points.empty()) return report;

    const auto n = index(p.total->dim());
    const Eigen::MatrixXd g0 = report.g0mu_space.basis();
    bool rank_constant = true;
    for (const auto& x : points) {
        // the point of P_μ on the same ℝ^×-orbit
        Point xl = x;
        if (!zero_level) {
            const double t = moment_value_at(a, p, x)(index(pivot)) / mu(index(pivot));
            xl[p.s_index] /= t;
        }
        const Eigen::MatrixXd dj = moment_jacobian_at(a, p, xl);
        const int r = rank_of(dj);
        if (!report.jacobian_rank) {
            report.jacobian_rank = r;
        } else if (*report.jacobian_rank != r) {
            rank_constant = false;
        }

        const Subspace level_tangent = kernel_of(dj);
        const Subspace projected = Subspace::span(level_tangent.basis().topRows(n - 1));
        const Eigen::VectorXd eta = p.base.eta().covector_at(base_point(xl));
        if ((projected.basis().transpose() * eta).norm() <= options.transversal_tol) report.transversal = false;

        const Subspace kr = restricted_kernel_at(p, level, x);
        report.restricted_kernel_dims.push_back(static_cast<int>(kr.dim()));
        const Eigen::MatrixXd omega = form_matrix_at(p.omega, x);
        const Subspace theta = kernel_of(omega);
        const Subspace g0_hat = Subspace::span(lifts_at(a, p, x) * g0);
        report.max_kernel_angle = std::max(report.max_kernel_angle, two_sided_angle(kr, subspace_sum(g0_hat, theta)));

        if (!contained_in(theta, kernel_of(moment_jacobian_at(a, p, x)))) report.theta_in_kernel = false;
        report.max_moment_kernel_angle = std::max(report.max_moment_kernel_angle, moment_kernel_angle(a, p, x));
        report.max_equivariance_residual = std::max(report.max_equivariance_residual, equivariance_residual(a, p, x));

        const Eigen::VectorXd j = moment_value_at(a, p, x);
        for (double lambda : {-2.0, 0.5, 3.0}) {
            Point scaled = x;
            scaled[p.s_index] *= lambda;
            const double d = (moment_value_at(a, p, scaled) - lambda * j).cwiseAbs().maxCoeff();
            report.max_homogeneity_residual = std::max(report.max_homogeneity_residual, d / (1.0 + j.norm()));
        }
    }

    report.weakly_regular = rank_constant && report.jacobian_rank == static_cast<int>(k);
    if (!report.weakly_regular) {
        std::string why = rank_constant ? "TJ has constant rank " + std::to_string(*report.jacobian_rank) + " < " +
                                              std::to_string(k)
                                        : "TJ has non-constant rank on the samples";
        report.failures.push_back("mu is not consistent with weak regularity: " + why);
    }
    if (!report.transversal) report.failures.push_back("M_mu is not transversal to C at some sample");
    if (report.max_kernel_angle > kAngleTol) {
        report.failures.push_back("ker(omega|P_[mu]) differs from g0_mu^ + theta(omega), angle " +
                                  fmt(report.max_kernel_angle));
    }
    if (!report.theta_in_kernel) report.failures.push_back("theta(omega) not contained in K(J)");
    if (report.max_moment_kernel_angle > kAngleTol) {
        report.failures.push_back("K(J) differs from the omega-orthogonal of g^, angle " +
                                  fmt(report.max_moment_kernel_angle));
    }
    if (report.max_equivariance_residual > kReductionTol) {
        report.failures.push_back("moment map not infinitesimally equivariant, residual " +
                                  fmt(report.max_equivariance_residual));
    }
    if (report.max_homogeneity_residual > 1e-9) {
        report.failures.push_back("moment map not 1-homogeneous, residual " + fmt(report.max_homogeneity_residual));
    }

    if (!zero_level && report.g0mu_space.empty()) {
        const Expr base_pairing = interior(a.fields[pivot], p.base.eta()).coeff({});
        report.note = "g0_mu = {0}: the reduced structures are the restrictions to the open dense set " +
                      base_pairing.to_string() + " != 0";
    }

    if (q) {
        report.reduction = verify_reduction(p, level, *q, points);
        for (const auto& f : report.reduction->failures) report.failures.push_back("reduction " + f);
    }
    return report;
}

}  // namespace contactred

#include "contactred/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace contactred {

namespace {

// Rows: η, then (dη)ᵀ so that A·X stacks i_X η and i_X dη.
Eigen::MatrixXd contact_system(const HyperplaneField& h, std::span<const double> point) {
    const auto n = static_cast<Eigen::Index>(h.chart()->dim());
    Eigen::MatrixXd a(n + 1, n);
    a.row(0) = h.eta().covector_at(point).transpose();
    a.bottomRows(n) = form_matrix_at(h.d_eta(), point).transpose();
    return a;
}

Eigen::VectorXd gradient_at(const Expr& f, std::span<const double> point) {
    const auto n = static_cast<Eigen::Index>(f.chart()->dim());
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = differentiate(f, static_cast<std::size_t>(i)).evaluate(point);
    return g;
}

Eigen::VectorXd unique_solution(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const char* what) {
    auto sol = solve_affine(a, b);
    if (!sol) throw NotContact(std::string(what) + ": inconsistent linear system (form is not contact here)");
    if (!sol->kernel.empty()) {
        throw NotContact(std::string(what) + ": solution not unique, kernel dimension " +
                         std::to_string(sol->kernel.dim()) + " (form is not contact here)");
    }
    return sol->particular;
}

}  // namespace

Eigen::VectorXd reeb_at(const HyperplaneField& h, std::span<const double> point) {
    const Eigen::MatrixXd a = contact_system(h, point);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
    b(0) = 1.0;
    return unique_solution(a, b, "reeb_at");
}

double reeb_derivative_at(const HyperplaneField& h, const Expr& h_hat, std::span<const double> point) {
    return gradient_at(h_hat, point).dot(reeb_at(h, point));
}

Eigen::VectorXd contact_field_at(const HyperplaneField& h, const Expr& h_hat, std::span<const double> point) {
    require_same_chart(*h_hat.chart(), *h.chart(), "contact_field_at");
    const Eigen::MatrixXd a = contact_system(h, point);
    const Eigen::VectorXd eta = h.eta().covector_at(point);
    const Eigen::VectorXd dh = gradient_at(h_hat, point);
    const double r_h = dh.dot(reeb_at(h, point));
    Eigen::VectorXd b(a.rows());
    b(0) = -h_hat.evaluate(point);
    b.tail(a.cols()) = dh - r_h * eta;
    return unique_solution(a, b, "contact_field_at");
}

Expr homogeneous_lift(const CoverBundle& p, const Expr& h_hat) {
    return -(p.s() * rechart(h_hat, p.total));
}

CoverFieldSolution cover_field_at(const CoverBundle& p, const Expr& hamiltonian, std::span<const double> point) {
    require_same_chart(*hamiltonian.chart(), *p.total, "cover_field_at");
    const double h = hamiltonian.evaluate(point);
    const double euler_h = p.euler.apply(hamiltonian).evaluate(point);
    if (std::abs(euler_h - h) > 1e-8 * (1.0 + std::abs(h))) {
        throw InvalidArgument("cover_field_at: Hamiltonian is not 1-homogeneous in s");
    }
    // (i_X ω)_j = Σ_i X^i ω_ij, so i_X ω = −dH reads ωᵀ X = −dH
    const Eigen::MatrixXd omega = form_matrix_at(p.omega, point);
    auto sol = solve_affine(omega.transpose(), -gradient_at(hamiltonian, point));
    if (!sol) throw Inconsistent("cover_field_at: i_X ω = −dH has no solution");
    return CoverFieldSolution{sol->particular, sol->kernel};
}

double poisson_bracket_at(const CoverBundle& p, const Expr& h1, const Expr& h2, std::span<const double> point) {
    const auto sol = cover_field_at(p, h1, point);
    const Eigen::VectorXd dh2 = gradient_at(h2, point);
    if (sol.kernel.dim() > 0) {
        const double leak = (sol.kernel.basis().transpose() * dh2).cwiseAbs().maxCoeff();
        if (leak > 1e-8 * (1.0 + dh2.norm())) {
            throw Inconsistent("poisson_bracket_at: value depends on the characteristic component");
        }
    }
    return dh2.dot(sol.particular);
}

VecField darboux_contact_field(const DarbouxLayout& layout, const Expr& h_hat) {
    const auto& chart = h_hat.chart();
    if (!layout.u.empty()) throw InvalidArgument("darboux_contact_field: chart has characteristic coordinates");
    std::vector<Expr> comps(chart->dim(), constant(chart, 0.0));
    const Expr hz = differentiate(h_hat, layout.z);
    Expr z_comp = -h_hat;
    for (std::size_t i = 0; i < layout.r(); ++i) {
        const Expr p = variable(chart, layout.p[i]);
        const Expr hp = differentiate(h_hat, layout.p[i]);
        const Expr hq = differentiate(h_hat, layout.q[i]);
        comps[layout.q[i]] = hp;
        comps[layout.p[i]] = -(hq + p * hz);
        z_comp = z_comp + p * hp;
    }
    comps[layout.z] = z_comp;
    return VecField(chart, std::move(comps));
}

Expr darboux_bracket(const DarbouxLayout& layout, const Expr& f_hat, const Expr& h_hat) {
    require_same_chart(*f_hat.chart(), *h_hat.chart(), "darboux_bracket");
    const auto& chart = f_hat.chart();
    Expr out = constant(chart, 0.0);
    Expr f_rest = f_hat;
    Expr h_rest = h_hat;
    for (std::size_t i = 0; i < layout.r(); ++i) {
        const Expr p = variable(chart, layout.p[i]);
        const Expr fp = differentiate(f_hat, layout.p[i]);
        const Expr hp = differentiate(h_hat, layout.p[i]);
        out = out + differentiate(f_hat, layout.q[i]) * hp - fp * differentiate(h_hat, layout.q[i]);
        f_rest = f_rest - p * fp;
        h_rest = h_rest - p * hp;
    }
    return out + f_rest * differentiate(h_hat, layout.z) - h_rest * differentiate(f_hat, layout.z);
}

Expr commutator_bracket(const HyperplaneField& h, const DarbouxLayout& layout, const Expr& f_hat,
                        const Expr& h_hat) {
    const VecField bracket = lie_bracket(darboux_contact_field(layout, f_hat), darboux_contact_field(layout, h_hat));
    return interior(bracket, rechart(h.eta(), f_hat.chart())).coeff({});
}

JacobiBracket::JacobiBracket(const HyperplaneField& h, const DarbouxLayout& layout, const Expr& f_hat,
                             const Expr& h_hat)
    : formula_(darboux_bracket(layout, f_hat, h_hat)), commutator_(commutator_bracket(h, layout, f_hat, h_hat)) {}

double JacobiBracket::operator()(std::span<const double> point) const {
    const double a = formula_.evaluate(point);
    const double b = commutator_.evaluate(point);
    if (std::abs(a - b) > kBracketAgreementTol) {
        throw Inconsistent("jacobi_bracket: Darboux formula " + std::to_string(a) + " disagrees with commutator " +
                           std::to_string(b));
    }
    return a;
}

JacobiBracket jacobi_bracket(const HyperplaneField& h, const DarbouxLayout& layout, const Expr& f_hat,
                             const Expr& h_hat) {
    return JacobiBracket(h, layout, f_hat, h_hat);
}

// ---------------------------------------------------------------------------
// integration

FieldEvaluator evaluator(const VecField& x) {
    return [x](std::span<const double> point) { return x.evaluate(point); };
}

void Trajectory::write_csv(std::ostream& out) const {
    out << 't';
    for (const auto& c : chart->coords()) out << ',' << c;
    out << '\n';
    char buf[40];
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", times[k]);
        out << buf;
        for (double v : states[k]) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

Trajectory flow(const FieldEvaluator& field, ChartPtr chart, std::span<const double> x0, double duration, double dt,
                const FlowOptions& options) {
    if (!(dt > 0.0)) throw InvalidArgument("flow: dt must be positive");
    if (!std::isfinite(duration) || duration < 0.0) throw InvalidArgument("flow: duration must be finite and >= 0");
    if (x0.size() != chart->dim()) throw InvalidArgument("flow: initial state has the wrong dimension");
    const auto steps = std::max<long>(1, std::lround(duration / dt));
    const double h = duration / static_cast<double>(steps);
    const auto n = static_cast<Eigen::Index>(x0.size());

    Trajectory traj{chart, {}, {}};
    traj.times.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
    auto check = [&](double t) {
        if (!x.allFinite()) throw FlowError(t, "nonfinite state");
        if (options.bounded_by && !options.bounded_by->contains(std::span<const double>(x.data(), x.size()))) {
            throw FlowError(t, "state left the chart domain");
        }
    };
    auto f = [&](const Eigen::VectorXd& y) { return field(std::span<const double>(y.data(), y.size())); };

    check(options.t0);
    traj.times.push_back(options.t0);
    traj.states.emplace_back(x.data(), x.data() + n);
    for (long k = 0; k < steps; ++k) {
        const Eigen::VectorXd k1 = f(x);
        const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
        const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
        const Eigen::VectorXd k4 = f(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t = options.t0 + static_cast<double>(k + 1) * h;
        check(t);
        traj.times.push_back(t);
        traj.states.emplace_back(x.data(), x.data() + n);
    }
    return traj;
}

FlowWithEstimate flow_with_estimate(const FieldEvaluator& field, ChartPtr chart, std::span<const double> x0,
                                    double duration, double dt, const FlowOptions& options) {
    FlowWithEstimate out{flow(field, chart, x0, duration, dt, options), 0.0};
    const auto coarse_steps = out.trajectory.times.size() - 1;
    const Trajectory fine = flow(field, chart, x0, duration, duration / static_cast<double>(2 * coarse_steps), options);
    for (std::size_t k = 0; k <= coarse_steps; ++k) {
        const auto& a = out.trajectory.states[k];
        const auto& b = fine.states[2 * k];
        for (std::size_t i = 0; i < a.size(); ++i) out.error_estimate = std::max(out.error_estimate, std::abs(a[i] - b[i]));
    }
    return out;
}

double contact_evolution_residual(const HyperplaneField& h, const Expr& h_hat, const Trajectory& trajectory) {
    const auto& states = trajectory.states;
    if (states.size() < 5) throw InvalidArgument("contact_evolution_residual: need at least five samples");
    const double step = trajectory.times[1] - trajectory.times[0];
    std::vector<double> values(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) values[k] = h_hat.evaluate(states[k]);
    double worst = 0.0;
    for (std::size_t k = 2; k + 2 < states.size(); ++k) {
        const double rate = (-values[k + 2] + 8.0 * values[k + 1] - 8.0 * values[k - 1] + values[k - 2]) / (12.0 * step);
        const double law = -reeb_derivative_at(h, h_hat, states[k]) * values[k];
        worst = std::max(worst, std::abs(rate - law));
    }
    return worst;
}

}  // namespace contactred

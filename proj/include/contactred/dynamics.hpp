#pragma once

// Reeb fields, contact Hamiltonian vector fields on the base and on the
// symplectic cover, contact Jacobi brackets, and fixed-step RK4 flows.
//
// Conventions: Hamiltonian vector fields on the cover satisfy i_X ω = −dH,
// and a base Hamiltonian Ĥ corresponds to the cover Hamiltonian
// H(y, s) = −s·Ĥ(y). Under these conventions the contact field of Ĥ solves
//   i_X η = −Ĥ,   i_X dη = dĤ − R(Ĥ)·η.

#include <functional>
#include <iosfwd>

#include "contactred/cover.hpp"

namespace contactred {

/// Unique R with i_R η = 1 and i_R dη = 0. Throws NotContact when the
/// system is inconsistent or has a nontrivial kernel.
Eigen::VectorXd reeb_at(const HyperplaneField& h, std::span<const double> point);

/// X^c_Ĥ at a point from the stacked linear system.
Eigen::VectorXd contact_field_at(const HyperplaneField& h, const Expr& h_hat, std::span<const double> point);

/// R(Ĥ) at a point.
double reeb_derivative_at(const HyperplaneField& h, const Expr& h_hat, std::span<const double> point);

struct CoverFieldSolution {
    Eigen::VectorXd particular;
    Subspace kernel;  // empty for a symplectic cover
};

/// Solves i_X ω = −dH at a total-chart point. H must satisfy the Euler
/// relation there; throws InvalidArgument otherwise and Inconsistent when
/// the system has no solution.
CoverFieldSolution cover_field_at(const CoverBundle& p, const Expr& hamiltonian, std::span<const double> point);

/// H(y, s) = −s·Ĥ(y) on the total chart.
Expr homogeneous_lift(const CoverBundle& p, const Expr& h_hat);

/// {H1, H2}_ω = X_{H1}(H2) at a point. On a presymplectic cover the value
/// must not depend on the kernel component of X_{H1}; throws Inconsistent
/// when it does beyond 1e-8.
double poisson_bracket_at(const CoverBundle& p, const Expr& h1, const Expr& h2, std::span<const double> point);

// Closed forms on a Darboux chart (η = dz − p_i dq^i, no u coordinates).

/// X^c_Ĥ = ∂Ĥ/∂p_i ∂_{q^i} − (∂Ĥ/∂q^i + p_i ∂Ĥ/∂z) ∂_{p_i} + (p_i ∂Ĥ/∂p_i − Ĥ) ∂_z.
VecField darboux_contact_field(const DarbouxLayout& layout, const Expr& h_hat);

/// {F̂, Ĥ} = ∂F̂/∂q^i ∂Ĥ/∂p_i − ∂F̂/∂p_i ∂Ĥ/∂q^i
///          + (F̂ − p_i ∂F̂/∂p_i) ∂Ĥ/∂z − (Ĥ − p_i ∂Ĥ/∂p_i) ∂F̂/∂z.
Expr darboux_bracket(const DarbouxLayout& layout, const Expr& f_hat, const Expr& h_hat);

/// i_{[X_F̂, X_Ĥ]} η with both fields and the commutator built symbolically.
Expr commutator_bracket(const HyperplaneField& h, const DarbouxLayout& layout, const Expr& f_hat, const Expr& h_hat);

inline constexpr double kBracketAgreementTol = 1e-7;

/// Pointwise contact Jacobi bracket, evaluated through the Darboux formula
/// and cross-checked against the commutator route on every call.
class JacobiBracket {
public:
    JacobiBracket(const HyperplaneField& h, const DarbouxLayout& layout, const Expr& f_hat, const Expr& h_hat);

    /// Darboux-formula value; throws Inconsistent if the routes differ by
    /// more than kBracketAgreementTol.
    double operator()(std::span<const double> point) const;

    double darboux_value(std::span<const double> point) const { return formula_.evaluate(point); }
    double commutator_value(std::span<const double> point) const { return commutator_.evaluate(point); }

    const Expr& formula() const noexcept { return formula_; }
    const Expr& commutator() const noexcept { return commutator_; }

private:
    Expr formula_;
    Expr commutator_;
};

JacobiBracket jacobi_bracket(const HyperplaneField& h, const DarbouxLayout& layout, const Expr& f_hat,
                             const Expr& h_hat);

// ---------------------------------------------------------------------------
// integration

using FieldEvaluator = std::function<Eigen::VectorXd(std::span<const double>)>;

/// Evaluator for a symbolic vector field.
FieldEvaluator evaluator(const VecField& x);

struct Trajectory {
    ChartPtr chart;
    std::vector<double> times;
    std::vector<Point> states;

    /// Header "t,<coords…>", one row per step, 17 significant digits.
    void write_csv(std::ostream& out) const;
};

class FlowError : public Error {
public:
    FlowError(double time, const std::string& what)
        : Error(what + " at t=" + std::to_string(time)), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

struct FlowOptions {
    double t0 = 0.0;
    /// When set, leaving this chart's domain box is an error.
    const Chart* bounded_by = nullptr;
};

/// Classical fixed-step RK4 from t0 to t0 + duration using
/// n = max(1, round(duration/dt)) uniform steps of size duration/n.
Trajectory flow(const FieldEvaluator& field, ChartPtr chart, std::span<const double> x0, double duration, double dt,
                const FlowOptions& options = {});

struct FlowWithEstimate {
    Trajectory trajectory;
    /// max |x_dt(t) − x_{dt/2}(t)| over the coarse grid
    double error_estimate = 0.0;
};

FlowWithEstimate flow_with_estimate(const FieldEvaluator& field, ChartPtr chart, std::span<const double> x0,
                                    double duration, double dt, const FlowOptions& options = {});

/// max over interior samples of |dĤ/dt + R(Ĥ)·Ĥ| along a trajectory of the
/// contact field of Ĥ; dĤ/dt by the five-point central stencil.
double contact_evolution_residual(const HyperplaneField& h, const Expr& h_hat, const Trajectory& trajectory);

}  // namespace contactred

#pragma once

// Submanifolds given by constraints, their isotropy/coisotropy/transversality
// classification, contact moment maps of Lie-algebra actions, and numeric
// checks of reductions against supplied quotient data.

#include <optional>
#include <string>
#include <vector>

#include "contactred/cover.hpp"

namespace contactred {

/// Common zero set of a list of constraints on a chart.
class ConstraintSubmanifold {
public:
    ConstraintSubmanifold(ChartPtr chart, std::vector<Expr> constraints);

    const ChartPtr& chart() const noexcept { return chart_; }
    const std::vector<Expr>& constraints() const noexcept { return constraints_; }
    std::size_t codim() const noexcept { return constraints_.size(); }

    Eigen::VectorXd values_at(std::span<const double> point) const;
    /// codim × dim Jacobian of the constraints.
    Eigen::MatrixXd jacobian_at(std::span<const double> point) const;
    /// max |constraint| at the point (0 without constraints).
    double violation_at(std::span<const double> point) const;

private:
    ChartPtr chart_;
    std::vector<Expr> constraints_;
    std::vector<std::vector<Expr>> gradients_;
};

/// Ñ = τ⁻¹(N): the same constraints read on the total chart.
ConstraintSubmanifold lift_submanifold(const CoverBundle& p, const ConstraintSubmanifold& n);

/// Base constraints obtained by setting s = 1 in total-chart constraints.
/// For constraints homogeneous in s this cuts out τ(N).
ConstraintSubmanifold base_submanifold(const CoverBundle& p, const ConstraintSubmanifold& n);

inline constexpr double kOnSubmanifoldTol = 1e-9;
inline constexpr double kExclusionRadius = 0.05;

/// Gauss-Newton projection (minimal-norm steps) onto the constraint set.
/// Returns nullopt when it does not converge to kOnSubmanifoldTol.
std::optional<Point> project_onto(const ConstraintSubmanifold& n, Point start, int max_iterations = 50);

/// True when some |e(point)| < kExclusionRadius or e cannot be evaluated.
bool is_excluded(std::span<const Expr> excluded, std::span<const double> point);

/// Seeded points of the chart's domain box projected onto N. Points that
/// leave the box, fall under the nonzero floor, hit an excluded locus or
/// lose full constraint rank are dropped; may return fewer than requested.
std::vector<Point> sample_on(const ConstraintSubmanifold& n, const SamplingOptions& options,
                             std::span<const Expr> excluded = {});

/// Kernel of the constraint Jacobian. Throws InvalidArgument when the point
/// violates the constraints by more than kOnSubmanifoldTol or the Jacobian
/// is rank deficient.
Subspace tangent_space_at(const ConstraintSubmanifold& n, std::span<const double> point);

struct ClassifyOptions {
    /// Absolute tolerance for "η (and dη) vanish on TN", measured on an
    /// orthonormal basis of TN.
    double annihilation_tol = 1e-8;
    /// Fibre value used for the lifted point in the coisotropy test.
    double fibre_value = 1.0;
};

struct SubmanifoldClass {
    Point point;
    bool transversal = false;
    bool isotropic = false;
    bool coisotropic = false;
    bool legendrian = false;
    double eta_on_tangent = 0.0;
    double deta_on_tangent = 0.0;
    /// largest principal angle of (TÑ)^ω into TÑ + ker ω
    double coisotropy_angle = 0.0;
    /// dim θ(N)(y): kernel of dη on TN ∩ C
    int k_base = 0;
    /// dim ker(ω|Ñ) at the lifted point
    int k_cover = 0;
    bool vertical_kernel = false;
    // cover-side route: ω|TÑ = 0, and (TÑ)^ω + ker ω = TÑ + ker ω
    bool cover_isotropic = false;
    bool cover_lagrangian = false;
    bool coherent = false;
};

/// Flags of a base submanifold N at a point y of N.
SubmanifoldClass classify_at(const CoverBundle& p, const ConstraintSubmanifold& n, std::span<const double> y,
                             const ClassifyOptions& options = {});

struct ConstantRankReport {
    std::vector<SubmanifoldClass> points;
    bool all_transversal = true;
    bool k_base_constant = true;
    bool k_cover_constant = true;
    bool no_vertical_kernel = true;
    bool coherent = true;
    std::optional<int> k_base;
    std::optional<int> k_cover;
    /// N transversal with θ(N) of constant rank
    bool constant_rank() const noexcept { return all_transversal && k_base_constant; }
    /// θ(Ñ) of constant rank without vertical vectors
    bool constantly_transversal() const noexcept { return k_cover_constant && no_vertical_kernel; }
};

ConstantRankReport constant_rank_check(const CoverBundle& p, const ConstraintSubmanifold& n,
                                       std::span<const Point> points, const ClassifyOptions& options = {});

/// Kernel of ω restricted to the tangent space of a total-chart submanifold.
Subspace restricted_kernel_at(const CoverBundle& p, const ConstraintSubmanifold& n_total,
                              std::span<const double> point);

// ---------------------------------------------------------------------------
// actions and moment maps

/// c^l_{ij} with [ξ_i, ξ_j] = Σ_l c^l_{ij} ξ_l.
class StructureConstants {
public:
    explicit StructureConstants(std::size_t k);
    std::size_t dim() const noexcept { return k_; }
    double operator()(std::size_t l, std::size_t i, std::size_t j) const { return data_[(l * k_ + i) * k_ + j]; }
    void set(std::size_t l, std::size_t i, std::size_t j, double value) { data_[(l * k_ + i) * k_ + j] = value; }
    /// Sets c^l_{ij} = value and c^l_{ji} = −value.
    void set_bracket(std::size_t i, std::size_t j, std::size_t l, double value);

    double antisymmetry_residual() const;
    double jacobi_residual() const;

private:
    std::size_t k_;
    std::vector<double> data_;
};

struct ActionSpec {
    std::string name;
    std::vector<std::string> basis;
    StructureConstants constants;
    std::vector<VecField> fields;  // ξ_i^c on the base chart
    std::size_t dim() const noexcept { return basis.size(); }
};

inline constexpr double kStructureTol = 1e-12;
inline constexpr double kClosureTol = 1e-8;

struct ActionValidation {
    double antisymmetry_residual = 0.0;
    double jacobi_residual = 0.0;
    bool contact = true;
    double closure_residual = 0.0;
    std::vector<std::string> failures;
    bool passed() const noexcept { return failures.empty(); }
};

/// Checks the structure constants and, at the base points, that each field
/// is contact and that the fields close under the bracket.
ActionValidation validate_action(const ActionSpec& a, const HyperplaneField& h, std::span<const Point> base_points);

/// J_i = s·η(ξ_i^c) on the total chart.
std::vector<Expr> moment_map(const ActionSpec& a, const CoverBundle& p);

Eigen::VectorXd moment_value_at(const ActionSpec& a, const CoverBundle& p, std::span<const double> x);

/// k × dim Jacobian of J.
Eigen::MatrixXd moment_jacobian_at(const ActionSpec& a, const CoverBundle& p, std::span<const double> x);

/// Columns ξ̂_i(x) = ξ_i^c − g_i·s∂_s with L_{ξ_i^c} η = g_i·η. With
/// drop_vertical the s∂_s term is omitted (used as a negative control).
Eigen::MatrixXd lifts_at(const ActionSpec& a, const CoverBundle& p, std::span<const double> x,
                         bool drop_vertical = false);

/// Largest principal angle between K(J)(x) and (ĝ(x))^ω in both directions
/// (π/2 on dimension mismatch).
double moment_kernel_angle(const ActionSpec& a, const CoverBundle& p, std::span<const double> x,
                           bool drop_vertical = false);

/// K(J)(x) = (ĝ(x))^ω to 1e-6.
bool moment_kernel_check(const ActionSpec& a, const CoverBundle& p, std::span<const double> x,
                         bool drop_vertical = false);

/// g⁰_μ = {v : μ(v) = 0, Σ_{i,l} c^l_{ij} v^i μ_l = 0 for all j}.
Subspace g0mu(const StructureConstants& c, const Eigen::VectorXd& mu);

/// max over pairs |ξ̂_i(H_j) − Σ_l c^l_{ij} H_l| at x.
double equivariance_residual(const ActionSpec& a, const CoverBundle& p, std::span<const double> x);

// ---------------------------------------------------------------------------
// reductions

struct QuotientData {
    std::string name;
    SmoothMap map;                     // total chart → reduced total chart
    std::optional<DiffForm> omega0;    // on the reduced total chart
    std::optional<SmoothMap> base_map; // base chart → reduced base chart
    std::optional<DiffForm> eta0;      // on the reduced base chart
};

inline constexpr double kReductionTol = 1e-8;

struct ReductionSample {
    Point point;
    int map_rank = 0;
    int kernel_dim = 0;
    double kernel_residual = 0.0;
    std::optional<double> pullback_residual;
    std::optional<double> base_angle;
};

struct ReductionReport {
    std::size_t reduced_dim = 0;
    std::optional<std::size_t> reduced_base_dim;
    std::vector<ReductionSample> samples;
    double max_kernel_residual = 0.0;
    std::optional<double> max_pullback_residual;
    std::optional<double> max_base_angle;
    std::vector<std::string> failures;
    bool passed() const noexcept { return failures.empty() && !samples.empty(); }
};

/// At each sample x of N (total chart): (a) π restricted to T_xN is a
/// submersion; (b) ker(ω|N) is annihilated by Tπ; (c) π*ω₀ restricted to
/// T_xN equals ω restricted to T_xN; and with base data, T p₀(C ∩ T τ(N))
/// equals ker η₀.
ReductionReport verify_reduction(const CoverBundle& p, const ConstraintSubmanifold& n_total, const QuotientData& q,
                                 std::span<const Point> samples);

struct MwmOptions {
    SamplingOptions sampling;
    /// Extra excluded loci on the total chart.
    std::vector<Expr> excluded;
    double transversal_tol = 1e-8;
};

struct MwmReport {
    Eigen::VectorXd mu;
    std::vector<Expr> moment;
    Subspace g0mu_space{0};
    std::vector<Expr> level_constraints;  // P_[μ] (P_0 when μ = 0)
    std::size_t samples = 0;
    bool degenerate = false;
    bool weakly_regular = false;
    std::optional<int> jacobian_rank;
    bool transversal = true;
    double max_kernel_angle = 0.0;
    std::vector<int> restricted_kernel_dims;
    bool theta_in_kernel = true;
    double max_moment_kernel_angle = 0.0;
    double max_equivariance_residual = 0.0;
    double max_homogeneity_residual = 0.0;
    std::optional<ReductionReport> reduction;
    std::string note;
    std::vector<std::string> failures;
    bool passed() const noexcept { return failures.empty(); }
};

/// Assembles P_μ and P_[μ] = J⁻¹(ℝ^×μ), samples them, and checks weak
/// regularity (full constant rank of TJ), transversality of M_μ = τ(P_μ),
/// ker(ω|P_[μ]) = ĝ⁰_μ + θ(ω), θ(ω) ⊆ K(J), K(J) = ĝ^ω, equivariance and
/// homogeneity; with quotient data also verify_reduction on P_[μ].
MwmReport mwm_pipeline(const ActionSpec& a, const CoverBundle& p, const Eigen::VectorXd& mu, const QuotientData* q,
                       const MwmOptions& options = {});

}  // namespace contactred

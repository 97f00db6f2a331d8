#pragma once

// Trivialized (pre)symplectic ℝ^×-covers M×ℝ^× of a hyperplane field:
// ω = ds∧η + s·dη, Liouville form ϑ = s·η and Euler field ∇ = s∂_s.
// The fibre coordinate s is always the last coordinate of the total chart.

#include <utility>

#include "contactred/precontact.hpp"

namespace contactred {

struct CoverBundle {
    HyperplaneField base;
    ChartPtr total;
    std::size_t s_index = 0;
    DiffForm eta;    // η moved to the total chart
    DiffForm omega;  // ds∧η + s·dη
    DiffForm theta;  // s·η
    VecField euler;  // s∂_s

    const ChartPtr& base_chart() const noexcept { return base.chart(); }
    Expr s() const { return variable(total, s_index); }
};

/// Default fibre domain: s ∈ [-2, 2], sampled away from zero.
inline constexpr CoordDomain kDefaultFibreDomain{-2.0, 2.0, true};

CoverBundle build_cover(const HyperplaneField& h, CoordDomain fibre = kDefaultFibreDomain);

/// (y, s) as a point of the total chart.
Point lift_point(std::span<const double> y, double s);
/// y from (y, s).
Point base_point(std::span<const double> x);

/// Pullback of a total-chart form under (y, s) ↦ (y, λs).
DiffForm scaling_pullback(const CoverBundle& p, double lambda, const DiffForm& alpha);

inline constexpr double kHomogeneityLambdas[] = {-2.0, -1.0, 0.5, 3.0};

struct CoverPointResult {
    Point point;
    int omega_rank = 0;
    bool omega_rank_marginal = false;
    double d_theta_residual = 0.0;      // |dϑ − ω|
    double euler_residual = 0.0;        // |i_∇ω − ϑ|
    double homogeneity_residual = 0.0;  // max over λ of |h_λ*ω − λω|
};

struct CoverReport {
    int expected_rank = 0;
    std::vector<CoverPointResult> points;
    bool rank_ok = true;
    double max_d_theta_residual = 0.0;
    double max_euler_residual = 0.0;
    double max_homogeneity_residual = 0.0;
    bool marginal = false;
    bool passed(double tol = 1e-9) const noexcept {
        return rank_ok && max_d_theta_residual <= tol && max_euler_residual <= tol && max_homogeneity_residual <= tol;
    }
};

/// Rank of ω against 2(r+1) for the base's claimed r, and the cover
/// identities at the given total-chart points.
CoverReport check_cover(const CoverBundle& p, std::span<const Point> points);

/// Characteristic correspondence at (y, s): whether X = Y − a·s∂_s lies in
/// ker ω, and whether Y is a characteristic vector of η at y
/// (η(Y) = 0 and i_Y dη = a·η). Returns (cover verdict, base verdict).
std::pair<bool, bool> characteristic_correspondence_check(const CoverBundle& p, std::span<const double> point,
                                                          const Eigen::VectorXd& y_vector, double a);

/// Tτ(ker ω(y, s)) against θ(η)(y), as a largest principal angle in both
/// directions (π/2 on dimension mismatch).
double characteristic_projection_angle(const CoverBundle& p, std::span<const double> point);

/// Euler relation ∇(H) = H at every point, to 1e-8·(1 + |H|).
bool homogeneous_hamiltonian_check(const CoverBundle& p, const Expr& hamiltonian, std::span<const Point> points);

}  // namespace contactred

#pragma once

// Dense pointwise linear algebra on small matrices: numeric rank, null
// spaces, restricted bilinear forms, affine solves and subspace comparison.

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace contactred {

inline constexpr double kDefaultRankTol = 1e-8;

/// Subspace of ℝ^ambient with an orthonormal basis stored column-wise.
class Subspace {
public:
    explicit Subspace(Eigen::Index ambient);
    /// Orthonormalizes the span of the given columns (numerically dependent
    /// columns are dropped with the relative tolerance).
    static Subspace span(const Eigen::MatrixXd& columns, double tol_ratio = kDefaultRankTol);
    static Subspace full(Eigen::Index ambient);

    Eigen::Index ambient() const noexcept { return ambient_; }
    Eigen::Index dim() const noexcept { return basis_.cols(); }
    bool empty() const noexcept { return basis_.cols() == 0; }
    const Eigen::MatrixXd& basis() const noexcept { return basis_; }

    /// Orthogonal projection of v onto the subspace.
    Eigen::VectorXd project(const Eigen::VectorXd& v) const;

private:
    Eigen::Index ambient_;
    Eigen::MatrixXd basis_;
};

int rank_of(const Eigen::MatrixXd& m, double tol_ratio = kDefaultRankTol);

/// Rank of an antisymmetric matrix. An odd singular-value count is
/// re-examined: the smallest counted value is dropped when it is below ten
/// times the threshold, and `marginal` is set either way.
struct AntisymmetricRank {
    int rank = 0;
    bool marginal = false;
};
AntisymmetricRank antisymmetric_rank(const Eigen::MatrixXd& m, double tol_ratio = kDefaultRankTol);

Subspace kernel_of(const Eigen::MatrixXd& m, double tol_ratio = kDefaultRankTol);

/// Bᵀ M B for the orthonormal basis B of s.
Eigen::MatrixXd restrict_bilinear(const Eigen::MatrixXd& m, const Subspace& s);

struct AffineSolution {
    Eigen::VectorXd particular;
    Subspace kernel;
    double residual = 0.0;
};

/// Least-squares solution of A x = b, accepted when the residual is at most
/// 1e-8·(1+|b|). Returns nullopt when the system is inconsistent.
std::optional<AffineSolution> solve_affine(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                           double tol_ratio = kDefaultRankTol);

/// Largest principal angle (radians) between a and b when dim a <= dim b:
/// measures how far a is from lying inside b. Returns π/2 when a is not
/// smaller or equal in dimension.
double max_principal_angle(const Subspace& a, const Subspace& b);

/// a ⊆ b up to the angle tolerance.
bool contained_in(const Subspace& a, const Subspace& b, double angle_tol = 1e-6);
/// Same dimension and mutually contained.
bool same_subspace(const Subspace& a, const Subspace& b, double angle_tol = 1e-6);

/// Sum a + b.
Subspace subspace_sum(const Subspace& a, const Subspace& b);

/// {X : Xᵀ M Y = 0 for all Y ∈ s}, the M-orthogonal of s.
Subspace orthogonal_complement(const Eigen::MatrixXd& m, const Subspace& s, double tol_ratio = kDefaultRankTol);

/// Image of s under a linear map; directions whose image is below the
/// tolerance relative to the map's norm are dropped.
Subspace image(const Eigen::MatrixXd& map, const Subspace& s, double tol_ratio = kDefaultRankTol);

}  // namespace contactred

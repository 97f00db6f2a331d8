#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "contactred/exterior.hpp"
#include "contactred/pointlin.hpp"

using namespace contactred;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols, int rank) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd a(rows, rank), b(rank, cols);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
    for (int i = 0; i < b.size(); ++i) b.data()[i] = n(rng);
    return a * b;
}

Eigen::MatrixXd darboux_deta() {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    m(1, 2) = -1.0;
    m(2, 1) = 1.0;
    return m;
}

}  // namespace

TEST_SUITE("pointlin") {

TEST_CASE("rank plus kernel dimension is the column count") {
    std::mt19937_64 rng(1000);
    std::uniform_int_distribution<int> dim(1, 7);
    for (int trial = 0; trial < 1000; ++trial) {
        const int rows = dim(rng);
        const int cols = dim(rng);
        const int rank = std::uniform_int_distribution<int>(0, std::min(rows, cols))(rng);
        const Eigen::MatrixXd m = rank == 0 ? Eigen::MatrixXd::Zero(rows, cols) : random_matrix(rng, rows, cols, rank);
        const int r = rank_of(m);
        const Subspace k = kernel_of(m);
        CHECK(r == rank);
        CHECK(r + k.dim() == cols);
        if (!k.empty()) CHECK((m * k.basis()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + m.norm()));
    }
}

TEST_CASE("ranks of the listed matrices") {
    CHECK(rank_of(darboux_deta()) == 2);
    CHECK(rank_of(Eigen::MatrixXd::Zero(4, 4)) == 0);
    // dη' for η' = e^u(dz − p dq) at (z,p,q,u) = (0,1,0,0)
    const auto c = make_chart("conformal", {"z", "p", "q", "u"});
    DiffForm eta(c, 1);
    eta.add_term({0}, parse("exp(u)", c));
    eta.add_term({2}, parse("-p*exp(u)", c));
    const Eigen::MatrixXd m = form_matrix_at(exterior_d(eta), std::vector<double>{0, 1, 0, 0});
    CHECK(rank_of(m) == 4);
    const auto ar = antisymmetric_rank(m);
    CHECK(ar.rank == 4);
    CHECK_FALSE(ar.marginal);

    // restricted to ker η' the rank drops to 2
    const Subspace c_space = kernel_of(eta.covector_at(std::vector<double>{0.2, 0.7, -0.4, 0.3}).transpose());
    const Eigen::MatrixXd r = restrict_bilinear(
        form_matrix_at(exterior_d(eta), std::vector<double>{0.2, 0.7, -0.4, 0.3}), c_space);
    CHECK(r.rows() == 3);
    CHECK(antisymmetric_rank(r).rank == 2);
}

TEST_CASE("kernels of the listed matrices") {
    Eigen::RowVector3d eta(1.0, 0.0, 0.0);  // dz at the origin, order (z,p,q)
    const Subspace k = kernel_of(eta);
    CHECK(k.dim() == 2);
    Eigen::MatrixXd expect(3, 2);
    expect << 0, 0, 1, 0, 0, 1;
    CHECK(same_subspace(k, Subspace::span(expect)));
    CHECK(kernel_of(Eigen::MatrixXd::Identity(3, 3)).empty());
    CHECK(kernel_of(Eigen::MatrixXd(0, 3)).dim() == 3);
}

TEST_CASE("restricting to a subspace") {
    const Subspace c = kernel_of(Eigen::RowVector3d(1.0, 0.0, 0.0));
    const Eigen::MatrixXd r = restrict_bilinear(darboux_deta(), c);
    CHECK(r.rows() == 2);
    CHECK((r + r.transpose()).isZero());
    CHECK(rank_of(r) == 2);
    CHECK(restrict_bilinear(darboux_deta(), Subspace(3)).size() == 0);
}

TEST_CASE("affine solves") {
    // Reeb system for the Darboux form: [η; dη] X = [1; 0]
    Eigen::MatrixXd a(4, 3);
    a << Eigen::RowVector3d(1, 0, 0), darboux_deta();
    Eigen::Vector4d b(1, 0, 0, 0);
    const auto sol = solve_affine(a, b);
    REQUIRE(sol);
    CHECK(sol->particular.isApprox(Eigen::Vector3d(1, 0, 0)));
    CHECK(sol->kernel.empty());

    const auto zero = solve_affine(Eigen::MatrixXd::Zero(2, 3), Eigen::VectorXd::Zero(2));
    REQUIRE(zero);
    CHECK(zero->particular.isZero());
    CHECK(zero->kernel.dim() == 3);

    CHECK_FALSE(solve_affine(Eigen::MatrixXd::Zero(2, 3), Eigen::Vector2d(1, 0)));
}

TEST_CASE("principal angles") {
    Eigen::MatrixXd e1(3, 1), e2(3, 1), diag(3, 1);
    e1 << 1, 0, 0;
    e2 << 0, 1, 0;
    diag << 1, 1, 0;
    const auto s1 = Subspace::span(e1);
    const auto s2 = Subspace::span(e2);
    const auto sd = Subspace::span(diag);
    CHECK(max_principal_angle(s1, s2) == doctest::Approx(std::numbers::pi / 2));
    CHECK(max_principal_angle(s1, sd) == doctest::Approx(std::numbers::pi / 4));
    CHECK(max_principal_angle(s1, subspace_sum(s1, s2)) <= 1e-15);
    CHECK(max_principal_angle(subspace_sum(s1, s2), s1) == doctest::Approx(std::numbers::pi / 2));
    CHECK(contained_in(Subspace(3), s1));
    CHECK(same_subspace(subspace_sum(s1, s2), subspace_sum(sd, s2)));
}

TEST_CASE("symplectic orthogonal of a Lagrangian is itself") {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, 4);
    j(0, 2) = 1;
    j(2, 0) = -1;
    j(1, 3) = 1;
    j(3, 1) = -1;
    Eigen::MatrixXd lag(4, 2);
    lag << 1, 0, 0, 1, 0, 0, 0, 0;
    const auto l = Subspace::span(lag);
    CHECK(same_subspace(orthogonal_complement(j, l), l));
}

TEST_CASE("image drops directions below the map's scale") {
    Eigen::MatrixXd m(1, 2);
    m << 1.0, 0.0;
    Eigen::MatrixXd v(2, 1);
    v << 1e-12, 1.0;
    CHECK(image(m, Subspace::span(v)).empty());
    v << 1.0, 1.0;
    CHECK(image(m, Subspace::span(v)).dim() == 1);
}

}

#include <doctest.h>

#include "contactred/cover.hpp"

using namespace contactred;

namespace {

std::vector<Point> cover_pts(const CoverBundle& p, std::uint64_t seed, std::size_t n = 50) {
    return sample_points(*p.total, {n, seed, 0.25});
}

Eigen::VectorXd unit(std::size_t n, std::size_t i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    v(static_cast<Eigen::Index>(i)) = 1.0;
    return v;
}

}  // namespace

TEST_SUITE("cover") {

TEST_CASE("total chart layout") {
    const auto p = build_cover(darboux_model(3, 1).field);
    CHECK(p.total->coords() == std::vector<std::string>{"z", "p", "q", "s"});
    CHECK(p.s_index == 3);
    CHECK(p.total->domain()[3].nonzero);
    CHECK(lift_point(std::vector<double>{1, 2, 3}, -0.5) == Point{1, 2, 3, -0.5});
    CHECK(base_point(std::vector<double>{1, 2, 3, -0.5}) == Point{1, 2, 3});
    const auto c = make_chart("bad", {"x", "s"});
    CHECK_THROWS_AS(build_cover(HyperplaneField(DiffForm::coordinate_differential(c, 0), 0)), Error);
}

TEST_CASE("contact base gives a symplectic cover") {
    const auto p = build_cover(darboux_model(3, 1).field);
    const auto rep = check_cover(p, cover_pts(p, 1));
    CHECK(rep.expected_rank == 4);
    CHECK(rep.passed());
    for (const auto& r : rep.points) CHECK(r.omega_rank == 4);
}

TEST_CASE("precontact base gives a presymplectic cover of rank 2r+2") {
    const auto p = build_cover(darboux_model(4, 1).field);
    const auto rep = check_cover(p, cover_pts(p, 2));
    CHECK(rep.expected_rank == 4);
    CHECK(rep.passed());
    CHECK(p.total->dim() == 5);
}

TEST_CASE("scaling pullbacks") {
    const auto p = build_cover(darboux_model(5, 2).field);
    for (double lambda : {-2.0, -1.0, 0.5, 3.0, 1.0}) {
        const DiffForm w = scaling_pullback(p, lambda, p.omega) - lambda * p.omega;
        const DiffForm t = scaling_pullback(p, lambda, p.theta) - lambda * p.theta;
        for (const auto& x : cover_pts(p, 3, 20)) {
            CHECK(w.sup_norm_at(x) <= 1e-12);
            CHECK(t.sup_norm_at(x) <= 1e-12);
        }
    }
    const DiffForm id = scaling_pullback(p, 1.0, p.eta) - p.eta;
    CHECK(id.sup_norm_at(std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 1.5}) == 0.0);
}

TEST_CASE("Liouville form and Euler field") {
    const auto p = build_cover(darboux_model(3, 1).field);
    const DiffForm dtheta = exterior_d(p.theta) - p.omega;
    const DiffForm euler = interior(p.euler, p.omega) - p.theta;
    for (const auto& x : cover_pts(p, 4, 20)) {
        CHECK(dtheta.sup_norm_at(x) == 0.0);
        CHECK(euler.sup_norm_at(x) <= 1e-14);
    }
}

TEST_CASE("characteristic correspondence cases") {
    const auto pre = build_cover(darboux_model(4, 1).field);
    const Point x{0.3, -0.4, 0.2, 0.7, 1.3};
    CHECK(characteristic_correspondence_check(pre, x, unit(4, 3), 0.0) == std::pair{true, true});
    for (double a : {0.0, 1.0, -2.0}) {
        CHECK(characteristic_correspondence_check(pre, x, unit(4, 1), a) == std::pair{false, false});
    }
    const auto con = build_cover(darboux_model(3, 1).field);
    CHECK(characteristic_correspondence_check(con, std::vector<double>{0.1, 0.2, 0.3, -1.0}, Eigen::VectorXd::Zero(3),
                                              0.5) == std::pair{false, false});
}

TEST_CASE("ker omega projects onto the characteristic distribution") {
    const auto pre = build_cover(darboux_model(4, 1).field);
    for (const auto& x : cover_pts(pre, 5, 20)) CHECK(characteristic_projection_angle(pre, x) <= 1e-6);
    const auto con = build_cover(darboux_model(3, 1).field);
    for (const auto& x : cover_pts(con, 6, 20)) CHECK(characteristic_projection_angle(con, x) <= 1e-6);
}

TEST_CASE("homogeneous Hamiltonians") {
    const auto p = build_cover(darboux_model(3, 1).field);
    const auto pts = cover_pts(p, 7, 20);
    CHECK(homogeneous_hamiltonian_check(p, parse("s*(p+z)", p.total), pts));
    CHECK_FALSE(homogeneous_hamiltonian_check(p, parse("s^2", p.total), pts));
    CHECK_FALSE(homogeneous_hamiltonian_check(p, parse("p", p.total), pts));
}

}

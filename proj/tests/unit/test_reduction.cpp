#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "contactred/scene.hpp"

using namespace contactred;

namespace {

Scene scene(const char* name) { return load_scene(std::filesystem::path(CONTACTRED_SCENES_DIR) / (std::string(name) + ".json")); }

Eigen::MatrixXd cols(std::initializer_list<std::initializer_list<double>> vs) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(vs.begin()->size()), static_cast<Eigen::Index>(vs.size()));
    Eigen::Index c = 0;
    for (const auto& v : vs) {
        Eigen::Index r = 0;
        for (double x : v) m(r++, c) = x;
        ++c;
    }
    return m;
}

// g⁰_μ dimension by stacking the defining equations directly
Eigen::Index g0mu_dim_oracle(const StructureConstants& c, const Eigen::VectorXd& mu) {
    const auto k = static_cast<Eigen::Index>(c.dim());
    Eigen::MatrixXd rows(k + 1, k);
    rows.row(0) = mu.transpose();
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index i = 0; i < k; ++i) {
            double v = 0.0;
            for (Eigen::Index l = 0; l < k; ++l) v += c(l, i, j) * mu(l);
            rows(j + 1, i) = v;
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(rows);
    lu.setThreshold(1e-10);
    return k - lu.rank();
}

}  // namespace

TEST_SUITE("reduction") {

TEST_CASE("tangent spaces of constraint sets") {
    const auto d = darboux_model(3, 1);
    const auto& c = d.chart;
    const ConstraintSubmanifold z0(c, {parse("z", c)});
    CHECK(same_subspace(tangent_space_at(z0, std::vector<double>{0, 0.3, -0.2}), Subspace::span(cols({{0, 1, 0}, {0, 0, 1}}))));
    const ConstraintSubmanifold pz(c, {parse("p + z", c)});
    CHECK(same_subspace(tangent_space_at(pz, std::vector<double>{0.2, -0.2, 0.5}),
                        Subspace::span(cols({{1, -1, 0}, {0, 0, 1}}))));
    const ConstraintSubmanifold all(c, {});
    CHECK(tangent_space_at(all, std::vector<double>{0.1, 0.2, 0.3}).dim() == 3);
    CHECK_THROWS_AS(tangent_space_at(z0, std::vector<double>{0.5, 0, 0}), InvalidArgument);
    const ConstraintSubmanifold doubled(c, {parse("z", c), parse("2*z", c)});
    CHECK_THROWS_AS(tangent_space_at(doubled, std::vector<double>{0, 0, 0}), InvalidArgument);
}

TEST_CASE("projection onto constraint sets") {
    const auto d = darboux_model(3, 1);
    const ConstraintSubmanifold circle(d.chart, {parse("p^2 + q^2 - 0.5", d.chart)});
    const auto x = project_onto(circle, {0.1, 0.6, 0.6});
    REQUIRE(x.has_value());
    CHECK(circle.violation_at(*x) <= kOnSubmanifoldTol);
    const auto samples = sample_on(circle, {50, 3, 0.25});
    CHECK(samples.size() >= 40);
    for (const auto& s : samples) CHECK(circle.violation_at(s) <= kOnSubmanifoldTol);
}

TEST_CASE("legendrian and isotropic flags") {
    const auto d = darboux_model(3, 1);
    const auto cover = build_cover(d.field);
    const auto& c = d.chart;
    const ConstraintSubmanifold leg(c, {parse("z", c), parse("p", c)});
    for (double q : {-0.7, 0.0, 0.4}) {
        const auto k = classify_at(cover, leg, std::vector<double>{0, 0, q});
        CHECK(k.isotropic);
        CHECK(k.legendrian);
        CHECK(k.coisotropic);
        CHECK(k.coherent);
    }
    const ConstraintSubmanifold q0(c, {parse("q", c)});
    const auto k = classify_at(cover, q0, std::vector<double>{0.2, 0.3, 0});
    CHECK(k.transversal);
    CHECK_FALSE(k.isotropic);
    CHECK_FALSE(k.legendrian);
}

TEST_CASE("kernels on the plane z = 0") {
    const Scene s = scene("example-z0");
    const auto& cover = s.require_cover();
    const auto& n = s.submanifolds.at("N");
    const auto lifted = lift_submanifold(cover, n.manifold);
    for (double p : {0.3, -0.5}) {
        for (double sv : {1.0, -2.0}) {
            const Point x{0, p, 0.2, sv};
            // s∂s − p∂p
            const auto k = restricted_kernel_at(cover, lifted, x);
            CHECK(same_subspace(k, Subspace::span(cols({{0, -p, 0, sv}}))));
        }
        const auto cls = classify_at(cover, n.manifold, std::vector<double>{0, p, 0.2});
        CHECK(cls.transversal);
        CHECK_FALSE(cls.vertical_kernel);
        CHECK(cls.coisotropic);
    }
    const Point x{0, 0, 0.2, 1.5};
    CHECK(same_subspace(restricted_kernel_at(cover, lifted, x), Subspace::span(cols({{0, 0, 0, 1}}))));
    const auto cls = classify_at(cover, n.manifold, std::vector<double>{0, 0, 0.2});
    CHECK_FALSE(cls.transversal);
    CHECK(cls.vertical_kernel);
}

TEST_CASE("constant rank on the five-dimensional example") {
    const Scene s = scene("example-r5");
    const auto& n = s.submanifolds.at("N");
    const auto pts = s.submanifold_samples(n);
    CHECK(pts.size() >= 50);
    const auto r = constant_rank_check(s.require_cover(), n.manifold, pts);
    CHECK(r.constant_rank());
    CHECK(r.constantly_transversal());
    CHECK(r.k_base == 2);
    CHECK(r.k_cover == 2);
}

TEST_CASE("moment map of the translation action") {
    const Scene s = scene("mwm");
    const auto& cover = s.require_cover();
    const auto& a = s.actions.at("translation").spec;
    const auto j = moment_map(a, cover);
    REQUIRE(j.size() == 1);
    const Expr expected = parse("-s*(p+z)", cover.total);
    const Expr zero_j = moment_map(s.actions.at("trivial").spec, cover)[0];
    for (const auto& x : s.cover_samples()) {
        CHECK(std::abs(j[0].evaluate(x) - expected.evaluate(x)) <= 1e-12);
        CHECK(zero_j.evaluate(x) == 0.0);
        for (double lambda : kHomogeneityLambdas) {
            Point y = x;
            y[cover.s_index] *= lambda;
            CHECK(moment_value_at(a, cover, y)(0) == doctest::Approx(lambda * j[0].evaluate(x)));
        }
        CHECK(moment_kernel_check(a, cover, x));
        CHECK(equivariance_residual(a, cover, x) <= 1e-12);
        // ξ̂ = ξ + s∂_s since L_ξ η = −η
        const Eigen::MatrixXd lift = lifts_at(a, cover, x);
        CHECK(lift(3, 0) == doctest::Approx(x[3]));
    }
}

TEST_CASE("dropping the vertical lift term breaks the kernel identity") {
    const Scene s = scene("mwm");
    const auto& cover = s.require_cover();
    const auto& a = s.actions.at("translation").spec;
    double worst = 0.0;
    for (const auto& x : s.cover_samples()) worst = std::max(worst, moment_kernel_angle(a, cover, x, true));
    CHECK(worst > 1e-3);
}

TEST_CASE("Heisenberg moment map") {
    const Scene s = scene("heisenberg");
    const auto& cover = s.require_cover();
    for (const auto& [name, act] : s.actions) {
        CHECK(validate_action(act.spec, s.require_hyperplane(), s.base_samples()).passed());
        for (const auto& x : s.cover_samples()) {
            CHECK(moment_kernel_check(act.spec, cover, x));
            CHECK(equivariance_residual(act.spec, cover, x) <= 1e-9);
        }
    }
}

TEST_CASE("invalid actions are rejected") {
    const auto d = darboux_model(3, 1);
    const auto base = sample_points(*d.chart, {20, 1, 0.25});
    // ∂p is not a contact field
    ActionSpec bad{"bad", {"e"}, StructureConstants(1), {VecField::coordinate(d.chart, 1)}};
    CHECK_FALSE(validate_action(bad, d.field, base).passed());
    // ∂q and q∂z close only with a third generator
    ActionSpec open{"open", {"a", "b"}, StructureConstants(2),
                    {VecField::coordinate(d.chart, 2),
                     darboux_contact_field(d.layout, parse("-q", d.chart))}};
    CHECK_FALSE(validate_action(open, d.field, base).passed());
    StructureConstants asym(2);
    asym.set(0, 0, 1, 1.0);
    ActionSpec broken{"broken", {"a", "b"}, asym, {VecField::zero(d.chart), VecField::zero(d.chart)}};
    CHECK(validate_action(broken, d.field, base).antisymmetry_residual > kStructureTol);
}

TEST_CASE("isotropy subalgebras") {
    StructureConstants abelian(2);
    CHECK(g0mu(abelian, Eigen::Vector2d(1, 0)).dim() == 1);
    CHECK(g0mu(abelian, Eigen::Vector2d(0, 0)).dim() == 2);
    StructureConstants so3(3);
    so3.set_bracket(0, 1, 2, 1.0);
    so3.set_bracket(1, 2, 0, 1.0);
    so3.set_bracket(2, 0, 1, 1.0);
    CHECK(so3.jacobi_residual() <= 1e-15);
    CHECK(g0mu(so3, Eigen::Vector3d(0, 0, 1)).dim() == 0);
    CHECK(g0mu(so3, Eigen::Vector3d(0, 0, 0)).dim() == 3);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        StructureConstants c(4);
        for (std::size_t l = 0; l < 4; ++l)
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = i + 1; j < 4; ++j)
                    if (u(rng) > 0.3) c.set_bracket(i, j, l, std::round(2 * u(rng)));
        Eigen::VectorXd mu(4);
        for (Eigen::Index i = 0; i < 4; ++i) mu(i) = u(rng) > 0 ? std::round(2 * u(rng)) : 0.0;
        CHECK(g0mu(c, mu).dim() == g0mu_dim_oracle(c, mu));
    }
}

TEST_CASE("reduction against quotient data") {
    const Scene s = scene("mwm");
    const auto& cover = s.require_cover();
    const auto& p0 = s.submanifolds.at("P0");
    const auto pts = s.submanifold_samples(p0);
    const auto good = verify_reduction(cover, p0.manifold, s.quotients.at("Q0"), pts);
    CHECK(good.passed());
    CHECK(good.reduced_dim == 2);
    CHECK(good.max_pullback_residual.value_or(1.0) <= kReductionTol);
    CHECK(good.max_base_angle.value_or(1.0) <= 1e-6);
    const auto bad = verify_reduction(cover, p0.manifold, s.quotients.at("Qbad"), pts);
    CHECK_FALSE(bad.passed());
    CHECK(bad.max_pullback_residual.value_or(0.0) > 1e-3);

    // the identity is a reduction of the whole cover by the zero action
    QuotientData id{"id", SmoothMap::identity(cover.total), cover.omega, std::nullopt, std::nullopt};
    const ConstraintSubmanifold everything(cover.total, {});
    const auto r = verify_reduction(cover, everything, id, s.cover_samples());
    CHECK(r.passed());
    CHECK(r.reduced_dim == 4);
}

TEST_CASE("pipeline at the zero level and at a nonzero level") {
    const Scene s = scene("mwm");
    const auto& cover = s.require_cover();
    const auto& a = s.actions.at("translation").spec;
    MwmOptions o;
    o.sampling = s.sampling;
    const auto& q0 = s.quotients.at("Q0");
    const auto zero = mwm_pipeline(a, cover, Eigen::VectorXd::Zero(1), &q0, o);
    CHECK(zero.passed());
    CHECK(zero.weakly_regular);
    CHECK(zero.g0mu_space.dim() == 1);
    REQUIRE(zero.reduction.has_value());
    CHECK(zero.reduction->passed());

    const auto one = mwm_pipeline(a, cover, Eigen::VectorXd::Ones(1), nullptr, o);
    CHECK(one.passed());
    CHECK(one.g0mu_space.dim() == 0);

    const auto trivial = mwm_pipeline(s.actions.at("trivial").spec, cover, Eigen::VectorXd::Zero(1), nullptr, o);
    CHECK(trivial.degenerate);
    CHECK_FALSE(trivial.passed());
}

}

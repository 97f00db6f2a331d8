#include <doctest.h>

#include <random>

#include "../support/oracle.hpp"
#include "../support/random_expr.hpp"
#include "contactred/exterior.hpp"
#include "contactred/pointlin.hpp"

using namespace contactred;

namespace {

ChartPtr zpq() { return make_chart("R3", {"z", "p", "q"}); }
ChartPtr zpqs() { return make_chart("cover", {"z", "p", "q", "s"}); }

DiffForm one_form(const ChartPtr& c, std::initializer_list<std::pair<const char*, const char*>> terms) {
    DiffForm f(c, 1);
    for (const auto& [coord, coeff] : terms) f.add_term({c->require_index(coord)}, parse(coeff, c));
    return f;
}

DiffForm darboux_eta(const ChartPtr& c) { return one_form(c, {{"z", "1"}, {"q", "-p"}}); }

double coeff_at(const DiffForm& f, const MultiIndex& idx, const Point& x) { return f.coeff(idx).evaluate(x); }

std::vector<Point> points(const ChartPtr& c, std::uint64_t seed, std::size_t n = 20) {
    return sample_points(*c, {n, seed, 0.25});
}

}  // namespace

TEST_SUITE("exterior") {

TEST_CASE("d of the Darboux form") {
    const auto c = zpq();
    const DiffForm d = exterior_d(darboux_eta(c));
    CHECK(d.degree() == 2);
    CHECK(d.coeffs().size() == 1);
    CHECK(d.coeff({1, 2}).constant_value() == -1.0);
}

TEST_CASE("d of p dq twice vanishes") {
    const auto c = make_chart("pq", {"p", "q"});
    const DiffForm a = one_form(c, {{"q", "p"}});
    CHECK(exterior_d(exterior_d(a)).is_structurally_zero());
}

TEST_CASE("d of the Liouville form s*eta") {
    const auto c = zpqs();
    const DiffForm theta = variable(c, "s") * darboux_eta(c);
    const DiffForm d = exterior_d(theta);
    for (const auto& x : points(c, 1)) {
        CHECK(coeff_at(d, {0, 3}, x) == doctest::Approx(-1.0));
        CHECK(coeff_at(d, {2, 3}, x) == doctest::Approx(x[1]));
        CHECK(coeff_at(d, {1, 2}, x) == doctest::Approx(-x[3]));
        CHECK(coeff_at(d, {0, 1}, x) == 0.0);
    }
}

TEST_CASE("wedge cancellations") {
    const auto c = zpq();
    const DiffForm eta = darboux_eta(c);
    const DiffForm w = wedge(eta, exterior_d(eta));
    CHECK(w.degree() == 3);
    CHECK(w.coeffs().size() == 1);
    CHECK(w.coeff({0, 1, 2}).constant_value() == -1.0);
    CHECK(wedge(eta, wedge_power(exterior_d(eta), 2)).is_structurally_zero());
    CHECK(wedge_power(exterior_d(eta), 0).coeff({}).constant_value() == 1.0);

    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        const DiffForm a = testsupport::random_form(c, 1, rng);
        const DiffForm aa = wedge(a, a);
        for (const auto& x : points(c, 2, 5)) CHECK(aa.sup_norm_at(x) <= 1e-12);
    }
}

TEST_CASE("graded commutativity of the wedge product") {
    const auto c = make_chart("R4", {"a", "b", "c", "d"});
    std::mt19937_64 rng(4);
    for (int i = 0; i < 5; ++i) {
        const DiffForm a1 = testsupport::random_form(c, 1, rng);
        const DiffForm b1 = testsupport::random_form(c, 1, rng);
        const DiffForm a2 = testsupport::random_form(c, 2, rng);
        const DiffForm s11 = wedge(a1, b1) + wedge(b1, a1);
        const DiffForm s12 = wedge(a1, a2) - wedge(a2, a1);
        for (const auto& x : points(c, 7, 5)) {
            CHECK(s11.sup_norm_at(x) <= 1e-12);
            CHECK(s12.sup_norm_at(x) <= 1e-12);
        }
    }
}

TEST_CASE("interior products") {
    const auto c = zpq();
    const DiffForm eta = darboux_eta(c);
    CHECK(interior(VecField::coordinate(c, 0), eta).coeff({}).constant_value() == 1.0);
    CHECK(interior(VecField::zero(c), eta).is_structurally_zero());

    const auto t = zpqs();
    const Expr s = variable(t, "s");
    const DiffForm et = darboux_eta(t);
    const DiffForm omega = wedge(DiffForm::coordinate_differential(t, 3), et) + s * exterior_d(et);
    const VecField euler = s * VecField::coordinate(t, 3);
    const DiffForm diff = interior(euler, omega) - s * et;
    for (const auto& x : points(t, 3)) CHECK(diff.sup_norm_at(x) <= 1e-14);
}

TEST_CASE("interior product is an antiderivation") {
    const auto c = make_chart("R4", {"a", "b", "c", "d"});
    std::mt19937_64 rng(8);
    for (int i = 0; i < 5; ++i) {
        const VecField x = testsupport::random_field(c, rng, 2);
        const DiffForm a = testsupport::random_form(c, 1, rng);
        const DiffForm b = testsupport::random_form(c, 2, rng);
        const DiffForm lhs = interior(x, wedge(a, b));
        const DiffForm rhs = wedge(interior(x, a), b) - wedge(a, interior(x, b));
        for (const auto& p : points(c, 9, 5)) CHECK((lhs - rhs).sup_norm_at(p) <= 1e-10);
    }
}

TEST_CASE("Lie derivatives of the listed cases") {
    const auto c = zpq();
    const DiffForm eta = darboux_eta(c);
    CHECK(lie_derivative(VecField::coordinate(c, 2), eta).is_structurally_zero());

    const DiffForm zdq = one_form(c, {{"q", "z"}});
    const DiffForm l = lie_derivative(VecField::coordinate(c, 0), zdq);
    CHECK(l.coeffs().size() == 1);
    CHECK(l.coeff({2}).constant_value() == 1.0);

    // ∂_q − p∂_p − z∂_z rescales η by −1
    const VecField xi(c, {parse("-z", c), parse("-p", c), parse("1", c)});
    const DiffForm lx = lie_derivative(xi, eta) + eta;
    for (const auto& x : points(c, 4)) CHECK(lx.sup_norm_at(x) <= 1e-14);
}

TEST_CASE("Lie derivative agrees with the flow oracle") {
    const auto c = zpq();
    std::mt19937_64 rng(12);
    const VecField x = testsupport::random_field(c, rng, 1);
    const DiffForm a = testsupport::random_form(c, 2, rng);
    const DiffForm l = lie_derivative(x, a);
    const oracle::Field xf = [&](const Point& y) { return x.evaluate(y); };
    for (const auto& p : points(c, 13, 10)) {
        for (const auto& [idx, v] : oracle::lie_by_flow_all(a, xf, p)) {
            CHECK(coeff_at(l, idx, p) == doctest::Approx(v).epsilon(1e-6));
        }
    }
}

TEST_CASE("Lie bracket against finite differences and the Lie-derivative commutator") {
    const auto c = zpq();
    std::mt19937_64 rng(21);
    const VecField x = testsupport::random_field(c, rng, 2);
    const VecField y = testsupport::random_field(c, rng, 2);
    const VecField b = lie_bracket(x, y);
    const DiffForm a = testsupport::random_form(c, 1, rng);
    const DiffForm comm = lie_derivative(x, lie_derivative(y, a)) - lie_derivative(y, lie_derivative(x, a)) -
                          lie_derivative(b, a);
    for (const auto& p : points(c, 22)) {
        const auto fx = [&](const Point& q) {
            const Eigen::VectorXd v = x.evaluate(q);
            return Point(v.data(), v.data() + v.size());
        };
        const auto fy = [&](const Point& q) {
            const Eigen::VectorXd v = y.evaluate(q);
            return Point(v.data(), v.data() + v.size());
        };
        const Eigen::VectorXd expect = oracle::jacobian(fy, p) * x.evaluate(p) - oracle::jacobian(fx, p) * y.evaluate(p);
        CHECK((b.evaluate(p) - expect).cwiseAbs().maxCoeff() <= 1e-7);
        CHECK(comm.sup_norm_at(p) <= 1e-9);
    }
}

TEST_CASE("pullback of the reduced symplectic form") {
    const auto t = zpqs();
    const auto red = make_chart("reduced", {"zr", "sr"});
    const SmoothMap pi(t, red, {parse("z*exp(q)", t), parse("s*exp(-q)", t)});
    DiffForm w0(red, 2);
    w0.add_term({1, 0}, constant(red, 1.0));  // dsr∧dzr
    const DiffForm pulled = pullback(pi, w0);
    for (const auto& x : points(t, 5)) {
        CHECK(coeff_at(pulled, {0, 3}, x) == doctest::Approx(-1.0));
        CHECK(coeff_at(pulled, {2, 3}, x) == doctest::Approx(-x[0]));
        CHECK(coeff_at(pulled, {0, 2}, x) == doctest::Approx(x[3]));
        CHECK(coeff_at(pulled, {1, 2}, x) == doctest::Approx(0.0));
    }
}

TEST_CASE("pullback under the identity and of functions") {
    const auto c = zpq();
    std::mt19937_64 rng(6);
    const DiffForm a = testsupport::random_form(c, 2, rng);
    const DiffForm same = pullback(SmoothMap::identity(c), a);
    for (const auto& x : points(c, 6)) CHECK((same - a).sup_norm_at(x) <= 1e-14);

    const auto t = make_chart("ab", {"a", "b"});
    const SmoothMap phi(t, c, {parse("a*b", t), parse("a + b", t), parse("sin(a)", t)});
    const Expr f = parse("z + p*q", c);
    const DiffForm pf = pullback(phi, DiffForm::scalar(f));
    for (const auto& x : points(t, 7)) {
        CHECK(pf.coeff({}).evaluate(x) == doctest::Approx(f.evaluate(phi.apply(x))));
    }
}

TEST_CASE("pullback agrees with the finite-difference oracle and commutes with d") {
    const auto c = zpq();
    std::mt19937_64 rng(31);
    const SmoothMap phi = testsupport::random_near_identity(c, rng);
    const DiffForm a = testsupport::random_form(c, 1, rng);
    const DiffForm pa = pullback(phi, a);
    const DiffForm nat = exterior_d(pa) - pullback(phi, exterior_d(a));
    const auto fn = [&](const Point& y) { return phi.apply(y); };
    for (const auto& x : points(c, 32)) {
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(coeff_at(pa, {i}, x) == doctest::Approx(oracle::pullback_component(a, fn, x, {i})).epsilon(1e-7));
        }
        CHECK(nat.sup_norm_at(x) <= 1e-10);
    }
}

TEST_CASE("form matrices") {
    const auto c = zpq();
    const Eigen::MatrixXd m = form_matrix_at(exterior_d(darboux_eta(c)), std::vector<double>{0.3, -0.2, 0.9});
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(3, 3);
    expect(1, 2) = -1.0;
    expect(2, 1) = 1.0;
    CHECK(m.isApprox(expect));
    CHECK(form_matrix_at(DiffForm(c, 2), std::vector<double>{0, 0, 0}).isZero());

    const auto t = zpqs();
    const DiffForm et = darboux_eta(t);
    const DiffForm omega = wedge(DiffForm::coordinate_differential(t, 3), et) + variable(t, "s") * exterior_d(et);
    CHECK(rank_of(form_matrix_at(omega, std::vector<double>{0, 0, 0, 1})) == 4);
}

TEST_CASE("recharting forms and fields") {
    const auto c = zpq();
    const auto t = zpqs();
    const DiffForm moved = rechart(darboux_eta(c), t);
    CHECK(moved.coeff({2}).evaluate(std::vector<double>{0, 2, 0, 1}) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(rechart(DiffForm::coordinate_differential(t, 3), c), Error);
}

}

// Acceptance gate: one PASS/FAIL line per criterion, followed by indented
// measurements. Tolerances and runtime limits are pinned here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "contactred/scene.hpp"
#include "support/properties.hpp"
#include "support/random_expr.hpp"

using namespace contactred;

namespace {

Scene scene(const std::string& name) {
    return load_scene(std::filesystem::path(CONTACTRED_SCENES_DIR) / (name + ".json"));
}

struct Outcome {
    bool passed = true;
    std::vector<std::string> lines;

    void measure(const std::string& what, double value, double tol, bool ok) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-52s %.3e (tol %.0e) %s", what.c_str(), value, tol, ok ? "ok" : "FAILED");
        lines.emplace_back(buf);
        passed = passed && ok;
    }
    void at_most(const std::string& what, double value, double tol) { measure(what, value, tol, value <= tol); }
    void require(const std::string& what, bool ok) {
        lines.push_back(what + (ok ? " ok" : " FAILED"));
        passed = passed && ok;
    }
};

double vec_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

Outcome criterion1() {
    Outcome o;
    const Scene s = scene("mwm");
    const auto& cover = s.require_cover();
    const auto& a = s.actions.at("translation").spec;
    const Expr claimed = parse("s*(p+z)", cover.total);
    const Expr faithful = parse("-s*(p+z)", cover.total);
    auto pts = s.cover_samples();
    pts.resize(200);
    double gap = 0.0;
    double faithful_gap = 0.0;
    for (const auto& x : pts) {
        const double j = moment_value_at(a, cover, x)(0);
        gap = std::max(gap, std::abs(j - claimed.evaluate(x)));
        faithful_gap = std::max(faithful_gap, std::abs(j - faithful.evaluate(x)));
    }
    o.at_most("|J - s(p+z)| over 200 points", gap, 1e-10);
    char buf[128];
    std::snprintf(buf, sizeof buf, "  computed J = s*eta(xi) matches -s(p+z): max gap %.3e", faithful_gap);
    o.lines.emplace_back(buf);

    const auto& p0 = s.submanifolds.at("P0");
    const auto r = verify_reduction(cover, p0.manifold, s.quotients.at("Q0"), s.submanifold_samples(p0));
    o.require("reduction of {p+z=0} verified at " + std::to_string(r.samples.size()) + " points", r.passed());
    o.at_most("max pullback residual", r.max_pullback_residual.value_or(INFINITY), 1e-8);
    return o;
}

Outcome criterion2() {
    Outcome o;
    for (const char* name : {"darboux3", "darboux5", "precontact4", "conformal4"}) {
        const Scene s = scene(name);
        const auto& h = s.require_hyperplane();
        const auto& cover = s.require_cover();
        const int r = h.claimed_r();
        auto pts = s.cover_samples();
        pts.resize(200);
        int wrong = 0;
        for (const auto& x : pts) {
            if (x[cover.s_index] == 0.0 || rank_of(form_matrix_at(cover.omega, x)) != 2 * r + 2) ++wrong;
        }
        o.measure(std::string(name) + ": points with rank(omega) != 2r+2", wrong, 0, wrong == 0);
        const auto base = s.base_samples();
        const auto rep = verify_precontact(h, base);
        o.require(std::string(name) + ": measured r = " + (rep.measured_r ? std::to_string(*rep.measured_r) : "none"),
                  rep.passed() && rep.measured_r == r);
        if (std::string(name) == "conformal4") {
            int full_bad = 0;
            int restricted_bad = 0;
            for (const auto& y : base) {
                const Eigen::MatrixXd m = form_matrix_at(h.d_eta(), y);
                if (rank_of(m) != 4) ++full_bad;
                if (rank_of(restrict_bilinear(m, hyperplane_at(h, y))) != 2) ++restricted_bad;
            }
            o.measure("conformal4: points with rank(d eta') != 4", full_bad, 0, full_bad == 0);
            o.measure("conformal4: points with rank(d eta'|C) != 2", restricted_bad, 0, restricted_bad == 0);
        }
    }
    return o;
}

Outcome criterion3() {
    Outcome o;
    const Scene s = scene("darboux3");
    const auto& h = s.require_hyperplane();
    const auto& cover = s.require_cover();
    const auto& layout = *s.layout;
    auto base = s.base_samples();
    base.resize(200);
    auto total = s.cover_samples();
    total.resize(200);
    for (const char* src : {"-1", "-(p+z)", "p*q"}) {
        const Expr ham = parse(src, s.chart);
        const VecField closed = darboux_contact_field(layout, ham);
        double field_gap = 0.0;
        for (const auto& y : base) field_gap = std::max(field_gap, vec_gap(contact_field_at(h, ham, y), closed.evaluate(y)));
        o.at_most(std::string("(a) H = ") + src + ": solve vs closed form", field_gap, 1e-8);

        double evo = 0.0;
        for (std::size_t i = 0; i < 5; ++i) {
            const auto tr = flow(evaluator(closed), s.chart, base[i], 1.0, 1e-3);
            evo = std::max(evo, contact_evolution_residual(h, ham, tr));
        }
        o.at_most(std::string("(b) H = ") + src + ": evolution law residual", evo, 1e-5);

        const Expr lift = homogeneous_lift(cover, ham);
        double lift_gap = 0.0;
        for (const auto& x : total) {
            const Point y = base_point(x);
            const auto sol = cover_field_at(cover, lift, x);
            const Eigen::VectorXd xb = contact_field_at(h, ham, y);
            lift_gap = std::max(lift_gap, vec_gap(sol.particular.head(xb.size()), xb));
            lift_gap = std::max(lift_gap, std::abs(sol.particular(static_cast<Eigen::Index>(cover.s_index)) -
                                                   reeb_derivative_at(h, ham, y) * x[cover.s_index]));
        }
        o.at_most(std::string("(c) H = ") + src + ": cover lift vs base field", lift_gap, 1e-8);
    }
    return o;
}

Outcome criterion4() {
    Outcome o;
    for (const char* name : {"darboux3", "darboux5"}) {
        const Scene s = scene(name);
        const auto& h = s.require_hyperplane();
        const auto& layout = *s.layout;
        std::mt19937_64 rng(s.sampling.seed);
        auto pts = s.base_samples();
        pts.resize(100);
        double agree = 0.0;
        double anti = 0.0;
        double jacobi = 0.0;
        for (int k = 0; k < 10; ++k) {
            const Expr f = testsupport::random_polynomial(s.chart, rng, 2, 4);
            const Expr g = testsupport::random_polynomial(s.chart, rng, 2, 4);
            const Expr third = testsupport::random_polynomial(s.chart, rng, 2, 4);
            const Expr fg = darboux_bracket(layout, f, g);
            const Expr gf = darboux_bracket(layout, g, f);
            const Expr route = commutator_bracket(h, layout, f, g);
            auto br = [&](const Expr& a, const Expr& b) { return commutator_bracket(h, layout, a, b); };
            const Expr jac = br(f, br(g, third)) + br(g, br(third, f)) + br(third, br(f, g));
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const auto& y = pts[i];
                agree = std::max(agree, std::abs(fg.evaluate(y) - route.evaluate(y)));
                if (i < 50) {
                    anti = std::max(anti, std::abs(fg.evaluate(y) + gf.evaluate(y)));
                    jacobi = std::max(jacobi, std::abs(jac.evaluate(y)));
                }
            }
        }
        o.at_most(std::string(name) + ": Darboux formula vs commutator", agree, 1e-7);
        o.at_most(std::string(name) + ": antisymmetry", anti, 1e-6);
        o.at_most(std::string(name) + ": Jacobi identity", jacobi, 1e-6);
    }
    return o;
}

Outcome criterion5() {
    Outcome o;
    {
        const Scene s = scene("example-z0");
        const auto& cover = s.require_cover();
        const auto& n = s.submanifolds.at("N");
        const auto lifted = lift_submanifold(cover, n.manifold);
        ClassifyOptions opts;
        opts.annihilation_tol = n.tolerance;
        const auto pts = s.submanifold_samples(n);
        double angle = 0.0;
        int flag_errors = 0;
        int coisotropy_errors = 0;
        std::mt19937_64 rng(s.sampling.seed);
        std::uniform_real_distribution<double> fibre(0.25, 2.0);
        for (const auto& y : pts) {
            const double p = y[s.chart->require_index("p")];
            const auto cls = classify_at(cover, n.manifold, y, opts);
            if (cls.transversal != (std::abs(p) >= 0.05)) ++flag_errors;
            if (!cls.coisotropic) ++coisotropy_errors;
            if (std::abs(p) < 0.05) continue;
            const double sv = (rng() % 2 ? 1.0 : -1.0) * fibre(rng);
            const Point x = lift_point(y, sv);
            Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.size()));
            v(static_cast<Eigen::Index>(s.chart->require_index("p"))) = -p;
            v(static_cast<Eigen::Index>(cover.s_index)) = sv;
            angle = std::max(angle, max_principal_angle(restricted_kernel_at(cover, lifted, x), Subspace::span(v)));
        }
        o.lines.push_back("example-z0: " + std::to_string(pts.size()) + " points on N");
        o.at_most("example-z0: kernel angle to span{s ds - p dp}", angle, 1e-6);
        o.measure("example-z0: coisotropy flag false", coisotropy_errors, 0, coisotropy_errors == 0);
        o.measure("example-z0: transversal != (|p| >= 0.05)", flag_errors, 0, flag_errors == 0);
    }
    {
        const Scene s = scene("example-r5");
        const auto& n = s.submanifolds.at("N");
        auto pts = s.submanifold_samples(n);
        o.measure("example-r5: points on N", static_cast<double>(pts.size()), 200, pts.size() >= 200);
        if (pts.size() > 200) pts.resize(200);
        const auto r = constant_rank_check(s.require_cover(), n.manifold, pts);
        o.require("example-r5: constant rank", r.constant_rank());
        o.require("example-r5: constantly transversal", r.constantly_transversal());
        o.require("example-r5: dim theta(N) = 2", r.k_base == 2);
    }
    return o;
}

Outcome criterion6() {
    Outcome o;
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(CONTACTRED_SCENES_DIR)) {
        if (entry.path().extension() == ".json") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) {
        const Scene s = load_scene(path);
        for (const auto& r : testsupport::run_property_suites(s)) {
            const bool ok = r.passed() && r.points >= testsupport::kPropertyPoints;
            o.measure(s.name + ": " + r.suite + " (" + std::to_string(r.points) + " pts)", r.worst, r.tolerance, ok);
        }
    }
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* title;
        double seconds;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"1", "moment map and reduction of the worked example", 5, criterion1},
        {"2", "cover rank at sample scale", 10, criterion2},
        {"3", "dynamics laws", 10, criterion3},
        {"4", "bracket cross-check", 30, criterion4},
        {"5", "submanifold examples", 10, criterion5},
        {"6", "property suites", 120, criterion6},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.lines.push_back(std::string("exception: ") + e.what());
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = elapsed < c.seconds;
        const bool ok = o.passed && in_time;
        if (!ok) ++failed;
        std::printf("%s criterion %s: %s (%.2f s, limit %.0f s)\n", ok ? "PASS" : "FAIL", c.id, c.title, elapsed,
                    c.seconds);
        for (const auto& l : o.lines) std::printf("    %s\n", l.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}

#include "contactred/commands.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace contactred {

namespace {

using nlohmann::ordered_json;

ordered_json vec_json(const Eigen::VectorXd& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

ordered_json basis_json(const Eigen::MatrixXd& m) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(vec_json(m.col(j)));
    return a;
}

template <class Map>
const typename Map::mapped_type& find_named(const Map& m, const std::string& name, const char* kind) {
    const auto it = m.find(name);
    if (it == m.end()) throw SceneError(std::string("unknown ") + kind + " '" + name + "'");
    return it->second;
}

void require_count(Report& r, std::size_t got, std::size_t wanted) {
    r.check("sample_count", got >= wanted && got > 0, static_cast<double>(got), static_cast<double>(wanted));
}

Subspace span_of_fields(const std::vector<VecField>& fields, std::span<const double> x, Eigen::Index ambient) {
    Eigen::MatrixXd cols(ambient, static_cast<Eigen::Index>(fields.size()));
    for (std::size_t i = 0; i < fields.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = fields[i].evaluate(x);
    return Subspace::span(cols);
}

std::vector<VecField> cover_field_list(const Scene& scene, const ordered_json& names) {
    std::vector<VecField> out;
    for (const auto& n : names) out.push_back(find_named(scene.cover_fields, n.get<std::string>(), "cover field"));
    return out;
}

double angle_both(const Subspace& a, const Subspace& b) {
    return std::max(max_principal_angle(a, b), max_principal_angle(b, a));
}

constexpr double kAngleTol = 1e-6;

}  // namespace

Report::Report(std::string command, const Scene* scene) {
    header_["schema"] = kSceneSchema;
    header_["command"] = std::move(command);
    if (scene) {
        header_["scene"] = scene->name;
        header_["seed"] = scene->sampling.seed;
    }
}

void Report::check(const std::string& name, bool passed, std::optional<double> value, std::optional<double> tolerance,
                   const std::string& detail) {
    ordered_json c;
    c["name"] = name;
    c["passed"] = passed;
    if (value) c["value"] = *value;
    if (tolerance) c["tolerance"] = *tolerance;
    if (!detail.empty()) c["detail"] = detail;
    checks_.push_back(std::move(c));
    passed_ = passed_ && passed;
}

ordered_json Report::to_json() const {
    ordered_json out = header_;
    out["passed"] = passed_;
    out["checks"] = checks_;
    out["results"] = results_;
    return out;
}

// ---------------------------------------------------------------------------

Report run_check(const Scene& scene) {
    Report r("check", &scene);
    const auto& h = scene.require_hyperplane();
    const auto& cover = scene.require_cover();
    const auto points = scene.base_samples();
    require_count(r, points.size(), scene.sampling.count);

    const auto pr = verify_precontact(h, points);
    r.check("nonvanishing", pr.nonvanishing, std::nullopt, kNonvanishingTol);
    r.check("criterion_restricted_rank", pr.criterion_rank);
    r.check("criterion_wedge", pr.criterion_wedge, std::nullopt, kWedgeTol);
    r.check("criterion_characteristic_dim", pr.criterion_kernel);
    r.check("criteria_agree", pr.criteria_agree);
    r.check("measured_r_constant", pr.measured_r.has_value());
    r.check("measured_r_matches_claim", pr.measured_r == h.claimed_r(),
            pr.measured_r ? std::optional<double>(*pr.measured_r) : std::nullopt, h.claimed_r());

    std::set<int> full_ranks;
    std::set<int> restricted_ranks;
    ordered_json pts = ordered_json::array();
    for (const auto& p : pr.points) {
        full_ranks.insert(p.full_rank);
        restricted_ranks.insert(p.restricted_rank);
        pts.push_back({{"point", p.point},
                       {"restricted_rank", p.restricted_rank},
                       {"wedge_r_norm", p.wedge_r_norm},
                       {"wedge_r1_norm", p.wedge_r1_norm},
                       {"characteristic_dim", p.characteristic_dim},
                       {"full_rank", p.full_rank}});
    }

    const auto cpoints = scene.cover_samples();
    require_count(r, cpoints.size(), scene.sampling.count);
    const auto cr = check_cover(cover, cpoints);
    r.check("cover_rank", cr.rank_ok, cr.expected_rank);
    r.check("cover_d_theta", cr.max_d_theta_residual <= 1e-9, cr.max_d_theta_residual, 1e-9);
    r.check("cover_euler", cr.max_euler_residual <= 1e-9, cr.max_euler_residual, 1e-9);
    r.check("cover_homogeneity", cr.max_homogeneity_residual <= 1e-9, cr.max_homogeneity_residual, 1e-9);
    double worst_angle = 0.0;
    for (const auto& x : cpoints) worst_angle = std::max(worst_angle, characteristic_projection_angle(cover, x));
    r.check("characteristic_projection", worst_angle <= kAngleTol, worst_angle, kAngleTol);

    ordered_json cpts = ordered_json::array();
    for (const auto& c : cr.points) {
        cpts.push_back({{"point", c.point},
                        {"omega_rank", c.omega_rank},
                        {"d_theta_residual", c.d_theta_residual},
                        {"euler_residual", c.euler_residual},
                        {"homogeneity_residual", c.homogeneity_residual}});
    }

    const auto& expect = scene.expect.contains("check") ? scene.expect.at("check") : ordered_json::object();
    if (expect.contains("measured_r")) {
        const int want = expect.at("measured_r").get<int>();
        r.check("expected_measured_r", pr.measured_r == want, pr.measured_r ? std::optional<double>(*pr.measured_r) : std::nullopt, want);
    }
    if (expect.contains("contact")) r.check("expected_contact", pr.contact() == expect.at("contact").get<bool>());
    if (expect.contains("full_rank")) {
        const int want = expect.at("full_rank").get<int>();
        r.check("expected_full_rank", full_ranks == std::set<int>{want}, *full_ranks.rbegin(), want);
    }
    if (expect.contains("restricted_rank")) {
        const int want = expect.at("restricted_rank").get<int>();
        r.check("expected_restricted_rank", restricted_ranks == std::set<int>{want}, *restricted_ranks.rbegin(), want);
    }

    auto& res = r.results();
    res["dim"] = pr.dim;
    res["claimed_r"] = pr.claimed_r;
    res["measured_r"] = pr.measured_r ? ordered_json(*pr.measured_r) : ordered_json();
    res["contact"] = pr.contact();
    res["marginal"] = pr.marginal || cr.marginal;
    res["full_ranks"] = full_ranks;
    res["cover_expected_rank"] = cr.expected_rank;
    res["points"] = std::move(pts);
    res["cover_points"] = std::move(cpts);
    return r;
}

Report run_reeb(const Scene& scene) {
    Report r("reeb", &scene);
    const auto& h = scene.require_hyperplane();
    const auto points = scene.base_samples();
    require_count(r, points.size(), scene.sampling.count);
    const bool darboux = scene.layout && scene.layout->u.empty();
    double worst = 0.0;
    double worst_model = 0.0;
    bool defined = true;
    std::string error;
    ordered_json pts = ordered_json::array();
    for (const auto& y : points) {
        try {
            const Eigen::VectorXd reeb = reeb_at(h, y);
            const double a = std::abs(h.eta().covector_at(y).dot(reeb) - 1.0);
            const double b = (form_matrix_at(h.d_eta(), y).transpose() * reeb).cwiseAbs().maxCoeff();
            worst = std::max({worst, a, b});
            if (darboux) {
                Eigen::VectorXd dz = Eigen::VectorXd::Zero(reeb.size());
                dz(static_cast<Eigen::Index>(scene.layout->z)) = 1.0;
                worst_model = std::max(worst_model, (reeb - dz).cwiseAbs().maxCoeff());
            }
            pts.push_back({{"point", y}, {"reeb", vec_json(reeb)}});
        } catch (const NotContact& e) {
            defined = false;
            error = e.what();
            break;
        }
    }
    r.check("reeb_defined", defined, std::nullopt, std::nullopt, error);
    r.check("reeb_equations", defined && worst <= 1e-9, worst, 1e-9);
    if (darboux) r.check("darboux_reeb_is_d_dz", defined && worst_model <= 1e-12, worst_model, 1e-12);
    r.results()["points"] = std::move(pts);
    return r;
}

EvolveResult run_evolve(const Scene& scene, const EvolveArgs& args) {
    EvolveResult out{Report("evolve", &scene), std::nullopt};
    Report& r = out.report;
    const auto& h = scene.require_hyperplane();
    const Expr& ham = find_named(scene.functions, args.hamiltonian, "function");
    if (args.x0.size() != scene.chart->dim()) {
        throw SceneError("--x0 needs " + std::to_string(scene.chart->dim()) + " coordinates");
    }
    if (!(args.dt > 0.0) || !(args.t1 >= args.t0)) throw SceneError("need dt > 0 and t1 >= t0");

    const bool darboux = scene.layout && scene.layout->u.empty();
    FieldEvaluator field;
    if (darboux) {
        field = evaluator(darboux_contact_field(*scene.layout, ham));
    } else {
        field = [&h, &ham](std::span<const double> y) { return contact_field_at(h, ham, y); };
    }
    FlowOptions fo;
    fo.t0 = args.t0;
    if (args.bounded) fo.bounded_by = scene.chart.get();

    auto& res = r.results();
    res["hamiltonian"] = ham.to_string();
    res["field_route"] = darboux ? "darboux closed form" : "pointwise linear solve";
    try {
        auto fw = flow_with_estimate(field, scene.chart, args.x0, args.t1 - args.t0, args.dt, fo);
        const auto& traj = fw.trajectory;
        r.check("flow_completed", true);
        const double residual = traj.states.size() >= 5 ? contact_evolution_residual(h, ham, traj) : 0.0;
        r.check("evolution_law", residual <= 1e-5, residual, 1e-5);
        r.check("step_error_estimate_finite", std::isfinite(fw.error_estimate), fw.error_estimate);
        res["steps"] = traj.times.size() - 1;
        res["step"] = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 0.0;
        res["final_time"] = traj.times.back();
        res["final_state"] = traj.states.back();
        res["error_estimate"] = fw.error_estimate;
        res["evolution_residual"] = residual;
        out.trajectory = std::move(fw.trajectory);
    } catch (const FlowError& e) {
        r.check("flow_completed", false, e.time(), std::nullopt, e.what());
    } catch (const NotContact& e) {
        r.check("flow_completed", false, std::nullopt, std::nullopt, e.what());
    }
    return out;
}

Report run_bracket(const Scene& scene, const std::string& f, const std::string& hname, std::size_t count) {
    Report r("bracket", &scene);
    const auto& h = scene.require_hyperplane();
    if (!scene.layout || !scene.layout->u.empty()) throw SceneError("bracket needs a Darboux chart (z, p.., q..)");
    const Expr& fe = find_named(scene.functions, f, "function");
    const Expr& he = find_named(scene.functions, hname, "function");
    const JacobiBracket fh(h, *scene.layout, fe, he);
    const JacobiBracket hf(h, *scene.layout, he, fe);
    SamplingOptions o = scene.sampling;
    o.count = count;
    const auto points = sample_on(ConstraintSubmanifold(scene.chart, {}), o, scene.excluded);
    require_count(r, points.size(), count);
    double agree = 0.0;
    double anti = 0.0;
    ordered_json pts = ordered_json::array();
    for (const auto& y : points) {
        const double a = fh.darboux_value(y);
        const double b = fh.commutator_value(y);
        agree = std::max(agree, std::abs(a - b));
        anti = std::max(anti, std::abs(a + hf.darboux_value(y)));
        pts.push_back({{"point", y}, {"darboux", a}, {"commutator", b}});
    }
    r.check("routes_agree", agree <= kBracketAgreementTol, agree, kBracketAgreementTol);
    r.check("antisymmetry", anti <= 1e-6, anti, 1e-6);
    r.results()["formula"] = fh.formula().to_string();
    r.results()["points"] = std::move(pts);
    return r;
}

Report run_classify(const Scene& scene, const std::string& name) {
    Report r("classify", &scene);
    const auto& cover = scene.require_cover();
    const auto& sub = find_named(scene.submanifolds, name, "submanifold");
    if (sub.on_cover) throw SceneError("classify needs a base submanifold");
    const auto points = scene.submanifold_samples(sub);
    require_count(r, points.size(), scene.sampling.count);

    ClassifyOptions opts;
    opts.annihilation_tol = sub.tolerance;
    const auto report = constant_rank_check(cover, sub.manifold, points, opts);
    r.check("classifier_coherence", report.coherent);

    const auto& ex = sub.expect;
    if (ex.contains("flags")) {
        for (const auto& [flag, want] : ex.at("flags").items()) {
            std::size_t bad = 0;
            for (const auto& c : report.points) {
                bool got = false;
                if (flag == "transversal") got = c.transversal;
                else if (flag == "isotropic") got = c.isotropic;
                else if (flag == "coisotropic") got = c.coisotropic;
                else if (flag == "legendrian") got = c.legendrian;
                else throw SceneError("unknown flag '" + flag + "' in expectations of " + name);
                if (got != want.get<bool>()) ++bad;
            }
            r.check("expected_" + flag, bad == 0, static_cast<double>(bad), 0.0, "samples violating the expectation");
        }
    }
    if (ex.contains("non_transversal_where")) {
        const Expr locus = parse(ex.at("non_transversal_where").get<std::string>(), scene.chart);
        std::size_t bad = 0;
        std::size_t off = 0;
        for (const auto& c : report.points) {
            const bool small = std::abs(locus.evaluate(c.point)) < sub.tolerance;
            off += small ? 1 : 0;
            if (c.transversal == small) ++bad;
        }
        r.check("non_transversal_locus", bad == 0, static_cast<double>(bad), 0.0,
                std::to_string(off) + " samples on the locus");
    }
    if (ex.contains("restricted_kernel")) {
        const auto lifted = lift_submanifold(cover, sub.manifold);
        const auto& rk = ex.at("restricted_kernel");
        const auto all = rk.contains("everywhere") ? cover_field_list(scene, rk.at("everywhere")) : std::vector<VecField>{};
        const auto on = rk.contains("transversal") ? cover_field_list(scene, rk.at("transversal")) : std::vector<VecField>{};
        const auto off = rk.contains("non_transversal") ? cover_field_list(scene, rk.at("non_transversal"))
                                                        : std::vector<VecField>{};
        double worst_all = 0.0;
        double worst_on = 0.0;
        double worst_off = 0.0;
        for (const auto& c : report.points) {
            for (double s : {1.0, -1.5}) {
                const Point x = lift_point(c.point, s);
                const Subspace kr = restricted_kernel_at(cover, lifted, x);
                const auto ambient = static_cast<Eigen::Index>(cover.total->dim());
                if (!all.empty()) worst_all = std::max(worst_all, angle_both(kr, span_of_fields(all, x, ambient)));
                if (c.transversal && rk.contains("transversal")) {
                    worst_on = std::max(worst_on, angle_both(kr, span_of_fields(on, x, ambient)));
                } else if (!c.transversal && rk.contains("non_transversal")) {
                    worst_off = std::max(worst_off, angle_both(kr, span_of_fields(off, x, ambient)));
                }
            }
        }
        if (rk.contains("everywhere")) r.check("restricted_kernel", worst_all <= kAngleTol, worst_all, kAngleTol);
        if (rk.contains("transversal")) r.check("restricted_kernel_transversal", worst_on <= kAngleTol, worst_on, kAngleTol);
        if (rk.contains("non_transversal")) {
            r.check("restricted_kernel_non_transversal", worst_off <= kAngleTol, worst_off, kAngleTol);
        }
    }
    if (ex.contains("vertical_kernel_where")) {
        const Expr locus = parse(ex.at("vertical_kernel_where").get<std::string>(), scene.chart);
        std::size_t bad = 0;
        for (const auto& c : report.points) {
            if (c.vertical_kernel != (std::abs(locus.evaluate(c.point)) <= kAngleTol)) ++bad;
        }
        r.check("vertical_kernel_locus", bad == 0, static_cast<double>(bad), 0.0);
    }
    if (ex.contains("constant_rank")) r.check("expected_constant_rank", report.constant_rank() == ex.at("constant_rank").get<bool>());
    if (ex.contains("constantly_transversal")) {
        r.check("expected_constantly_transversal",
                report.constantly_transversal() == ex.at("constantly_transversal").get<bool>());
    }
    if (ex.contains("k_base")) {
        r.check("expected_k_base", report.k_base == ex.at("k_base").get<int>(),
                report.k_base ? std::optional<double>(*report.k_base) : std::nullopt, ex.at("k_base").get<double>());
    }
    if (ex.contains("k_cover")) {
        r.check("expected_k_cover", report.k_cover == ex.at("k_cover").get<int>(),
                report.k_cover ? std::optional<double>(*report.k_cover) : std::nullopt, ex.at("k_cover").get<double>());
    }

    auto& res = r.results();
    res["tolerance"] = sub.tolerance;
    res["constant_rank"] = report.constant_rank();
    res["constantly_transversal"] = report.constantly_transversal();
    res["all_transversal"] = report.all_transversal;
    res["k_base"] = report.k_base ? ordered_json(*report.k_base) : ordered_json();
    res["k_cover"] = report.k_cover ? ordered_json(*report.k_cover) : ordered_json();
    ordered_json pts = ordered_json::array();
    for (const auto& c : report.points) {
        pts.push_back({{"point", c.point},
                       {"transversal", c.transversal},
                       {"isotropic", c.isotropic},
                       {"coisotropic", c.coisotropic},
                       {"legendrian", c.legendrian},
                       {"eta_on_tangent", c.eta_on_tangent},
                       {"coisotropy_angle", c.coisotropy_angle},
                       {"k_base", c.k_base},
                       {"k_cover", c.k_cover},
                       {"vertical_kernel", c.vertical_kernel}});
    }
    res["points"] = std::move(pts);
    return r;
}

Report run_moment(const Scene& scene, const std::string& name) {
    Report r("moment", &scene);
    const auto& cover = scene.require_cover();
    const auto& act = find_named(scene.actions, name, "action");
    const auto& a = act.spec;
    const auto validation = validate_action(a, cover.base, scene.base_samples());
    std::string why;
    for (const auto& f : validation.failures) why += (why.empty() ? "" : "; ") + f;
    r.check("action_valid", validation.passed(), std::nullopt, std::nullopt, why);
    if (!validation.passed()) return r;

    const auto points = scene.cover_samples();
    require_count(r, points.size(), scene.sampling.count);
    const auto moment = moment_map(a, cover);
    std::vector<Expr> expected;
    if (act.expect.contains("moment")) {
        for (const auto& e : act.expect.at("moment")) expected.push_back(parse(e.get<std::string>(), cover.total));
        if (expected.size() != a.dim()) throw SceneError("expected moment map has the wrong length");
    }
    double routes = 0.0;
    double expect_res = 0.0;
    double homog = 0.0;
    double kernel_angle = 0.0;
    double equiv = 0.0;
    bool theta_in = true;
    bool control_broken = false;
    bool control_applicable = false;
    for (const auto& x : points) {
        const Eigen::VectorXd j = moment_value_at(a, cover, x);
        for (std::size_t i = 0; i < a.dim(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            routes = std::max(routes, std::abs(j(ii) - moment[i].evaluate(x)));
            if (!expected.empty()) expect_res = std::max(expect_res, std::abs(j(ii) - expected[i].evaluate(x)));
        }
        for (double lambda : {-2.0, 0.5, 3.0}) {
            Point y = x;
            y[cover.s_index] *= lambda;
            homog = std::max(homog, (moment_value_at(a, cover, y) - lambda * j).cwiseAbs().maxCoeff() / (1.0 + j.norm()));
        }
        kernel_angle = std::max(kernel_angle, moment_kernel_angle(a, cover, x));
        equiv = std::max(equiv, equivariance_residual(a, cover, x));
        const Subspace theta = kernel_of(form_matrix_at(cover.omega, x));
        if (!contained_in(theta, kernel_of(moment_jacobian_at(a, cover, x)))) theta_in = false;
        const Eigen::MatrixXd lifts = lifts_at(a, cover, x);
        if (lifts.row(lifts.rows() - 1).cwiseAbs().maxCoeff() > 1e-12) {
            control_applicable = true;
            if (!moment_kernel_check(a, cover, x, true)) control_broken = true;
        }
    }
    r.check("moment_routes_agree", routes <= 1e-12, routes, 1e-12, "covector pairing vs symbolic J");
    if (!expected.empty()) r.check("expected_moment", expect_res <= 1e-10, expect_res, 1e-10);
    r.check("homogeneity", homog <= 1e-9, homog, 1e-9);
    r.check("kernel_identity", kernel_angle <= kAngleTol, kernel_angle, kAngleTol, "K(J) vs omega-orthogonal of lifts");
    r.check("theta_in_kernel", theta_in);
    r.check("equivariance", equiv <= kReductionTol, equiv, kReductionTol);
    if (control_applicable) {
        r.check("negative_control_detected", control_broken, std::nullopt, std::nullopt,
                "dropping the s d/ds term must break the kernel identity");
    }
    auto& res = r.results();
    ordered_json js = ordered_json::array();
    for (const auto& m : moment) js.push_back(m.to_string());
    res["moment_map"] = std::move(js);
    ordered_json pts = ordered_json::array();
    for (const auto& x : points) pts.push_back({{"point", x}, {"J", vec_json(moment_value_at(a, cover, x))}});
    res["points"] = std::move(pts);
    return r;
}

namespace {

void reduction_checks(Report& r, const ReductionReport& rr, const std::string& prefix) {
    std::size_t bad_rank = 0;
    for (const auto& s : rr.samples) bad_rank += s.map_rank == static_cast<int>(rr.reduced_dim) ? 0 : 1;
    r.check(prefix + "submersion", bad_rank == 0 && !rr.samples.empty(), static_cast<double>(bad_rank), 0.0,
            "samples where the quotient map is not a submersion on TN");
    r.check(prefix + "kernel_along_fibres", rr.max_kernel_residual <= kReductionTol, rr.max_kernel_residual,
            kReductionTol);
    if (rr.max_pullback_residual) {
        r.check(prefix + "pullback", *rr.max_pullback_residual <= kReductionTol, *rr.max_pullback_residual,
                kReductionTol);
    }
    if (rr.max_base_angle) {
        r.check(prefix + "base_hyperplanes", *rr.max_base_angle <= kAngleTol, *rr.max_base_angle, kAngleTol);
    }
}

ordered_json reduction_json(const ReductionReport& rr) {
    ordered_json out;
    out["reduced_dim"] = rr.reduced_dim;
    out["reduced_base_dim"] = rr.reduced_base_dim ? ordered_json(*rr.reduced_base_dim) : ordered_json();
    out["max_kernel_residual"] = rr.max_kernel_residual;
    out["max_pullback_residual"] = rr.max_pullback_residual ? ordered_json(*rr.max_pullback_residual) : ordered_json();
    out["max_base_angle"] = rr.max_base_angle ? ordered_json(*rr.max_base_angle) : ordered_json();
    out["failures"] = rr.failures;
    ordered_json pts = ordered_json::array();
    for (const auto& s : rr.samples) {
        ordered_json p{{"point", s.point}, {"map_rank", s.map_rank}, {"kernel_dim", s.kernel_dim},
                       {"kernel_residual", s.kernel_residual}};
        if (s.pullback_residual) p["pullback_residual"] = *s.pullback_residual;
        if (s.base_angle) p["base_angle"] = *s.base_angle;
        pts.push_back(std::move(p));
    }
    out["samples"] = std::move(pts);
    return out;
}

void describe_quotient(ordered_json& res, const QuotientData& q) {
    res["quotient"] = q.name;
    res["reduced_coords"] = q.map.target()->coords();
    if (q.omega0) res["omega0"] = q.omega0->to_string();
    if (q.base_map) res["reduced_base_coords"] = q.base_map->target()->coords();
    if (q.eta0) res["eta0"] = q.eta0->to_string();
}

}  // namespace

Report run_reduce(const Scene& scene, const std::string& name, const std::string& quotient) {
    Report r("reduce", &scene);
    const auto& cover = scene.require_cover();
    const auto& sub = find_named(scene.submanifolds, name, "submanifold");
    const auto& q = find_named(scene.quotients, quotient, "quotient");
    std::vector<Point> points;
    std::optional<ConstraintSubmanifold> lifted;
    if (sub.on_cover) {
        points = scene.submanifold_samples(sub);
    } else {
        lifted = lift_submanifold(cover, sub.manifold);
        SceneSubmanifold tmp{sub.name, true, *lifted, sub.tolerance, {}, {}, {}};
        for (const auto& e : sub.excluded) tmp.excluded.push_back(rechart(e, cover.total));
        points = scene.submanifold_samples(tmp);
    }
    require_count(r, points.size(), scene.sampling.count);
    const auto rr = verify_reduction(cover, lifted ? *lifted : sub.manifold, q, points);
    reduction_checks(r, rr, "");
    auto& res = r.results();
    describe_quotient(res, q);
    res["reduction"] = reduction_json(rr);
    return r;
}

Report run_mwm(const Scene& scene, const std::string& name, const std::vector<double>& mu_in,
               const std::optional<std::string>& quotient) {
    Report r("mwm", &scene);
    const auto& cover = scene.require_cover();
    const auto& act = find_named(scene.actions, name, "action");
    if (mu_in.size() != act.spec.dim()) {
        throw SceneError("--mu needs " + std::to_string(act.spec.dim()) + " components");
    }
    const auto validation = validate_action(act.spec, cover.base, scene.base_samples());
    std::string why;
    for (const auto& f : validation.failures) why += (why.empty() ? "" : "; ") + f;
    r.check("action_valid", validation.passed(), std::nullopt, std::nullopt, why);
    if (!validation.passed()) return r;

    const QuotientData* q = nullptr;
    if (quotient) {
        q = &find_named(scene.quotients, *quotient, "quotient");
    } else {
        for (const auto& [mu, qn] : act.quotients) {
            if (mu == mu_in) q = &find_named(scene.quotients, qn, "quotient");
        }
    }
    Eigen::VectorXd mu(static_cast<Eigen::Index>(mu_in.size()));
    for (std::size_t i = 0; i < mu_in.size(); ++i) mu(static_cast<Eigen::Index>(i)) = mu_in[i];

    MwmOptions opts;
    opts.sampling = scene.sampling;
    for (const auto& e : scene.excluded) opts.excluded.push_back(rechart(e, cover.total));
    const auto m = mwm_pipeline(act.spec, cover, mu, q, opts);

    r.check("moment_nondegenerate", !m.degenerate, std::nullopt, std::nullopt, m.note);
    if (m.degenerate) {
        r.results()["note"] = m.note;
        return r;
    }
    require_count(r, m.samples, scene.sampling.count);
    r.check("weak_regularity", m.weakly_regular, m.jacobian_rank ? std::optional<double>(*m.jacobian_rank) : std::nullopt,
            static_cast<double>(act.spec.dim()), "sampled: constant full rank of TJ");
    r.check("level_transversal", m.transversal);
    r.check("kernel_decomposition", m.max_kernel_angle <= kAngleTol, m.max_kernel_angle, kAngleTol,
            "ker(omega|P_[mu]) vs g0_mu^ + theta(omega)");
    r.check("theta_in_kernel", m.theta_in_kernel);
    r.check("moment_kernel_identity", m.max_moment_kernel_angle <= kAngleTol, m.max_moment_kernel_angle, kAngleTol);
    r.check("equivariance", m.max_equivariance_residual <= kReductionTol, m.max_equivariance_residual, kReductionTol);
    r.check("homogeneity", m.max_homogeneity_residual <= 1e-9, m.max_homogeneity_residual, 1e-9);
    if (m.reduction) reduction_checks(r, *m.reduction, "reduction_");

    const auto& ex = act.expect;
    if (ex.contains("g0mu_dim_at_zero") && mu.cwiseAbs().maxCoeff() == 0.0) {
        r.check("expected_g0mu_dim", m.g0mu_space.dim() == ex.at("g0mu_dim_at_zero").get<int>(),
                static_cast<double>(m.g0mu_space.dim()), ex.at("g0mu_dim_at_zero").get<double>());
    }

    auto& res = r.results();
    res["mu"] = mu_in;
    ordered_json js = ordered_json::array();
    for (const auto& e : m.moment) js.push_back(e.to_string());
    res["moment_map"] = std::move(js);
    ordered_json lc = ordered_json::array();
    for (const auto& e : m.level_constraints) lc.push_back(e.to_string());
    res["level_constraints"] = std::move(lc);
    res["g0mu_dim"] = m.g0mu_space.dim();
    res["g0mu_basis"] = basis_json(m.g0mu_space.basis());
    res["jacobian_rank"] = m.jacobian_rank ? ordered_json(*m.jacobian_rank) : ordered_json();
    res["weak_regularity"] = m.weakly_regular ? "consistent with weak regularity" : "not consistent with weak regularity";
    res["degenerate"] = m.degenerate;
    const std::set<int> dims(m.restricted_kernel_dims.begin(), m.restricted_kernel_dims.end());
    res["restricted_kernel_dims"] = dims;
    res["max_kernel_angle"] = m.max_kernel_angle;
    res["note"] = m.note;
    if (q) describe_quotient(res, *q);
    if (m.reduction) res["reduction"] = reduction_json(*m.reduction);
    res["failures"] = m.failures;
    return r;
}

}  // namespace contactred

#include "contactred/scene.hpp"

#include <fstream>
#include <sstream>

namespace contactred {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw SceneError(where + ": " + what); }

const json& member(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing '") + key + "'");
    return obj.at(key);
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected a string");
    return v.get<std::string>();
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<int>();
}

Expr expression(const json& v, const ChartPtr& chart, const std::string& where) {
    if (v.is_number()) return constant(chart, v.get<double>());
    const std::string src = as_string(v, where);
    try {
        return parse(src, chart);
    } catch (const ParseError& e) {
        fail(where, "syntax error at byte " + std::to_string(e.offset()) + " in '" + src + "': " + e.what());
    } catch (const UnknownIdentifier& e) {
        fail(where, "unknown identifier '" + e.name() + "' in '" + src + "' (chart " + chart->name() + ")");
    }
}

std::vector<Expr> expression_list(const json& v, const ChartPtr& chart, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of expressions");
    std::vector<Expr> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(expression(v[i], chart, where + "[" + std::to_string(i) + "]"));
    return out;
}

CoordDomain domain_entry(const json& v, const std::string& where) {
    CoordDomain d;
    if (v.is_array()) {
        if (v.size() != 2) fail(where, "interval must be [lo, hi]");
        d.lo = as_number(v[0], where);
        d.hi = as_number(v[1], where);
    } else if (v.is_object()) {
        d.lo = as_number(member(v, "lo", where), where);
        d.hi = as_number(member(v, "hi", where), where);
        if (v.contains("nonzero")) d.nonzero = v.at("nonzero").get<bool>();
    } else {
        fail(where, "expected [lo, hi] or {lo, hi, nonzero}");
    }
    if (!(d.lo < d.hi)) fail(where, "empty interval");
    return d;
}

std::vector<CoordDomain> domains(const json& spec, const std::vector<std::string>& coords, const std::string& where) {
    std::vector<CoordDomain> out(coords.size());
    if (!spec.contains("domain")) return out;
    const json& d = spec.at("domain");
    if (d.is_array()) {
        const auto entry = domain_entry(d, where + ".domain");
        std::fill(out.begin(), out.end(), entry);
        return out;
    }
    if (!d.is_object()) fail(where + ".domain", "expected an interval or an object keyed by coordinate");
    for (const auto& [k, v] : d.items()) {
        const auto it = std::find(coords.begin(), coords.end(), k);
        if (it == coords.end()) fail(where + ".domain", "unknown coordinate '" + k + "'");
        out[static_cast<std::size_t>(it - coords.begin())] = domain_entry(v, where + ".domain." + k);
    }
    return out;
}

ChartPtr chart_spec(const json& spec, const std::string& where) {
    const std::string name = spec.contains("name") ? as_string(spec.at("name"), where + ".name") : "chart";
    const json& c = member(spec, "coords", where);
    if (!c.is_array() || c.empty()) fail(where + ".coords", "expected a nonempty array of names");
    std::vector<std::string> coords;
    for (const auto& v : c) coords.push_back(as_string(v, where + ".coords"));
    try {
        return make_chart(name, coords, domains(spec, coords, where));
    } catch (const Error& e) {
        fail(where, e.what());
    }
}

std::vector<std::size_t> multi_index(const std::string& key, const Chart& chart, const std::string& where) {
    std::vector<std::size_t> idx;
    std::stringstream ss(key);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b == std::string::npos) continue;
        const std::string name = item.substr(b, e - b + 1);
        const auto i = chart.index_of(name);
        if (!i) fail(where, "unknown coordinate '" + name + "'");
        idx.push_back(*i);
    }
    return idx;
}

DiffForm form_spec(const json& spec, const ChartPtr& chart, const std::string& where) {
    const int degree = as_int(member(spec, "degree", where), where + ".degree");
    if (degree < 0 || static_cast<std::size_t>(degree) > chart->dim()) fail(where, "degree out of range");
    DiffForm f(chart, static_cast<std::size_t>(degree));
    const json& terms = member(spec, "terms", where);
    if (!terms.is_object()) fail(where + ".terms", "expected an object keyed by comma-separated coordinates");
    for (const auto& [k, v] : terms.items()) {
        auto idx = multi_index(k, *chart, where + ".terms");
        if (idx.size() != static_cast<std::size_t>(degree)) fail(where + ".terms." + k, "index count differs from degree");
        f.add_term(std::move(idx), expression(v, chart, where + ".terms." + k));
    }
    return f;
}

VecField field_spec(const json& spec, const ChartPtr& chart, const std::string& where) {
    if (!spec.is_object()) fail(where, "expected an object of components keyed by coordinate");
    std::vector<Expr> comps(chart->dim(), constant(chart, 0.0));
    for (const auto& [k, v] : spec.items()) {
        const auto i = chart->index_of(k);
        if (!i) fail(where, "unknown coordinate '" + k + "'");
        comps[*i] = expression(v, chart, where + "." + k);
    }
    return VecField(chart, std::move(comps));
}

std::vector<Point> point_list(const json& v, const Chart& chart, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of points");
    std::vector<Point> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != chart.dim()) {
            fail(w, "point must list " + std::to_string(chart.dim()) + " coordinates");
        }
        Point p;
        for (const auto& c : v[i]) p.push_back(as_number(c, w));
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<double> number_list(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) fail(where, "expected a number or an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(as_number(x, where));
    return out;
}

template <class Map>
const typename Map::mapped_type& lookup(const Map& m, const std::string& name, const char* kind, const std::string& where) {
    const auto it = m.find(name);
    if (it == m.end()) fail(where, std::string("unknown ") + kind + " '" + name + "'");
    return it->second;
}

SmoothMap map_spec(const json& spec, const ChartPtr& source, const ChartPtr& target, const std::string& where) {
    if (!spec.is_object()) fail(where, "expected an object keyed by target coordinate");
    std::vector<std::optional<Expr>> comps(target->dim());
    for (const auto& [k, v] : spec.items()) {
        const auto i = target->index_of(k);
        if (!i) fail(where, "unknown target coordinate '" + k + "'");
        comps[*i] = expression(v, source, where + "." + k);
    }
    std::vector<Expr> out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (!comps[i]) fail(where, "missing component '" + target->coords()[i] + "'");
        out.push_back(*comps[i]);
    }
    return SmoothMap(source, target, std::move(out));
}

void parse_chart(Scene& scene, const json& doc) {
    const json& spec = member(doc, "chart", "scene");
    if (spec.contains("darboux")) {
        const json& d = spec.at("darboux");
        const int m = as_int(member(d, "m", "chart.darboux"), "chart.darboux.m");
        const int r = as_int(member(d, "r", "chart.darboux"), "chart.darboux.r");
        if (m < 1 || r < 0 || m < 2 * r + 1) fail("chart.darboux", "need m >= 2r+1 >= 1");
        CoordDomain uniform;
        if (spec.contains("domain")) uniform = domain_entry(spec.at("domain"), "chart.domain");
        const auto model = darboux_model(m, r, uniform);
        scene.chart = model.chart;
        scene.layout = model.layout;
        scene.forms.emplace("eta", model.field.eta());
        if (!doc.contains("hyperplane")) scene.hyperplane = model.field;
        return;
    }
    scene.chart = chart_spec(spec, "chart");
    scene.layout = infer_darboux_layout(*scene.chart);
}

void parse_sampling(Scene& scene, const json& doc, std::optional<std::uint64_t> seed_override) {
    if (doc.contains("sampling")) {
        const json& s = doc.at("sampling");
        if (s.contains("count")) scene.sampling.count = static_cast<std::size_t>(as_int(s.at("count"), "sampling.count"));
        if (s.contains("seed")) scene.sampling.seed = s.at("seed").get<std::uint64_t>();
        if (s.contains("nonzero_floor")) scene.sampling.nonzero_floor = as_number(s.at("nonzero_floor"), "sampling.nonzero_floor");
        if (s.contains("excluded")) scene.excluded = expression_list(s.at("excluded"), scene.chart, "sampling.excluded");
        if (s.contains("points")) scene.points = point_list(s.at("points"), *scene.chart, "sampling.points");
    }
    if (seed_override) scene.sampling.seed = *seed_override;
}

CoordDomain fibre_domain(const json& doc) {
    CoordDomain fibre = kDefaultFibreDomain;
    if (doc.contains("sampling") && doc.at("sampling").contains("s_range")) {
        fibre = domain_entry(doc.at("sampling").at("s_range"), "sampling.s_range");
    }
    fibre.nonzero = true;
    return fibre;
}

void parse_submanifolds(Scene& scene, const json& doc) {
    if (!doc.contains("submanifolds")) return;
    for (const auto& [name, spec] : doc.at("submanifolds").items()) {
        const std::string where = "submanifolds." + name;
        const bool on_cover = spec.contains("on") && as_string(spec.at("on"), where + ".on") == "cover";
        if (spec.contains("on") && !on_cover && spec.at("on") != "base") fail(where + ".on", "expected 'base' or 'cover'");
        if (on_cover && !scene.cover) fail(where, "a cover submanifold needs a hyperplane field");
        const ChartPtr chart = on_cover ? scene.cover->total : scene.chart;
        auto constraints = spec.contains("constraints") ? expression_list(spec.at("constraints"), chart, where + ".constraints")
                                                         : std::vector<Expr>{};
        SceneSubmanifold sub{name, on_cover, ConstraintSubmanifold(chart, std::move(constraints)), 1e-8, {}, {}, {}};
        if (spec.contains("tolerance")) sub.tolerance = as_number(spec.at("tolerance"), where + ".tolerance");
        if (spec.contains("excluded")) sub.excluded = expression_list(spec.at("excluded"), chart, where + ".excluded");
        if (spec.contains("points")) sub.points = point_list(spec.at("points"), *chart, where + ".points");
        for (std::size_t i = 0; i < sub.points.size(); ++i) {
            const double v = sub.manifold.violation_at(sub.points[i]);
            if (v > kOnSubmanifoldTol) fail(where + ".points[" + std::to_string(i) + "]", "point is not on the submanifold");
        }
        if (spec.contains("expect")) sub.expect = spec.at("expect");
        scene.submanifolds.emplace(name, std::move(sub));
    }
}

void parse_quotients(Scene& scene, const json& doc) {
    if (!doc.contains("quotients")) return;
    for (const auto& [name, spec] : doc.at("quotients").items()) {
        const std::string where = "quotients." + name;
        if (!scene.cover) fail(where, "quotient data needs a hyperplane field");
        const ChartPtr reduced = chart_spec(member(spec, "reduced_chart", where), where + ".reduced_chart");
        QuotientData q{name, map_spec(member(spec, "map", where), scene.cover->total, reduced, where + ".map"), {}, {}, {}};
        if (spec.contains("omega0")) q.omega0 = form_spec(spec.at("omega0"), reduced, where + ".omega0");
        if (spec.contains("base")) {
            const json& b = spec.at("base");
            const ChartPtr rb = chart_spec(member(b, "reduced_chart", where + ".base"), where + ".base.reduced_chart");
            q.base_map = map_spec(member(b, "map", where + ".base"), scene.chart, rb, where + ".base.map");
            q.eta0 = form_spec(member(b, "eta0", where + ".base"), rb, where + ".base.eta0");
        }
        scene.quotients.emplace(name, std::move(q));
    }
}

void parse_actions(Scene& scene, const json& doc) {
    if (!doc.contains("actions")) return;
    for (const auto& [name, spec] : doc.at("actions").items()) {
        const std::string where = "actions." + name;
        const json& basis = member(spec, "basis", where);
        const json& fields = member(spec, "fields", where);
        if (!basis.is_array() || !fields.is_array() || basis.size() != fields.size()) {
            fail(where, "'basis' and 'fields' must be arrays of equal length");
        }
        const std::size_t k = basis.size();
        SceneAction act{ActionSpec{name, {}, StructureConstants(k), {}}, {}, {}};
        for (std::size_t i = 0; i < k; ++i) {
            act.spec.basis.push_back(as_string(basis[i], where + ".basis"));
            act.spec.fields.push_back(lookup(scene.fields, as_string(fields[i], where + ".fields"), "field", where));
        }
        auto basis_index = [&](const std::string& b) {
            const auto it = std::find(act.spec.basis.begin(), act.spec.basis.end(), b);
            if (it == act.spec.basis.end()) fail(where + ".brackets", "unknown basis element '" + b + "'");
            return static_cast<std::size_t>(it - act.spec.basis.begin());
        };
        if (spec.contains("brackets")) {
            for (const auto& [pair, result] : spec.at("brackets").items()) {
                const auto comma = pair.find(',');
                if (comma == std::string::npos) fail(where + ".brackets", "key must be 'a,b'");
                const auto i = basis_index(pair.substr(0, comma));
                const auto j = basis_index(pair.substr(comma + 1));
                if (!result.is_object()) fail(where + ".brackets." + pair, "expected {basis: coefficient}");
                for (const auto& [l, c] : result.items()) {
                    act.spec.constants.set_bracket(i, j, basis_index(l), as_number(c, where + ".brackets." + pair));
                }
            }
        }
        if (spec.contains("quotients")) {
            for (const auto& entry : spec.at("quotients")) {
                auto mu = number_list(member(entry, "mu", where + ".quotients"), where + ".quotients.mu");
                if (mu.size() != k) fail(where + ".quotients", "mu has the wrong length");
                const std::string q = as_string(member(entry, "quotient", where + ".quotients"), where + ".quotients");
                lookup(scene.quotients, q, "quotient", where + ".quotients");
                act.quotients.emplace_back(std::move(mu), q);
            }
        }
        if (spec.contains("expect")) act.expect = spec.at("expect");
        scene.actions.emplace(name, std::move(act));
    }
}

}  // namespace

const HyperplaneField& Scene::require_hyperplane() const {
    if (!hyperplane) throw SceneError("scene '" + name + "' declares no hyperplane field");
    return *hyperplane;
}

const CoverBundle& Scene::require_cover() const {
    if (!cover) throw SceneError("scene '" + name + "' declares no hyperplane field");
    return *cover;
}

std::vector<Point> Scene::base_samples() const {
    std::vector<Point> out = points;
    if (out.size() < sampling.count) {
        SamplingOptions o = sampling;
        o.count = sampling.count - out.size();
        for (auto& p : sample_on(ConstraintSubmanifold(chart, {}), o, excluded)) out.push_back(std::move(p));
    }
    return out;
}

std::vector<Point> Scene::cover_samples() const {
    const auto& p = require_cover();
    std::vector<Expr> lifted;
    for (const auto& e : excluded) lifted.push_back(rechart(e, p.total));
    return sample_on(ConstraintSubmanifold(p.total, {}), sampling, lifted);
}

std::vector<Point> Scene::submanifold_samples(const SceneSubmanifold& n) const {
    std::vector<Point> out = n.points;
    if (out.size() >= sampling.count) return out;
    std::vector<Expr> excl = n.excluded;
    for (const auto& e : excluded) excl.push_back(n.on_cover ? rechart(e, n.manifold.chart()) : e);
    SamplingOptions o = sampling;
    o.count = sampling.count - out.size();
    for (auto& p : sample_on(n.manifold, o, excl)) out.push_back(std::move(p));
    return out;
}

Scene parse_scene(const json& doc, std::optional<std::uint64_t> seed_override) {
    if (!doc.is_object()) throw SceneError("scene: top level must be an object");
    if (!doc.contains("schema") || !doc.at("schema").is_number_integer() || doc.at("schema").get<int>() != kSceneSchema) {
        throw SceneError("scene: expected \"schema\": " + std::to_string(kSceneSchema));
    }
    Scene scene;
    scene.name = doc.contains("name") ? as_string(doc.at("name"), "name") : "scene";
    parse_chart(scene, doc);

    if (doc.contains("forms")) {
        for (const auto& [n, spec] : doc.at("forms").items()) {
            scene.forms.insert_or_assign(n, form_spec(spec, scene.chart, "forms." + n));
        }
    }
    if (doc.contains("fields")) {
        for (const auto& [n, spec] : doc.at("fields").items()) scene.fields.emplace(n, field_spec(spec, scene.chart, "fields." + n));
    }
    if (doc.contains("functions")) {
        for (const auto& [n, v] : doc.at("functions").items()) scene.functions.emplace(n, expression(v, scene.chart, "functions." + n));
    }
    if (doc.contains("hyperplane")) {
        const json& h = doc.at("hyperplane");
        const auto& eta = lookup(scene.forms, as_string(member(h, "form", "hyperplane"), "hyperplane.form"), "form", "hyperplane");
        if (eta.degree() != 1) fail("hyperplane.form", "must be a 1-form");
        scene.hyperplane.emplace(eta, as_int(member(h, "r", "hyperplane"), "hyperplane.r"));
    }
    if (scene.layout) {
        // Darboux closed forms apply only when η is the model form itself
        bool model = false;
        if (scene.hyperplane) {
            DiffForm eta(scene.chart, 1);
            eta.add_term({scene.layout->z}, constant(scene.chart, 1.0));
            for (std::size_t i = 0; i < scene.layout->r(); ++i) {
                eta.add_term({scene.layout->q[i]}, -variable(scene.chart, scene.layout->p[i]));
            }
            const DiffForm diff = scene.hyperplane->eta() - eta;
            model = true;
            for (const auto& y : sample_points(*scene.chart, {8, 7, 0.25})) model = model && diff.sup_norm_at(y) == 0.0;
        }
        if (!model) scene.layout.reset();
    }
    if (scene.hyperplane) {
        if (scene.chart->index_of("s")) fail("chart", "coordinate name 's' is reserved for the fibre");
        scene.cover = build_cover(*scene.hyperplane, fibre_domain(doc));
        const ChartPtr& total = scene.cover->total;
        if (doc.contains("cover_fields")) {
            for (const auto& [n, spec] : doc.at("cover_fields").items()) {
                scene.cover_fields.emplace(n, field_spec(spec, total, "cover_fields." + n));
            }
        }
        if (doc.contains("cover_functions")) {
            for (const auto& [n, v] : doc.at("cover_functions").items()) {
                scene.cover_functions.emplace(n, expression(v, total, "cover_functions." + n));
            }
        }
    } else if (doc.contains("cover_fields") || doc.contains("cover_functions")) {
        fail("scene", "cover declarations need a hyperplane field");
    }
    parse_sampling(scene, doc, seed_override);
    parse_submanifolds(scene, doc);
    parse_quotients(scene, doc);
    parse_actions(scene, doc);
    if (doc.contains("expect")) scene.expect = doc.at("expect");
    return scene;
}

Scene load_scene(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read scene file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SceneError("scene '" + path.string() + "' is not valid JSON: " + e.what());
    }
    try {
        return parse_scene(doc, seed_override);
    } catch (const SceneError&) {
        throw;
    } catch (const json::exception& e) {
        throw SceneError("scene '" + path.string() + "': " + e.what());
    } catch (const Error& e) {
        throw SceneError("scene '" + path.string() + "': " + e.what());
    }
}

nlohmann::ordered_json darboux_scene_json(int m, int r) {
    if (m < 1 || r < 0 || m < 2 * r + 1) throw InvalidArgument("darboux: need m >= 2r+1 >= 1");
    const auto model = darboux_model(m, r);
    nlohmann::ordered_json doc;
    doc["schema"] = kSceneSchema;
    doc["name"] = "darboux" + std::to_string(m);
    nlohmann::ordered_json chart;
    chart["name"] = model.chart->name();
    chart["coords"] = model.chart->coords();
    chart["domain"] = {-1.0, 1.0};
    doc["chart"] = chart;
    nlohmann::ordered_json terms;
    for (const auto& [idx, coeff] : model.field.eta().coeffs()) terms[model.chart->coords()[idx[0]]] = coeff.to_string();
    doc["forms"]["eta"] = {{"degree", 1}, {"terms", terms}};
    doc["hyperplane"] = {{"form", "eta"}, {"r", r}};
    doc["sampling"] = {{"count", 100}, {"seed", 42}};
    doc["expect"]["check"] = {{"measured_r", r}, {"contact", m == 2 * r + 1}};
    return doc;
}

}  // namespace contactred

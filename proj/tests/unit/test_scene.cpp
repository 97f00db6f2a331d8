#include <doctest.h>

#include "contactred/commands.hpp"

using namespace contactred;

namespace {

std::filesystem::path scene_path(const std::string& name) {
    return std::filesystem::path(CONTACTRED_SCENES_DIR) / (name + ".json");
}

std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(CONTACTRED_TEST_DATA_DIR) / name;
}

nlohmann::json minimal() {
    return nlohmann::json::parse(R"({"schema": 1, "name": "t", "chart": {"darboux": {"m": 3, "r": 1}}})");
}

}  // namespace

TEST_SUITE("scene") {

TEST_CASE("minimal documents") {
    const Scene s = parse_scene(minimal());
    CHECK(s.chart->dim() == 3);
    CHECK(s.layout.has_value());
    CHECK(s.hyperplane.has_value());
    CHECK(s.require_cover().total->dim() == 4);
}

TEST_CASE("malformed documents") {
    auto doc = minimal();
    doc["schema"] = 2;
    CHECK_THROWS_AS(parse_scene(doc), SceneError);
    doc = minimal();
    doc.erase("chart");
    CHECK_THROWS_AS(parse_scene(doc), SceneError);
    doc = minimal();
    doc["functions"] = {{"f", "1 +* p"}};
    CHECK_THROWS_AS(parse_scene(doc), SceneError);
    doc = minimal();
    doc["functions"] = {{"f", "w"}};
    CHECK_THROWS_AS(parse_scene(doc), SceneError);
    CHECK_THROWS_AS(load_scene(data_path("malformed.json")), SceneError);
    CHECK_THROWS_AS(load_scene(data_path("wrong-schema.json")), SceneError);
    CHECK_THROWS_AS(load_scene(data_path("does-not-exist.json")), IoError);
}

TEST_CASE("bundled scenes load") {
    for (const auto& entry : std::filesystem::directory_iterator(CONTACTRED_SCENES_DIR)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_scene(entry.path()));
    }
}

TEST_CASE("generated Darboux scenes check") {
    for (auto [m, r] : {std::pair{3, 1}, std::pair{5, 2}, std::pair{4, 1}, std::pair{7, 2}}) {
        const Scene s = parse_scene(darboux_scene_json(m, r));
        CHECK(run_check(s).passed());
    }
}

TEST_CASE("check reports follow the expectations") {
    CHECK(run_check(load_scene(scene_path("darboux3"))).passed());
    CHECK(run_check(load_scene(scene_path("conformal4"))).passed());
    CHECK_FALSE(run_check(load_scene(data_path("dz-not-contact.json"))).passed());
}

TEST_CASE("reports are deterministic in the seed") {
    const auto a = run_check(load_scene(scene_path("darboux5"))).to_json().dump();
    const auto b = run_check(load_scene(scene_path("darboux5"))).to_json().dump();
    CHECK(a == b);
    const auto m1 = run_moment(load_scene(scene_path("heisenberg"), 9), "extended").to_json().dump();
    const auto m2 = run_moment(load_scene(scene_path("heisenberg"), 9), "extended").to_json().dump();
    CHECK(m1 == m2);
}

TEST_CASE("designated commands of the bundled scenes") {
    CHECK(run_classify(load_scene(scene_path("example-z0")), "N").passed());
    CHECK(run_classify(load_scene(scene_path("example-r5")), "N").passed());
    CHECK(run_mwm(load_scene(scene_path("mwm")), "translation", {0.0}, std::nullopt).passed());
    CHECK(run_mwm(load_scene(scene_path("mwm-mu1")), "translation", {1.0}, std::nullopt).passed());
    CHECK(run_moment(load_scene(scene_path("heisenberg")), "extended").passed());
}

TEST_CASE("failing commands") {
    const Scene mwm = load_scene(scene_path("mwm"));
    CHECK_FALSE(run_mwm(mwm, "trivial", {0.0}, std::nullopt).passed());
    CHECK_FALSE(run_mwm(mwm, "translation", {0.0}, std::string("Qbad")).passed());
    CHECK_FALSE(run_reeb(load_scene(scene_path("conformal4"))).passed());
}

TEST_CASE("evolve and bracket") {
    const Scene s = load_scene(scene_path("darboux3"));
    EvolveArgs args;
    args.hamiltonian = "H_pq";
    args.x0 = {0.1, 0.2, 0.3};
    const auto e = run_evolve(s, args);
    CHECK(e.report.passed());
    REQUIRE(e.trajectory.has_value());
    CHECK(e.trajectory->states.size() == 1001);
    CHECK(run_bracket(s, "H_lin", "H_pq", 50).passed());
}

}

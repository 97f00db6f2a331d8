#pragma once

// Scene files: JSON documents (schema 1) declaring a chart, forms, fields,
// functions, a hyperplane field, submanifolds, actions, quotient data and
// sampling settings. See docs/scene-schema.md.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "contactred/dynamics.hpp"
#include "contactred/reduction.hpp"

namespace contactred {

/// Malformed or inconsistent scene (CLI exit code 2).
class SceneError : public Error {
public:
    using Error::Error;
};

/// File system failure (CLI exit code 3).
class IoError : public Error {
public:
    using Error::Error;
};

inline constexpr int kSceneSchema = 1;

struct SceneSubmanifold {
    std::string name;
    bool on_cover = false;
    ConstraintSubmanifold manifold;
    /// annihilation tolerance used by the classifier
    double tolerance = 1e-8;
    std::vector<Expr> excluded;
    std::vector<Point> points;
    nlohmann::ordered_json expect;
};

struct SceneAction {
    ActionSpec spec;
    /// default quotient per level μ
    std::vector<std::pair<std::vector<double>, std::string>> quotients;
    nlohmann::ordered_json expect;
};

struct Scene {
    std::string name;
    ChartPtr chart;
    std::optional<DarbouxLayout> layout;
    std::map<std::string, DiffForm> forms;
    std::map<std::string, VecField> fields;
    std::map<std::string, Expr> functions;
    std::optional<HyperplaneField> hyperplane;
    std::optional<CoverBundle> cover;
    std::map<std::string, VecField> cover_fields;
    std::map<std::string, Expr> cover_functions;
    std::map<std::string, SceneSubmanifold> submanifolds;
    std::map<std::string, SceneAction> actions;
    std::map<std::string, QuotientData> quotients;
    SamplingOptions sampling;
    std::vector<Expr> excluded;
    std::vector<Point> points;
    nlohmann::ordered_json expect;

    const HyperplaneField& require_hyperplane() const;
    const CoverBundle& require_cover() const;

    /// Explicit points followed by seeded points off the excluded loci,
    /// sampling.count in total (explicit points are always kept).
    std::vector<Point> base_samples() const;
    /// Seeded total-chart points off the lifted excluded loci.
    std::vector<Point> cover_samples() const;
    /// Explicit and projected seeded points of a submanifold.
    std::vector<Point> submanifold_samples(const SceneSubmanifold& n) const;
};

Scene parse_scene(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Reads and parses a scene file. Throws IoError when the file cannot be
/// read and SceneError when it is not a valid scene.
Scene load_scene(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Scene document for the Darboux model of dimension m and rank 2r+1.
nlohmann::ordered_json darboux_scene_json(int m, int r);

}  // namespace contactred

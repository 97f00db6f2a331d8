#pragma once

// Report-producing commands shared by the command-line tool and the tests.
// Every report lists named checks with their measured value and tolerance;
// a report passes when all of its checks pass.

#include <optional>
#include <string>
#include <vector>

#include "contactred/scene.hpp"

namespace contactred {

class Report {
public:
    Report(std::string command, const Scene* scene);

    void check(const std::string& name, bool passed, std::optional<double> value = std::nullopt,
               std::optional<double> tolerance = std::nullopt, const std::string& detail = {});

    nlohmann::ordered_json& results() noexcept { return results_; }
    bool passed() const noexcept { return passed_; }
    nlohmann::ordered_json to_json() const;

private:
    nlohmann::ordered_json header_;
    nlohmann::ordered_json checks_ = nlohmann::ordered_json::array();
    nlohmann::ordered_json results_ = nlohmann::ordered_json::object();
    bool passed_ = true;
};

/// verify_precontact on base samples plus the cover identities.
Report run_check(const Scene& scene);

/// Reeb field at base samples.
Report run_reeb(const Scene& scene);

struct EvolveArgs {
    std::string hamiltonian;
    double t0 = 0.0;
    double t1 = 1.0;
    double dt = 1e-3;
    std::vector<double> x0;
    bool bounded = false;
};

struct EvolveResult {
    Report report;
    std::optional<Trajectory> trajectory;
};

/// RK4 flow of the contact field of a base function.
EvolveResult run_evolve(const Scene& scene, const EvolveArgs& args);

/// Contact bracket through the Darboux formula and the commutator.
Report run_bracket(const Scene& scene, const std::string& f, const std::string& h, std::size_t points);

/// Submanifold flags and constant-rank data, against the scene expectations.
Report run_classify(const Scene& scene, const std::string& submanifold);

/// Moment map of an action and its identities at cover samples.
Report run_moment(const Scene& scene, const std::string& action);

/// verify_reduction of a submanifold against quotient data.
Report run_reduce(const Scene& scene, const std::string& submanifold, const std::string& quotient);

/// mwm_pipeline at level μ; the quotient defaults to the action's entry for μ.
Report run_mwm(const Scene& scene, const std::string& action, const std::vector<double>& mu,
               const std::optional<std::string>& quotient);

}  // namespace contactred

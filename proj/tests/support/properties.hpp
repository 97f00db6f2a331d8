#pragma once

// Property suites run against a loaded scene. Shared by the doctest suite
// and the acceptance binary.

#include <string>
#include <vector>

#include "contactred/scene.hpp"

namespace testsupport {

struct PropertyResult {
    std::string suite;
    std::size_t points = 0;
    double worst = 0.0;
    double tolerance = 0.0;
    bool passed() const noexcept { return points > 0 && worst <= tolerance; }
};

inline constexpr std::size_t kPropertyPoints = 100;

/// d∘d = 0, Leibniz, d against finite differences, Cartan against flows,
/// pullback naturality, cover homogeneity, moment homogeneity, the moment
/// kernel identity and the characteristic correspondence, each over
/// kPropertyPoints seeded points of the scene.
std::vector<PropertyResult> run_property_suites(const contactred::Scene& scene);

}  // namespace testsupport

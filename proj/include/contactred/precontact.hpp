#pragma once

// Hyperplane fields C = ker(η), the four equivalent precontact criteria, the
// characteristic distribution θ(C) and Darboux model generators.

#include <optional>
#include <string>
#include <vector>

#include "contactred/exterior.hpp"
#include "contactred/pointlin.hpp"

namespace contactred {

/// Nonvanishing 1-form η on a chart, claimed to define a precontact
/// structure of rank 2r+1.
class HyperplaneField {
public:
    HyperplaneField(DiffForm eta, int claimed_r);

    const ChartPtr& chart() const noexcept { return eta_.chart(); }
    const DiffForm& eta() const noexcept { return eta_; }
    const DiffForm& d_eta() const noexcept { return d_eta_; }
    int claimed_r() const noexcept { return claimed_r_; }

    /// η ∧ (dη)^k.
    DiffForm eta_wedge_power(int k) const;

    /// The conformally rescaled field f·η with the same claimed rank.
    HyperplaneField rescaled(const Expr& f) const;

private:
    DiffForm eta_;
    DiffForm d_eta_;
    int claimed_r_;
};

inline constexpr double kNonvanishingTol = 1e-8;
inline constexpr double kWedgeTol = 1e-9;

struct PrecontactPointResult {
    Point point;
    double eta_norm = 0.0;
    // criterion (2) (and (1), which shares its computation): rank of dη on ker η
    int restricted_rank = 0;
    bool restricted_rank_marginal = false;
    // criterion (3)
    double wedge_r_norm = 0.0;
    double wedge_r1_norm = 0.0;
    double wedge_scale = 0.0;
    bool wedge_r_nonzero = false;
    bool wedge_r1_zero = false;
    // criterion (4)
    int characteristic_dim = 0;
    // dη on the whole tangent space, reported separately
    int full_rank = 0;
    int measured_r = 0;
    bool criteria_agree = false;
};

struct PrecontactReport {
    int claimed_r = 0;
    std::size_t dim = 0;
    std::vector<PrecontactPointResult> points;
    bool nonvanishing = true;
    bool criterion_rank = true;       // (1)/(2)
    bool criterion_wedge = true;      // (3)
    bool criterion_kernel = true;     // (4)
    bool criteria_agree = true;
    bool marginal = false;
    /// measured r when constant over all samples
    std::optional<int> measured_r;
    bool contact() const noexcept { return passed() && measured_r && 2 * *measured_r + 1 == static_cast<int>(dim); }
    bool passed() const noexcept {
        return nonvanishing && criterion_rank && criterion_wedge && criterion_kernel && criteria_agree;
    }
};

PrecontactReport verify_precontact(const HyperplaneField& h, std::span<const Point> points);

/// θ(η)(y) = ker(dη restricted to ker η(y)), in ambient coordinates.
Subspace characteristic_subspace_at(const HyperplaneField& h, std::span<const double> point);

/// ker η(y) as a subspace.
Subspace hyperplane_at(const HyperplaneField& h, std::span<const double> point);

/// Coordinate roles of a Darboux chart (z, p_1..p_r, q^1..q^r, u^1..u^k).
struct DarbouxLayout {
    std::size_t z = 0;
    std::vector<std::size_t> p;
    std::vector<std::size_t> q;
    std::vector<std::size_t> u;
    std::size_t r() const noexcept { return p.size(); }
};

struct DarbouxModel {
    ChartPtr chart;
    HyperplaneField field;
    DarbouxLayout layout;
};

/// η = dz − Σ p_i dq^i on a chart of dimension m with m − 2r − 1 extra
/// coordinates u^j. Coordinates are named z, p, q, u when there is a single
/// one of a kind and p1, p2, … otherwise.
DarbouxModel darboux_model(int m, int r, CoordDomain domain = {});

/// Layout from the coordinate names produced by darboux_model.
std::optional<DarbouxLayout> infer_darboux_layout(const Chart& chart);

/// g with L_X η = g·η at the point, or nullopt when L_X η is not a multiple
/// of η there (X is not a contact field).
std::optional<double> conformal_factor_at(const HyperplaneField& h, const VecField& x, std::span<const double> point);

}  // namespace contactred

#include "contactred/precontact.hpp"

#include <cmath>

namespace contactred {

HyperplaneField::HyperplaneField(DiffForm eta, int claimed_r)
    : eta_(std::move(eta)), d_eta_(exterior_d(eta_)), claimed_r_(claimed_r) {
    if (eta_.degree() != 1) throw InvalidArgument("hyperplane field needs a 1-form");
    if (claimed_r_ < 0) throw InvalidArgument("claimed rank parameter r must be nonnegative");
}

DiffForm HyperplaneField::eta_wedge_power(int k) const {
    return wedge(eta_, wedge_power(d_eta_, static_cast<std::size_t>(k)));
}

HyperplaneField HyperplaneField::rescaled(const Expr& f) const { return HyperplaneField(f * eta_, claimed_r_); }

namespace {

Eigen::MatrixXd eta_row(const HyperplaneField& h, std::span<const double> point) {
    return h.eta().covector_at(point).transpose();
}

double scaled_threshold(double eta_sup, double deta_sup, int k) {
    return kWedgeTol * eta_sup * std::pow(deta_sup, k);
}

}  // namespace

Subspace hyperplane_at(const HyperplaneField& h, std::span<const double> point) {
    return kernel_of(eta_row(h, point));
}

Subspace characteristic_subspace_at(const HyperplaneField& h, std::span<const double> point) {
    const Subspace c = hyperplane_at(h, point);
    const Eigen::MatrixXd restricted = restrict_bilinear(form_matrix_at(h.d_eta(), point), c);
    const Subspace k = kernel_of(restricted);
    return Subspace::span(c.basis() * k.basis());
}

PrecontactReport verify_precontact(const HyperplaneField& h, std::span<const Point> points) {
    const std::size_t m = h.chart()->dim();
    PrecontactReport report;
    report.claimed_r = h.claimed_r();
    report.dim = m;

    // η∧(dη)^k up to the first degree exceeding m, which is identically zero
    std::vector<DiffForm> powers;
    for (int k = 0;; ++k) {
        powers.push_back(h.eta_wedge_power(k));
        if (2 * k + 1 > static_cast<int>(m)) break;
    }
    auto power = [&](int k) -> const DiffForm& {
        if (k < static_cast<int>(powers.size())) return powers[static_cast<std::size_t>(k)];
        return powers.back();
    };

    std::optional<int> common_r;
    bool constant_r = true;
    for (const auto& x : points) {
        PrecontactPointResult res;
        res.point = x;
        const Eigen::VectorXd eta = h.eta().covector_at(x);
        res.eta_norm = eta.norm();
        if (res.eta_norm < kNonvanishingTol) report.nonvanishing = false;

        const Eigen::MatrixXd deta = form_matrix_at(h.d_eta(), x);
        res.full_rank = antisymmetric_rank(deta).rank;
        const Subspace c = kernel_of(eta.transpose());
        const auto rr = antisymmetric_rank(restrict_bilinear(deta, c));
        res.restricted_rank = rr.rank;
        res.restricted_rank_marginal = rr.marginal;
        if (rr.marginal) report.marginal = true;
        res.characteristic_dim = static_cast<int>(c.dim()) - rr.rank;
        res.measured_r = rr.rank / 2;

        const double eta_sup = eta.cwiseAbs().maxCoeff();
        const double deta_sup = deta.size() ? deta.cwiseAbs().maxCoeff() : 0.0;
        auto wedge_test = [&](int r, double* nz_norm, double* z_norm, double* scale) {
            const double a = power(r).sup_norm_at(x);
            const double b = power(r + 1).sup_norm_at(x);
            const double ta = scaled_threshold(eta_sup, deta_sup, r);
            const double tb = scaled_threshold(eta_sup, deta_sup, r + 1);
            if (nz_norm) *nz_norm = a;
            if (z_norm) *z_norm = b;
            if (scale) *scale = ta;
            return std::pair{a > ta, b <= tb};
        };
        const auto [nz, z] = wedge_test(h.claimed_r(), &res.wedge_r_norm, &res.wedge_r1_norm, &res.wedge_scale);
        res.wedge_r_nonzero = nz;
        res.wedge_r1_zero = z;

        const auto [mnz, mz] = wedge_test(res.measured_r, nullptr, nullptr, nullptr);
        const int expected_char_dim = static_cast<int>(m) - 2 * res.measured_r - 1;
        res.criteria_agree = mnz && mz && res.characteristic_dim == expected_char_dim;

        if (res.measured_r != h.claimed_r()) report.criterion_rank = false;
        if (!(nz && z)) report.criterion_wedge = false;
        if (res.characteristic_dim != static_cast<int>(m) - 2 * h.claimed_r() - 1) report.criterion_kernel = false;
        if (!res.criteria_agree) report.criteria_agree = false;

        if (!common_r) {
            common_r = res.measured_r;
        } else if (*common_r != res.measured_r) {
            constant_r = false;
        }
        report.points.push_back(std::move(res));
    }
    if (constant_r) report.measured_r = common_r;
    return report;
}

DarbouxModel darboux_model(int m, int r, CoordDomain domain) {
    if (r < 0 || m < 2 * r + 1) {
        throw InvalidArgument("darboux_model: need m >= 2r+1 (m=" + std::to_string(m) + ", r=" + std::to_string(r) + ")");
    }
    const int k = m - 2 * r - 1;
    std::vector<std::string> names{"z"};
    auto family = [&](const std::string& base, int count) {
        for (int i = 1; i <= count; ++i) names.push_back(count == 1 ? base : base + std::to_string(i));
    };
    family("p", r);
    family("q", r);
    family("u", k);

    DarbouxLayout layout;
    layout.z = 0;
    for (int i = 0; i < r; ++i) {
        layout.p.push_back(static_cast<std::size_t>(1 + i));
        layout.q.push_back(static_cast<std::size_t>(1 + r + i));
    }
    for (int j = 0; j < k; ++j) layout.u.push_back(static_cast<std::size_t>(1 + 2 * r + j));

    auto chart = make_chart("darboux" + std::to_string(m), names,
                            std::vector<CoordDomain>(static_cast<std::size_t>(m), domain));
    DiffForm eta = DiffForm::coordinate_differential(chart, layout.z);
    for (int i = 0; i < r; ++i) {
        eta.add_term({layout.q[static_cast<std::size_t>(i)]}, -variable(chart, layout.p[static_cast<std::size_t>(i)]));
    }
    return DarbouxModel{chart, HyperplaneField(eta, r), layout};
}

std::optional<DarbouxLayout> infer_darboux_layout(const Chart& chart) {
    const auto& c = chart.coords();
    if (c.empty() || c[0] != "z") return std::nullopt;
    DarbouxLayout layout;
    std::size_t i = 1;
    auto take = [&](char prefix, std::vector<std::size_t>& into) {
        while (i < c.size() && !c[i].empty() && c[i][0] == prefix) into.push_back(i++);
    };
    take('p', layout.p);
    take('q', layout.q);
    take('u', layout.u);
    if (i != c.size() || layout.p.size() != layout.q.size()) return std::nullopt;
    // names must be exactly what darboux_model produces
    auto expect = [&](const std::vector<std::size_t>& idx, const std::string& base) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const std::string want = idx.size() == 1 ? base : base + std::to_string(j + 1);
            if (c[idx[j]] != want) return false;
        }
        return true;
    };
    if (!expect(layout.p, "p") || !expect(layout.q, "q") || !expect(layout.u, "u")) return std::nullopt;
    return layout;
}

std::optional<double> conformal_factor_at(const HyperplaneField& h, const VecField& x, std::span<const double> point) {
    const DiffForm lie = lie_derivative(x, h.eta());
    const Eigen::VectorXd beta = lie.covector_at(point);
    const Eigen::VectorXd eta = h.eta().covector_at(point);
    const double g = beta.dot(eta) / eta.squaredNorm();
    if ((beta - g * eta).norm() > 1e-8 * (1.0 + beta.norm())) return std::nullopt;
    return g;
}

}  // namespace contactred

#include "glsync/stability.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>

namespace glsync {

namespace {

Condition make(double lhs, double rhs) { return {lhs - rhs > 0.0, lhs - rhs}; }

nlohmann::json condition_json(const ConditionSet& set) {
    auto arr = nlohmann::json::array();
    for (const auto& c : set) arr.push_back({{"holds", c.holds}, {"margin", c.margin}});
    return arr;
}

} // namespace

ConditionSet conditions_symbolic(const GlsParams& p, const Bounds& bd) {
    const double a = p.a, b = p.b, c = p.c, d = p.d;
    const double M = bd.M, N = bd.N, P = bd.P;
    return {make(a, 0.0),
            make(a * a + b * b - 2.0 * a * (b - c) - a * d, P * P),
            make(2.0 * M * N * P + a * M * M + (2.0 * c - d) * N * N + c * P * P,
                 c * (2.0 * a * c - a * d + 2.0 * a * b - a * a - b * b))};
}

ConditionSet conditions_k_poly(double k, const Bounds& bd) {
    const double M2 = bd.M * bd.M, N2 = bd.N * bd.N, P2 = bd.P * bd.P;
    const double lhs3 = -(0.0056 * k * k * k + 1.84 * k * k - (0.86 * M2 + 1.01 * N2 + 0.01 * P2 - 109.8) * k);
    const double rhs3 = -2.0 * bd.M * bd.N * bd.P + 10.0 * M2 - 4.33 * N2 + 2.67 * P2;
    return {make(10.0 + (25.0 / 29.0) * k, 0.0),
            make(k * k - 527.49 * k + 686.03, P2),
            make(lhs3, rhs3)};
}

PdCheck pd_check_worstcase(const GlsParams& p, const SigmaVec& sigma, const Bounds& bd, QForm form) {
    double min_minor = std::numeric_limits<double>::infinity();
    for (int corner = 0; corner < 8; ++corner) {
        const StateVec x{(corner & 1) ? -bd.M : bd.M, (corner & 2) ? -bd.N : bd.N, (corner & 4) ? -bd.P : bd.P};
        const QMatrix s = q_matrix(p, sigma, x, form).symmetric_part();
        const double m1 = s(0, 0);
        const double m2 = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
        const double m3 = s(0, 0) * (s(1, 1) * s(2, 2) - s(1, 2) * s(2, 1)) -
                          s(0, 1) * (s(1, 0) * s(2, 2) - s(1, 2) * s(2, 0)) +
                          s(0, 2) * (s(1, 0) * s(2, 1) - s(1, 1) * s(2, 0));
        min_minor = std::min({min_minor, m1, m2, m3});
    }
    return {min_minor > 0.0, min_minor};
}

StabilityReport stability_report(const SimConfig& config, std::optional<Bounds> bounds_override) {
    config.validate();
    StabilityReport r;
    r.k = config.k;
    r.params = params_from_k(config.k);
    r.sigma = config.sigma;
    if (bounds_override) {
        r.bounds = *bounds_override;
        r.bounds_simulated = false;
    } else {
        r.bounds = estimate_bounds(discard_transient(integrate_master(config), config.transient_steps));
    }
    r.symbolic = conditions_symbolic(r.params, r.bounds);
    r.k_poly = conditions_k_poly(r.k, r.bounds);
    r.pd_worstcase = pd_check_worstcase(r.params, r.sigma, r.bounds, QForm::printed);
    r.pd_worstcase_flow = pd_check_worstcase(r.params, r.sigma, r.bounds, QForm::flow_consistent);
    return r;
}

std::string to_json(const StabilityReport& r) {
    nlohmann::ordered_json j;
    j["k"] = r.k;
    j["params"] = {{"a", r.params.a}, {"b", r.params.b}, {"c", r.params.c}, {"d", r.params.d}};
    j["sigma"] = {r.sigma[0], r.sigma[1], r.sigma[2]};
    j["bounds"] = {{"M", r.bounds.M}, {"N", r.bounds.N}, {"P", r.bounds.P}};
    j["bounds_source"] = r.bounds_simulated ? "simulation" : "override";
    j["symbolic"] = condition_json(r.symbolic);
    j["k_poly"] = condition_json(r.k_poly);
    j["pd_worstcase"] = {{"holds", r.pd_worstcase.holds}, {"min_minor", r.pd_worstcase.min_minor}};
    j["pd_worstcase_flow"] = {{"holds", r.pd_worstcase_flow.holds},
                              {"min_minor", r.pd_worstcase_flow.min_minor}};
    j["pd_interpretation"] =
        "leading principal minors of the symmetric part (Q+Q^T)/2 at the corners (+-M,+-N,+-P); "
        "pd_worstcase uses Q as printed, pd_worstcase_flow the sign-corrected (1,2) entry";
    return j.dump(2) + "\n";
}

} // namespace glsync

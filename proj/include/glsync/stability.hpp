#pragma once

// Positive-definiteness conditions for the error system, evaluated against
// attractor bounds M, N, P. Two published forms of the conditions exist (one in
// terms of a, b, c, d and one expanded as polynomials in k); they do not agree
// numerically, so both are evaluated and reported.

#include "glsync/gls.hpp"
#include "glsync/integrator.hpp"

#include <array>
#include <optional>
#include <string>

namespace glsync {

/// margin = LHS - RHS of the inequality; holds <=> margin > 0.
struct Condition {
    bool holds = false;
    double margin = 0;
};

using ConditionSet = std::array<Condition, 3>;

/// (i) a > 0; (ii) a^2 + b^2 - 2a(b - c) - ad > P^2;
/// (iii) 2MNP + aM^2 + (2c - d)N^2 + cP^2 > c(2ac - ad + 2ab - a^2 - b^2).
ConditionSet conditions_symbolic(const GlsParams& p, const Bounds& bounds);

/// The same three conditions as printed in expanded polynomial form in k.
ConditionSet conditions_k_poly(double k, const Bounds& bounds);

struct PdCheck {
    bool holds = false;
    double min_minor = 0;
};

/// Leading principal minors of the symmetric part of Q at the eight sign
/// corners (+-M, +-N, +-P).
PdCheck pd_check_worstcase(const GlsParams& p, const SigmaVec& sigma, const Bounds& bounds,
                           QForm form = QForm::printed);

struct StabilityReport {
    double k = 0;
    GlsParams params;
    SigmaVec sigma;
    Bounds bounds;
    bool bounds_simulated = true;
    ConditionSet symbolic{};
    ConditionSet k_poly{};
    PdCheck pd_worstcase;
    PdCheck pd_worstcase_flow;
};

/// Integrates the free-running master (unless `bounds_override` is given),
/// measures bounds on the post-transient window and evaluates every check.
StabilityReport stability_report(const SimConfig& config, std::optional<Bounds> bounds_override = std::nullopt);

/// Deterministic JSON text of the report.
std::string to_json(const StabilityReport& report);

} // namespace glsync

#pragma once

// Generalized Lorenz System: master/slave vector fields, the nonlinear
// coupling control, the generalized error system and its Lyapunov quantities.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace glsync {

/// Fixed three-component vector. The tag keeps states, control parameters,
/// errors and control inputs from being mixed up at call sites.
template <class Tag>
struct Vec3 {
    std::array<double, 3> v{};

    constexpr Vec3() = default;
    constexpr Vec3(double a, double b, double c) : v{a, b, c} {}

    constexpr double& operator[](std::size_t i) { return v[i]; }
    constexpr double operator[](std::size_t i) const { return v[i]; }

    bool all_finite() const { return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]); }

    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

using StateVec = Vec3<struct StateTag>;
using SigmaVec = Vec3<struct SigmaTag>;
using ErrorVec = Vec3<struct ErrorTag>;
using ControlVec = Vec3<struct ControlTag>;

struct GlsParams {
    double k = NAN; // NaN when built from raw coefficients
    double a = 0;
    double b = 0;
    double c = 0;
    double d = 0;

    /// Raw coefficients, for parameter sets that are not on the k-family.
    static GlsParams from_coefficients(double a, double b, double c, double d) { return {NAN, a, b, c, d}; }
};

GlsParams params_from_k(double k);

/// Validates every component lies in [-1, 1].
SigmaVec make_sigma(double s1, double s2, double s3);

/// Enables/disables the individual sub-terms of the control law for ablation.
/// Bits follow the order ua1, ub1, uc1, ua2, ub2, uc2, ua3, ub3.
struct ControlTerms {
    enum Term : std::uint8_t { ua1, ub1, uc1, ua2, ub2, uc2, ua3, ub3, count };

    std::uint8_t mask = 0xFF;

    bool enabled(Term t) const { return (mask >> t) & 1u; }
    ControlTerms without(Term t) const { return {static_cast<std::uint8_t>(mask & ~(1u << t))}; }

    friend bool operator==(const ControlTerms&, const ControlTerms&) = default;
};

StateVec master_deriv(const GlsParams& p, const StateVec& x);

/// E_i = y_i + sigma_i x_i.
ErrorVec error_vec(const SigmaVec& sigma, const StateVec& x, const StateVec& y);

/// Plain synchronization error e_i = y_i - x_i.
StateVec sync_error(const StateVec& x, const StateVec& y);

ControlVec control_inputs(const GlsParams& p, const SigmaVec& sigma, const StateVec& x, const ErrorVec& e,
                          ControlTerms terms = {});

StateVec slave_deriv(const GlsParams& p, const SigmaVec& sigma, const StateVec& x, const StateVec& y,
                     ControlTerms terms = {});

/// dE/dt after substituting the control into the error dynamics.
ErrorVec error_deriv_closed_form(const GlsParams& p, const SigmaVec& sigma, const StateVec& x, const ErrorVec& e);

double lyapunov_value(const ErrorVec& e);

struct QMatrix {
    std::array<std::array<double, 3>, 3> m{};

    double operator()(std::size_t i, std::size_t j) const { return m[i][j]; }
    double& operator()(std::size_t i, std::size_t j) { return m[i][j]; }

    QMatrix symmetric_part() const;

    /// E^T Q E.
    double quadratic_form(const ErrorVec& e) const;
};

/// `printed` reproduces the published matrix entry by entry. Its (1,2) entry
/// carries -sigma3*x3 where the closed-form error dynamics carry +sigma3*x3,
/// so E^T Q E picks up a spurious 2*sigma3*x3*E1*E2. `flow_consistent` flips
/// that one sign so that dV/dt = -E^T Q E holds exactly along the error flow.
enum class QForm { printed, flow_consistent };

QMatrix q_matrix(const GlsParams& p, const SigmaVec& sigma, const StateVec& x, QForm form = QForm::printed);

/// dV/dt = -E^T Q E.
inline double lyapunov_rate(const QMatrix& q, const ErrorVec& e) { return -q.quadratic_form(e); }

} // namespace glsync

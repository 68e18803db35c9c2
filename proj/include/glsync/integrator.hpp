#pragma once

#include "glsync/error.hpp"
#include "glsync/gls.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace glsync {

/// Any state component beyond this magnitude aborts integration.
inline constexpr double kDivergenceSentinel = 1e6;

struct SimConfig {
    double h = 0.05;
    std::size_t n_steps = 40000;
    std::size_t transient_steps = 2000;
    StateVec x0{0.999, 0.899, 0.799};
    StateVec y0{1.0, 1.0, 1.0};
    double k = 0.5;
    SigmaVec sigma{1.0, 1.0, 1.0};
    ControlTerms terms{};

    /// Throws InvalidInput naming the offending field.
    void validate() const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Time-indexed samples on the grid t_i = (first_index + i) * h. `y` and `E`
/// are empty for master-only runs, otherwise they match `x` in length.
struct Trajectory {
    double h = 0.05;
    std::size_t first_index = 0;
    SigmaVec sigma{};
    std::vector<StateVec> x;
    std::vector<StateVec> y;
    std::vector<ErrorVec> E;

    std::size_t size() const { return x.size(); }
    bool empty() const { return x.empty(); }
    bool coupled() const { return !y.empty(); }
    double t(std::size_t i) const { return static_cast<double>(first_index + i) * h; }
    double sample_rate() const { return 1.0 / h; }

    std::vector<double> times() const;
    std::vector<double> x_component(std::size_t i) const;
    std::vector<double> y_component(std::size_t i) const;
    std::vector<double> e_component(std::size_t i) const;
};

template <std::size_t N>
using Array = std::array<double, N>;

/// Classical fourth-order Runge-Kutta step. `field(t, s)` returns ds/dt.
/// `step` is only used to label a divergence error.
template <std::size_t N, class Field>
Array<N> rk4_step(Field&& field, double t, const Array<N>& s, double h, std::size_t step = 0) {
    if (!(h > 0.0)) throw InvalidInput("rk4_step: h must be positive");
    auto axpy = [](const Array<N>& base, double scale, const Array<N>& dir) {
        Array<N> out;
        for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + scale * dir[i];
        return out;
    };
    const Array<N> k1 = field(t, s);
    const Array<N> k2 = field(t + 0.5 * h, axpy(s, 0.5 * h, k1));
    const Array<N> k3 = field(t + 0.5 * h, axpy(s, 0.5 * h, k2));
    const Array<N> k4 = field(t + h, axpy(s, h, k3));
    Array<N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = s[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(out[i])) throw IntegrationDiverged(step, "non-finite state");
    }
    return out;
}

Trajectory integrate_master(const SimConfig& config);

Trajectory integrate_coupled(const SimConfig& config);

/// Hooks used by the communication layer. `transmit` maps the master state to
/// what the slave controller receives; `master_forcing` is added to the master
/// derivative. Empty hooks mean identity / zero.
struct CouplingHooks {
    std::function<StateVec(double t, const StateVec& x)> transmit;
    std::function<StateVec(double t)> master_forcing;
};

struct CoupledRun {
    Trajectory traj;
    std::vector<StateVec> transmitted; // same length as traj
};

CoupledRun integrate_coupled(const SimConfig& config, const CouplingHooks& hooks);

/// Suffix starting at sample `transient_steps`; time stamps are preserved.
Trajectory discard_transient(const Trajectory& traj, std::size_t transient_steps);

struct Bounds {
    double M = 0;
    double N = 0;
    double P = 0;

    friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Componentwise max |x_i| over the window.
Bounds estimate_bounds(const Trajectory& traj);

/// Header "t,x1,x2,x3,y1,y2,y3,E1,E2,E3"; needs a coupled trajectory.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

} // namespace glsync

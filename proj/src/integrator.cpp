#include "glsync/integrator.hpp"

#include "glsync/format.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace glsync {

namespace {

void check_state(std::size_t step, const StateVec& s, const char* who) {
    for (std::size_t i = 0; i < 3; ++i) {
        if (!std::isfinite(s[i])) throw IntegrationDiverged(step, std::string(who) + " state is non-finite");
        if (std::abs(s[i]) > kDivergenceSentinel)
            throw IntegrationDiverged(step, std::string(who) + " state exceeds divergence sentinel");
    }
}

std::vector<double> component(const auto& seq, std::size_t i) {
    std::vector<double> out;
    out.reserve(seq.size());
    for (const auto& v : seq) out.push_back(v[i]);
    return out;
}

} // namespace

void SimConfig::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("h must be a positive finite number");
    if (n_steps == 0) throw InvalidInput("n_steps must be positive");
    if (transient_steps >= n_steps) throw InvalidInput("transient_steps must be less than n_steps");
    if (!std::isfinite(k)) throw InvalidInput("k must be finite");
    if (!x0.all_finite()) throw InvalidInput("x0 must be finite");
    if (!y0.all_finite()) throw InvalidInput("y0 must be finite");
    make_sigma(sigma[0], sigma[1], sigma[2]);
}

std::vector<double> Trajectory::times() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = t(i);
    return out;
}

std::vector<double> Trajectory::x_component(std::size_t i) const { return component(x, i); }
std::vector<double> Trajectory::y_component(std::size_t i) const { return component(y, i); }
std::vector<double> Trajectory::e_component(std::size_t i) const { return component(E, i); }

Trajectory integrate_master(const SimConfig& config) {
    config.validate();
    const GlsParams p = params_from_k(config.k);

    Trajectory traj;
    traj.h = config.h;
    traj.sigma = config.sigma;
    traj.x.reserve(config.n_steps + 1);

    Array<3> s = config.x0.v;
    traj.x.push_back(config.x0);
    auto field = [&p](double, const Array<3>& z) { return master_deriv(p, StateVec{z[0], z[1], z[2]}).v; };
    for (std::size_t i = 0; i < config.n_steps; ++i) {
        s = rk4_step<3>(field, static_cast<double>(i) * config.h, s, config.h, i + 1);
        const StateVec x{s[0], s[1], s[2]};
        check_state(i + 1, x, "master");
        traj.x.push_back(x);
    }
    return traj;
}

CoupledRun integrate_coupled(const SimConfig& config, const CouplingHooks& hooks) {
    config.validate();
    const GlsParams p = params_from_k(config.k);
    const SigmaVec sigma = config.sigma;
    const ControlTerms terms = config.terms;

    auto transmit = [&hooks](double t, const StateVec& x) { return hooks.transmit ? hooks.transmit(t, x) : x; };

    auto field = [&](double t, const Array<6>& z) {
        const StateVec x{z[0], z[1], z[2]};
        const StateVec y{z[3], z[4], z[5]};
        StateVec dx = master_deriv(p, x);
        if (hooks.master_forcing) {
            const StateVec f = hooks.master_forcing(t);
            for (std::size_t i = 0; i < 3; ++i) dx[i] += f[i];
        }
        const StateVec dy = slave_deriv(p, sigma, transmit(t, x), y, terms);
        return Array<6>{dx[0], dx[1], dx[2], dy[0], dy[1], dy[2]};
    };

    CoupledRun run;
    Trajectory& traj = run.traj;
    traj.h = config.h;
    traj.sigma = sigma;
    const std::size_t n = config.n_steps + 1;
    traj.x.reserve(n);
    traj.y.reserve(n);
    traj.E.reserve(n);
    run.transmitted.reserve(n);

    auto record = [&](std::size_t i, const StateVec& x, const StateVec& y) {
        traj.x.push_back(x);
        traj.y.push_back(y);
        traj.E.push_back(error_vec(sigma, x, y));
        run.transmitted.push_back(transmit(static_cast<double>(i) * config.h, x));
    };

    Array<6> z{config.x0[0], config.x0[1], config.x0[2], config.y0[0], config.y0[1], config.y0[2]};
    record(0, config.x0, config.y0);
    for (std::size_t i = 0; i < config.n_steps; ++i) {
        z = rk4_step<6>(field, static_cast<double>(i) * config.h, z, config.h, i + 1);
        const StateVec x{z[0], z[1], z[2]};
        const StateVec y{z[3], z[4], z[5]};
        check_state(i + 1, x, "master");
        check_state(i + 1, y, "slave");
        record(i + 1, x, y);
    }
    return run;
}

Trajectory integrate_coupled(const SimConfig& config) { return integrate_coupled(config, CouplingHooks{}).traj; }

Trajectory discard_transient(const Trajectory& traj, std::size_t transient_steps) {
    if (transient_steps >= traj.size())
        throw InvalidInput("discard_transient: index " + std::to_string(transient_steps) +
                           " out of range for trajectory of length " + std::to_string(traj.size()));
    Trajectory out;
    out.h = traj.h;
    out.sigma = traj.sigma;
    out.first_index = traj.first_index + transient_steps;
    const auto off = static_cast<std::ptrdiff_t>(transient_steps);
    out.x.assign(traj.x.begin() + off, traj.x.end());
    if (traj.coupled()) {
        out.y.assign(traj.y.begin() + off, traj.y.end());
        out.E.assign(traj.E.begin() + off, traj.E.end());
    }
    return out;
}

Bounds estimate_bounds(const Trajectory& traj) {
    if (traj.empty()) throw InvalidInput("estimate_bounds: empty window");
    Bounds b;
    for (const auto& x : traj.x) {
        b.M = std::max(b.M, std::abs(x[0]));
        b.N = std::max(b.N, std::abs(x[1]));
        b.P = std::max(b.P, std::abs(x[2]));
    }
    return b;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (!traj.coupled()) throw InvalidInput("trajectory CSV export needs a coupled trajectory");
    os << "t,x1,x2,x3,y1,y2,y3,E1,E2,E3\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << format_double(traj.t(i));
        for (const auto* v : {&traj.x[i].v, &traj.y[i].v, &traj.E[i].v})
            for (double c : *v) os << ',' << format_double(c);
        os << '\n';
    }
}

} // namespace glsync

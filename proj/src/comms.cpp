#include "glsync/comms.hpp"

#include "glsync/format.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>

namespace glsync {

double message_sample(const MessageSpec& spec, double t) {
    if (t < 0.0) throw InvalidInput("message_sample: t must be >= 0");
    return spec.offset + spec.amplitude * std::sin(2.0 * std::numbers::pi * spec.freq * t);
}

SigmaVec regime_sigma(Regime regime) {
    switch (regime) {
    case Regime::positive: return {1.0, 1.0, -0.5};
    case Regime::zero: return {1.0, 1.0, 0.0};
    case Regime::negative: return {1.0, 1.0, 1.0};
    }
    throw InvalidInput("unknown regime");
}

std::string_view to_string(Injection v) {
    switch (v) {
    case Injection::modulate: return "modulate";
    case Injection::mask: return "mask";
    case Injection::drive: return "drive";
    }
    return "?";
}

std::string_view to_string(Regime v) {
    switch (v) {
    case Regime::positive: return "positive";
    case Regime::zero: return "zero";
    case Regime::negative: return "negative";
    }
    return "?";
}

Injection parse_injection(std::string_view text) {
    if (text == "modulate") return Injection::modulate;
    if (text == "mask") return Injection::mask;
    if (text == "drive") return Injection::drive;
    throw InvalidInput("injection must be modulate, mask or drive");
}

Regime parse_regime(std::string_view text) {
    if (text == "positive") return Regime::positive;
    if (text == "zero") return Regime::zero;
    if (text == "negative") return Regime::negative;
    throw InvalidInput("regime must be positive, zero or negative");
}

void CommsConfig::validate() const {
    sim.validate();
    const double nyquist = 0.5 / sim.h;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& m = messages[i];
        const std::string tag = "message " + std::to_string(i + 1);
        if (!(m.amplitude >= 0.0) || !std::isfinite(m.amplitude)) throw InvalidInput(tag + ": amplitude must be >= 0");
        if (!std::isfinite(m.offset)) throw InvalidInput(tag + ": offset must be finite");
        if (!(m.freq > 0.0) || !(m.freq < nyquist)) throw InvalidInput(tag + ": freq must lie in (0, Nyquist)");
        for (std::size_t j = 0; j < i; ++j)
            if (messages[j].freq == m.freq) throw InvalidInput("message frequencies must be distinct");
        if (bands[i]) {
            const Band b = *bands[i];
            if (!(b.lo > 0.0) || !(b.hi > b.lo) || !(b.hi < nyquist))
                throw InvalidInput(tag + ": band must satisfy 0 < lo < hi < Nyquist");
        }
    }
}

Band CommsConfig::band(std::size_t i) const { return bands[i] ? *bands[i] : default_band(messages, i); }

std::array<double, 3> case_frequencies(int case_id) {
    switch (case_id) {
    case 1: return {1.000, 1.088, 1.250};
    case 2: return {1.68, 2.05, 3.50};
    case 3: return {1.0, 1.088, 2.50};
    case 4: return {1.0, 1.2, 1.3};
    default: throw InvalidInput("case id must be 1..4");
    }
}

CommsConfig case_config(int case_id, Regime regime, const SimConfig& base, double amplitude) {
    CommsConfig cfg;
    cfg.sim = base;
    cfg.sim.sigma = regime_sigma(regime);
    const auto f = case_frequencies(case_id);
    for (std::size_t i = 0; i < 3; ++i) cfg.messages[i] = {0.0, amplitude, f[i]};
    return cfg;
}

Band default_band(const std::array<MessageSpec, 3>& messages, std::size_t i) {
    const double f = messages[i].freq;
    double half = 0.06;
    for (std::size_t j = 0; j < 3; ++j)
        if (j != i) half = std::min(half, 0.49 * std::abs(messages[j].freq - f));
    return {f - half, f + half};
}

CoupledRun encode_and_run(const CommsConfig& config) {
    config.validate();
    const auto msgs = config.messages;
    auto m = [msgs](double t) {
        return StateVec{message_sample(msgs[0], t), message_sample(msgs[1], t), message_sample(msgs[2], t)};
    };
    CouplingHooks hooks;
    switch (config.injection) {
    case Injection::modulate:
        hooks.transmit = [m](double t, const StateVec& x) {
            const StateVec v = m(t);
            return StateVec{x[0] * (1.0 + v[0]), x[1] * (1.0 + v[1]), x[2] * (1.0 + v[2])};
        };
        break;
    case Injection::mask:
        hooks.transmit = [m](double t, const StateVec& x) {
            const StateVec v = m(t);
            return StateVec{x[0] + v[0], x[1] + v[1], x[2] + v[2]};
        };
        break;
    case Injection::drive: hooks.master_forcing = m; break;
    }
    return integrate_coupled(config.sim, hooks);
}

std::vector<double> decode_residual(const CoupledRun& run, double sigma3, std::size_t transient_steps) {
    const auto& traj = run.traj;
    if (transient_steps >= traj.size()) throw InvalidInput("decode_residual: empty post-transient window");
    std::vector<double> r;
    r.reserve(traj.size() - transient_steps);
    for (std::size_t i = transient_steps; i < traj.size(); ++i) r.push_back(traj.y[i][2] + sigma3 * run.transmitted[i][2]);
    return r;
}

DecodedResult decode(const CommsConfig& config, const PeakCriteria& criteria) {
    const CoupledRun run = encode_and_run(config);
    DecodedResult out;
    out.sample_rate = 1.0 / config.sim.h;
    out.t0 = run.traj.t(config.sim.transient_steps);
    out.residual = decode_residual(run, config.sim.sigma[2], config.sim.transient_steps);
    out.spectrum = power_spectrum(out.residual, out.sample_rate);
    for (std::size_t i = 0; i < 3; ++i) {
        MessageRecovery& rec = out.messages[i];
        rec.index = static_cast<int>(i) + 1;
        rec.encoded_freq = config.messages[i].freq;
        rec.peak = find_peak_near(out.spectrum, rec.encoded_freq, criteria);
        rec.band = config.band(i);
        try {
            const auto filtered = band_pass(out.residual, out.sample_rate, rec.band.lo, rec.band.hi);
            rec.fit = fit_sine(filtered, out.sample_rate, rec.encoded_freq);
        } catch (const Error& e) {
            rec.fit_error = e.what();
        }
    }
    return out;
}

DecodedResult run_case(int case_id, Regime regime, const SimConfig& base, double amplitude) {
    return decode(case_config(case_id, regime, base, amplitude));
}

std::vector<DecodedResult> run_cases_serial(std::span<const CaseRequest> requests, const SimConfig& base,
                                            double amplitude) {
    std::vector<DecodedResult> out;
    out.reserve(requests.size());
    for (const auto& r : requests) out.push_back(run_case(r.case_id, r.regime, base, amplitude));
    return out;
}

std::vector<DecodedResult> run_cases(std::span<const CaseRequest> requests, const SimConfig& base, double amplitude,
                                     int workers) {
    std::vector<DecodedResult> out(requests.size());
    std::vector<std::exception_ptr> errors(requests.size());
    const auto n = static_cast<std::ptrdiff_t>(requests.size());
#pragma omp parallel for schedule(dynamic) num_threads(detail::resolve_workers(workers))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i);
        try {
            out[j] = run_case(requests[j].case_id, requests[j].regime, base, amplitude);
        } catch (...) {
            errors[j] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum) {
    os << "freq,power\n";
    for (std::size_t k = 0; k < spectrum.size(); ++k)
        os << format_double(spectrum.freq[k]) << ',' << format_double(spectrum.power[k]) << '\n';
}

void write_residual_csv(std::ostream& os, const DecodedResult& result) {
    os << "t,residual\n";
    const double h = 1.0 / result.sample_rate;
    const auto first = static_cast<std::size_t>(std::llround(result.t0 / h));
    for (std::size_t i = 0; i < result.residual.size(); ++i)
        os << format_double(static_cast<double>(first + i) * h) << ',' << format_double(result.residual[i]) << '\n';
}

std::string fits_to_json(const DecodedResult& result) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& m : result.messages) {
        nlohmann::ordered_json j;
        j["message_index"] = m.index;
        j["encoded_freq"] = m.encoded_freq;
        if (m.fit) {
            j["freq"] = m.fit->freq;
            j["amplitude"] = m.fit->amplitude;
            j["phase"] = m.fit->phase;
            j["offset"] = m.fit->offset;
            j["adj_r2"] = m.fit->adj_r2;
        } else {
            for (const char* key : {"freq", "amplitude", "phase", "offset", "adj_r2"}) j[key] = nullptr;
            j["error"] = m.fit_error;
        }
        j["band"] = {m.band.lo, m.band.hi};
        j["peak_found"] = m.peak.has_value();
        if (m.peak) {
            j["peak_freq"] = m.peak->freq;
            j["peak_prominence"] = m.peak->prominence;
        }
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

} // namespace glsync

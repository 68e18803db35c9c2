#pragma once

// Chaos-masking message transport: three sinusoidal messages ride on the
// master's channels, the slave synchronizes to what it receives, and the
// residual of the third channel exposes all three messages.

#include "glsync/integrator.hpp"
#include "glsync/spectral.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace glsync {

struct MessageSpec {
    double offset = 0;
    double amplitude = 0.01;
    double freq = 1.0; // cycles per time unit

    friend bool operator==(const MessageSpec&, const MessageSpec&) = default;
};

/// offset + amplitude * sin(2 pi freq t), t >= 0.
double message_sample(const MessageSpec& spec, double t);

/// How the messages reach the slave.
///  modulate: the slave controller receives x_i (1 + m_i)
///  mask:     the slave controller receives x_i + m_i
///  drive:    m_i is added to the master's i-th derivative; the slave receives x
enum class Injection { modulate, mask, drive };

/// Synchronization-plot slope of channel 3: positive sigma = (1, 1, -0.5),
/// zero (1, 1, 0), negative (1, 1, 1).
enum class Regime { positive, zero, negative };

SigmaVec regime_sigma(Regime regime);

std::string_view to_string(Injection v);
std::string_view to_string(Regime v);
Injection parse_injection(std::string_view text);
Regime parse_regime(std::string_view text);

struct Band {
    double lo = 0;
    double hi = 0;

    friend bool operator==(const Band&, const Band&) = default;
};

struct CommsConfig {
    SimConfig sim;
    std::array<MessageSpec, 3> messages{};
    Injection injection = Injection::modulate;
    /// Band-pass edges per message; nullopt picks default_band().
    std::array<std::optional<Band>, 3> bands{};

    void validate() const;
    Band band(std::size_t i) const;
};

/// The encoded frequencies of cases 1..4.
std::array<double, 3> case_frequencies(int case_id);

CommsConfig case_config(int case_id, Regime regime, const SimConfig& base = {}, double amplitude = 0.01);

/// Half-width min(0.06, 0.49 * gap to the nearest other message) around message i.
Band default_band(const std::array<MessageSpec, 3>& messages, std::size_t i);

/// Integrates master and slave with the messages injected. `transmitted` holds
/// the channel values the slave consumed.
CoupledRun encode_and_run(const CommsConfig& config);

/// y3 + sigma3 * transmitted3 over the post-transient window.
std::vector<double> decode_residual(const CoupledRun& run, double sigma3, std::size_t transient_steps);

struct MessageRecovery {
    int index = 0; // 1..3
    double encoded_freq = 0;
    std::optional<Peak> peak;
    Band band;
    std::optional<SineFit> fit;
    std::string fit_error;
};

struct DecodedResult {
    double t0 = 0; // time of residual[0]
    double sample_rate = 0;
    std::vector<double> residual;
    Spectrum spectrum;
    std::array<MessageRecovery, 3> messages{};
};

/// Full pipeline: encode, decode, spectrum, per-message peak search,
/// band-pass recovery and sine fit.
DecodedResult decode(const CommsConfig& config, const PeakCriteria& criteria = {});

DecodedResult run_case(int case_id, Regime regime, const SimConfig& base = {}, double amplitude = 0.01);

struct CaseRequest {
    int case_id = 1;
    Regime regime = Regime::negative;
};

/// Independent case runs fanned out over OpenMP; results in request order.
std::vector<DecodedResult> run_cases(std::span<const CaseRequest> requests, const SimConfig& base = {},
                                     double amplitude = 0.01, int workers = 0);
std::vector<DecodedResult> run_cases_serial(std::span<const CaseRequest> requests, const SimConfig& base = {},
                                            double amplitude = 0.01);

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum);
void write_residual_csv(std::ostream& os, const DecodedResult& result);

/// JSON array of {"message_index","freq","amplitude","phase","offset","adj_r2"}.
std::string fits_to_json(const DecodedResult& result);

} // namespace glsync

#pragma once

// Plain-text run configuration:
//
//   [sim]        h, n_steps, transient_steps, k, x0, y0, control_terms, convergence_eps
//   [sigma]      s1, s2, s3, preset, grid
//   [comms]      case, regime, amplitude, offset, injection, band1, band2, band3
//   [stability]  bounds
//
// Vectors are comma separated ("0.999,0.899,0.799"), grids are
// start:stop:step, '#' starts a comment. Unset keys keep their defaults.

#include "glsync/comms.hpp"
#include "glsync/integrator.hpp"
#include "glsync/sync.hpp"

#include <optional>
#include <string>

namespace glsync {

struct Grid {
    double start = 0;
    double stop = 0;
    double step = 0;

    friend bool operator==(const Grid&, const Grid&) = default;
};

Grid parse_grid(const std::string& text);
Grid default_grid(SweepPreset preset);

struct RunConfig {
    SimConfig sim;
    double convergence_eps = 1e-3;

    SweepPreset preset = SweepPreset::figure;
    std::optional<Grid> grid;

    int case_id = 1;
    Regime regime = Regime::negative;
    double amplitude = 0.01;
    double offset = 0.0;
    Injection injection = Injection::modulate;
    std::array<std::optional<Band>, 3> bands{};

    std::optional<Bounds> bounds;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError carrying the line number and key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text; parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& config);

/// The comms pipeline configuration the [comms] section describes.
CommsConfig comms_config(const RunConfig& config);

std::string_view to_string(SweepPreset p);
SweepPreset parse_preset(std::string_view text);

} // namespace glsync

#pragma once

// Synchronization quantifiers: slope of the synchronization plot, its standard
// error, S_Q = 1/dm, lagged cross-correlation, convergence times and sigma
// sweeps. The sweep and the lag loop have OpenMP kernels; the `_serial`
// variants are the reference implementations used by tests and benchmarks.

#include "glsync/integrator.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace glsync {

struct SlopeFit {
    double m = 0;
    double dm = 0; // standard error of the OLS slope
};

/// OLS slope of ys against xs. Needs at least 3 samples and non-constant xs.
SlopeFit fit_sync_slope(std::span<const double> xs, std::span<const double> ys);

/// 1/dm, +inf for dm == 0.
double sync_quality(double dm);

struct LagCorrelation {
    int lag = 0;
    double r = 0;
};

/// Mean-removed correlation of xs[i] with ys[i + lag], normalized by the full
/// length sums of squares so |r| <= 1 at every lag.
std::vector<LagCorrelation> cross_correlation(std::span<const double> xs, std::span<const double> ys, int max_lag,
                                              int workers = 0);
std::vector<LagCorrelation> cross_correlation_serial(std::span<const double> xs, std::span<const double> ys,
                                                     int max_lag);

double zero_lag_correlation(std::span<const double> xs, std::span<const double> ys);

/// First time T such that |e(t)| < eps for every later sample; nullopt if the
/// last sample is not below eps.
std::optional<double> convergence_time(std::span<const double> series, double eps, double t0, double h);

struct SyncMetrics {
    int pair = 0; // 1..3, the (x_i, y_i) channel pair
    double m = 0;
    double dm = 0;
    double s_q = 0;
    double r0 = 0;
    std::optional<double> conv_time;
};

std::array<SyncMetrics, 3> sync_metrics(const Trajectory& full, std::size_t transient_steps, double eps);

struct SweepPoint {
    SigmaVec sigma;
    bool diverged = false;
    std::string note; // divergence message when diverged
    std::array<SyncMetrics, 3> metrics{};
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

enum class SweepPreset { literal, figure };

/// literal: sigma = (s, s, s); figure: sigma = (1, 1, s).
SigmaVec preset_sigma(SweepPreset preset, double s);

/// Inclusive grid start, start+step, ... up to stop.
std::vector<double> parse_grid_values(double start, double stop, double step);

std::vector<SigmaVec> sigma_grid(SweepPreset preset, double start, double stop, double step);

/// Diverging points are recorded with NaN metrics rather than aborting the sweep.
SweepResult sweep_sigma(const SimConfig& base, std::span<const SigmaVec> sigmas, double eps = 1e-3, int workers = 0);
SweepResult sweep_sigma_serial(const SimConfig& base, std::span<const SigmaVec> sigmas, double eps = 1e-3);

/// Header "s1,s2,s3,pair,m,dm,s_q,r0,conv_time"; empty conv_time means none.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

} // namespace glsync

#include "glsync/sync.hpp"

#include "glsync/format.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>

namespace glsync {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sum_sq_dev(std::span<const double> v, double mu) {
    double s = 0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s;
}

void check_xcorr_inputs(std::span<const double> xs, std::span<const double> ys, int max_lag) {
    if (xs.size() != ys.size()) throw InvalidInput("cross_correlation: sequences differ in length");
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= xs.size())
        throw InvalidInput("cross_correlation: need length > max_lag >= 0");
}

struct Centered {
    std::vector<double> dx, dy;
    double norm = 0;
};

Centered center(std::span<const double> xs, std::span<const double> ys) {
    const double mx = mean(xs), my = mean(ys);
    Centered c;
    c.dx.resize(xs.size());
    c.dy.resize(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        c.dx[i] = xs[i] - mx;
        c.dy[i] = ys[i] - my;
    }
    const double sxx = sum_sq_dev(xs, mx), syy = sum_sq_dev(ys, my);
    if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateInput("cross_correlation: zero-variance input");
    c.norm = std::sqrt(sxx * syy);
    return c;
}

double lag_sum(const Centered& c, int lag) {
    const auto n = static_cast<std::ptrdiff_t>(c.dx.size());
    const std::ptrdiff_t lo = lag < 0 ? -lag : 0;
    const std::ptrdiff_t hi = lag < 0 ? n : n - lag;
    double s = 0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) s += c.dx[static_cast<std::size_t>(i)] * c.dy[static_cast<std::size_t>(i + lag)];
    return std::clamp(s / c.norm, -1.0, 1.0);
}

double round_grid(double v) { return std::round(v * 1e12) / 1e12; }

SweepPoint evaluate_point(const SimConfig& base, const SigmaVec& sigma, double eps) {
    SweepPoint pt;
    pt.sigma = sigma;
    SimConfig cfg = base;
    cfg.sigma = sigma;
    try {
        pt.metrics = sync_metrics(integrate_coupled(cfg), cfg.transient_steps, eps);
    } catch (const IntegrationDiverged& e) {
        pt.diverged = true;
        pt.note = e.what();
        for (int i = 0; i < 3; ++i) pt.metrics[static_cast<std::size_t>(i)] = {i + 1, kNaN, kNaN, kNaN, kNaN, std::nullopt};
    }
    return pt;
}

} // namespace

SlopeFit fit_sync_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidInput("fit_sync_slope: sequences differ in length");
    if (xs.size() < 3) throw InvalidInput("fit_sync_slope: need at least 3 samples");
    const double mx = mean(xs), my = mean(ys);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw DegenerateInput("fit_sync_slope: xs has zero variance");
    const double m = sxy / sxx;
    double ss_res = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = (ys[i] - my) - m * (xs[i] - mx);
        ss_res += r * r;
    }
    const double dof = static_cast<double>(xs.size() - 2);
    return {m, std::sqrt(ss_res / dof / sxx)};
}

double sync_quality(double dm) {
    if (std::isnan(dm) || dm < 0.0) throw InvalidInput("sync_quality: dm must be >= 0");
    if (dm == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / dm;
}

std::vector<LagCorrelation> cross_correlation_serial(std::span<const double> xs, std::span<const double> ys,
                                                     int max_lag) {
    check_xcorr_inputs(xs, ys, max_lag);
    const Centered c = center(xs, ys);
    std::vector<LagCorrelation> out(static_cast<std::size_t>(2 * max_lag + 1));
    for (int lag = -max_lag; lag <= max_lag; ++lag) out[static_cast<std::size_t>(lag + max_lag)] = {lag, lag_sum(c, lag)};
    return out;
}

std::vector<LagCorrelation> cross_correlation(std::span<const double> xs, std::span<const double> ys, int max_lag,
                                              int workers) {
    check_xcorr_inputs(xs, ys, max_lag);
    const Centered c = center(xs, ys);
    std::vector<LagCorrelation> out(static_cast<std::size_t>(2 * max_lag + 1));
    const int nlags = 2 * max_lag + 1;
#pragma omp parallel for schedule(static) num_threads(detail::resolve_workers(workers))
    for (int j = 0; j < nlags; ++j) out[static_cast<std::size_t>(j)] = {j - max_lag, lag_sum(c, j - max_lag)};
    return out;
}

double zero_lag_correlation(std::span<const double> xs, std::span<const double> ys) {
    check_xcorr_inputs(xs, ys, 0);
    return lag_sum(center(xs, ys), 0);
}

std::optional<double> convergence_time(std::span<const double> series, double eps, double t0, double h) {
    if (!(eps > 0.0)) throw InvalidInput("convergence_time: eps must be positive");
    std::size_t first = series.size();
    while (first > 0 && std::abs(series[first - 1]) < eps) --first;
    if (first == series.size()) return std::nullopt;
    return t0 + static_cast<double>(first) * h;
}

std::array<SyncMetrics, 3> sync_metrics(const Trajectory& full, std::size_t transient_steps, double eps) {
    if (!full.coupled()) throw InvalidInput("sync_metrics: needs a coupled trajectory");
    const Trajectory win = discard_transient(full, transient_steps);
    std::array<SyncMetrics, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto xs = win.x_component(i);
        const auto ys = win.y_component(i);
        SyncMetrics& m = out[i];
        m.pair = static_cast<int>(i) + 1;
        const SlopeFit fit = fit_sync_slope(xs, ys);
        m.m = fit.m;
        m.dm = fit.dm;
        m.s_q = sync_quality(fit.dm);
        try {
            m.r0 = zero_lag_correlation(xs, ys);
        } catch (const DegenerateInput&) {
            m.r0 = kNaN; // slave channel pinned to a constant
        }
        m.conv_time = convergence_time(full.e_component(i), eps, full.t(0), full.h);
    }
    return out;
}

SigmaVec preset_sigma(SweepPreset preset, double s) {
    return preset == SweepPreset::literal ? make_sigma(s, s, s) : make_sigma(1.0, 1.0, s);
}

std::vector<double> parse_grid_values(double start, double stop, double step) {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
        throw InvalidInput("grid: non-finite bound");
    if (!(step > 0.0)) throw InvalidInput("grid: step must be positive");
    if (stop < start) throw InvalidInput("grid: stop < start gives an empty grid");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = round_grid(start + static_cast<double>(i) * step);
    return out;
}

std::vector<SigmaVec> sigma_grid(SweepPreset preset, double start, double stop, double step) {
    std::vector<SigmaVec> out;
    for (double s : parse_grid_values(start, stop, step)) out.push_back(preset_sigma(preset, s));
    return out;
}

SweepResult sweep_sigma_serial(const SimConfig& base, std::span<const SigmaVec> sigmas, double eps) {
    if (sigmas.empty()) throw InvalidInput("sweep_sigma: empty sigma list");
    SweepResult r;
    for (const auto& s : sigmas) r.points.push_back(evaluate_point(base, s, eps));
    return r;
}

SweepResult sweep_sigma(const SimConfig& base, std::span<const SigmaVec> sigmas, double eps, int workers) {
    if (sigmas.empty()) throw InvalidInput("sweep_sigma: empty sigma list");
    SweepResult r;
    r.points.resize(sigmas.size());
    std::vector<std::exception_ptr> errors(sigmas.size());
    const auto n = static_cast<std::ptrdiff_t>(sigmas.size());
#pragma omp parallel for schedule(dynamic) num_threads(detail::resolve_workers(workers))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i);
        try {
            r.points[j] = evaluate_point(base, sigmas[j], eps);
        } catch (...) {
            errors[j] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return r;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "s1,s2,s3,pair,m,dm,s_q,r0,conv_time\n";
    for (const auto& pt : result.points) {
        for (const auto& m : pt.metrics) {
            os << format_double(pt.sigma[0]) << ',' << format_double(pt.sigma[1]) << ',' << format_double(pt.sigma[2])
               << ",x" << m.pair << "y" << m.pair << ',' << format_double(m.m) << ',' << format_double(m.dm) << ','
               << format_double(m.s_q) << ',' << format_double(m.r0) << ',';
            if (m.conv_time) os << format_double(*m.conv_time);
            os << '\n';
        }
    }
}

} // namespace glsync

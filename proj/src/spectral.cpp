#include "glsync/spectral.hpp"

#include "glsync/error.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace glsync {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

class Plan {
public:
    explicit Plan(fftw_plan p) : p_(p) {
        if (!p_) throw Error("fftw: plan creation failed");
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(p_);
    }
    void execute() const { fftw_execute(p_); }

private:
    fftw_plan p_;
};

/// Forward real transform; returns n/2 + 1 complex bins.
std::vector<std::complex<double>> rfft(std::span<const double> in) {
    const int n = static_cast<int>(in.size());
    const int nc = n / 2 + 1;
    FftwBuffer<double> buf(static_cast<double*>(fftw_malloc(sizeof(double) * in.size())));
    FftwBuffer<fftw_complex> out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(nc))));
    std::unique_ptr<Plan> plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(n, buf.get(), out.get(), FFTW_ESTIMATE));
    }
    std::copy(in.begin(), in.end(), buf.get());
    plan->execute();
    std::vector<std::complex<double>> res(static_cast<std::size_t>(nc));
    for (int k = 0; k < nc; ++k) res[static_cast<std::size_t>(k)] = {out[k][0], out[k][1]};
    return res;
}

/// Inverse of rfft for a length-n real signal, including the 1/n factor.
std::vector<double> irfft(const std::vector<std::complex<double>>& bins, std::size_t n) {
    const int nc = static_cast<int>(bins.size());
    FftwBuffer<fftw_complex> in(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins.size())));
    FftwBuffer<double> out(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<Plan> plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = std::make_unique<Plan>(fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
    }
    for (int k = 0; k < nc; ++k) {
        in[k][0] = bins[static_cast<std::size_t>(k)].real();
        in[k][1] = bins[static_cast<std::size_t>(k)].imag();
    }
    plan->execute();
    std::vector<double> res(n);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) res[i] = out[i] * scale;
    return res;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

// Linear part of the sine model for a fixed frequency: y ~ A sin + B cos + c.
struct LinearFit {
    Eigen::Vector3d coef;
    double ss_res = 0;
};

LinearFit linear_fit(std::span<const double> y, double fs, double f) {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d aty = Eigen::Vector3d::Zero();
    const double w = 2.0 * std::numbers::pi * f / fs;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double ph = w * static_cast<double>(i);
        const Eigen::Vector3d row(std::sin(ph), std::cos(ph), 1.0);
        ata.noalias() += row * row.transpose();
        aty.noalias() += row * y[i];
    }
    LinearFit out;
    out.coef = ata.ldlt().solve(aty);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double ph = w * static_cast<double>(i);
        const double r = y[i] - (out.coef[0] * std::sin(ph) + out.coef[1] * std::cos(ph) + out.coef[2]);
        out.ss_res += r * r;
    }
    return out;
}

double sum_sq_residual(std::span<const double> y, double fs, const Eigen::Vector4d& p) {
    const double w = 2.0 * std::numbers::pi * p[3] / fs;
    double ss = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double ph = w * static_cast<double>(i);
        const double r = y[i] - (p[0] * std::sin(ph) + p[1] * std::cos(ph) + p[2]);
        ss += r * r;
    }
    return ss;
}

} // namespace

Spectrum power_spectrum(std::span<const double> series, double sample_rate) {
    const std::size_t n = series.size();
    if (n < 16) throw InvalidInput("power_spectrum: need at least 16 samples");
    if (!(sample_rate > 0.0)) throw InvalidInput("power_spectrum: sample_rate must be positive");

    double mu = 0;
    for (double v : series) mu += v;
    mu /= static_cast<double>(n);

    std::vector<double> tapered(n);
    double wsum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1)));
        tapered[i] = (series[i] - mu) * w;
        wsum += w * w;
    }
    const auto bins = rfft(tapered);

    Spectrum s;
    s.bin_width = sample_rate / static_cast<double>(n);
    const std::size_t last = n / 2;
    s.freq.reserve(last);
    s.power.reserve(last);
    for (std::size_t k = 1; k <= last; ++k) {
        const double one_sided = (k == last && n % 2 == 0) ? 1.0 : 2.0;
        s.freq.push_back(static_cast<double>(k) * s.bin_width);
        s.power.push_back(one_sided * std::norm(bins[k]) / (sample_rate * wsum));
    }
    return s;
}

std::vector<double> band_pass(std::span<const double> series, double sample_rate, double f_lo, double f_hi) {
    const double nyquist = 0.5 * sample_rate;
    if (!(f_lo > 0.0) || !(f_hi > f_lo) || !(f_hi < nyquist))
        throw InvalidInput("band_pass: need 0 < f_lo < f_hi < Nyquist");
    if (series.size() < 2) throw InvalidInput("band_pass: series too short");
    auto bins = rfft(series);
    const double df = sample_rate / static_cast<double>(series.size());
    for (std::size_t k = 0; k < bins.size(); ++k) {
        const double f = static_cast<double>(k) * df;
        if (f < f_lo || f > f_hi) bins[k] = 0.0;
    }
    return irfft(bins, series.size());
}

std::optional<Peak> find_peak_near(const Spectrum& s, double freq, const PeakCriteria& c) {
    if (s.size() < 3 || !(freq > 0.0)) return std::nullopt;
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    const auto target = static_cast<std::ptrdiff_t>(std::llround(freq / s.bin_width)) - 1;
    std::ptrdiff_t best = -1;
    for (std::ptrdiff_t j = target - c.tolerance_bins; j <= target + c.tolerance_bins; ++j) {
        if (j < 1 || j >= n - 1) continue;
        const auto u = static_cast<std::size_t>(j);
        const bool local_max = s.power[u] >= s.power[u - 1] && s.power[u] >= s.power[u + 1];
        if (local_max && (best < 0 || s.power[u] > s.power[static_cast<std::size_t>(best)])) best = j;
    }
    if (best < 0) return std::nullopt;

    std::vector<double> neighbours;
    for (std::ptrdiff_t j = best - c.neighbourhood_bins; j <= best + c.neighbourhood_bins; ++j) {
        if (j < 0 || j >= n || std::abs(j - best) <= c.guard_bins) continue;
        neighbours.push_back(s.power[static_cast<std::size_t>(j)]);
    }
    const auto u = static_cast<std::size_t>(best);
    const double med = median(std::move(neighbours));
    const double prominence = med > 0.0 ? s.power[u] / med : (s.power[u] > 0.0 ? INFINITY : 0.0);
    if (!(prominence >= c.min_prominence)) return std::nullopt;
    return Peak{u, s.freq[u], s.power[u], prominence};
}

Peak dominant_peak(const Spectrum& s, double f_lo, double f_hi) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s.freq[k] < f_lo || s.freq[k] > f_hi) continue;
        if (!best || s.power[k] > s.power[*best]) best = k;
    }
    if (!best) throw InvalidInput("dominant_peak: no bins in range");
    return {*best, s.freq[*best], s.power[*best], 0.0};
}

SineFit fit_sine(std::span<const double> y, double fs, double freq_hint) {
    if (!(freq_hint > 0.0) || !(fs > 0.0)) throw InvalidInput("fit_sine: frequency hint and sample rate must be positive");
    if (fs / freq_hint < 4.0) throw InvalidInput("fit_sine: fewer than 4 samples per hinted period");
    const std::size_t n = y.size();
    if (n < 16) throw InvalidInput("fit_sine: need at least 16 samples");

    double mu = 0;
    for (double v : y) mu += v;
    mu /= static_cast<double>(n);
    double ss_tot = 0;
    for (double v : y) ss_tot += (v - mu) * (v - mu);
    if (!(ss_tot > 0.0)) throw DegenerateInput("fit_sine: constant series");

    // Seed: strongest Hann bin near the hint, refined by a log-parabola.
    const Spectrum spec = power_spectrum(y, fs);
    const double bw = spec.bin_width;
    const double half_window = std::max(0.1 * freq_hint, 2.0 * bw);
    std::optional<std::size_t> j;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (std::abs(spec.freq[k] - freq_hint) > half_window) continue;
        if (!j || spec.power[k] > spec.power[*j]) j = k;
    }
    if (!j) throw FitFailed("fit_sine: no spectral bin near the hint");
    double f0 = spec.freq[*j];
    if (*j > 0 && *j + 1 < spec.size() && spec.power[*j - 1] > 0 && spec.power[*j + 1] > 0) {
        const double lm = std::log(spec.power[*j - 1]), l0 = std::log(spec.power[*j]), lp = std::log(spec.power[*j + 1]);
        const double den = lm - 2.0 * l0 + lp;
        if (den < 0.0) f0 += std::clamp(0.5 * (lm - lp) / den, -0.5, 0.5) * bw;
    }

    // Variable projection: only the frequency is searched nonlinearly.
    const double lo = f0 - 0.75 * bw, hi = f0 + 0.75 * bw;
    std::uintmax_t brent_iters = 200;
    const auto [f_vp, ss_vp] = boost::math::tools::brent_find_minima(
        [&](double f) { return linear_fit(y, fs, f).ss_res; }, lo, hi, std::numeric_limits<double>::digits / 2,
        brent_iters);
    if (f_vp - lo < 1e-6 * bw || hi - f_vp < 1e-6 * bw)
        throw FitFailed("fit_sine: frequency search hit the bracket edge near " + std::to_string(f0));

    // Levenberg-Marquardt polish on (A, B, c, f).
    const LinearFit lin = linear_fit(y, fs, f_vp);
    Eigen::Vector4d p(lin.coef[0], lin.coef[1], lin.coef[2], f_vp);
    double ss = lin.ss_res;
    double lambda = 1e-6;
    bool converged = ss == 0.0;
    int it = 0;
    constexpr int kMaxIterations = 100;
    for (; it < kMaxIterations && !converged; ++it) {
        Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
        Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
        const double w = 2.0 * std::numbers::pi * p[3] / fs;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / fs;
            const double sn = std::sin(w * static_cast<double>(i)), cs = std::cos(w * static_cast<double>(i));
            const Eigen::Vector4d g(sn, cs, 1.0, 2.0 * std::numbers::pi * t * (p[0] * cs - p[1] * sn));
            const double r = y[i] - (p[0] * sn + p[1] * cs + p[2]);
            jtj.noalias() += g * g.transpose();
            jtr.noalias() += g * r;
        }
        bool accepted = false;
        while (lambda < 1e20) {
            Eigen::Matrix4d a = jtj;
            a.diagonal() += lambda * jtj.diagonal();
            const Eigen::Vector4d step = a.ldlt().solve(jtr);
            const Eigen::Vector4d trial = p + step;
            const double ss_trial = sum_sq_residual(y, fs, trial);
            if (ss_trial <= ss) {
                const double scale = std::hypot(p[0], p[1]) + std::abs(p[2]) + 1e-300;
                const bool tiny = std::abs(step[3]) <= 1e-13 * std::abs(p[3]) &&
                                  step.head<3>().cwiseAbs().maxCoeff() <= 1e-12 * scale;
                p = trial;
                const double gain = ss - ss_trial;
                ss = ss_trial;
                lambda = std::max(lambda * 0.1, 1e-12);
                accepted = true;
                converged = tiny || gain <= 1e-15 * ss || ss == 0.0;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) converged = true; // no descent direction left: at the minimum to machine precision
    }
    if (!converged) throw FitFailed("fit_sine: Levenberg-Marquardt did not converge in " + std::to_string(kMaxIterations) +
                                    " iterations (last ss=" + std::to_string(ss) + ")");

    SineFit out;
    out.amplitude = std::hypot(p[0], p[1]);
    out.phase = std::atan2(p[1], p[0]);
    out.offset = p[2];
    out.freq = p[3];
    out.iterations = it;
    const double dn = static_cast<double>(n);
    out.adj_r2 = 1.0 - (ss / (dn - 4.0)) / (ss_tot / (dn - 1.0));
    return out;
}

} // namespace glsync

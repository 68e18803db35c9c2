#pragma once

#include <optional>
#include <span>
#include <vector>

namespace glsync {

/// One-sided spectrum without the DC bin: freq[i] = (i + 1) * bin_width, up to
/// Nyquist.
struct Spectrum {
    std::vector<double> freq;
    std::vector<double> power;
    double bin_width = 0;

    std::size_t size() const { return freq.size(); }
};

/// Hann-tapered periodogram of the mean-removed series, scaled as a one-sided
/// power spectral density. Needs at least 16 samples.
Spectrum power_spectrum(std::span<const double> series, double sample_rate);

/// Zero-phase brick-wall band-pass: bins outside [f_lo, f_hi] are zeroed in
/// the discrete Fourier domain.
std::vector<double> band_pass(std::span<const double> series, double sample_rate, double f_lo, double f_hi);

struct Peak {
    std::size_t bin = 0; // index into Spectrum::freq
    double freq = 0;
    double power = 0;
    double prominence = 0; // power / median power of the neighbourhood
};

struct PeakCriteria {
    int tolerance_bins = 1;      // search window around the target bin
    double min_prominence = 10;  // required power / neighbourhood median
    int neighbourhood_bins = 100;
    int guard_bins = 4;          // excluded around the candidate when taking the median
};

/// A local maximum within `tolerance_bins` of `freq` whose prominence clears
/// the threshold, or nullopt.
std::optional<Peak> find_peak_near(const Spectrum& s, double freq, const PeakCriteria& criteria = {});

/// Highest bin with f_lo <= freq <= f_hi.
Peak dominant_peak(const Spectrum& s, double f_lo, double f_hi);

struct SineFit {
    double amplitude = 0;
    double freq = 0;
    double phase = 0; // model: amplitude * sin(2 pi freq t + phase) + offset, t = i / sample_rate
    double offset = 0;
    double adj_r2 = 0;
    int iterations = 0;
};

/// Nonlinear least-squares sine fit seeded from the spectral peak near
/// `freq_hint`. Adjusted R^2 uses n - 4 residual degrees of freedom.
SineFit fit_sine(std::span<const double> series, double sample_rate, double freq_hint);

} // namespace glsync

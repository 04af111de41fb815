#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ethd::dsp {

struct SignalMeta {
    std::string plate_label;
    double rendered_stiffness_npm = 0.0;
    std::uint64_t seed = 0;
};

struct TapSignal {
    std::vector<double> samples; // force, N
    double sample_rate_hz = 0.0;
    SignalMeta meta;

    double duration_s() const {
        return samples.empty() ? 0.0 : static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

// One-sided magnitude spectrum: freqs run 0..Nyquist, mags are raw |X_k|.
struct Spectrum {
    std::vector<double> freqs_hz;
    std::vector<double> mags;
};

enum class DurationClass { VeryShort, Short, Long, VeryLong };
const char* to_string(DurationClass c);

struct TapFeatures {
    double spectral_centroid_hz = 0.0;
    double sc_magnitude = 0.0; // spectrum magnitude interpolated at the centroid
    double dominant_freq_hz = 0.0;
    double dominant_mag = 0.0;
    double duration_s = 0.0;
    DurationClass duration_class = DurationClass::VeryShort;
};

// Half-open sample range [begin, end) around a detected peak.
struct TapSegment {
    std::size_t peak_index = 0;
    double peak_value = 0.0;
    std::size_t begin = 0;
    std::size_t end = 0;
};

TapSignal crop(const TapSignal& signal, double start_s = 3.0, double end_s = 10.0);

// Local maxima above threshold, at least min_separation_s apart (kept
// greedily by height). Segment bounds are the first/last samples at or above
// 2% of that tap's peak within the window delimited by neighbouring taps.
std::vector<TapSegment> detect_taps(const TapSignal& signal, double threshold_n,
                                    double min_separation_s);

// The tap whose peak is closest to the mean of all peaks; ties go to the
// earliest tap.
TapSegment select_representative_tap(const std::vector<TapSegment>& taps);

// Magnitude spectrum of the segment zero-padded to the next power of two.
Spectrum dft_magnitude(std::span<const double> segment, double sample_rate_hz);

double spectral_centroid(const Spectrum& spec);
double magnitude_at(const Spectrum& spec, double freq_hz); // linear interpolation
std::pair<double, double> dominant_frequency(const Spectrum& spec); // (freq, mag), DC excluded

// Paper tap-duration buckets; boundaries 87/154/221 ms belong to the longer
// class, the admissible range is [20 ms, 288 ms].
DurationClass classify_duration(double duration_s);

struct PipelineOptions {
    double crop_start_s = 3.0;
    double crop_end_s = 10.0;
    // <= 0 means auto: 5% of the cropped signal's maximum
    double detect_threshold_n = 0.0;
    double min_separation_s = 0.15;
};

// Full session pipeline: crop, detect taps, pick the representative one, DFT,
// features.
TapFeatures extract_features(const TapSignal& session, const PipelineOptions& opts = {});

} // namespace ethd::dsp

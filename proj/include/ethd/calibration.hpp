#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "ethd/device.hpp"

namespace ethd::calibration {

struct CalibrationSample {
    double k_command_npm = 0.0;          // stiffness commanded during the sweep
    std::vector<double> displacements_m; // quantized encoder readings, one per repeat
    double k_measured_npm = 0.0;         // weight / mean(displacements)
    bool measurement_saturated = false;  // displacement fell below one encoder count
};

// Compensator mapping desired stiffness to the command to send:
// command = a k^2 + b k + c, floored at 0.
struct Compensator {
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;
    double fit_residual_rms_npm = 0.0;
    int sample_count = 0;
};

struct SweepConfig {
    double weight_n = 0.981; // 100 g test mass
    double k_start_npm = 100.0;
    double k_end_npm = 4000.0;
    double k_step_npm = 100.0;
    int repeats = 5;
    // encoder read noise applied before quantization; repeated reads dither
    // across adjacent encoder counts instead of returning one identical value
    double sensor_noise_m = 3.0e-5;
};

// Weight-load stiffness sweep: for each command, settle the simulated device
// under the weight, read the quantized displacement `repeats` times, and
// divide weight by the mean displacement.
std::vector<CalibrationSample> run_sweep(const device::DeviceParams& params,
                                         const SweepConfig& cfg, std::uint64_t seed);

// Least-squares quadratic through (k_measured -> k_command), which is the
// compensator itself. Samples at or above fit_ceiling_npm sit on the
// saturation plateau and are excluded.
Compensator fit_quadratic(const std::vector<CalibrationSample>& samples,
                          double fit_ceiling_npm = 1900.0);

// Evaluate the compensator. Outside [100, 2500] the quadratic extrapolates;
// in_validated_range flags the paper-validated region for callers that warn.
double compensate(const Compensator& comp, double k_desired_npm);
bool in_validated_range(double k_desired_npm);

// Desired -> achieved map after calibration: actual_stiffness(compensate(k)).
double calibrated_stiffness(const Compensator& comp, double k_desired_npm,
                            const device::DeviceParams& params);

std::string compensator_to_json(const Compensator& comp);
Compensator compensator_from_json(const std::string& json_text);

} // namespace ethd::calibration

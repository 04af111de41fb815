#include "ethd/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "ethd/errors.hpp"
#include "ethd/parallel.hpp"
#include "ethd/rng.hpp"

namespace ethd::calibration {

namespace {

double quantize(double x, double resolution) {
    return std::round(x / resolution) * resolution;
}

CalibrationSample measure_one(double k_command, const device::DeviceParams& params,
                              const SweepConfig& cfg, std::uint64_t seed) {
    device::DeviceState state;
    state.commanded_stiffness_npm = k_command;
    state.wall_position_m = 0.0;

    auto settled = device::settle(state, -cfg.weight_n, params);
    if (!settled.settled)
        throw NumericError("run_sweep: device did not settle at k_command=" +
                           std::to_string(k_command));
    state = settled.state;

    Rng rng(seed);
    CalibrationSample sample;
    sample.k_command_npm = k_command;

    const long gap_steps = static_cast<long>(std::llround(0.01 * params.sim_rate_hz));
    for (int r = 0; r < cfg.repeats; ++r) {
        const double read =
            quantize(state.position_m + rng.normal(0.0, cfg.sensor_noise_m),
                     params.encoder_resolution_m);
        sample.displacements_m.push_back(state.wall_position_m - read);
        for (long s = 0; s < gap_steps; ++s) state = device::step(state, -cfg.weight_n, params);
    }

    const double mean_disp =
        std::accumulate(sample.displacements_m.begin(), sample.displacements_m.end(), 0.0) /
        sample.displacements_m.size();
    if (mean_disp < params.encoder_resolution_m) {
        sample.measurement_saturated = true;
        sample.k_measured_npm = std::numeric_limits<double>::quiet_NaN();
    } else {
        sample.k_measured_npm = cfg.weight_n / mean_disp;
    }
    return sample;
}

// 3x3 Gaussian elimination with partial pivoting
void solve3(double m[3][4]) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
        if (std::fabs(m[pivot][col]) < 1e-12)
            throw NumericError("fit_quadratic: rank-deficient design matrix");
        if (pivot != col)
            for (int c = 0; c < 4; ++c) std::swap(m[pivot][c], m[col][c]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
        }
    }
    for (int r = 0; r < 3; ++r) m[r][3] /= m[r][r];
}

} // namespace

std::vector<CalibrationSample> run_sweep(const device::DeviceParams& params,
                                         const SweepConfig& cfg, std::uint64_t seed) {
    params.validate();
    if (cfg.weight_n <= 0.0) throw DomainError("run_sweep: weight must be > 0 (no displacement)");
    if (cfg.k_step_npm <= 0.0) throw DomainError("run_sweep: step must be > 0");
    if (cfg.repeats < 1) throw DomainError("run_sweep: repeats must be >= 1");
    if (cfg.k_end_npm < cfg.k_start_npm) throw DomainError("run_sweep: empty stiffness range");

    std::vector<double> commands;
    for (double k = cfg.k_start_npm; k <= cfg.k_end_npm + 1e-9; k += cfg.k_step_npm)
        commands.push_back(k);

    std::vector<CalibrationSample> samples(commands.size());
    std::vector<std::string> errors(commands.size());
    parallel::for_index(static_cast<std::int64_t>(commands.size()), [&](std::int64_t i) {
        try {
            samples[i] = measure_one(commands[i], params, cfg,
                                     derive_seed(seed, {0x73776565ULL, (std::uint64_t)i}));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw NumericError("run_sweep: " + e);
    return samples;
}

Compensator fit_quadratic(const std::vector<CalibrationSample>& samples, double fit_ceiling_npm) {
    std::vector<const CalibrationSample*> usable;
    std::set<double> distinct;
    for (const auto& s : samples) {
        if (s.measurement_saturated || !std::isfinite(s.k_measured_npm)) continue;
        if (s.k_measured_npm >= fit_ceiling_npm) continue; // saturation plateau
        usable.push_back(&s);
        distinct.insert(s.k_command_npm);
    }
    if (distinct.size() < 3)
        throw DomainError("fit_quadratic: need >= 3 distinct unsaturated samples, have " +
                          std::to_string(distinct.size()));

    // Normal equations for y = a x^2 + b x + c with x scaled by 1e-3 for
    // conditioning; x = measured stiffness, y = command that produced it.
    const double scale = 1e-3;
    double sx[5] = {0, 0, 0, 0, 0};
    double sxy[3] = {0, 0, 0};
    for (const auto* s : usable) {
        const double x = s->k_measured_npm * scale;
        const double y = s->k_command_npm;
        double xp = 1.0;
        for (int p = 0; p <= 4; ++p, xp *= x) sx[p] += xp;
        sxy[0] += y;
        sxy[1] += y * x;
        sxy[2] += y * x * x;
    }
    double m[3][4] = {
        {sx[4], sx[3], sx[2], sxy[2]},
        {sx[3], sx[2], sx[1], sxy[1]},
        {sx[2], sx[1], sx[0], sxy[0]},
    };
    solve3(m);

    Compensator comp;
    comp.a = m[0][3] * scale * scale;
    comp.b = m[1][3] * scale;
    comp.c = m[2][3];
    comp.sample_count = static_cast<int>(usable.size());

    double ss = 0.0;
    for (const auto* s : usable) {
        const double r = compensate(comp, s->k_measured_npm) - s->k_command_npm;
        ss += r * r;
    }
    comp.fit_residual_rms_npm = std::sqrt(ss / usable.size());
    return comp;
}

double compensate(const Compensator& comp, double k_desired_npm) {
    const double v = comp.a * k_desired_npm * k_desired_npm + comp.b * k_desired_npm + comp.c;
    return std::max(0.0, v);
}

bool in_validated_range(double k_desired_npm) {
    return k_desired_npm >= 100.0 && k_desired_npm <= 2500.0;
}

double calibrated_stiffness(const Compensator& comp, double k_desired_npm,
                            const device::DeviceParams& params) {
    return device::actual_stiffness(compensate(comp, k_desired_npm), params);
}

std::string compensator_to_json(const Compensator& comp) {
    nlohmann::json j;
    j["a"] = comp.a;
    j["b"] = comp.b;
    j["c"] = comp.c;
    j["fit_residual_rms_npm"] = comp.fit_residual_rms_npm;
    j["sample_count"] = comp.sample_count;
    return j.dump(2) + "\n";
}

Compensator compensator_from_json(const std::string& json_text) {
    try {
        auto j = nlohmann::json::parse(json_text);
        Compensator c;
        c.a = j.at("a").get<double>();
        c.b = j.at("b").get<double>();
        c.c = j.at("c").get<double>();
        c.fit_residual_rms_npm = j.value("fit_residual_rms_npm", 0.0);
        c.sample_count = j.value("sample_count", 0);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("compensator json: ") + e.what());
    }
}

} // namespace ethd::calibration

#include "ethd/device.hpp"

#include <cmath>
#include <string>

#include "ethd/errors.hpp"

namespace ethd::device {

namespace {

// Quadratic that the saturation map inverts: command = a k^2 + b k + c,
// evaluated at a desired stiffness k.
double command_for(double k, const DeviceParams& p) {
    return p.sat_a * k * k + p.sat_b * k + p.sat_c;
}

} // namespace

DeviceParams DeviceParams::identity() {
    DeviceParams p;
    p.sat_a = 0.0;
    p.sat_b = 1.0;
    p.sat_c = 0.0;
    p.k_max_npm = 1.0e9;
    return p;
}

void DeviceParams::validate() const {
    if (servo_rate_hz <= 0.0 || sim_rate_hz <= 0.0)
        throw DomainError("device: rates must be positive");
    const double ratio = sim_rate_hz / servo_rate_hz;
    if (std::fabs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0)
        throw DomainError("device: sim_rate must be an integer multiple of servo_rate");
    if (encoder_resolution_m <= 0.0) throw DomainError("device: encoder resolution must be > 0");
    if (max_force_n <= 0.0) throw DomainError("device: max force must be > 0");
    if (k_max_npm <= 0.0) throw DomainError("device: k_max must be > 0");
    if (sat_a > 0.0) throw DomainError("device: saturation quadratic must open downward");
    if (sat_b <= 0.0) throw DomainError("device: saturation quadratic must be increasing at 0");
    if (end_effector_mass_kg <= 0.0) throw DomainError("device: end-effector mass must be > 0");
    if (viscous_damping_nspm < 0.0) throw DomainError("device: damping must be >= 0");
}

long DeviceParams::servo_period_steps() const {
    return static_cast<long>(std::llround(sim_rate_hz / servo_rate_hz));
}

double reported_position(const DeviceState& state, const DeviceParams& params) {
    return std::round(state.position_m / params.encoder_resolution_m) *
           params.encoder_resolution_m;
}

double actual_stiffness(double commanded_npm, const DeviceParams& params) {
    if (commanded_npm < 0.0)
        throw DomainError("actual_stiffness: negative stiffness command " +
                          std::to_string(commanded_npm));
    if (commanded_npm == 0.0) return 0.0;

    // Commands below the calibrated region (the quadratic was fitted down to
    // a desired stiffness of 100 N/m) map linearly to the origin.
    const double low_cmd = command_for(100.0, params);
    if (low_cmd > 0.0 && commanded_npm < low_cmd)
        return std::min(commanded_npm * (100.0 / low_cmd), params.k_max_npm);

    double k;
    if (params.sat_a == 0.0) {
        k = (commanded_npm - params.sat_c) / params.sat_b;
    } else {
        const double disc = params.sat_b * params.sat_b -
                            4.0 * params.sat_a * (params.sat_c - commanded_npm);
        if (disc <= 0.0) return params.k_max_npm; // beyond the vertex: saturated
        // increasing branch of a downward-opening parabola
        k = (-params.sat_b + std::sqrt(disc)) / (2.0 * params.sat_a);
    }
    if (k < 0.0) k = 0.0;
    return std::min(k, params.k_max_npm);
}

double rendered_force(const DeviceState& state, const DeviceParams& params) {
    const double penetration = state.wall_position_m - reported_position(state, params);
    if (penetration <= 0.0) return 0.0;
    const double k = actual_stiffness(state.commanded_stiffness_npm, params);
    const double f = k * penetration;
    if (f < 0.0) return 0.0;
    return std::min(f, params.max_force_n);
}

double gravity_compensation(double mass_kg) {
    if (mass_kg < 0.0) throw DomainError("gravity_compensation: negative mass");
    return mass_kg * 9.81;
}

DeviceState step(const DeviceState& state, double external_force_n, const DeviceParams& params) {
    if (!std::isfinite(external_force_n))
        throw NumericError("device step: non-finite external force");

    DeviceState next = state;
    if (state.tick % params.servo_period_steps() == 0)
        next.held_force_n = rendered_force(state, params);

    const double dt = params.dt();
    const double net = next.held_force_n + external_force_n -
                       params.viscous_damping_nspm * next.velocity_mps;
    next.velocity_mps += dt * net / params.end_effector_mass_kg;
    next.position_m += dt * next.velocity_mps;
    next.tick = state.tick + 1;

    if (!std::isfinite(next.position_m) || !std::isfinite(next.velocity_mps))
        throw NumericError("device step: state diverged");
    return next;
}

SettleResult settle(DeviceState state, double external_force_n, const DeviceParams& params,
                    double velocity_tol, double hold_s, double max_s) {
    const double dt = params.dt();
    const long hold_steps = static_cast<long>(std::ceil(hold_s / dt));
    const long max_steps = static_cast<long>(std::ceil(max_s / dt));
    long quiet = 0;
    long n = 0;
    for (; n < max_steps; ++n) {
        state = step(state, external_force_n, params);
        quiet = std::fabs(state.velocity_mps) < velocity_tol ? quiet + 1 : 0;
        if (quiet >= hold_steps) break;
    }
    SettleResult r;
    r.state = state;
    r.elapsed_s = static_cast<double>(n + 1) * dt;
    r.settled = quiet >= hold_steps;
    return r;
}

} // namespace ethd::device

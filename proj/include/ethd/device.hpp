#pragma once
#include <cstdint>

namespace ethd::device {

// Simulated 1-DOF vertical impedance device. The axis points up; the virtual
// wall is a floor at wall_position_m and pushes the end-effector up when it
// sinks below. Stiffness commands pass through a saturating map whose
// monotone branch is the functional inverse of the calibration quadratic
// (sat_a, sat_b, sat_c), capped at k_max_npm.
struct DeviceParams {
    double servo_rate_hz = 1000.0;
    double sim_rate_hz = 10000.0; // must be an integer multiple of servo_rate_hz
    double encoder_resolution_m = 6.0e-5;
    double max_force_n = 9.0;
    double k_max_npm = 2000.0;
    double sat_a = -3.49e-4;
    double sat_b = 2.03;
    double sat_c = -147.27;
    double end_effector_mass_kg = 0.19;
    double viscous_damping_nspm = 2.5;

    // pass-through stiffness map, effectively no saturation; for tests and
    // the `--device identity` calibration mode
    static DeviceParams identity();

    void validate() const; // throws DomainError
    long servo_period_steps() const;
    double dt() const { return 1.0 / sim_rate_hz; }
};

struct DeviceState {
    double position_m = 0.0; // true position; report via reported_position()
    double velocity_mps = 0.0;
    double commanded_stiffness_npm = 0.0;
    double wall_position_m = 0.0;
    double held_force_n = 0.0; // zero-order-hold register, updated on servo ticks
    std::int64_t tick = 0;
};

// Encoder view of the position (multiple of encoder_resolution_m).
double reported_position(const DeviceState& state, const DeviceParams& params);

// Stiffness the device actually renders for a commanded stiffness.
// Monotone nondecreasing, 0 at 0, capped at k_max_npm; commands below the
// calibrated region extrapolate linearly to the origin.
double actual_stiffness(double commanded_npm, const DeviceParams& params);

// Virtual-wall force from the quantized position: clamp(k_act * penetration,
// 0, max_force). This is the value a servo tick latches into held_force_n.
double rendered_force(const DeviceState& state, const DeviceParams& params);

double gravity_compensation(double mass_kg);

// One sim step (dt = 1/sim_rate): refresh held_force_n when the tick lands on
// a servo boundary, then semi-implicit Euler on the end-effector mass under
// held_force + external_force - viscous drag. Gravity and its compensator
// cancel exactly and are left out of the sum.
DeviceState step(const DeviceState& state, double external_force_n, const DeviceParams& params);

struct SettleResult {
    DeviceState state;
    double elapsed_s = 0.0;
    bool settled = false;
};

// Run until |velocity| < velocity_tol holds for hold_s of simulated time.
SettleResult settle(DeviceState state, double external_force_n, const DeviceParams& params,
                    double velocity_tol = 1e-6, double hold_s = 0.05, double max_s = 30.0);

} // namespace ethd::device

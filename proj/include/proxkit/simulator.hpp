#pragma once

#include "proxkit/rng.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace proxkit {

using Vec3 = std::array<double, 3>;

enum class EnvName { Static, SemiDynamic, Dynamic };
enum class CarriageName { HandStatic, HandSwing, PocketFront, PocketBack, Backpack };

std::string to_string(EnvName name);
std::string to_string(CarriageName name);
EnvName env_from_string(const std::string& text);
CarriageName carriage_from_string(const std::string& text);

// PocketFront/PocketBack form the "pocket" group targeted by the bias knob.
bool is_pocket_type(CarriageName name);

struct EnvironmentProfile {
    EnvName name = EnvName::Static;
    double path_loss_exponent = 2.0;  // n in the log-distance model
    double rician_k = 10.0;           // LOS/scatter power ratio, linear; +inf = no fading
    double shadowing_sigma = 0.0;     // dB, one draw per window
    void validate() const;
};

struct CarriageProfile {
    CarriageName name = CarriageName::HandStatic;
    Vec3 gravity_direction{0.0, 0.0, 1.0};  // unit vector
    double body_attenuation = 0.0;          // dB, <= 0
    double gait_frequency = 0.0;            // Hz
    double accel_amplitude = 0.0;           // m/s^2
    double gyro_amplitude = 0.0;            // rad/s
    double extra_fade_sigma = 0.0;          // dB, per sample
    void validate() const;
};

std::vector<EnvironmentProfile> default_environments();
std::vector<CarriageProfile> default_carriages();

struct SimConfig {
    double tx_power = -59.0;  // dBm, reference RSSI at 1 m
    double rssi_rate = 10.0;  // Hz
    double imu_rate = 50.0;   // Hz
    double window_seconds = 5.0;
    double proximity_threshold = 2.0;  // tau, meters
    double max_distance = 4.0;         // meters
    double bias = 0.0;                 // beta in [0, 1]
    std::map<EnvName, int> counts;     // windows to generate per environment
    std::uint64_t rng_seed = 0;
    std::vector<EnvironmentProfile> environments = default_environments();
    std::vector<CarriageProfile> carriages = default_carriages();

    void validate() const;
    const EnvironmentProfile& environment(EnvName name) const;
    const CarriageProfile& carriage(CarriageName name) const;
};

struct ImuWindow {
    std::vector<Vec3> gravity;              // m/s^2
    std::vector<Vec3> linear_acceleration;  // m/s^2
    std::vector<Vec3> angular_velocity;     // rad/s
};

struct SampleRecord {
    std::string id;
    EnvName environment = EnvName::Static;
    CarriageName carriage = CarriageName::HandStatic;
    double distance = 0.0;  // meters
    int proximity = 0;      // 1 iff distance <= tau
    std::vector<double> rssi;
    ImuWindow imu;
};

// Mean RSSI at `distance` under the log-distance model: tx - 10 n log10(d).
// Throws std::domain_error below 0.1 m where the model is meaningless.
double path_loss_mean_rssi(double distance, double tx_dbm, double path_loss_exponent);

// One window of RSSI samples: path loss + body attenuation, one shadowing
// draw per window, per-sample Rician fading (unit mean power) and carriage
// fade. Samples clamp to [-120, 0] dBm.
std::vector<double> simulate_rssi(double distance, const EnvironmentProfile& env,
                                  const CarriageProfile& carriage, double tx_dbm,
                                  double duration_s, double rate_hz, Rng& rng);

// One window of IMU samples. Gravity is 9.81 * direction plus wobble; linear
// acceleration and angular velocity are gait-frequency sinusoids. Noise
// scales with the motion amplitudes, so an all-zero profile is exactly quiet.
ImuWindow simulate_imu(const CarriageProfile& carriage, double duration_s,
                       double rate_hz, Rng& rng);

// Full dataset generation. Record k draws only from (rng_seed, k), so output
// is independent of generation schedule. Distances are uniform in
// [0.5, max_distance]; the carriage state is coupled to the label through
// the bias knob: P(pocket | Y=1) = 0.5 + bias/2, P(pocket | Y=0) = 0.5 - bias/2.
std::vector<SampleRecord> generate_dataset(const SimConfig& config);

}  // namespace proxkit

#include "proxkit/simulator.hpp"

#include "proxkit/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace proxkit {

namespace {

constexpr double kGravity = 9.81;
constexpr double kRssiFloor = -120.0;
constexpr double kRssiCeil = 0.0;
// K above this behaves as a pure LOS channel (fade identically 0 dB).
constexpr double kRicianKInf = 1e15;

Vec3 normalized(Vec3 v) {
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / norm, v[1] / norm, v[2] / norm};
}

// 20 log10 of a Rician envelope with unit mean power. Always consumes two
// normal draws so streams stay aligned across environment profiles.
double rician_fade_db(double k_linear, Rng& rng) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    if (k_linear >= kRicianKInf || std::isinf(k_linear)) return 0.0;
    const double los = std::sqrt(k_linear / (k_linear + 1.0));
    const double scatter = std::sqrt(0.5 / (k_linear + 1.0));
    const double re = los + scatter * z1;
    const double im = scatter * z2;
    const double power = std::max(re * re + im * im, 1e-30);
    return 10.0 * std::log10(power);
}

}  // namespace

std::string to_string(EnvName name) {
    switch (name) {
        case EnvName::Static: return "Static";
        case EnvName::SemiDynamic: return "SemiDynamic";
        case EnvName::Dynamic: return "Dynamic";
    }
    throw config_error("unknown environment enum value");
}

std::string to_string(CarriageName name) {
    switch (name) {
        case CarriageName::HandStatic: return "HandStatic";
        case CarriageName::HandSwing: return "HandSwing";
        case CarriageName::PocketFront: return "PocketFront";
        case CarriageName::PocketBack: return "PocketBack";
        case CarriageName::Backpack: return "Backpack";
    }
    throw config_error("unknown carriage enum value");
}

EnvName env_from_string(const std::string& text) {
    if (text == "Static") return EnvName::Static;
    if (text == "SemiDynamic") return EnvName::SemiDynamic;
    if (text == "Dynamic") return EnvName::Dynamic;
    throw config_error("unknown environment name: " + text);
}

CarriageName carriage_from_string(const std::string& text) {
    if (text == "HandStatic") return CarriageName::HandStatic;
    if (text == "HandSwing") return CarriageName::HandSwing;
    if (text == "PocketFront") return CarriageName::PocketFront;
    if (text == "PocketBack") return CarriageName::PocketBack;
    if (text == "Backpack") return CarriageName::Backpack;
    throw config_error("unknown carriage name: " + text);
}

bool is_pocket_type(CarriageName name) {
    return name == CarriageName::PocketFront || name == CarriageName::PocketBack;
}

void EnvironmentProfile::validate() const {
    if (!(path_loss_exponent > 0.0))
        throw config_error("environment " + to_string(name) + ": path_loss_exponent must be > 0");
    if (!(rician_k >= 0.0))
        throw config_error("environment " + to_string(name) + ": rician_k must be >= 0");
    if (!(shadowing_sigma >= 0.0))
        throw config_error("environment " + to_string(name) + ": shadowing_sigma must be >= 0");
}

void CarriageProfile::validate() const {
    const double norm = std::sqrt(gravity_direction[0] * gravity_direction[0] +
                                  gravity_direction[1] * gravity_direction[1] +
                                  gravity_direction[2] * gravity_direction[2]);
    if (std::abs(norm - 1.0) > 1e-9)
        throw config_error("carriage " + to_string(name) + ": gravity_direction must be unit length");
    if (body_attenuation > 0.0)
        throw config_error("carriage " + to_string(name) + ": body_attenuation must be <= 0");
    if (accel_amplitude < 0.0 || gyro_amplitude < 0.0 || extra_fade_sigma < 0.0 ||
        gait_frequency < 0.0)
        throw config_error("carriage " + to_string(name) + ": amplitudes must be >= 0");
}

std::vector<EnvironmentProfile> default_environments() {
    return {
        {EnvName::Static, 1.8, 10.0, 1.0},
        {EnvName::SemiDynamic, 2.2, 4.0, 2.0},
        {EnvName::Dynamic, 2.8, 1.0, 3.0},
    };
}

std::vector<CarriageProfile> default_carriages() {
    return {
        {CarriageName::HandStatic, normalized({0.10, 0.00, 0.99}), -1.0, 0.4, 0.05, 0.02, 0.3},
        {CarriageName::HandSwing, normalized({0.31, 0.00, 0.95}), -2.0, 1.8, 3.00, 1.50, 1.2},
        {CarriageName::PocketFront, normalized({0.55, 0.17, 0.82}), -6.0, 1.8, 2.00, 2.50, 2.0},
        {CarriageName::PocketBack, normalized({-0.55, 0.17, 0.82}), -8.0, 1.8, 2.00, 1.80, 2.2},
        {CarriageName::Backpack, normalized({0.00, -0.95, 0.31}), -10.0, 1.8, 1.20, 0.80, 1.5},
    };
}

void SimConfig::validate() const {
    if (!(bias >= 0.0 && bias <= 1.0)) throw config_error("bias must lie in [0, 1]");
    if (!(proximity_threshold < max_distance))
        throw config_error("proximity_threshold must be below max_distance");
    if (!(rssi_rate > 0.0 && imu_rate > 0.0))
        throw config_error("sample rates must be positive");
    if (!(window_seconds > 0.0)) throw config_error("window_seconds must be positive");
    if (max_distance <= 0.5) throw config_error("max_distance must exceed the 0.5 m minimum range");
    for (const auto& env : environments) env.validate();
    for (const auto& car : carriages) car.validate();
    if (carriages.empty() || environments.empty())
        throw config_error("profiles must not be empty");
    for (const auto& [name, count] : counts) {
        if (count < 0) throw config_error("record counts must be >= 0");
        environment(name);  // throws if the profile list lacks it
    }
    bool any_pocket = false, any_non_pocket = false;
    for (const auto& car : carriages) {
        (is_pocket_type(car.name) ? any_pocket : any_non_pocket) = true;
    }
    if (!any_pocket || !any_non_pocket)
        throw config_error("carriage profiles must include pocket and non-pocket states");
}

const EnvironmentProfile& SimConfig::environment(EnvName name) const {
    for (const auto& env : environments)
        if (env.name == name) return env;
    throw config_error("no profile for environment " + to_string(name));
}

const CarriageProfile& SimConfig::carriage(CarriageName name) const {
    for (const auto& car : carriages)
        if (car.name == name) return car;
    throw config_error("no profile for carriage " + to_string(name));
}

double path_loss_mean_rssi(double distance, double tx_dbm, double path_loss_exponent) {
    if (!(distance >= 0.1))
        throw std::domain_error("path loss model undefined below 0.1 m");
    return tx_dbm - 10.0 * path_loss_exponent * std::log10(distance);
}

std::vector<double> simulate_rssi(double distance, const EnvironmentProfile& env,
                                  const CarriageProfile& carriage, double tx_dbm,
                                  double duration_s, double rate_hz, Rng& rng) {
    if (!(duration_s > 0.0)) throw data_error("simulate_rssi: duration must be positive");
    const double mean = path_loss_mean_rssi(distance, tx_dbm, env.path_loss_exponent) +
                        carriage.body_attenuation;
    const double shadow = env.shadowing_sigma * rng.normal();
    const auto count = static_cast<std::size_t>(std::llround(rate_hz * duration_s));
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double fade = rician_fade_db(env.rician_k, rng);
        const double extra = carriage.extra_fade_sigma * rng.normal();
        out[i] = std::clamp(mean + shadow + fade + extra, kRssiFloor, kRssiCeil);
    }
    return out;
}

ImuWindow simulate_imu(const CarriageProfile& carriage, double duration_s, double rate_hz,
                       Rng& rng) {
    if (!(duration_s > 0.0)) throw data_error("simulate_imu: duration must be positive");
    const auto count = static_cast<std::size_t>(std::llround(rate_hz * duration_s));
    ImuWindow window;
    window.gravity.resize(count);
    window.linear_acceleration.resize(count);
    window.angular_velocity.resize(count);

    // Fixed axis mixes; profiles differ through amplitude, frequency and
    // gravity direction. Noise scales with amplitude so a motionless profile
    // produces an exactly constant window.
    static constexpr double kAccelAxisMix[3] = {1.0, 0.6, 0.8};
    static constexpr double kGyroAxisMix[3] = {0.9, 0.5, 0.7};
    static constexpr double kAxisPhase[3] = {0.0, 2.0 * M_PI / 3.0, 4.0 * M_PI / 3.0};
    const double accel_phase = rng.uniform(0.0, 2.0 * M_PI);
    const double gyro_phase = rng.uniform(0.0, 2.0 * M_PI);
    const double sigma_gravity = 0.02 * carriage.accel_amplitude;
    const double sigma_accel = 0.05 * carriage.accel_amplitude;
    const double sigma_gyro = 0.05 * carriage.gyro_amplitude;
    const double omega = 2.0 * M_PI * carriage.gait_frequency;

    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / rate_hz;
        for (int axis = 0; axis < 3; ++axis) {
            window.gravity[i][axis] =
                kGravity * carriage.gravity_direction[axis] + sigma_gravity * rng.normal();
            window.linear_acceleration[i][axis] =
                carriage.accel_amplitude * kAccelAxisMix[axis] *
                    std::sin(omega * t + accel_phase + kAxisPhase[axis]) +
                sigma_accel * rng.normal();
            window.angular_velocity[i][axis] =
                carriage.gyro_amplitude * kGyroAxisMix[axis] *
                    std::sin(omega * t + gyro_phase + kAxisPhase[axis] + 0.5) +
                sigma_gyro * rng.normal();
        }
    }
    return window;
}

std::vector<SampleRecord> generate_dataset(const SimConfig& config) {
    config.validate();

    std::vector<CarriageName> pocket_group;
    std::vector<CarriageName> other_group;
    for (const auto& car : config.carriages) {
        (is_pocket_type(car.name) ? pocket_group : other_group).push_back(car.name);
    }

    std::vector<SampleRecord> records;
    std::uint64_t record_index = 0;
    for (const auto& [env_name, count] : config.counts) {
        const EnvironmentProfile& env = config.environment(env_name);
        for (int i = 0; i < count; ++i, ++record_index) {
            Rng rng(derive_stream_seed(config.rng_seed, record_index));

            SampleRecord rec;
            rec.environment = env_name;
            rec.distance = rng.uniform(0.5, config.max_distance);
            rec.proximity = rec.distance <= config.proximity_threshold ? 1 : 0;

            const double p_pocket = 0.5 + (rec.proximity == 1 ? 0.5 : -0.5) * config.bias;
            const auto& group = rng.uniform() < p_pocket ? pocket_group : other_group;
            rec.carriage = group[rng.uniform_int(group.size())];

            const CarriageProfile& car = config.carriage(rec.carriage);
            rec.rssi = simulate_rssi(rec.distance, env, car, config.tx_power,
                                     config.window_seconds, config.rssi_rate, rng);
            rec.imu = simulate_imu(car, config.window_seconds, config.imu_rate, rng);

            char id[24];
            std::snprintf(id, sizeof(id), "r%08llu",
                          static_cast<unsigned long long>(record_index));
            rec.id = id;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

}  // namespace proxkit

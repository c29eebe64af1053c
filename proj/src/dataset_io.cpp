#include "proxkit/dataset_io.hpp"

#include "proxkit/common.hpp"

#include <json.hpp>

#include <fstream>
#include <limits>

namespace proxkit {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json vec3_series_to_json(const std::vector<Vec3>& series) {
    ordered_json out = ordered_json::array();
    for (const auto& v : series) out.push_back({v[0], v[1], v[2]});
    return out;
}

std::vector<Vec3> vec3_series_from_json(const ordered_json& j) {
    std::vector<Vec3> out;
    out.reserve(j.size());
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != 3)
            throw data_error("IMU sample must be a 3-element array");
        out.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    return out;
}

void validate_record(const SampleRecord& rec, std::size_t line_number) {
    const std::string where =
        line_number ? "line " + std::to_string(line_number) + ": " : std::string();
    if (rec.proximity != 0 && rec.proximity != 1)
        throw data_error(where + "proximity must be 0 or 1");
    for (double v : rec.rssi)
        if (!(v >= -120.0 && v <= 0.0))
            throw data_error(where + "rssi sample outside [-120, 0] dBm");
    const std::size_t n = rec.imu.gravity.size();
    if (rec.imu.linear_acceleration.size() != n || rec.imu.angular_velocity.size() != n)
        throw data_error(where + "imu series lengths differ");
}

}  // namespace

std::string record_to_line(const SampleRecord& record) {
    ordered_json j;
    j["id"] = record.id;
    j["environment"] = to_string(record.environment);
    j["carriage"] = to_string(record.carriage);
    j["distance"] = record.distance;
    j["proximity"] = record.proximity;
    j["rssi"] = record.rssi;
    ordered_json imu;
    imu["gravity"] = vec3_series_to_json(record.imu.gravity);
    imu["linear_acceleration"] = vec3_series_to_json(record.imu.linear_acceleration);
    imu["angular_velocity"] = vec3_series_to_json(record.imu.angular_velocity);
    j["imu"] = std::move(imu);
    return j.dump();
}

SampleRecord record_from_line(const std::string& line, std::size_t line_number) {
    const std::string where =
        line_number ? "line " + std::to_string(line_number) + ": " : std::string();
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(where + "malformed record: " + e.what());
    }
    try {
        SampleRecord rec;
        rec.id = j.at("id").get<std::string>();
        rec.environment = env_from_string(j.at("environment").get<std::string>());
        rec.carriage = carriage_from_string(j.at("carriage").get<std::string>());
        rec.distance = j.at("distance").get<double>();
        rec.proximity = j.at("proximity").get<int>();
        rec.rssi = j.at("rssi").get<std::vector<double>>();
        const auto& imu = j.at("imu");
        rec.imu.gravity = vec3_series_from_json(imu.at("gravity"));
        rec.imu.linear_acceleration = vec3_series_from_json(imu.at("linear_acceleration"));
        rec.imu.angular_velocity = vec3_series_from_json(imu.at("angular_velocity"));
        validate_record(rec, line_number);
        return rec;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(where + "malformed record: " + e.what());
    }
}

void write_dataset(const std::filesystem::path& path, std::span<const SampleRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open output file: " + path.string());
    for (const auto& rec : records) out << record_to_line(rec) << '\n';
    if (!out) throw data_error("write failed: " + path.string());
}

std::vector<SampleRecord> read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open dataset file: " + path.string());
    std::vector<SampleRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        records.push_back(record_from_line(line, line_number));
    }
    return records;
}

namespace {

double k_from_json(const ordered_json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw config_error("rician_k string value must be \"inf\"");
    }
    return j.get<double>();
}

}  // namespace

SimConfig sim_config_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("malformed simulation config: ") + e.what());
    }
    SimConfig cfg;
    try {
        if (j.contains("tx_power")) cfg.tx_power = j["tx_power"].get<double>();
        if (j.contains("rssi_rate")) cfg.rssi_rate = j["rssi_rate"].get<double>();
        if (j.contains("imu_rate")) cfg.imu_rate = j["imu_rate"].get<double>();
        if (j.contains("window_seconds")) cfg.window_seconds = j["window_seconds"].get<double>();
        if (j.contains("proximity_threshold"))
            cfg.proximity_threshold = j["proximity_threshold"].get<double>();
        if (j.contains("max_distance")) cfg.max_distance = j["max_distance"].get<double>();
        if (j.contains("bias")) cfg.bias = j["bias"].get<double>();
        if (j.contains("rng_seed")) cfg.rng_seed = j["rng_seed"].get<std::uint64_t>();
        if (j.contains("counts"))
            for (const auto& [key, value] : j["counts"].items())
                cfg.counts[env_from_string(key)] = value.get<int>();
        if (j.contains("environments")) {
            cfg.environments.clear();
            for (const auto& e : j["environments"]) {
                EnvironmentProfile env;
                env.name = env_from_string(e.at("name").get<std::string>());
                env.path_loss_exponent = e.at("path_loss_exponent").get<double>();
                env.rician_k = k_from_json(e.at("rician_k"));
                env.shadowing_sigma = e.at("shadowing_sigma").get<double>();
                cfg.environments.push_back(env);
            }
        }
        if (j.contains("carriages")) {
            cfg.carriages.clear();
            for (const auto& c : j["carriages"]) {
                CarriageProfile car;
                car.name = carriage_from_string(c.at("name").get<std::string>());
                const auto& dir = c.at("gravity_direction");
                car.gravity_direction = {dir.at(0).get<double>(), dir.at(1).get<double>(),
                                         dir.at(2).get<double>()};
                car.body_attenuation = c.at("body_attenuation").get<double>();
                car.gait_frequency = c.at("gait_frequency").get<double>();
                car.accel_amplitude = c.at("accel_amplitude").get<double>();
                car.gyro_amplitude = c.at("gyro_amplitude").get<double>();
                car.extra_fade_sigma = c.at("extra_fade_sigma").get<double>();
                cfg.carriages.push_back(car);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("malformed simulation config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string sim_config_to_json_text(const SimConfig& cfg) {
    ordered_json j;
    j["tx_power"] = cfg.tx_power;
    j["rssi_rate"] = cfg.rssi_rate;
    j["imu_rate"] = cfg.imu_rate;
    j["window_seconds"] = cfg.window_seconds;
    j["proximity_threshold"] = cfg.proximity_threshold;
    j["max_distance"] = cfg.max_distance;
    j["bias"] = cfg.bias;
    j["rng_seed"] = cfg.rng_seed;
    ordered_json counts;
    for (const auto& [name, count] : cfg.counts) counts[to_string(name)] = count;
    j["counts"] = std::move(counts);
    ordered_json envs = ordered_json::array();
    for (const auto& env : cfg.environments) {
        ordered_json e;
        e["name"] = to_string(env.name);
        e["path_loss_exponent"] = env.path_loss_exponent;
        if (std::isinf(env.rician_k))
            e["rician_k"] = "inf";
        else
            e["rician_k"] = env.rician_k;
        e["shadowing_sigma"] = env.shadowing_sigma;
        envs.push_back(std::move(e));
    }
    j["environments"] = std::move(envs);
    ordered_json cars = ordered_json::array();
    for (const auto& car : cfg.carriages) {
        ordered_json c;
        c["name"] = to_string(car.name);
        c["gravity_direction"] = {car.gravity_direction[0], car.gravity_direction[1],
                                  car.gravity_direction[2]};
        c["body_attenuation"] = car.body_attenuation;
        c["gait_frequency"] = car.gait_frequency;
        c["accel_amplitude"] = car.accel_amplitude;
        c["gyro_amplitude"] = car.gyro_amplitude;
        c["extra_fade_sigma"] = car.extra_fade_sigma;
        cars.push_back(std::move(c));
    }
    j["carriages"] = std::move(cars);
    return j.dump(2);
}

}  // namespace proxkit

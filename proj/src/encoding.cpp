#include "proxkit/encoding.hpp"

#include "proxkit/common.hpp"

#include <algorithm>
#include <cmath>

namespace proxkit {

namespace {

constexpr int kEntropyBuckets = 16;

void require_series(std::span<const double> series, const char* op) {
    if (series.size() < 2)
        throw data_error(std::string(op) + ": series must hold at least 2 samples");
}

double mean_of(std::span<const double> series) {
    double sum = 0.0;
    for (double v : series) sum += v;
    return sum / static_cast<double>(series.size());
}

double central_moment_normalized(std::span<const double> series, int order) {
    const double mean = mean_of(series);
    const double var = stat_variance(series);
    if (var == 0.0) return 0.0;
    const double sigma = std::sqrt(var);
    double sum = 0.0;
    for (double v : series) sum += std::pow((v - mean) / sigma, order);
    return sum / static_cast<double>(series.size());
}

}  // namespace

int EncodingParams::bins() const {
    const double ratio = (phi_max - phi_min) / delta;
    const auto n = static_cast<int>(std::llround(ratio));
    if (n < 1 || std::abs(ratio - n) > 1e-9)
        throw config_error("delta must divide (phi_max - phi_min) into a whole bin count");
    return n;
}

void EncodingParams::validate() const {
    if (!(phi_max > phi_min)) throw config_error("phi_max must exceed phi_min");
    if (!(delta > 0.0)) throw config_error("delta must be positive");
    bins();
}

Histogram histogramize(std::span<const double> rssi, double phi_min, double phi_max,
                       double delta) {
    if (rssi.empty()) throw data_error("histogramize: empty RSSI window");
    EncodingParams params{phi_min, phi_max, delta};
    params.validate();
    const int n = params.bins();

    Histogram hist;
    hist.phi_min = phi_min;
    hist.phi_max = phi_max;
    hist.delta = delta;
    hist.bins.assign(static_cast<std::size_t>(n), 0.0);
    for (double v : rssi) {
        auto idx = static_cast<long long>(std::floor((v - phi_min) / delta));
        idx = std::clamp<long long>(idx, 0, n - 1);
        hist.bins[static_cast<std::size_t>(idx)] += 1.0;
    }
    const double total = static_cast<double>(rssi.size());
    for (double& b : hist.bins) b /= total;
    return hist;
}

double stat_energy(std::span<const double> series) {
    require_series(series, "stat_energy");
    double sum = 0.0;
    for (double v : series) sum += v * v;
    return sum / static_cast<double>(series.size());
}

double stat_variance(std::span<const double> series) {
    require_series(series, "stat_variance");
    const double mean = mean_of(series);
    double sum = 0.0;
    for (double v : series) sum += (v - mean) * (v - mean);
    return sum / static_cast<double>(series.size());
}

double stat_skewness(std::span<const double> series) {
    require_series(series, "stat_skewness");
    return central_moment_normalized(series, 3);
}

double stat_kurtosis(std::span<const double> series) {
    require_series(series, "stat_kurtosis");
    return central_moment_normalized(series, 4);
}

double stat_entropy(std::span<const double> series) {
    require_series(series, "stat_entropy");
    const auto [mn_it, mx_it] = std::minmax_element(series.begin(), series.end());
    const double mn = *mn_it, mx = *mx_it;
    if (mx == mn) return 0.0;

    const auto bucket_of = [&](double v) {
        const double u = (v - mn) / (mx - mn);
        return std::min(static_cast<int>(u * kEntropyBuckets), kEntropyBuckets - 1);
    };
    double counts[kEntropyBuckets] = {};
    for (double v : series) counts[bucket_of(v)] += 1.0;
    const double total = static_cast<double>(series.size());

    double sum = 0.0;
    for (double v : series) sum += -std::log(counts[bucket_of(v)] / total);
    return sum / total;
}

std::vector<double> encode_carriage(const ImuWindow& imu) {
    const std::size_t count = imu.gravity.size();
    if (count == 0 || imu.linear_acceleration.size() != count ||
        imu.angular_velocity.size() != count)
        throw data_error("encode_carriage: IMU series must be non-empty and equal length");

    std::vector<double> features;
    features.reserve(kCarriageDims);

    std::vector<double> axis(count);
    const auto fill_axis = [&](const std::vector<Vec3>& series, int a) {
        for (std::size_t i = 0; i < count; ++i) axis[i] = series[i][a];
    };

    for (int a = 0; a < 3; ++a) {
        fill_axis(imu.gravity, a);
        features.push_back(mean_of(axis));
    }
    for (const auto* series : {&imu.linear_acceleration, &imu.angular_velocity}) {
        for (int a = 0; a < 3; ++a) {
            fill_axis(*series, a);
            features.push_back(stat_energy(axis));
            features.push_back(stat_variance(axis));
            features.push_back(stat_skewness(axis));
            features.push_back(stat_kurtosis(axis));
            features.push_back(stat_entropy(axis));
        }
    }
    return features;
}

StandardScaler StandardScaler::fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw data_error("StandardScaler: no rows to fit");
    const std::size_t dims = rows.front().size();
    StandardScaler scaler;
    scaler.mean.assign(dims, 0.0);
    scaler.stddev.assign(dims, 0.0);
    for (const auto& row : rows) {
        if (row.size() != dims) throw data_error("StandardScaler: inconsistent row widths");
        for (std::size_t d = 0; d < dims; ++d) scaler.mean[d] += row[d];
    }
    const double n = static_cast<double>(rows.size());
    for (double& m : scaler.mean) m /= n;
    for (const auto& row : rows)
        for (std::size_t d = 0; d < dims; ++d) {
            const double c = row[d] - scaler.mean[d];
            scaler.stddev[d] += c * c;
        }
    for (double& s : scaler.stddev) {
        s = std::sqrt(s / n);
        if (s < 1e-12) s = 1.0;  // constant dimension: center only
    }
    return scaler;
}

std::vector<double> StandardScaler::transform(std::span<const double> row) const {
    if (row.size() != mean.size())
        throw data_error("StandardScaler: dimension mismatch against fitted scaler");
    std::vector<double> out(row.size());
    for (std::size_t d = 0; d < row.size(); ++d) out[d] = (row[d] - mean[d]) / stddev[d];
    return out;
}

std::vector<double> concat_features(const Histogram& hist, std::span<const double> carriage,
                                    const StandardScaler& scaler) {
    std::vector<double> scaled = scaler.transform(carriage);
    std::vector<double> out;
    out.reserve(hist.bins.size() + scaled.size());
    out.insert(out.end(), hist.bins.begin(), hist.bins.end());
    out.insert(out.end(), scaled.begin(), scaled.end());
    return out;
}

}  // namespace proxkit

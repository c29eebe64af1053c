#pragma once

#include "proxkit/simulator.hpp"

#include <span>
#include <vector>

namespace proxkit {

struct EncodingParams {
    double phi_min = -100.0;  // dBm
    double phi_max = 0.0;     // dBm
    double delta = 4.0;       // dB per bin

    int bins() const;  // (phi_max - phi_min) / delta, validated to be integral
    void validate() const;
};

struct Histogram {
    std::vector<double> bins;  // normalized frequencies, sum to 1
    double phi_min = 0.0;
    double phi_max = 0.0;
    double delta = 0.0;
};

// Normalized RSSI histogram over fixed-width dB buckets. Values outside
// [phi_min, phi_max) clamp into the edge bins so every sample is counted.
// An empty window is an error; callers must skip it, never zero-fill.
Histogram histogramize(std::span<const double> rssi, double phi_min, double phi_max,
                       double delta);

inline Histogram histogramize(std::span<const double> rssi, const EncodingParams& params) {
    return histogramize(rssi, params.phi_min, params.phi_max, params.delta);
}

// Population statistics (1/N, no Bessel correction). Series must hold at
// least two samples. With zero variance, skewness and kurtosis are 0.
double stat_energy(std::span<const double> series);
double stat_variance(std::span<const double> series);
double stat_skewness(std::span<const double> series);
double stat_kurtosis(std::span<const double> series);

// Mean of -ln Pr(bucket(x)) over the min-max normalized series, with Pr
// estimated from a fixed 16-bucket empirical histogram. Constant series -> 0.
double stat_entropy(std::span<const double> series);

inline constexpr int kCarriageDims = 33;

// 33-dim carriage feature vector:
//   [0..2]   gravity mean (x, y, z)
//   [3..17]  linear acceleration, per axis x/y/z: energy, variance,
//            skewness, kurtosis, entropy
//   [18..32] angular velocity, same layout
std::vector<double> encode_carriage(const ImuWindow& imu);

// Per-dimension standardization fitted on the training split only (population
// statistics). Dimensions with zero variance pass through centered.
struct StandardScaler {
    std::vector<double> mean;
    std::vector<double> stddev;

    static StandardScaler fit(const std::vector<std::vector<double>>& rows);
    std::vector<double> transform(std::span<const double> row) const;
    std::size_t dims() const { return mean.size(); }
};

// [histogram bins | standardized carriage features]. The histogram part is
// never rescaled.
std::vector<double> concat_features(const Histogram& hist,
                                    std::span<const double> carriage,
                                    const StandardScaler& scaler);

}  // namespace proxkit

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace proxkit {

// All randomness in the toolkit flows through this generator. The engine is
// std::mt19937_64 (its output sequence is fixed by the standard) and every
// distribution transform is spelled out here, so a given seed produces the
// same stream on any platform. std::normal_distribution and std::shuffle are
// deliberately avoided: their algorithms are implementation defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform in (0, 1); never returns 0, safe under log().
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the cosine/sine pair is cached.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Uniform integer in [0, bound). Plain modulo reduction, pinned for
    // reproducibility; the bias is irrelevant at the bounds used here.
    std::uint64_t uniform_int(std::uint64_t bound);

    // Fisher-Yates with pinned draw order.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent stream seed from (root seed, stream index) with
// splitmix64 mixing. Record k of a dataset always draws from
// derive_stream_seed(seed, k), which is what makes generation order-free.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace proxkit

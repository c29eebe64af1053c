#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace proxkit {

// Error taxonomy mirrors the CLI exit codes: config 2, data 3, numeric 4.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// FNV-1a, used for config hashes and artifact checksums in run manifests.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t fnv1a64_str(const std::string& text);

// Hex string of a 64-bit hash, zero padded to 16 chars.
std::string hash_hex(std::uint64_t value);

}  // namespace proxkit

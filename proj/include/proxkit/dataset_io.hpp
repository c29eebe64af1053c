#pragma once

#include "proxkit/simulator.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace proxkit {

// Line-delimited records, one JSON object per line, UTF-8. Field names match
// SampleRecord; numbers are printed with shortest round-trip formatting, so
// a read-back record is bit-identical to the one written.
std::string record_to_line(const SampleRecord& record);
SampleRecord record_from_line(const std::string& line, std::size_t line_number = 0);

void write_dataset(const std::filesystem::path& path, std::span<const SampleRecord> records);
std::vector<SampleRecord> read_dataset(const std::filesystem::path& path);

// SimConfig <-> JSON for the CLI config file.
SimConfig sim_config_from_json_text(const std::string& text);
std::string sim_config_to_json_text(const SimConfig& config);

}  // namespace proxkit

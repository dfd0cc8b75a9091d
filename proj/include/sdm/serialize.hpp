#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sdm/dataset.hpp"
#include "sdm/mlp.hpp"

namespace sdm {

// "SDMW": magic, u32 version=1, u32 layer count, u32 dims[L+1], then per layer
// the row-major f64 weight matrix followed by the f64 bias. Little-endian.
std::vector<std::uint8_t> encode_model(const MlpModel& model);
MlpModel decode_model(std::span<const std::uint8_t> bytes);

// "SDMD": magic, u32 version=1, u32 n, u32 d, u32 K, f64 features[n*d], u32 labels[n].
std::vector<std::uint8_t> encode_dataset(const DatasetSplit& data);
DatasetSplit decode_dataset(std::span<const std::uint8_t> bytes);

void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);
void save_dataset(const DatasetSplit& data, const std::filesystem::path& path);
DatasetSplit load_dataset(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace sdm

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "macp/dense_matrix.hpp"
#include "macp/spectral_adapter.hpp"

namespace macp {

enum class Dtype : std::uint8_t { kFloat32 = 0, kFloat64 = 1 };

/// 14-byte header: "MACP", version, dtype, rows (u32 LE), cols (u32 LE).
struct WeightFileHeader {
  std::uint8_t version = 1;
  Dtype dtype = Dtype::kFloat64;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
};

inline constexpr std::size_t kWeightHeaderSize = 14;
inline constexpr std::uint8_t kWeightFormatVersion = 1;

struct LoadedMatrix {
  DenseMatrix matrix;
  Dtype dtype = Dtype::kFloat64;
};

std::vector<std::uint8_t> encode_matrix(const DenseMatrix& matrix, Dtype dtype = Dtype::kFloat64);
LoadedMatrix decode_matrix(std::span<const std::uint8_t> bytes);

void write_matrix(const std::filesystem::path& path, const DenseMatrix& matrix,
                  Dtype dtype = Dtype::kFloat64);
LoadedMatrix read_matrix(const std::filesystem::path& path);

/// Canonical JSON text of an adapter: sorted keys, two-space indent,
/// shortest round-trip numbers, trailing newline.
std::string serialize_checkpoint(const AdapterState& state);
AdapterState deserialize_checkpoint(std::string_view text);

void write_checkpoint(const std::filesystem::path& path, const AdapterState& state);
AdapterState read_checkpoint(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace macp

#pragma once

// File formats: 16-bit label PNGs, 8-bit intensity PNGs, SDT tensors, and
// DetectionSet JSON.
//
// SDT layout (little-endian):
//   "SDT1" | dtype:u8 (1=float32, 2=uint16, 3=int32) | ndim:u8 | ndim x dim:u32 | data
// Data is row-major. DenseMaps are a float32 tensor of shape (1+n, H, W):
// plane 0 is the probability, planes 1..n the ray distances.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "starpoly/model.hpp"

namespace starpoly::io {

namespace fs = std::filesystem;

// --- PNG ----------------------------------------------------------------

/// 16-bit grayscale PNG; throws FormatError if an ID exceeds 65535.
std::vector<std::uint8_t> encode_label_png(const LabelImage& labels);
/// Accepts 8- or 16-bit grayscale; IDs are relabeled densely.
LabelImage decode_label_png(const std::vector<std::uint8_t>& bytes);

/// 8-bit grayscale PNG of values in [0,1], rounded to nearest.
std::vector<std::uint8_t> encode_intensity_png(const std::vector<float>& values, int height,
                                               int width);

void write_label_png(const fs::path& path, const LabelImage& labels);
LabelImage read_label_png(const fs::path& path);
void write_intensity_png(const fs::path& path, const std::vector<float>& values, int height,
                         int width);

// --- SDT ----------------------------------------------------------------

enum class DType : std::uint8_t { kFloat32 = 1, kUInt16 = 2, kInt32 = 3 };

std::size_t dtype_size(DType t);

struct Tensor {
  DType dtype = DType::kFloat32;
  std::vector<std::uint32_t> dims;
  /// Raw little-endian element bytes.
  std::vector<std::uint8_t> data;

  std::size_t element_count() const;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::vector<std::uint8_t> encode_sdt(const Tensor& t);
/// Throws FormatError naming the byte offset of the first problem.
Tensor decode_sdt(const std::vector<std::uint8_t>& bytes);

Tensor to_tensor(const DenseMaps& maps);
/// Requires float32 with shape (1+n, H, W), n >= 3; validates value ranges.
DenseMaps to_dense_maps(const Tensor& t);

void write_maps(const fs::path& path, const DenseMaps& maps);
DenseMaps read_maps(const fs::path& path);

// --- DetectionSet JSON --------------------------------------------------

std::string detections_to_json(const DetectionSet& dets);
DetectionSet detections_from_json(const std::string& text);

void write_detections(const fs::path& path, const DetectionSet& dets);
DetectionSet read_detections(const fs::path& path);

// --- files and dataset layout -------------------------------------------

std::vector<std::uint8_t> read_file(const fs::path& path);
/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const fs::path& path, const void* data, std::size_t size);
void write_file_atomic(const fs::path& path, const std::string& text);

/// Zero-padded 4-digit stem, e.g. 7 -> "0007".
std::string index_stem(int index);

/// `dir/sub` if that directory exists, otherwise `dir`.
fs::path resolve_subdir(const fs::path& dir, const std::string& sub);

/// Regular files in `dir` with the given extension, sorted by filename.
std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension);

}  // namespace starpoly::io

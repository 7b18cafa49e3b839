#include "starpoly/io.hpp"

#include <png.h>
#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>

namespace starpoly::io {

static_assert(std::endian::native == std::endian::little, "SDT codec assumes a little-endian host");

// ---------------------------------------------------------------------------
// PNG
// ---------------------------------------------------------------------------

namespace {

struct PngBuffer {
  const std::vector<std::uint8_t>* in = nullptr;
  std::size_t pos = 0;
  std::vector<std::uint8_t>* out = nullptr;
};

struct PngError {
  char message[256] = {0};
};

void png_error_to_buffer(png_structp png, png_const_charp msg) {
  auto* err = static_cast<PngError*>(png_get_error_ptr(png));
  std::snprintf(err->message, sizeof(err->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_ignore(png_structp, png_const_charp) {}

void png_read_from_buffer(png_structp png, png_bytep data, png_size_t length) {
  auto* buf = static_cast<PngBuffer*>(png_get_io_ptr(png));
  if (buf->pos + length > buf->in->size()) png_error(png, "truncated PNG data");
  std::memcpy(data, buf->in->data() + buf->pos, length);
  buf->pos += length;
}

void png_write_to_buffer(png_structp png, png_bytep data, png_size_t length) {
  auto* buf = static_cast<PngBuffer*>(png_get_io_ptr(png));
  buf->out->insert(buf->out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

// Writes a grayscale image whose rows are already in PNG byte order.
std::vector<std::uint8_t> write_gray_png(const std::vector<std::uint8_t>& rows, int height,
                                         int width, int bit_depth) {
  std::vector<std::uint8_t> out;
  PngBuffer buf;
  buf.out = &out;
  PngError err;
  std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(height));
  const std::size_t stride = static_cast<std::size_t>(width) * (bit_depth / 8);
  for (int r = 0; r < height; ++r) {
    row_ptrs[static_cast<std::size_t>(r)] =
        const_cast<png_bytep>(rows.data() + static_cast<std::size_t>(r) * stride);
  }

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_to_buffer, png_warning_ignore);
  if (png == nullptr) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error(std::string("PNG encode failed: ") + err.message);
  }
  png_set_write_fn(png, &buf, png_write_to_buffer, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

struct GrayPng {
  int height = 0;
  int width = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> rows;  // PNG byte order (big-endian samples)
};

GrayPng read_gray_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw FormatError("not a PNG file (bad signature at byte 0)");
  }
  GrayPng img;
  PngBuffer buf;
  buf.in = &bytes;
  PngError err;
  std::vector<png_bytep> row_ptrs;
  bool bad_color = false;

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_to_buffer, png_warning_ignore);
  if (png == nullptr) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(std::string("PNG decode failed: ") + err.message);
  }
  png_set_read_fn(png, &buf, png_read_from_buffer);
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY) {
    bad_color = true;
  } else {
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.bit_depth = png_get_bit_depth(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    img.rows.resize(stride * static_cast<std::size_t>(img.height));
    row_ptrs.resize(static_cast<std::size_t>(img.height));
    for (int r = 0; r < img.height; ++r) {
      row_ptrs[static_cast<std::size_t>(r)] = img.rows.data() + static_cast<std::size_t>(r) * stride;
    }
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (bad_color) throw FormatError("PNG is not single-channel grayscale");
  return img;
}

}  // namespace

std::vector<std::uint8_t> encode_label_png(const LabelImage& labels) {
  std::vector<std::uint8_t> rows(labels.size() * 2);
  const auto data = labels.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] > 65535) {
      throw FormatError(fmt::format("label ID {} exceeds the 16-bit PNG range", data[i]));
    }
    rows[2 * i] = static_cast<std::uint8_t>(data[i] >> 8);
    rows[2 * i + 1] = static_cast<std::uint8_t>(data[i] & 0xff);
  }
  return write_gray_png(rows, labels.height(), labels.width(), 16);
}

LabelImage decode_label_png(const std::vector<std::uint8_t>& bytes) {
  const auto png = read_gray_png(bytes);
  std::vector<std::int64_t> raw(static_cast<std::size_t>(png.height) * png.width);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = png.bit_depth == 16 ? (png.rows[2 * i] << 8) | png.rows[2 * i + 1] : png.rows[i];
  }
  return relabel_dense(png.height, png.width, raw);
}

std::vector<std::uint8_t> encode_intensity_png(const std::vector<float>& values, int height,
                                               int width) {
  if (values.size() != static_cast<std::size_t>(height) * width) {
    throw std::invalid_argument("intensity buffer size does not match dimensions");
  }
  std::vector<std::uint8_t> rows(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    rows[i] = static_cast<std::uint8_t>(std::lround(std::clamp(values[i], 0.0f, 1.0f) * 255.0f));
  }
  return write_gray_png(rows, height, width, 8);
}

void write_label_png(const fs::path& path, const LabelImage& labels) {
  const auto bytes = encode_label_png(labels);
  write_file_atomic(path, bytes.data(), bytes.size());
}

LabelImage read_label_png(const fs::path& path) {
  try {
    return decode_label_png(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_intensity_png(const fs::path& path, const std::vector<float>& values, int height,
                         int width) {
  const auto bytes = encode_intensity_png(values, height, width);
  write_file_atomic(path, bytes.data(), bytes.size());
}

// ---------------------------------------------------------------------------
// SDT
// ---------------------------------------------------------------------------

std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::kFloat32:
    case DType::kInt32:
      return 4;
    case DType::kUInt16:
      return 2;
  }
  return 0;
}

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_sdt(const Tensor& t) {
  if (t.dims.size() > 255) throw std::invalid_argument("too many tensor dimensions");
  if (t.data.size() != t.element_count() * dtype_size(t.dtype)) {
    throw std::invalid_argument("tensor data size does not match its shape");
  }
  std::vector<std::uint8_t> out = {'S', 'D', 'T', '1', static_cast<std::uint8_t>(t.dtype),
                                   static_cast<std::uint8_t>(t.dims.size())};
  for (auto d : t.dims) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(d >> (8 * b)));
  }
  out.insert(out.end(), t.data.begin(), t.data.end());
  return out;
}

Tensor decode_sdt(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw FormatError("SDT: truncated magic at byte 0");
  if (std::memcmp(bytes.data(), "SDT1", 4) != 0) throw FormatError("SDT: bad magic at byte 0");
  if (bytes.size() < 6) throw FormatError("SDT: truncated header at byte 4");
  Tensor t;
  const auto code = bytes[4];
  if (code < 1 || code > 3) {
    throw FormatError(fmt::format("SDT: unknown dtype code {} at byte 4", code));
  }
  t.dtype = static_cast<DType>(code);
  const std::size_t ndim = bytes[5];
  std::size_t pos = 6;
  if (bytes.size() < pos + 4 * ndim) {
    throw FormatError(fmt::format("SDT: truncated dims at byte {}", bytes.size()));
  }
  for (std::size_t i = 0; i < ndim; ++i, pos += 4) {
    std::uint32_t d = 0;
    for (int b = 0; b < 4; ++b) d |= static_cast<std::uint32_t>(bytes[pos + b]) << (8 * b);
    t.dims.push_back(d);
  }
  const std::size_t expected = t.element_count() * dtype_size(t.dtype);
  if (bytes.size() - pos != expected) {
    throw FormatError(fmt::format("SDT: data size mismatch at byte {}: expected {} bytes, found {}",
                                  pos, expected, bytes.size() - pos));
  }
  t.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return t;
}

Tensor to_tensor(const DenseMaps& maps) {
  Tensor t;
  t.dtype = DType::kFloat32;
  t.dims = {static_cast<std::uint32_t>(1 + maps.n_rays()), static_cast<std::uint32_t>(maps.height()),
            static_cast<std::uint32_t>(maps.width())};
  const auto prob = maps.prob();
  const auto dist = maps.dist_all();
  t.data.resize((prob.size() + dist.size()) * sizeof(float));
  std::memcpy(t.data.data(), prob.data(), prob.size_bytes());
  std::memcpy(t.data.data() + prob.size_bytes(), dist.data(), dist.size_bytes());
  return t;
}

DenseMaps to_dense_maps(const Tensor& t) {
  if (t.dtype != DType::kFloat32) throw FormatError("SDT: dense maps must be float32 (byte 4)");
  if (t.dims.size() != 3) throw FormatError("SDT: dense maps must have 3 dims (byte 5)");
  if (t.dims[0] < 4) {
    throw FormatError(fmt::format("SDT: need 1+n planes with n >= 3, got {} (byte 6)", t.dims[0]));
  }
  DenseMaps maps(static_cast<int>(t.dims[1]), static_cast<int>(t.dims[2]),
                 RadialGeometry(static_cast<int>(t.dims[0]) - 1));
  auto prob = maps.prob();
  auto dist = maps.dist_all();
  std::memcpy(prob.data(), t.data.data(), prob.size_bytes());
  std::memcpy(dist.data(), t.data.data() + prob.size_bytes(), dist.size_bytes());
  maps.validate();
  return maps;
}

void write_maps(const fs::path& path, const DenseMaps& maps) {
  const auto bytes = encode_sdt(to_tensor(maps));
  write_file_atomic(path, bytes.data(), bytes.size());
}

DenseMaps read_maps(const fs::path& path) {
  try {
    return to_dense_maps(decode_sdt(read_file(path)));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// DetectionSet JSON
// ---------------------------------------------------------------------------

using nlohmann::json;

std::string detections_to_json(const DetectionSet& dets) {
  json j;
  j["height"] = dets.height;
  j["width"] = dets.width;
  j["n_rays"] = dets.n_rays;
  j["params"] = {{"prob_thresh", dets.prob_thresh},
                 {"nms_thresh", dets.nms_thresh},
                 {"measure", to_string(dets.measure)}};
  j["detections"] = json::array();
  for (const auto& d : dets.detections) {
    j["detections"].push_back(
        {{"center", {d.center.row, d.center.col}}, {"prob", d.prob}, {"radii", d.radii}});
  }
  return j.dump(1) + "\n";
}

namespace {

const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw FormatError(fmt::format("detections JSON: missing field '{}{}'", where, name));
  }
  return obj.at(name);
}

template <typename T>
T number(const json& obj, const char* name, const std::string& where) {
  const auto& v = field(obj, name, where);
  if (!v.is_number()) {
    throw FormatError(fmt::format("detections JSON: field '{}{}' must be a number", where, name));
  }
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      throw FormatError(fmt::format("detections JSON: field '{}{}' must be an integer", where, name));
    }
  }
  return v.get<T>();
}

}  // namespace

DetectionSet detections_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("detections JSON: parse error: ") + e.what());
  }
  DetectionSet d;
  d.height = number<int>(j, "height", "");
  d.width = number<int>(j, "width", "");
  d.n_rays = number<int>(j, "n_rays", "");
  if (d.n_rays < 3) throw FormatError("detections JSON: field 'n_rays' must be >= 3");
  const auto& params = field(j, "params", "");
  d.prob_thresh = number<double>(params, "prob_thresh", "params.");
  d.nms_thresh = number<double>(params, "nms_thresh", "params.");
  const auto& measure = field(params, "measure", "params.");
  if (!measure.is_string()) throw FormatError("detections JSON: field 'params.measure' must be a string");
  try {
    d.measure = parse_overlap_measure(measure.get<std::string>());
  } catch (const std::invalid_argument&) {
    throw FormatError("detections JSON: invalid value for field 'params.measure'");
  }
  const auto& list = field(j, "detections", "");
  if (!list.is_array()) throw FormatError("detections JSON: field 'detections' must be an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = fmt::format("detections[{}].", i);
    const auto& e = list[i];
    StarPolygon p;
    const auto& center = field(e, "center", where);
    if (!center.is_array() || center.size() != 2 || !center[0].is_number_integer() ||
        !center[1].is_number_integer()) {
      throw FormatError(fmt::format("detections JSON: field '{}center' must be [row, col]", where));
    }
    p.center = {center[0].get<int>(), center[1].get<int>()};
    p.prob = number<double>(e, "prob", where);
    const auto& radii = field(e, "radii", where);
    if (!radii.is_array() || static_cast<int>(radii.size()) != d.n_rays) {
      throw FormatError(
          fmt::format("detections JSON: field '{}radii' must hold n_rays numbers", where));
    }
    for (const auto& r : radii) {
      if (!r.is_number()) {
        throw FormatError(fmt::format("detections JSON: field '{}radii' must hold numbers", where));
      }
      p.radii.push_back(r.get<double>());
    }
    if (!d.detections.empty() && p.prob > d.detections.back().prob) {
      throw FormatError(fmt::format(
          "detections JSON: field '{}prob' breaks probability-descending order", where));
    }
    d.detections.push_back(std::move(p));
  }
  return d;
}

void write_detections(const fs::path& path, const DetectionSet& dets) {
  write_file_atomic(path, detections_to_json(dets));
}

DetectionSet read_detections(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return detections_from_json(std::string(bytes.begin(), bytes.end()));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// files
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_atomic(const fs::path& path, const void* data, std::size_t size) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  thread_local std::mt19937_64 rng{std::random_device{}()};
  const fs::path tmp = path.string() + fmt::format(".tmp{:016x}", rng());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_file_atomic(const fs::path& path, const std::string& text) {
  write_file_atomic(path, text.data(), text.size());
}

std::string index_stem(int index) { return fmt::format("{:04d}", index); }

fs::path resolve_subdir(const fs::path& dir, const std::string& sub) {
  const auto candidate = dir / sub;
  return fs::is_directory(candidate) ? candidate : dir;
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == extension) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

}  // namespace starpoly::io

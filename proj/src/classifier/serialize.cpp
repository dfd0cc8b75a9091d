#include "sdm/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "sdm/error.hpp"

namespace sdm {

namespace {

constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void magic(const char (&tag)[5]) { bytes_.insert(bytes_.end(), tag, tag + 4); }
  void u32(std::uint32_t v) { put(v); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  template <typename U>
  void put(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes, const char* what)
      : bytes_(bytes), what_(what) {}

  void magic(const char (&tag)[5]) {
    need(4);
    if (std::memcmp(bytes_.data(), tag, 4) != 0) {
      fail("bad magic, expected \"" + std::string(tag) + "\"");
    }
    pos_ = 4;
  }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  void finish() {
    if (pos_ != bytes_.size()) fail("trailing bytes after payload");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError(std::string(what_) + " format error at offset " + std::to_string(pos_) +
                      ": " + msg);
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail("truncated input");
  }
  template <typename U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<U>(bytes_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(U);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_model(const MlpModel& model) {
  Writer w;
  w.magic("SDMW");
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(model.num_layers()));
  for (auto d : model.dims()) w.u32(static_cast<std::uint32_t>(d));
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    for (double v : model.weight(l).values()) w.f64(v);
    for (double v : model.bias(l)) w.f64(v);
  }
  return w.take();
}

MlpModel decode_model(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, "SDMW");
  r.magic("SDMW");
  if (const auto v = r.u32(); v != kVersion) r.fail("unsupported version " + std::to_string(v));
  const auto layers = r.u32();
  if (layers == 0 || layers > 64) r.fail("implausible layer count " + std::to_string(layers));
  std::vector<std::size_t> dims(layers + 1);
  for (auto& d : dims) {
    d = r.u32();
    if (d == 0) r.fail("zero layer dimension");
  }
  std::vector<Tensor> weights;
  std::vector<Vec> biases;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t count = dims[l + 1] * dims[l];
    if (count > bytes.size()) r.fail("layer larger than file");
    Vec w(count);
    for (double& v : w) v = r.f64();
    Vec b(dims[l + 1]);
    for (double& v : b) v = r.f64();
    weights.emplace_back(std::vector<std::size_t>{dims[l + 1], dims[l]}, std::move(w));
    biases.push_back(std::move(b));
  }
  r.finish();
  try {
    return MlpModel(std::move(dims), std::move(weights), std::move(biases));
  } catch (const std::exception& e) {
    throw FormatError(std::string("SDMW format error: ") + e.what());
  }
}

std::vector<std::uint8_t> encode_dataset(const DatasetSplit& data) {
  Writer w;
  w.magic("SDMD");
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(data.size()));
  w.u32(static_cast<std::uint32_t>(data.dim()));
  w.u32(static_cast<std::uint32_t>(data.num_classes));
  for (double v : data.inputs.values()) w.f64(v);
  for (auto y : data.labels) w.u32(y);
  return w.take();
}

DatasetSplit decode_dataset(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, "SDMD");
  r.magic("SDMD");
  if (const auto v = r.u32(); v != kVersion) r.fail("unsupported version " + std::to_string(v));
  const std::size_t n = r.u32();
  const std::size_t d = r.u32();
  const std::size_t k = r.u32();
  if (n == 0 || d == 0) r.fail("empty dataset");
  if (n * d > bytes.size()) r.fail("feature block larger than file");
  Vec features(n * d);
  for (double& v : features) v = r.f64();
  std::vector<std::uint32_t> labels(n);
  for (auto& y : labels) y = r.u32();
  r.finish();
  DatasetSplit out;
  out.inputs = Tensor({n, d}, std::move(features));
  out.labels = std::move(labels);
  out.num_classes = k;
  try {
    out.validate(false);
  } catch (const std::exception& e) {
    throw FormatError(std::string("SDMD format error: ") + e.what());
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("write failed for " + path.string());
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  write_file(path, encode_model(model));
}

MlpModel load_model(const std::filesystem::path& path) { return decode_model(read_file(path)); }

void save_dataset(const DatasetSplit& data, const std::filesystem::path& path) {
  write_file(path, encode_dataset(data));
}

DatasetSplit load_dataset(const std::filesystem::path& path) {
  return decode_dataset(read_file(path));
}

}  // namespace sdm

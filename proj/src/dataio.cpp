#include "percept/dataio.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "percept/rng.hpp"

namespace percept {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_u32be(std::span<const std::uint8_t> bytes, std::size_t at) {
  return (std::uint32_t(bytes[at]) << 24) | (std::uint32_t(bytes[at + 1]) << 16) |
         (std::uint32_t(bytes[at + 2]) << 8) | std::uint32_t(bytes[at + 3]);
}

void write_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

std::string hex32(std::uint32_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void check_length(std::span<const std::uint8_t> bytes, std::size_t expected,
                  const char* what) {
  if (bytes.size() != expected)
    fail(std::string("idx ") + what + ": expected " + std::to_string(expected) +
         " bytes, got " + std::to_string(bytes.size()));
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 16) != Z_OK) fail("gzip: inflateInit failed");
  std::vector<std::uint8_t> out;
  out.reserve(in.size() * 4);
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  std::uint8_t buf[1 << 16];
  int rc = Z_OK;
  do {
    zs.next_out = buf;
    zs.avail_out = sizeof buf;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      fail("gzip: corrupt stream (zlib rc " + std::to_string(rc) + ")");
    }
    out.insert(out.end(), buf, buf + (sizeof buf - zs.avail_out));
  } while (rc != Z_STREAM_END);
  inflateEnd(&zs);
  return out;
}

}  // namespace

RawImages parse_idx_images(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) fail("idx images: file shorter than the 16-byte header");
  const std::uint32_t magic = read_u32be(bytes, 0);
  if (magic != kImagesMagic)
    fail("idx images: bad magic " + hex32(magic) + ", want " + hex32(kImagesMagic));
  RawImages out;
  out.count = read_u32be(bytes, 4);
  out.rows = read_u32be(bytes, 8);
  out.cols = read_u32be(bytes, 12);
  const std::size_t payload =
      std::size_t(out.count) * out.rows * out.cols;
  check_length(bytes.subspan(16), payload, "images payload");
  out.pixels.assign(bytes.begin() + 16, bytes.end());
  return out;
}

RawLabels parse_idx_labels(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) fail("idx labels: file shorter than the 8-byte header");
  const std::uint32_t magic = read_u32be(bytes, 0);
  if (magic != kLabelsMagic)
    fail("idx labels: bad magic " + hex32(magic) + ", want " + hex32(kLabelsMagic));
  RawLabels out;
  out.count = read_u32be(bytes, 4);
  check_length(bytes.subspan(8), out.count, "labels payload");
  out.labels.assign(bytes.begin() + 8, bytes.end());
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    if (out.labels[i] > 9)
      fail("idx labels: value " + std::to_string(out.labels[i]) + " at offset " +
           std::to_string(8 + i) + " is not a digit");
  }
  return out;
}

std::vector<std::uint8_t> serialize_idx_images(const RawImages& imgs) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + imgs.pixels.size());
  write_u32be(out, kImagesMagic);
  write_u32be(out, imgs.count);
  write_u32be(out, imgs.rows);
  write_u32be(out, imgs.cols);
  out.insert(out.end(), imgs.pixels.begin(), imgs.pixels.end());
  return out;
}

std::vector<std::uint8_t> serialize_idx_labels(const RawLabels& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.labels.size());
  write_u32be(out, kLabelsMagic);
  write_u32be(out, labels.count);
  out.insert(out.end(), labels.labels.begin(), labels.labels.end());
  return out;
}

std::vector<std::uint8_t> read_file_maybe_gzip(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b)
    return gunzip(bytes);
  return bytes;
}

std::vector<Vector> normalize(const RawImages& imgs) {
  if (std::size_t(imgs.rows) * imgs.cols != 784)
    fail("normalize: images are " + std::to_string(imgs.rows) + "x" +
         std::to_string(imgs.cols) + ", want 28x28");
  std::vector<Vector> out(imgs.count);
  for (std::size_t i = 0; i < imgs.count; ++i) {
    Vector& v = out[i];
    v.resize(784);
    const std::uint8_t* px = imgs.pixels.data() + i * 784;
    for (std::size_t j = 0; j < 784; ++j) v[j] = px[j] / 255.0;
  }
  return out;
}

Vector one_hot(unsigned label) {
  if (label > 9)
    throw std::invalid_argument("one_hot: label " + std::to_string(label) +
                                " out of range 0..9");
  Vector v(10, 0.0);
  v[label] = 1.0;
  return v;
}

LabeledDataset make_dataset(const RawImages& imgs, const RawLabels& labels) {
  if (imgs.count != labels.count)
    fail("dataset: " + std::to_string(imgs.count) + " images vs " +
         std::to_string(labels.count) + " labels");
  if (std::size_t(imgs.rows) * imgs.cols != 784)
    fail("dataset: images are " + std::to_string(imgs.rows) + "x" +
         std::to_string(imgs.cols) + ", want 28x28");
  LabeledDataset ds;
  ds.n = imgs.count;
  ds.inputs = Matrix(ds.n, 784);
  ds.targets = Matrix(ds.n, 10);
  for (std::size_t i = 0; i < ds.n; ++i) {
    const std::uint8_t* px = imgs.pixels.data() + i * 784;
    double* row = ds.inputs.data.data() + i * 784;
    for (std::size_t j = 0; j < 784; ++j) row[j] = px[j] / 255.0;
    ds.targets(i, labels.labels[i]) = 1.0;
  }
  return ds;
}

std::string find_mnist_file(const std::string& dir, const std::string& name) {
  for (const std::string& candidate : {dir + "/" + name, dir + "/" + name + ".gz"}) {
    std::ifstream probe(candidate, std::ios::binary);
    if (probe) return candidate;
  }
  fail("missing " + name + " (or " + name + ".gz) under " + dir);
}

LabeledDataset load_mnist(const std::string& dir, bool train) {
  const std::string img_name =
      train ? "train-images-idx3-ubyte" : "t10k-images-idx3-ubyte";
  const std::string lbl_name =
      train ? "train-labels-idx1-ubyte" : "t10k-labels-idx1-ubyte";
  const auto img_bytes = read_file_maybe_gzip(find_mnist_file(dir, img_name));
  const auto lbl_bytes = read_file_maybe_gzip(find_mnist_file(dir, lbl_name));
  return make_dataset(parse_idx_images(img_bytes), parse_idx_labels(lbl_bytes));
}

MinibatchSequence::MinibatchSequence(const LabeledDataset& ds, std::size_t m,
                                     std::uint64_t seed)
    : ds_(&ds), m_(m) {
  if (m < 1 || m > ds.n)
    throw std::invalid_argument("minibatches: batch size " + std::to_string(m) +
                                " not in 1.." + std::to_string(ds.n));
  perm_.resize(ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) perm_[i] = static_cast<std::uint32_t>(i);
  SplitMix64 rng(seed);
  fisher_yates(perm_, rng);
}

std::size_t MinibatchSequence::size() const { return (ds_->n + m_ - 1) / m_; }

Minibatch MinibatchSequence::operator[](std::size_t batch) const {
  const std::size_t begin = batch * m_;
  const std::size_t end = std::min(begin + m_, ds_->n);
  Minibatch out;
  out.m = end - begin;
  out.indices.assign(perm_.begin() + begin, perm_.begin() + end);
  std::sort(out.indices.begin(), out.indices.end());
  out.inputs = Matrix(out.m, ds_->inputs.cols);
  out.targets = Matrix(out.m, ds_->targets.cols);
  for (std::size_t r = 0; r < out.m; ++r) {
    const auto src = out.indices[r];
    std::memcpy(out.inputs.data.data() + r * out.inputs.cols,
                ds_->inputs.data.data() + std::size_t(src) * ds_->inputs.cols,
                ds_->inputs.cols * sizeof(double));
    std::memcpy(out.targets.data.data() + r * out.targets.cols,
                ds_->targets.data.data() + std::size_t(src) * ds_->targets.cols,
                ds_->targets.cols * sizeof(double));
  }
  return out;
}

MinibatchSequence minibatches(const LabeledDataset& ds, std::size_t m,
                              std::uint64_t seed) {
  return MinibatchSequence(ds, m, seed);
}

}  // namespace percept

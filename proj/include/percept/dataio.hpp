#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "percept/linalg.hpp"

namespace percept {

// Decoded IDX image file: big-endian magic 0x00000803, then u32 count,
// rows, cols, then count*rows*cols payload bytes, image-major.
struct RawImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;
};

// Decoded IDX label file: magic 0x00000801, u32 count, count bytes 0..9.
struct RawLabels {
  std::uint32_t count = 0;
  std::vector<std::uint8_t> labels;
};

RawImages parse_idx_images(std::span<const std::uint8_t> bytes);
RawLabels parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_idx_images(const RawImages& imgs);
std::vector<std::uint8_t> serialize_idx_labels(const RawLabels& labels);

// Reads a file; transparently gunzips when it starts with 0x1f 0x8b.
std::vector<std::uint8_t> read_file_maybe_gzip(const std::string& path);

// Pixel p maps to p/255; each image flattens row-major into a 784-vector.
std::vector<Vector> normalize(const RawImages& imgs);

// Basis vector with a 1 at `label`; label must be in 0..9.
Vector one_hot(unsigned label);

// n inputs (rows of `inputs`, 784 reals in [0,1]) paired with n one-hot
// target rows. Immutable after construction.
struct LabeledDataset {
  std::size_t n = 0;
  Matrix inputs;   // n x 784
  Matrix targets;  // n x 10

  std::span<const double> input(std::size_t i) const { return inputs.row(i); }
  std::span<const double> target(std::size_t i) const { return targets.row(i); }
};

LabeledDataset make_dataset(const RawImages& imgs, const RawLabels& labels);

// Locates the standard MNIST file names under `dir` (plain or .gz) and
// builds the train or test split.
LabeledDataset load_mnist(const std::string& dir, bool train);

// Resolves "name" or "name.gz" under dir; throws if neither exists.
std::string find_mnist_file(const std::string& dir, const std::string& name);

struct Minibatch {
  std::size_t m = 0;
  std::vector<std::uint32_t> indices;  // ascending dataset indices
  Matrix inputs;                       // m x 784
  Matrix targets;                      // m x 10
};

// One epoch's batch schedule: a seeded Fisher-Yates permutation of
// 0..n-1 partitioned in order into ceil(n/m) batches; the last batch is
// short when m does not divide n. Batches materialize on access with
// their rows sorted by dataset index so within-batch accumulation order
// is canonical.
class MinibatchSequence {
 public:
  MinibatchSequence(const LabeledDataset& ds, std::size_t m, std::uint64_t seed);

  std::size_t size() const;
  Minibatch operator[](std::size_t batch) const;
  std::span<const std::uint32_t> permutation() const { return perm_; }

 private:
  const LabeledDataset* ds_;
  std::size_t m_;
  std::vector<std::uint32_t> perm_;
};

MinibatchSequence minibatches(const LabeledDataset& ds, std::size_t m,
                              std::uint64_t seed);

}  // namespace percept

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "percept/dataio.hpp"
#include "percept/rng.hpp"

using namespace percept;

namespace {

std::vector<std::uint8_t> tiny_image_file() {
  // magic 0x00000803 | count 1 | rows 2 | cols 2 | payload 0,255,128,7
  return {0x00, 0x00, 0x08, 0x03, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00,
          0x00, 0x02, 0x00, 0x00, 0x00, 0x02, 0x00, 0xFF, 0x80, 0x07};
}

std::vector<std::uint8_t> tiny_label_file() {
  return {0x00, 0x00, 0x08, 0x01, 0x00, 0x00, 0x00, 0x03, 0x05, 0x00, 0x09};
}

// 28x28 synthetic set: digit d gets pixel value 25*d + 5 everywhere, so a
// classifier (or a test) can recover the label from any pixel.
RawImages synthetic_images(std::size_t n) {
  RawImages imgs;
  imgs.count = static_cast<std::uint32_t>(n);
  imgs.rows = 28;
  imgs.cols = 28;
  imgs.pixels.resize(n * 784);
  for (std::size_t i = 0; i < n; ++i)
    std::fill_n(imgs.pixels.begin() + i * 784, 784,
                static_cast<std::uint8_t>(25 * (i % 10) + 5));
  return imgs;
}

RawLabels synthetic_labels(std::size_t n) {
  RawLabels labels;
  labels.count = static_cast<std::uint32_t>(n);
  labels.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    labels.labels[i] = static_cast<std::uint8_t>(i % 10);
  return labels;
}

}  // namespace

TEST_CASE("hand-assembled image file parses to the exact fields") {
  const auto bytes = tiny_image_file();
  const RawImages imgs = parse_idx_images(bytes);
  CHECK(imgs.count == 1);
  CHECK(imgs.rows == 2);
  CHECK(imgs.cols == 2);
  CHECK(imgs.pixels == std::vector<std::uint8_t>{0, 255, 128, 7});
}

TEST_CASE("image parser rejects the label magic") {
  auto bytes = tiny_image_file();
  bytes[3] = 0x01;
  CHECK_THROWS_WITH_AS(parse_idx_images(bytes),
                       "idx images: bad magic 0x801, want 0x803",
                       std::runtime_error);
}

TEST_CASE("image parser reports truncation with both byte counts") {
  auto bytes = tiny_image_file();
  bytes.pop_back();
  CHECK_THROWS_WITH_AS(parse_idx_images(bytes),
                       "idx images payload: expected 4 bytes, got 3",
                       std::runtime_error);
}

TEST_CASE("hand-assembled label file parses verbatim") {
  const RawLabels labels = parse_idx_labels(tiny_label_file());
  CHECK(labels.count == 3);
  CHECK(labels.labels == std::vector<std::uint8_t>{5, 0, 9});
}

TEST_CASE("label parser rejects bad magic, truncation and out-of-range bytes") {
  auto bytes = tiny_label_file();
  bytes[3] = 0x03;
  CHECK_THROWS_AS(parse_idx_labels(bytes), std::runtime_error);

  bytes = tiny_label_file();
  bytes.pop_back();
  CHECK_THROWS_WITH_AS(parse_idx_labels(bytes),
                       "idx labels payload: expected 3 bytes, got 2",
                       std::runtime_error);

  bytes = tiny_label_file();
  bytes[10] = 0x0B;
  CHECK_THROWS_WITH_AS(parse_idx_labels(bytes),
                       "idx labels: value 11 at offset 10 is not a digit",
                       std::runtime_error);
}

TEST_CASE("serialize then parse round-trips, bytes included") {
  const auto img_bytes = tiny_image_file();
  const RawImages imgs = parse_idx_images(img_bytes);
  CHECK(serialize_idx_images(imgs) == img_bytes);

  const auto lbl_bytes = tiny_label_file();
  const RawLabels labels = parse_idx_labels(lbl_bytes);
  CHECK(serialize_idx_labels(labels) == lbl_bytes);

  const RawImages big = synthetic_images(23);
  CHECK(parse_idx_images(serialize_idx_images(big)).pixels == big.pixels);
}

TEST_CASE("normalize maps the endpoints and midpoint") {
  const RawImages imgs = [] {
    RawImages i;
    i.count = 1;
    i.rows = 28;
    i.cols = 28;
    i.pixels.assign(784, 0);
    i.pixels[0] = 0;
    i.pixels[1] = 255;
    i.pixels[2] = 128;
    return i;
  }();
  const auto vecs = normalize(imgs);
  REQUIRE(vecs.size() == 1);
  CHECK(vecs[0][0] == 0.0);
  CHECK(vecs[0][1] == 1.0);
  CHECK(vecs[0][2] == 128.0 / 255.0);
  for (double v : vecs[0]) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("normalize rejects non-28x28 images") {
  RawImages imgs;
  imgs.count = 1;
  imgs.rows = 2;
  imgs.cols = 2;
  imgs.pixels = {0, 1, 2, 3};
  CHECK_THROWS_AS(normalize(imgs), std::runtime_error);
}

TEST_CASE("one_hot basis vectors and range check") {
  CHECK(one_hot(0) == Vector{1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  CHECK(one_hot(9) == Vector{0, 0, 0, 0, 0, 0, 0, 0, 0, 1});
  CHECK_THROWS_AS(one_hot(10), std::invalid_argument);
  for (unsigned d = 0; d <= 9; ++d) {
    const Vector v = one_hot(d);
    CHECK(std::accumulate(v.begin(), v.end(), 0.0) == 1.0);
  }
}

TEST_CASE("make_dataset matches normalize plus one_hot") {
  const RawImages imgs = synthetic_images(12);
  const RawLabels labels = synthetic_labels(12);
  const LabeledDataset ds = make_dataset(imgs, labels);
  CHECK(ds.n == 12);

  const auto vecs = normalize(imgs);
  for (std::size_t i = 0; i < ds.n; ++i) {
    CHECK(to_vector(ds.input(i)) == vecs[i]);
    CHECK(to_vector(ds.target(i)) == one_hot(labels.labels[i]));
  }
}

TEST_CASE("minibatches partition the dataset exactly once per epoch") {
  const LabeledDataset ds = make_dataset(synthetic_images(10), synthetic_labels(10));

  SUBCASE("single batch covers everything") {
    const auto seq = minibatches(ds, 10, 5);
    CHECK(seq.size() == 1);
    const Minibatch b = seq[0];
    CHECK(b.m == 10);
    CHECK(b.indices == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  }

  SUBCASE("short final batch holds n mod m samples") {
    const auto seq = minibatches(ds, 4, 5);
    CHECK(seq.size() == 3);
    CHECK(seq[0].m == 4);
    CHECK(seq[1].m == 4);
    CHECK(seq[2].m == 2);
  }

  SUBCASE("union of batch indices is 0..n-1 with no duplicates") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      for (std::size_t m : {1, 3, 7, 10}) {
        const auto seq = minibatches(ds, m, seed);
        std::set<std::uint32_t> seen;
        std::size_t total = 0;
        for (std::size_t b = 0; b < seq.size(); ++b) {
          const Minibatch batch = seq[b];
          total += batch.m;
          seen.insert(batch.indices.begin(), batch.indices.end());
          CHECK(std::is_sorted(batch.indices.begin(), batch.indices.end()));
        }
        CHECK(total == ds.n);
        CHECK(seen.size() == ds.n);
      }
    }
  }

  SUBCASE("same arguments give identical schedules") {
    const auto a = minibatches(ds, 3, 77);
    const auto b = minibatches(ds, 3, 77);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].indices == b[i].indices);
      CHECK(a[i].inputs == b[i].inputs);
    }
  }

  SUBCASE("batch rows are gathered from the dataset by index") {
    const auto seq = minibatches(ds, 3, 99);
    const Minibatch b = seq[1];
    for (std::size_t r = 0; r < b.m; ++r) {
      CHECK(to_vector(b.inputs.row(r)) == to_vector(ds.input(b.indices[r])));
      CHECK(to_vector(b.targets.row(r)) == to_vector(ds.target(b.indices[r])));
    }
  }
}

TEST_CASE("minibatches rejects out-of-range batch sizes") {
  const LabeledDataset ds = make_dataset(synthetic_images(4), synthetic_labels(4));
  CHECK_THROWS_AS(minibatches(ds, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(minibatches(ds, 5, 1), std::invalid_argument);
}

TEST_CASE("different shuffle seeds give mostly distinct permutations") {
  const LabeledDataset ds = make_dataset(synthetic_images(10), synthetic_labels(10));
  std::set<std::vector<std::uint32_t>> seen;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto seq = minibatches(ds, 10, seed);
    seen.insert(
        std::vector<std::uint32_t>(seq.permutation().begin(), seq.permutation().end()));
  }
  CHECK(seen.size() >= 95);
}

TEST_CASE("real MNIST files parse with the documented shapes") {
  const std::string dir = PERCEPT_DATA_DIR;
  const auto train_imgs =
      parse_idx_images(read_file_maybe_gzip(find_mnist_file(dir, "train-images-idx3-ubyte")));
  CHECK(train_imgs.count == 60000);
  CHECK(train_imgs.rows == 28);
  CHECK(train_imgs.cols == 28);
  const auto test_labels =
      parse_idx_labels(read_file_maybe_gzip(find_mnist_file(dir, "t10k-labels-idx1-ubyte")));
  CHECK(test_labels.count == 10000);
}

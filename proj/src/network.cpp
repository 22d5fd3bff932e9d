#include "percept/network.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "percept/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace percept {
namespace {

constexpr char kCheckpointMagic[8] = {'P', 'C', 'P', 'T', '0', '0', '0', '1'};

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void validate_specs(std::size_t input_width, const std::vector<LayerSpec>& specs) {
  if (input_width == 0) throw std::invalid_argument("network: input width 0");
  if (specs.empty()) throw std::invalid_argument("network: no layers");
  for (const auto& s : specs)
    if (s.width == 0) throw std::invalid_argument("network: layer width 0");
}

void check_input(const Network& net, std::size_t got) {
  if (got != net.input_width)
    throw std::invalid_argument("forward: input length " + std::to_string(got) +
                                ", network expects " +
                                std::to_string(net.input_width));
}

}  // namespace

double activate(Activation kind, double z) {
  switch (kind) {
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Tanh: return std::tanh(z);
    case Activation::Identity: return z;
  }
  fail("unknown activation");
}

double activate_prime(Activation kind, double z) {
  switch (kind) {
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Identity: return 1.0;
  }
  fail("unknown activation");
}

std::string_view activation_name(Activation kind) {
  switch (kind) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
  }
  fail("unknown activation");
}

Activation activation_from_name(std::string_view name) {
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

Network build_network(std::size_t input_width, const std::vector<LayerSpec>& specs,
                      std::uint64_t seed) {
  validate_specs(input_width, specs);
  Network net;
  net.input_width = input_width;
  net.layers = specs;
  SplitMix64 rng(seed);
  GaussianSampler gauss(rng);
  std::size_t fan_in = input_width;
  for (const auto& spec : specs) {
    Matrix w(spec.width, fan_in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& entry : w.data) entry = gauss.next() * scale;
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(spec.width, 0.0);
    fan_in = spec.width;
  }
  return net;
}

ForwardTrace forward(const Network& net, const Vector& x) {
  check_input(net, x.size());
  ForwardTrace trace;
  trace.activations.push_back(x);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    Vector z = affine(net.weights[l], trace.activations.back(), net.biases[l]);
    const Activation kind = net.layers[l].activation;
    trace.activations.push_back(
        map_elementwise([kind](double v) { return activate(kind, v); }, z));
    trace.zs.push_back(std::move(z));
  }
  return trace;
}

int predict(const Network& net, const Vector& x) {
  if (net.output_width() != 10)
    fail("predict: final layer is " + std::to_string(net.output_width()) +
         " wide, want 10");
  const ForwardTrace trace = forward(net, x);
  const Vector& out = trace.activations.back();
  std::size_t best = 0;
  for (std::size_t j = 1; j < out.size(); ++j)
    if (out[j] > out[best]) best = j;
  return static_cast<int>(best);
}

BatchTrace forward_batch(const Network& net, const Matrix& x) {
  check_input(net, x.cols);
  BatchTrace trace;
  trace.activations.push_back(x);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    Matrix z = matmul(trace.activations.back(), transpose(net.weights[l]));
    add_row_vector(z, net.biases[l]);
    const Activation kind = net.layers[l].activation;
    trace.activations.push_back(
        map_elementwise([kind](double v) { return activate(kind, v); }, z));
    trace.zs.push_back(std::move(z));
  }
  return trace;
}

Matrix output_activations(const Network& net, const Matrix& x) {
  check_input(net, x.cols);
  Matrix a = x;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    Matrix z = matmul(a, transpose(net.weights[l]));
    add_row_vector(z, net.biases[l]);
    const Activation kind = net.layers[l].activation;
    a = map_elementwise([kind](double v) { return activate(kind, v); }, z);
  }
  return a;
}

namespace {

void put_u32(std::ofstream& f, std::uint32_t v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::ifstream& f, const char* what) {
  std::uint32_t v = 0;
  if (!f.read(reinterpret_cast<char*>(&v), sizeof v))
    fail(std::string("checkpoint truncated reading ") + what);
  return v;
}

}  // namespace

void save_checkpoint(const Network& net, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail("cannot write " + path);
  f.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put_u32(f, static_cast<std::uint32_t>(net.input_width));
  put_u32(f, static_cast<std::uint32_t>(net.depth()));
  for (const auto& layer : net.layers) {
    put_u32(f, static_cast<std::uint32_t>(layer.width));
    const std::string_view name = activation_name(layer.activation);
    put_u32(f, static_cast<std::uint32_t>(name.size()));
    f.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const auto& w = net.weights[l];
    f.write(reinterpret_cast<const char*>(w.data.data()),
            static_cast<std::streamsize>(w.data.size() * sizeof(double)));
    const auto& b = net.biases[l];
    f.write(reinterpret_cast<const char*>(b.data()),
            static_cast<std::streamsize>(b.size() * sizeof(double)));
  }
  if (!f) fail("short write to " + path);
}

Network load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("cannot open " + path);
  char magic[8] = {};
  if (!f.read(magic, sizeof magic) ||
      std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    fail(path + " is not a checkpoint (bad magic)");
  Network net;
  net.input_width = get_u32(f, "input width");
  const std::uint32_t depth = get_u32(f, "layer count");
  if (net.input_width == 0 || depth == 0) fail("checkpoint has an empty shape");
  for (std::uint32_t l = 0; l < depth; ++l) {
    LayerSpec spec;
    spec.width = get_u32(f, "layer width");
    if (spec.width == 0) fail("checkpoint layer width 0");
    const std::uint32_t name_len = get_u32(f, "activation name length");
    if (name_len > 32) fail("checkpoint activation name implausibly long");
    std::string name(name_len, '\0');
    if (!f.read(name.data(), name_len)) fail("checkpoint truncated in layer table");
    spec.activation = activation_from_name(name);
    net.layers.push_back(spec);
  }
  std::size_t fan_in = net.input_width;
  for (const auto& layer : net.layers) {
    Matrix w(layer.width, fan_in);
    if (!f.read(reinterpret_cast<char*>(w.data.data()),
                static_cast<std::streamsize>(w.data.size() * sizeof(double))))
      fail("checkpoint truncated reading weights");
    Vector b(layer.width);
    if (!f.read(reinterpret_cast<char*>(b.data()),
                static_cast<std::streamsize>(b.size() * sizeof(double))))
      fail("checkpoint truncated reading biases");
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
    fan_in = layer.width;
  }
  f.peek();
  if (!f.eof()) fail("checkpoint has trailing bytes");
  return net;
}

}  // namespace percept

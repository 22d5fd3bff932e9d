#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "percept/linalg.hpp"

namespace percept {

enum class Activation { Sigmoid, Relu, Tanh, Identity };

// Scalar activation and its derivative. relu'(0) is defined as 0.
double activate(Activation kind, double z);
double activate_prime(Activation kind, double z);

std::string_view activation_name(Activation kind);
Activation activation_from_name(std::string_view name);

struct LayerSpec {
  std::size_t width = 0;
  Activation activation = Activation::Sigmoid;
};

// Fully-connected feed-forward network. weights[l] maps layer l-1
// activations (or the input when l == 0) to layer l; weights[l] is
// layers[l].width x fan_in, biases[l] has layers[l].width entries.
// Immutable during forward/predict; parameter updates need exclusive
// access.
struct Network {
  std::size_t input_width = 0;
  std::vector<LayerSpec> layers;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  std::size_t depth() const { return layers.size(); }
  std::size_t output_width() const { return layers.back().width; }
};

// Weights drawn from Gaussian(0, 1/sqrt(fan_in)) off a SplitMix64 stream,
// biases zero. Same seed and specs give a bit-identical network.
Network build_network(std::size_t input_width, const std::vector<LayerSpec>& specs,
                      std::uint64_t seed);

// Per-layer weighted inputs and activations for one sample;
// activations[0] is the input, activations[l + 1] = f(zs[l]).
struct ForwardTrace {
  std::vector<Vector> zs;
  std::vector<Vector> activations;
};

ForwardTrace forward(const Network& net, const Vector& x);

// Index of the maximum output activation, ties to the lowest index.
// Requires a 10-wide final layer.
int predict(const Network& net, const Vector& x);

// Batch variants: row s of every matrix belongs to sample s. Arithmetic
// matches the per-sample path bit for bit (same products, same
// accumulation order), so batching is purely a throughput choice.
struct BatchTrace {
  std::vector<Matrix> zs;
  std::vector<Matrix> activations;
};

BatchTrace forward_batch(const Network& net, const Matrix& x);

// Final-layer activations only (no trace kept).
Matrix output_activations(const Network& net, const Matrix& x);

// Checkpoint container: magic "PCPT0001", then little-endian u32
// input_width and layer count, per layer u32 width plus a length-prefixed
// activation name, then per layer the weight matrix (row-major) and bias
// vector as little-endian doubles. Loading validates the shape chain.
void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);

}  // namespace percept

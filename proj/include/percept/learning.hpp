#pragma once

#include <cstdint>
#include <vector>

#include "percept/dataio.hpp"
#include "percept/linalg.hpp"
#include "percept/network.hpp"

namespace percept {

// Quadratic is defined for any final activation; SoftmaxCrossEntropy
// requires an identity final layer (the outputs are logits).
enum class Loss { Quadratic, SoftmaxCrossEntropy };

enum class Optimizer { Sgd, Adam };

// Parameter-shaped gradient collection; shapes mirror the network exactly.
struct Gradients {
  std::vector<Matrix> w;
  std::vector<Vector> b;
};

Gradients zero_gradients_like(const Network& net);

struct Hyperparams {
  double eta = 0.0;
  std::size_t batch_size = 1;
  std::size_t epochs = 1;
  Loss loss = Loss::Quadratic;
  Optimizer optimizer = Optimizer::Sgd;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment accumulators plus the step counter and the running
// beta powers used for bias correction.
struct AdamState {
  Gradients m;
  Gradients v;
  std::uint64_t t = 0;
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;
};

AdamState make_adam_state(const Network& net);

Vector softmax(const Vector& z);

// Quadratic: 1/2 sum_j (y_j - a_j)^2. Cross entropy: -sum_j y_j log p_j
// with p = softmax(a) computed via the max-shift trick.
double cost(Loss loss, const Vector& a, const Vector& y);

// Sensitivity of the sample cost to the final weighted inputs.
// Quadratic: (a - y) * f'(z); cross entropy: softmax(z) - y.
Vector output_delta(Loss loss, const Vector& a, const Vector& y, const Vector& z,
                    Activation activation);

struct BackpropResult {
  double sample_cost = 0.0;
  Gradients grads;
};

// One forward pass, then deltas propagated layer by layer:
// dW[l] = outer(delta, a[l-1]), db[l] = delta,
// delta[l-1] = (W[l]^T delta) * f'(z[l-1]).
BackpropResult backprop(const Network& net, const Vector& x, const Vector& y,
                        Loss loss);

// Max relative error between backprop gradients and central finite
// differences of the sample cost, over every parameter. Relative error is
// |g - fd| / max(1e-12, |g| + |fd|).
double grad_check(const Network& net, const Vector& x, const Vector& y, Loss loss,
                  double eps);

// p -= eta * g for every parameter.
void gd_step(Network& net, const Gradients& grads, double eta);

// Standard Adam with bias correction; eta, betas and epsilon from hp.
void adam_step(Network& net, const Gradients& grads, AdamState& state,
               const Hyperparams& hp);

struct BatchBackpropResult {
  double cost_sum = 0.0;  // per-sample costs summed in row order
  std::size_t m = 0;
  Gradients sum;  // per-sample gradients summed in row order
};

// Batch-matrix route through the same arithmetic: bit-identical to running
// backprop per row and folding the results in row order.
BatchBackpropResult backprop_batch(const Network& net, const Matrix& x,
                                   const Matrix& y, Loss loss);

// Mean gradient over the whole dataset in index order (batch route).
Gradients dataset_mean_gradient(const Network& net, const LabeledDataset& ds,
                                Loss loss);

// One pass over all ceil(n/m) minibatches drawn with seed ^ epoch_index:
// per batch, the mean gradient feeds one gd_step at hp.eta.
void sgd_epoch(Network& net, const LabeledDataset& ds, const Hyperparams& hp,
               std::uint64_t seed, std::uint64_t epoch_index);

// Same schedule with adam_step updates.
void adam_epoch(Network& net, const LabeledDataset& ds, const Hyperparams& hp,
                AdamState& state, std::uint64_t seed, std::uint64_t epoch_index);

}  // namespace percept

#include "percept/learning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace percept {
namespace {

void check_pair(std::size_t a, std::size_t y, const char* what) {
  if (a != y)
    throw std::invalid_argument(std::string(what) + ": lengths differ, " +
                                std::to_string(a) + " vs " + std::to_string(y));
}

void require_logit_output(const Network& net, Loss loss) {
  if (loss == Loss::SoftmaxCrossEntropy &&
      net.layers.back().activation != Activation::Identity)
    throw std::invalid_argument(
        "softmax cross-entropy needs an identity final layer (got " +
        std::string(activation_name(net.layers.back().activation)) + ")");
}

// Softmax applied to each row in place.
void softmax_rows(Matrix& z) {
  for (std::size_t i = 0; i < z.rows; ++i) {
    double* row = z.data.data() + i * z.cols;
    double mx = row[0];
    for (std::size_t j = 1; j < z.cols; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < z.cols; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (std::size_t j = 0; j < z.cols; ++j) row[j] /= sum;
  }
}

double sample_cost(const Network& net, const Vector& x, const Vector& y,
                   Loss loss) {
  return cost(loss, forward(net, x).activations.back(), y);
}

}  // namespace

Gradients zero_gradients_like(const Network& net) {
  Gradients g;
  std::size_t fan_in = net.input_width;
  for (const auto& layer : net.layers) {
    g.w.emplace_back(layer.width, fan_in);
    g.b.emplace_back(layer.width, 0.0);
    fan_in = layer.width;
  }
  return g;
}

AdamState make_adam_state(const Network& net) {
  AdamState s;
  s.m = zero_gradients_like(net);
  s.v = zero_gradients_like(net);
  return s;
}

Vector softmax(const Vector& z) {
  Matrix m(1, z.size(), z);
  softmax_rows(m);
  return m.data;
}

double cost(Loss loss, const Vector& a, const Vector& y) {
  check_pair(a.size(), y.size(), "cost");
  if (loss == Loss::Quadratic) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double d = y[j] - a[j];
      acc += d * d;
    }
    return 0.5 * acc;
  }
  const Vector p = softmax(a);
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (y[j] != 0.0) acc -= y[j] * std::log(p[j]);
  return acc;
}

Vector output_delta(Loss loss, const Vector& a, const Vector& y, const Vector& z,
                    Activation activation) {
  check_pair(a.size(), y.size(), "output_delta");
  check_pair(a.size(), z.size(), "output_delta");
  Vector delta(a.size());
  if (loss == Loss::Quadratic) {
    for (std::size_t j = 0; j < a.size(); ++j)
      delta[j] = (a[j] - y[j]) * activate_prime(activation, z[j]);
    return delta;
  }
  const Vector p = softmax(z);
  for (std::size_t j = 0; j < a.size(); ++j) delta[j] = p[j] - y[j];
  return delta;
}

BackpropResult backprop(const Network& net, const Vector& x, const Vector& y,
                        Loss loss) {
  check_pair(y.size(), net.output_width(), "backprop targets");
  require_logit_output(net, loss);
  const ForwardTrace trace = forward(net, x);
  const std::size_t depth = net.depth();

  BackpropResult out;
  out.sample_cost = cost(loss, trace.activations.back(), y);
  out.grads.w.resize(depth);
  out.grads.b.resize(depth);

  Vector delta = output_delta(loss, trace.activations.back(), y, trace.zs.back(),
                              net.layers.back().activation);
  for (std::size_t l = depth; l-- > 0;) {
    out.grads.w[l] = outer(delta, trace.activations[l]);
    out.grads.b[l] = delta;
    if (l > 0) {
      Vector back = transposed_matvec(net.weights[l], delta);
      const Activation kind = net.layers[l - 1].activation;
      const Vector& z = trace.zs[l - 1];
      for (std::size_t j = 0; j < back.size(); ++j)
        back[j] *= activate_prime(kind, z[j]);
      delta = std::move(back);
    }
  }
  return out;
}

double grad_check(const Network& net, const Vector& x, const Vector& y, Loss loss,
                  double eps) {
  if (eps <= 0.0) throw std::invalid_argument("grad_check: eps must be positive");
  const Gradients analytic = backprop(net, x, y, loss).grads;
  Network probe = net;
  double worst = 0.0;

  auto check_param = [&](double& p, double g) {
    const double saved = p;
    p = saved + eps;
    const double plus = sample_cost(probe, x, y, loss);
    p = saved - eps;
    const double minus = sample_cost(probe, x, y, loss);
    p = saved;
    const double fd = (plus - minus) / (2.0 * eps);
    const double rel = std::abs(g - fd) / std::max(1e-12, std::abs(g) + std::abs(fd));
    worst = std::max(worst, rel);
  };

  for (std::size_t l = 0; l < net.depth(); ++l) {
    for (std::size_t i = 0; i < probe.weights[l].data.size(); ++i)
      check_param(probe.weights[l].data[i], analytic.w[l].data[i]);
    for (std::size_t j = 0; j < probe.biases[l].size(); ++j)
      check_param(probe.biases[l][j], analytic.b[l][j]);
  }
  return worst;
}

void gd_step(Network& net, const Gradients& grads, double eta) {
  for (std::size_t l = 0; l < net.depth(); ++l) {
    check_pair(net.weights[l].data.size(), grads.w[l].data.size(), "gd_step");
    check_pair(net.biases[l].size(), grads.b[l].size(), "gd_step");
    double* w = net.weights[l].data.data();
    const double* gw = grads.w[l].data.data();
    for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) w[i] -= eta * gw[i];
    double* b = net.biases[l].data();
    const double* gb = grads.b[l].data();
    for (std::size_t j = 0; j < net.biases[l].size(); ++j) b[j] -= eta * gb[j];
  }
}

void adam_step(Network& net, const Gradients& grads, AdamState& state,
               const Hyperparams& hp) {
  state.t += 1;
  state.beta1_pow *= hp.beta1;
  state.beta2_pow *= hp.beta2;
  const double m_corr = 1.0 - state.beta1_pow;
  const double v_corr = 1.0 - state.beta2_pow;

  auto update = [&](double* p, double* m, double* v, const double* g,
                    std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      m[i] = hp.beta1 * m[i] + (1.0 - hp.beta1) * g[i];
      v[i] = hp.beta2 * v[i] + (1.0 - hp.beta2) * (g[i] * g[i]);
      const double m_hat = m[i] / m_corr;
      const double v_hat = v[i] / v_corr;
      p[i] -= hp.eta * m_hat / (std::sqrt(v_hat) + hp.epsilon);
    }
  };

  for (std::size_t l = 0; l < net.depth(); ++l) {
    check_pair(net.weights[l].data.size(), grads.w[l].data.size(), "adam_step");
    check_pair(net.biases[l].size(), grads.b[l].size(), "adam_step");
    update(net.weights[l].data.data(), state.m.w[l].data.data(),
           state.v.w[l].data.data(), grads.w[l].data.data(),
           net.weights[l].data.size());
    update(net.biases[l].data(), state.m.b[l].data(), state.v.b[l].data(),
           grads.b[l].data(), net.biases[l].size());
  }
}

BatchBackpropResult backprop_batch(const Network& net, const Matrix& x,
                                   const Matrix& y, Loss loss) {
  check_pair(x.rows, y.rows, "backprop_batch rows");
  check_pair(y.cols, net.output_width(), "backprop_batch targets");
  require_logit_output(net, loss);
  const BatchTrace trace = forward_batch(net, x);
  const std::size_t depth = net.depth();

  BatchBackpropResult out;
  out.m = x.rows;
  out.sum.w.resize(depth);
  out.sum.b.resize(depth);

  const Matrix& a_final = trace.activations.back();
  for (std::size_t s = 0; s < x.rows; ++s)
    out.cost_sum += cost(loss, to_vector(a_final.row(s)), to_vector(y.row(s)));

  Matrix delta;
  if (loss == Loss::Quadratic) {
    const Matrix& z_final = trace.zs.back();
    const Activation kind = net.layers.back().activation;
    delta = Matrix(a_final.rows, a_final.cols);
    for (std::size_t i = 0; i < delta.data.size(); ++i)
      delta.data[i] = (a_final.data[i] - y.data[i]) *
                      activate_prime(kind, z_final.data[i]);
  } else {
    delta = trace.zs.back();
    softmax_rows(delta);
    for (std::size_t i = 0; i < delta.data.size(); ++i) delta.data[i] -= y.data[i];
  }

  for (std::size_t l = depth; l-- > 0;) {
    out.sum.w[l] = matmul(transpose(delta), trace.activations[l]);
    out.sum.b[l] = column_sums(delta);
    if (l > 0) {
      Matrix back = matmul(delta, net.weights[l]);
      const Activation kind = net.layers[l - 1].activation;
      const Matrix& z = trace.zs[l - 1];
      for (std::size_t i = 0; i < back.data.size(); ++i)
        back.data[i] *= activate_prime(kind, z.data[i]);
      delta = std::move(back);
    }
  }
  return out;
}

namespace {

Gradients batch_mean_gradient(const Network& net, const Matrix& x, const Matrix& y,
                              Loss loss) {
  BatchBackpropResult r = backprop_batch(net, x, y, loss);
  const double m = static_cast<double>(r.m);
  for (auto& w : r.sum.w)
    for (double& v : w.data) v /= m;
  for (auto& b : r.sum.b)
    for (double& v : b) v /= m;
  return std::move(r.sum);
}

template <class Step>
void run_epoch(Network& net, const LabeledDataset& ds, const Hyperparams& hp,
               std::uint64_t seed, std::uint64_t epoch_index, Step step) {
  const MinibatchSequence batches = minibatches(ds, hp.batch_size, seed ^ epoch_index);
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const Minibatch batch = batches[b];
    step(batch_mean_gradient(net, batch.inputs, batch.targets, hp.loss));
  }
}

}  // namespace

Gradients dataset_mean_gradient(const Network& net, const LabeledDataset& ds,
                                Loss loss) {
  return batch_mean_gradient(net, ds.inputs, ds.targets, loss);
}

void sgd_epoch(Network& net, const LabeledDataset& ds, const Hyperparams& hp,
               std::uint64_t seed, std::uint64_t epoch_index) {
  run_epoch(net, ds, hp, seed, epoch_index,
            [&](const Gradients& mean) { gd_step(net, mean, hp.eta); });
}

void adam_epoch(Network& net, const LabeledDataset& ds, const Hyperparams& hp,
                AdamState& state, std::uint64_t seed, std::uint64_t epoch_index) {
  run_epoch(net, ds, hp, seed, epoch_index,
            [&](const Gradients& mean) { adam_step(net, mean, state, hp); });
}

}  // namespace percept

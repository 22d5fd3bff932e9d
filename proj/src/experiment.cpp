#include "percept/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace percept {
namespace {

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < row.size(); ++j)
    if (row[j] > row[best]) best = j;
  return best;
}

}  // namespace

std::string_view preset_name(Preset p) {
  return p == Preset::PaperMath ? "paper-math" : "replication";
}

Preset preset_from_name(std::string_view name) {
  if (name == "paper-math") return Preset::PaperMath;
  if (name == "replication") return Preset::Replication;
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

Hyperparams resolve_hyperparams(const RunConfig& config) {
  Hyperparams hp;
  hp.batch_size = config.batch_size;
  hp.epochs = config.epochs;
  if (config.preset == Preset::PaperMath) {
    hp.eta = 3.0;
    hp.loss = Loss::Quadratic;
    hp.optimizer = Optimizer::Sgd;
  } else {
    hp.eta = 0.001;
    hp.loss = Loss::SoftmaxCrossEntropy;
    hp.optimizer = Optimizer::Adam;
  }
  if (config.eta) hp.eta = *config.eta;
  if (config.loss) hp.loss = *config.loss;
  if (config.optimizer) hp.optimizer = *config.optimizer;
  if (hp.eta <= 0.0) throw std::invalid_argument("learning rate must be positive");
  return hp;
}

std::vector<LayerSpec> layer_specs(const RunConfig& config) {
  if (config.hidden_layers < 1)
    throw std::invalid_argument("need at least one hidden layer");
  if (config.neurons_per_layer < 1)
    throw std::invalid_argument("hidden width must be at least 1");
  const Activation hidden = config.preset == Preset::PaperMath
                                ? Activation::Sigmoid
                                : Activation::Relu;
  const Activation output = config.preset == Preset::PaperMath
                                ? Activation::Sigmoid
                                : Activation::Identity;
  std::vector<LayerSpec> specs(config.hidden_layers, {config.neurons_per_layer, hidden});
  specs.push_back({10, output});
  return specs;
}

double evaluate(const Network& net, const LabeledDataset& test) {
  if (test.n == 0) throw std::invalid_argument("evaluate: empty test set");
  constexpr std::size_t kChunk = 1000;
  std::size_t correct = 0;
  for (std::size_t begin = 0; begin < test.n; begin += kChunk) {
    const std::size_t end = std::min(begin + kChunk, test.n);
    Matrix chunk(end - begin, test.inputs.cols);
    std::copy(test.inputs.data.begin() + begin * test.inputs.cols,
              test.inputs.data.begin() + end * test.inputs.cols,
              chunk.data.begin());
    const Matrix out = output_activations(net, chunk);
    for (std::size_t r = 0; r < out.rows; ++r)
      if (argmax(out.row(r)) == argmax(test.target(begin + r))) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.n);
}

TrainReport train(const RunConfig& config, const LabeledDataset& train_ds,
                  const LabeledDataset& test_ds, const EpochCallback& on_epoch,
                  Network* out_net) {
  if (config.epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  const Hyperparams hp = resolve_hyperparams(config);
  const auto t0 = std::chrono::steady_clock::now();

  Network net = build_network(784, layer_specs(config), config.seed);
  AdamState adam = make_adam_state(net);

  TrainReport report;
  report.config = config;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (hp.optimizer == Optimizer::Adam)
      adam_epoch(net, train_ds, hp, adam, config.seed, epoch);
    else
      sgd_epoch(net, train_ds, hp, config.seed, epoch);
    const double acc = evaluate(net, test_ds);
    report.per_epoch_accuracy.push_back(acc);
    if (on_epoch) on_epoch(epoch + 1, acc);
  }
  report.final_accuracy = report.per_epoch_accuracy.back();
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out_net) *out_net = std::move(net);
  return report;
}

std::vector<TrainReport> sweep(const std::vector<RunConfig>& grid,
                               const LabeledDataset& train_ds,
                               const LabeledDataset& test_ds,
                               const EpochCallback& on_epoch) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  std::vector<TrainReport> reports;
  reports.reserve(grid.size());
  for (const RunConfig& config : grid)
    reports.push_back(train(config, train_ds, test_ds, on_epoch));
  return reports;
}

std::vector<RunConfig> table1_grid(std::uint64_t base_seed) {
  struct Row {
    std::size_t hidden, batch, epochs;
  };
  // hidden layers / batch size / epochs
  constexpr Row rows[] = {{2, 50, 50},  {3, 50, 20}, {3, 50, 50}, {4, 50, 20},
                          {4, 100, 20}, {4, 50, 50}, {4, 100, 50}, {5, 50, 40},
                          {6, 50, 20},  {7, 50, 20}, {8, 50, 20}, {9, 50, 20}};
  std::vector<RunConfig> grid;
  for (std::size_t i = 0; i < std::size(rows); ++i) {
    RunConfig c;
    c.hidden_layers = rows[i].hidden;
    c.neurons_per_layer = 500;
    c.batch_size = rows[i].batch;
    c.epochs = rows[i].epochs;
    c.seed = base_seed + i;
    c.preset = Preset::Replication;
    grid.push_back(c);
  }
  return grid;
}

std::string format_accuracy(double accuracy) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", accuracy);
  return buf;
}

std::string emit_csv(const std::vector<TrainReport>& reports) {
  std::ostringstream os;
  os << "hidden_layers,neurons,batch_size,epochs,seed,epoch,test_accuracy\n";
  for (const TrainReport& r : reports) {
    for (std::size_t e = 0; e < r.per_epoch_accuracy.size(); ++e) {
      os << r.config.hidden_layers << ',' << r.config.neurons_per_layer << ','
         << r.config.batch_size << ',' << r.config.epochs << ',' << r.config.seed
         << ',' << (e + 1) << ',' << format_accuracy(r.per_epoch_accuracy[e])
         << '\n';
    }
  }
  return os.str();
}

std::string emit_plotdata(const std::vector<TrainReport>& reports) {
  std::ostringstream os;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const TrainReport& r = reports[i];
    for (std::size_t e = 0; e < r.per_epoch_accuracy.size(); ++e)
      os << "{\"series\":\"epoch\",\"config_id\":" << i << ",\"epoch\":" << (e + 1)
         << ",\"accuracy\":" << format_accuracy(r.per_epoch_accuracy[e]) << "}\n";
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const TrainReport& r = reports[i];
    os << "{\"series\":\"final\",\"config_id\":" << i
       << ",\"hidden_layers\":" << r.config.hidden_layers
       << ",\"accuracy\":" << format_accuracy(r.final_accuracy) << "}\n";
  }
  return os.str();
}

}  // namespace percept

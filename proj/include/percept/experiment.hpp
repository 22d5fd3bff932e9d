#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "percept/dataio.hpp"
#include "percept/learning.hpp"
#include "percept/network.hpp"

namespace percept {

// paper_math: sigmoid throughout, quadratic cost, plain SGD at eta 3.0.
// replication: relu hidden layers, identity output, softmax cross-entropy,
// Adam(0.001, 0.9, 0.999, 1e-8).
enum class Preset { PaperMath, Replication };

std::string_view preset_name(Preset p);
Preset preset_from_name(std::string_view name);

struct RunConfig {
  std::size_t hidden_layers = 0;
  std::size_t neurons_per_layer = 500;
  std::size_t batch_size = 50;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  Preset preset = Preset::Replication;
  // optional overrides on top of the preset
  std::optional<double> eta;
  std::optional<Loss> loss;
  std::optional<Optimizer> optimizer;
};

Hyperparams resolve_hyperparams(const RunConfig& config);
std::vector<LayerSpec> layer_specs(const RunConfig& config);

struct TrainReport {
  RunConfig config;
  std::vector<double> per_epoch_accuracy;  // one entry per epoch, in [0,1]
  double final_accuracy = 0.0;
  double wall_time_seconds = 0.0;
};

// Fraction of samples whose predicted digit matches argmax of the target.
double evaluate(const Network& net, const LabeledDataset& test);

using EpochCallback = std::function<void(std::size_t epoch, double accuracy)>;

// Builds 784 -> hidden_layers x neurons_per_layer -> 10, trains for
// config.epochs epochs and evaluates on the test set after each one.
// When out_net is given the trained network is stored there.
TrainReport train(const RunConfig& config, const LabeledDataset& train_ds,
                  const LabeledDataset& test_ds, const EpochCallback& on_epoch = {},
                  Network* out_net = nullptr);

// Runs every config in grid order and returns one report per entry.
std::vector<TrainReport> sweep(const std::vector<RunConfig>& grid,
                               const LabeledDataset& train_ds,
                               const LabeledDataset& test_ds,
                               const EpochCallback& on_epoch = {});

// The 12-configuration hidden-layers/batch-size/epochs grid; row i uses
// seed base_seed + i.
std::vector<RunConfig> table1_grid(std::uint64_t base_seed);

// Accuracy rendered with four decimal places.
std::string format_accuracy(double accuracy);

// CSV: header hidden_layers,neurons,batch_size,epochs,seed,epoch,
// test_accuracy and one row per (config, epoch). LF line endings.
std::string emit_csv(const std::vector<TrainReport>& reports);

// Newline-delimited records, one JSON object per line. Per-epoch series:
// {"series":"epoch","config_id":I,"epoch":E,"accuracy":A}
// and per config a final-accuracy record for the bar data:
// {"series":"final","config_id":I,"hidden_layers":H,"accuracy":A}
std::string emit_plotdata(const std::vector<TrainReport>& reports);

}  // namespace percept

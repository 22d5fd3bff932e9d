#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "percept/experiment.hpp"
#include "percept/rng.hpp"

using namespace percept;

namespace {

// 784-wide synthetic dataset where the digit sits one-hot in the first ten
// input components; the identity-wired network below classifies it
// perfectly.
LabeledDataset encoded_digit_dataset(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  LabeledDataset ds;
  ds.n = n;
  ds.inputs = Matrix(n, 784);
  ds.targets = Matrix(n, 10);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t digit = rng.next_below(10);
    ds.inputs(i, digit) = 1.0;
    for (std::size_t j = 10; j < 784; ++j) ds.inputs(i, j) = rng.next_unit() * 0.1;
    ds.targets(i, digit) = 1.0;
  }
  return ds;
}

Network perfect_classifier() {
  Network net;
  net.input_width = 784;
  net.layers = {{10, Activation::Identity}};
  Matrix w(10, 784);
  for (std::size_t j = 0; j < 10; ++j) w(j, j) = 1.0;
  net.weights = {std::move(w)};
  net.biases = {Vector(10, 0.0)};
  return net;
}

RunConfig fast_config() {
  RunConfig c;
  c.hidden_layers = 1;
  c.neurons_per_layer = 16;
  c.batch_size = 8;
  c.epochs = 2;
  c.seed = 3;
  c.preset = Preset::Replication;
  return c;
}

}  // namespace

TEST_CASE("evaluate: a perfect classifier scores 1.0") {
  const LabeledDataset ds = encoded_digit_dataset(64, 1);
  CHECK(evaluate(perfect_classifier(), ds) == 1.0);
}

TEST_CASE("evaluate rejects an empty test set") {
  LabeledDataset empty;
  CHECK_THROWS_AS(evaluate(perfect_classifier(), empty), std::invalid_argument);
}

TEST_CASE("evaluate is order-independent") {
  const LabeledDataset ds = encoded_digit_dataset(50, 2);
  const Network net = build_network(
      784, {{12, Activation::Relu}, {10, Activation::Identity}}, 11);
  const double base = evaluate(net, ds);

  LabeledDataset reversed;
  reversed.n = ds.n;
  reversed.inputs = Matrix(ds.n, 784);
  reversed.targets = Matrix(ds.n, 10);
  for (std::size_t i = 0; i < ds.n; ++i) {
    const std::size_t src = ds.n - 1 - i;
    std::copy(ds.input(src).begin(), ds.input(src).end(),
              reversed.inputs.row(i).begin());
    std::copy(ds.target(src).begin(), ds.target(src).end(),
              reversed.targets.row(i).begin());
  }
  CHECK(evaluate(net, reversed) == base);
}

TEST_CASE("evaluate: a fresh random network on real MNIST is near chance") {
  const LabeledDataset test = load_mnist(PERCEPT_DATA_DIR, false);
  const Network net = build_network(
      784, {{100, Activation::Relu}, {10, Activation::Identity}}, 12345);
  const double acc = evaluate(net, test);
  CHECK(acc >= 0.02);
  CHECK(acc <= 0.25);
}

TEST_CASE("preset resolution") {
  RunConfig c = fast_config();
  c.preset = Preset::PaperMath;
  Hyperparams hp = resolve_hyperparams(c);
  CHECK(hp.eta == 3.0);
  CHECK(hp.loss == Loss::Quadratic);
  CHECK(hp.optimizer == Optimizer::Sgd);
  auto specs = layer_specs(c);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].activation == Activation::Sigmoid);
  CHECK(specs[1].activation == Activation::Sigmoid);
  CHECK(specs[1].width == 10);

  c.preset = Preset::Replication;
  c.eta = 0.01;
  hp = resolve_hyperparams(c);
  CHECK(hp.eta == 0.01);
  CHECK(hp.loss == Loss::SoftmaxCrossEntropy);
  CHECK(hp.optimizer == Optimizer::Adam);
  specs = layer_specs(c);
  CHECK(specs[0].activation == Activation::Relu);
  CHECK(specs[1].activation == Activation::Identity);

  c.hidden_layers = 0;
  CHECK_THROWS_AS(layer_specs(c), std::invalid_argument);
}

TEST_CASE("train produces one accuracy per epoch and is deterministic") {
  const LabeledDataset train_ds = encoded_digit_dataset(120, 5);
  const LabeledDataset test_ds = encoded_digit_dataset(40, 6);

  RunConfig c = fast_config();
  c.epochs = 1;
  const TrainReport single = train(c, train_ds, test_ds);
  CHECK(single.per_epoch_accuracy.size() == 1);
  CHECK(single.final_accuracy == single.per_epoch_accuracy.back());

  c.epochs = 3;
  std::vector<std::size_t> seen_epochs;
  const TrainReport a =
      train(c, train_ds, test_ds,
            [&](std::size_t epoch, double) { seen_epochs.push_back(epoch); });
  const TrainReport b = train(c, train_ds, test_ds);
  CHECK(seen_epochs == std::vector<std::size_t>{1, 2, 3});
  CHECK(a.per_epoch_accuracy == b.per_epoch_accuracy);
  for (double acc : a.per_epoch_accuracy) {
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
  }
}

TEST_CASE("train learns the encoded-digit toy task") {
  const LabeledDataset train_ds = encoded_digit_dataset(400, 7);
  const LabeledDataset test_ds = encoded_digit_dataset(100, 8);
  RunConfig c = fast_config();
  c.epochs = 12;
  const TrainReport report = train(c, train_ds, test_ds);
  CHECK(report.final_accuracy >= 0.9);
}

TEST_CASE("sweep preserves grid order and composes with train") {
  const LabeledDataset train_ds = encoded_digit_dataset(80, 9);
  const LabeledDataset test_ds = encoded_digit_dataset(30, 10);

  RunConfig c = fast_config();
  const TrainReport lone = train(c, train_ds, test_ds);
  const auto reports = sweep({c, c}, train_ds, test_ds);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].per_epoch_accuracy == lone.per_epoch_accuracy);
  CHECK(reports[1].per_epoch_accuracy == lone.per_epoch_accuracy);

  CHECK_THROWS_AS(sweep({}, train_ds, test_ds), std::invalid_argument);
}

TEST_CASE("table1 grid carries the published 12 rows") {
  const auto grid = table1_grid(100);
  REQUIRE(grid.size() == 12);
  CHECK(grid[0].hidden_layers == 2);
  CHECK(grid[0].batch_size == 50);
  CHECK(grid[0].epochs == 50);
  CHECK(grid[4].hidden_layers == 4);
  CHECK(grid[4].batch_size == 100);
  CHECK(grid[4].epochs == 20);
  CHECK(grid[5].hidden_layers == 4);
  CHECK(grid[5].batch_size == 50);
  CHECK(grid[5].epochs == 50);
  CHECK(grid[11].hidden_layers == 9);
  CHECK(grid[11].epochs == 20);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(grid[i].seed == 100 + i);
    CHECK(grid[i].neurons_per_layer == 500);
  }
}

TEST_CASE("format_accuracy rounds to four places") {
  CHECK(format_accuracy(0.97319) == "0.9732");
  CHECK(format_accuracy(1.0) == "1.0000");
  CHECK(format_accuracy(0.0) == "0.0000");
  CHECK(format_accuracy(0.12344) == "0.1234");
}

TEST_CASE("emit_csv layout") {
  TrainReport r;
  r.config = fast_config();
  r.config.hidden_layers = 4;
  r.config.neurons_per_layer = 500;
  r.config.batch_size = 50;
  r.config.epochs = 2;
  r.config.seed = 9;
  r.per_epoch_accuracy = {0.91115, 0.97319};
  r.final_accuracy = 0.97319;

  const std::string csv = emit_csv({r});
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "hidden_layers,neurons,batch_size,epochs,seed,epoch,test_accuracy");
  std::getline(lines, line);
  CHECK(line == "4,500,50,2,9,1,0.9112");
  std::getline(lines, line);
  CHECK(line == "4,500,50,2,9,2,0.9732");
  CHECK_FALSE(std::getline(lines, line));

  CHECK(emit_csv({}) ==
        "hidden_layers,neurons,batch_size,epochs,seed,epoch,test_accuracy\n");
}

TEST_CASE("emitted CSV parses back to the reported accuracies") {
  TrainReport r;
  r.config = fast_config();
  r.per_epoch_accuracy = {0.5, 0.625, 0.75};
  r.final_accuracy = 0.75;
  const std::string csv = emit_csv({r});

  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  std::size_t epoch = 0;
  while (std::getline(lines, line)) {
    const auto last_comma = line.rfind(',');
    const double acc = std::stod(line.substr(last_comma + 1));
    CHECK(std::abs(acc - r.per_epoch_accuracy[epoch]) < 5e-5);
    ++epoch;
  }
  CHECK(epoch == 3);
}

TEST_CASE("emit_plotdata writes both series") {
  TrainReport r;
  r.config = fast_config();
  r.config.hidden_layers = 3;
  r.per_epoch_accuracy = {0.8, 0.9};
  r.final_accuracy = 0.9;

  const std::string nd = emit_plotdata({r});
  std::istringstream lines(nd);
  std::string line;
  std::getline(lines, line);
  CHECK(line ==
        "{\"series\":\"epoch\",\"config_id\":0,\"epoch\":1,\"accuracy\":0.8000}");
  std::getline(lines, line);
  CHECK(line ==
        "{\"series\":\"epoch\",\"config_id\":0,\"epoch\":2,\"accuracy\":0.9000}");
  std::getline(lines, line);
  CHECK(line ==
        "{\"series\":\"final\",\"config_id\":0,\"hidden_layers\":3,\"accuracy\":0.9000}");
}

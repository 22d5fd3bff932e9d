#include "percept/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "percept/dataio.hpp"

namespace percept::cli {
namespace {

struct ConfigFlags {
  std::size_t hidden = 0;
  std::size_t width = 500;
  std::size_t batch_size = 50;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  std::string preset = "replication";
  double lr = -1.0;
  std::string loss;
  std::string optimizer;
};

void add_config_flags(CLI::App& sub, ConfigFlags& f) {
  sub.add_option("--hidden", f.hidden, "number of hidden layers")->required();
  sub.add_option("--width", f.width, "neurons per hidden layer");
  sub.add_option("--batch-size", f.batch_size, "minibatch size m");
  sub.add_option("--epochs", f.epochs, "training epochs");
  sub.add_option("--seed", f.seed, "rng seed");
  sub.add_option("--preset", f.preset, "paper-math|replication")
      ->check(CLI::IsMember({"paper-math", "replication"}));
  sub.add_option("--lr", f.lr, "learning rate override");
  sub.add_option("--loss", f.loss, "quadratic|xent")
      ->check(CLI::IsMember({"quadratic", "xent"}));
  sub.add_option("--optimizer", f.optimizer, "sgd|adam")
      ->check(CLI::IsMember({"sgd", "adam"}));
}

RunConfig to_config(const ConfigFlags& f) {
  RunConfig c;
  c.hidden_layers = f.hidden;
  c.neurons_per_layer = f.width;
  c.batch_size = f.batch_size;
  c.epochs = f.epochs;
  c.seed = f.seed;
  c.preset = preset_from_name(f.preset);
  if (f.lr > 0.0) c.eta = f.lr;
  if (f.loss == "quadratic") c.loss = Loss::Quadratic;
  if (f.loss == "xent") c.loss = Loss::SoftmaxCrossEntropy;
  if (f.optimizer == "sgd") c.optimizer = Optimizer::Sgd;
  if (f.optimizer == "adam") c.optimizer = Optimizer::Adam;
  return c;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << contents;
}

EpochCallback progress_printer() {
  return [](std::size_t epoch, double acc) {
    std::fprintf(stderr, "epoch %zu accuracy %s\n", epoch,
                 format_accuracy(acc).c_str());
  };
}

int run_inspect(const InspectArgs& args) {
  struct Entry {
    const char* name;
    bool images;
  };
  constexpr Entry entries[] = {{"train-images-idx3-ubyte", true},
                               {"train-labels-idx1-ubyte", false},
                               {"t10k-images-idx3-ubyte", true},
                               {"t10k-labels-idx1-ubyte", false}};
  std::size_t total = 0;
  for (const Entry& e : entries) {
    const std::string path = find_mnist_file(args.data_dir, e.name);
    const auto bytes = read_file_maybe_gzip(path);
    if (e.images) {
      const RawImages imgs = parse_idx_images(bytes);
      std::uint8_t lo = 255, hi = 0;
      for (std::uint8_t p : imgs.pixels) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
      std::fprintf(stderr, "%s: %u images of %ux%u, pixel range [%u, %u]\n",
                   e.name, imgs.count, imgs.rows, imgs.cols, unsigned(lo),
                   unsigned(hi));
      total += imgs.count;
    } else {
      const RawLabels labels = parse_idx_labels(bytes);
      std::fprintf(stderr, "%s: %u labels, all in 0..9\n", e.name, labels.count);
    }
  }
  std::printf("inspect ok, %zu images across both splits\n", total);
  return 0;
}

int run_train(const TrainArgs& args) {
  const LabeledDataset train_ds = load_mnist(args.data_dir, true);
  const LabeledDataset test_ds = load_mnist(args.data_dir, false);
  Network net;
  const TrainReport report =
      train(args.config, train_ds, test_ds, progress_printer(), &net);
  if (args.checkpoint) save_checkpoint(net, *args.checkpoint);
  const std::vector<TrainReport> reports{report};
  if (args.out_csv) write_text_file(*args.out_csv, emit_csv(reports));
  if (args.plotdata) write_text_file(*args.plotdata, emit_plotdata(reports));
  std::printf("final_accuracy=%s\n", format_accuracy(report.final_accuracy).c_str());
  return 0;
}

int run_eval(const EvalArgs& args) {
  const Network net = load_checkpoint(args.checkpoint);
  const LabeledDataset test_ds = load_mnist(args.data_dir, false);
  const double acc = evaluate(net, test_ds);
  std::printf("final_accuracy=%s\n", format_accuracy(acc).c_str());
  return 0;
}

int run_sweep(const SweepArgs& args) {
  std::vector<RunConfig> grid = args.grid == "table1"
                                    ? table1_grid(args.base_seed)
                                    : parse_grid_file(args.grid, args.base_seed);
  if (args.width_override)
    for (RunConfig& c : grid) c.neurons_per_layer = *args.width_override;

  const LabeledDataset train_ds = load_mnist(args.data_dir, true);
  const LabeledDataset test_ds = load_mnist(args.data_dir, false);

  std::size_t row = 0;
  const auto announce = [&](const RunConfig& c) {
    std::fprintf(stderr, "row %zu/%zu: hidden=%zu batch=%zu epochs=%zu\n", ++row,
                 grid.size(), c.hidden_layers, c.batch_size, c.epochs);
  };
  std::vector<TrainReport> reports;
  reports.reserve(grid.size());
  for (const RunConfig& c : grid) {
    announce(c);
    reports.push_back(
        sweep(std::vector<RunConfig>{c}, train_ds, test_ds, progress_printer())[0]);
  }

  if (args.out_csv) write_text_file(*args.out_csv, emit_csv(reports));
  if (args.plotdata) write_text_file(*args.plotdata, emit_plotdata(reports));
  const auto best = std::max_element(
      reports.begin(), reports.end(), [](const auto& a, const auto& b) {
        return a.final_accuracy < b.final_accuracy;
      });
  std::printf("rows=%zu best_accuracy=%s hidden_layers=%zu\n", reports.size(),
              format_accuracy(best->final_accuracy).c_str(),
              best->config.hidden_layers);
  return 0;
}

}  // namespace

Command parse_args(const std::vector<std::string>& argv) {
  CLI::App app{"feed-forward MNIST classifier"};
  app.name("percept");
  app.require_subcommand(1);

  auto* inspect = app.add_subcommand("inspect", "print IDX header summaries");
  std::string inspect_dir;
  inspect->add_option("--data-dir", inspect_dir, "directory with the MNIST files")
      ->required();

  auto* train_cmd = app.add_subcommand("train", "train one configuration");
  ConfigFlags flags;
  add_config_flags(*train_cmd, flags);
  std::string train_dir;
  std::string train_out, train_plot, train_ckpt;
  train_cmd->add_option("--data-dir", train_dir)->required();
  train_cmd->add_option("--out", train_out, "per-epoch accuracy CSV");
  train_cmd->add_option("--plotdata", train_plot, "newline-delimited plot records");
  train_cmd->add_option("--checkpoint", train_ckpt, "write the trained model here");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string eval_ckpt, eval_dir;
  eval_cmd->add_option("--checkpoint", eval_ckpt)->required();
  eval_cmd->add_option("--data-dir", eval_dir)->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "train a whole grid");
  std::string sweep_grid, sweep_dir, sweep_out, sweep_plot;
  std::uint64_t sweep_seed = 0;
  std::size_t sweep_width = 0;
  sweep_cmd->add_option("--grid", sweep_grid, "'table1' or a grid CSV file")
      ->required();
  sweep_cmd->add_option("--data-dir", sweep_dir)->required();
  sweep_cmd->add_option("--seed", sweep_seed, "base seed; row i uses base+i");
  sweep_cmd->add_option("--width", sweep_width, "override neurons per layer");
  sweep_cmd->add_option("--out", sweep_out, "sweep CSV path");
  sweep_cmd->add_option("--plotdata", sweep_plot);

  std::vector<std::string> args_reversed(argv.rbegin(), argv.rend());
  try {
    app.parse(args_reversed);
  } catch (const CLI::CallForHelp&) {
    return HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (*inspect) return InspectArgs{inspect_dir};
  if (*train_cmd) {
    TrainArgs t;
    t.config = to_config(flags);
    t.data_dir = train_dir;
    if (!train_out.empty()) t.out_csv = train_out;
    if (!train_plot.empty()) t.plotdata = train_plot;
    if (!train_ckpt.empty()) t.checkpoint = train_ckpt;
    return t;
  }
  if (*eval_cmd) return EvalArgs{eval_ckpt, eval_dir};
  SweepArgs s;
  s.grid = sweep_grid;
  s.data_dir = sweep_dir;
  s.base_seed = sweep_seed;
  if (sweep_width > 0) s.width_override = sweep_width;
  if (!sweep_out.empty()) s.out_csv = sweep_out;
  if (!sweep_plot.empty()) s.plotdata = sweep_plot;
  return s;
}

std::vector<RunConfig> parse_grid_file(const std::string& path,
                                       std::uint64_t base_seed) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open grid file " + path);
  std::vector<RunConfig> grid;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.find_first_not_of("0123456789, \r") != std::string::npos)
      continue;  // header
    std::istringstream ss(line);
    std::string field;
    std::size_t values[3];
    for (int i = 0; i < 3; ++i) {
      if (!std::getline(ss, field, ','))
        throw std::runtime_error("grid file " + path + " line " +
                                 std::to_string(lineno) +
                                 ": want hidden_layers,batch_size,epochs");
      values[i] = std::stoul(field);
    }
    RunConfig c;
    c.hidden_layers = values[0];
    c.batch_size = values[1];
    c.epochs = values[2];
    c.seed = base_seed + grid.size();
    grid.push_back(c);
  }
  if (grid.empty()) throw std::runtime_error("grid file " + path + " is empty");
  return grid;
}

int run(const Command& cmd) {
  return std::visit(
      [](const auto& c) -> int {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HelpRequested>) {
          std::fputs(c.text.c_str(), stdout);
          return 0;
        } else if constexpr (std::is_same_v<T, InspectArgs>) {
          return run_inspect(c);
        } else if constexpr (std::is_same_v<T, TrainArgs>) {
          return run_train(c);
        } else if constexpr (std::is_same_v<T, EvalArgs>) {
          return run_eval(c);
        } else {
          return run_sweep(c);
        }
      },
      cmd);
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(parse_args(args));
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\nrun 'percept --help' for usage\n",
                 e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace percept::cli

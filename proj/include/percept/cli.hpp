#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "percept/experiment.hpp"

namespace percept::cli {

struct InspectArgs {
  std::string data_dir;
};

struct TrainArgs {
  RunConfig config;
  std::string data_dir;
  std::optional<std::string> out_csv;
  std::optional<std::string> plotdata;
  std::optional<std::string> checkpoint;
};

struct EvalArgs {
  std::string checkpoint;
  std::string data_dir;
};

struct SweepArgs {
  std::string grid;  // "table1" or a grid-file path
  std::string data_dir;
  std::uint64_t base_seed = 0;
  std::optional<std::size_t> width_override;
  std::optional<std::string> out_csv;
  std::optional<std::string> plotdata;
};

struct HelpRequested {
  std::string text;
};

using Command =
    std::variant<InspectArgs, TrainArgs, EvalArgs, SweepArgs, HelpRequested>;

// Bad flags, missing required flags and unparsable numbers; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pure function of argv (program name excluded). Throws UsageError on any
// malformed command line.
Command parse_args(const std::vector<std::string>& argv);

// Grid rows as "hidden_layers,batch_size,epochs" CSV lines; a header line
// is skipped when present.
std::vector<RunConfig> parse_grid_file(const std::string& path,
                                       std::uint64_t base_seed);

// Executes the command; returns the process exit code (0 success,
// 1 runtime failure). Progress goes to stderr, the summary line to stdout.
int run(const Command& cmd);

// Complete entry point: parse, run, map UsageError to exit code 2.
int main_entry(int argc, char** argv);

}  // namespace percept::cli

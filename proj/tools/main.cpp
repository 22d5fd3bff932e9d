#include "percept/cli.hpp"

int main(int argc, char** argv) { return percept::cli::main_entry(argc, argv); }

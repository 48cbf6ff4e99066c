#include "mixlayer/cli.hpp"

int main(int argc, char** argv) { return mixlayer::cli::run_cli(argc, argv); }

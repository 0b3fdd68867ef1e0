#include "kantnn/cli.hpp"

int main(int argc, char** argv) { return kantnn::cli::run_cli(argc, argv); }

#include "cli.hpp"

int main(int argc, char** argv) { return fdi::cli::run_cli(argc, argv); }

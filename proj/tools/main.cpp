#include "cli.hpp"

int main(int argc, char** argv) { return weaklinks::cli::run_cli(argc, argv); }

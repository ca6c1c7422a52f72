#include "equilog/cli.hpp"

int main(int argc, char** argv) { return equilog::cli::cli_main(argc, argv); }

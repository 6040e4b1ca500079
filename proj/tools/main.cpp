#include "fuzzygrad/cli.hpp"

int main(int argc, char** argv) { return fuzzygrad::cli::run_main(argc, argv); }

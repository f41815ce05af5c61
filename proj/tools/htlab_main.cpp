#include "htlab/cli.hpp"

int main(int argc, char** argv) { return htlab::cli::run_main(argc, argv); }

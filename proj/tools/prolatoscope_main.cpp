#include "prolatoscope/cli.hpp"

int main(int argc, char** argv) { return prolatoscope::cli::cli_main(argc, argv); }

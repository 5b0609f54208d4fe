#include "phasesync/cli.hpp"

int main(int argc, char** argv) { return phasesync::cli::run_main(argc, argv); }

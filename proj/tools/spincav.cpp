#include "spincav/harness/cli.hpp"

int main(int argc, char** argv) { return spincav::harness::cli_main(argc, argv); }

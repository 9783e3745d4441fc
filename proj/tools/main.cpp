#include "bsr/cli.hpp"

int main(int argc, char** argv) { return bsr::run_cli(argc, argv); }

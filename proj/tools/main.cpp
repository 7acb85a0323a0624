#include "ccsr/cli.hpp"

int main(int argc, char** argv) { return ccsr::cli_main(argc, argv); }

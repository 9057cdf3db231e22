#include "seopf/cli.hpp"

int main(int argc, char** argv) { return seopf::cli_main(argc, argv); }

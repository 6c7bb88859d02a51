#include "ffgrad/cli.hpp"

int main(int argc, char** argv) { return ffgrad::cli_main(argc, argv); }

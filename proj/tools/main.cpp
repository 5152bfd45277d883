#include "cli.hpp"

int main(int argc, char** argv) { return masim::cli_main(argc, argv); }

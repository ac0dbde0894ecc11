#include "cli.hpp"

int main(int argc, char** argv) { return mineig::cli::cli_main(argc, argv); }

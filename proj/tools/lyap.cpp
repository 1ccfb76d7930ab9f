#include "lyap/cli.hpp"

int main(int argc, char** argv) { return lyap::cli::run(argc, argv); }

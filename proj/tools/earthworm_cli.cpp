#include "cli.hpp"

int main(int argc, char** argv) { return earthworm::cli::run(argc, argv); }

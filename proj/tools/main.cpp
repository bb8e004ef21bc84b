#include "cli.hpp"

int main(int argc, char** argv) { return modescent::cli::run(argc, argv); }

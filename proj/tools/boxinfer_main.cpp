#include "cli.hpp"

int main(int argc, char** argv) { return boxinfer::cli::run(argc, argv); }

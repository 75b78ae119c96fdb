#include "cli.hpp"

int main(int argc, char** argv) { return lqshrink::cli::run(argc, argv); }

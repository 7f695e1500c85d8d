#include "gibbslim/cli.hpp"

int main(int argc, char** argv) { return gibbslim::cli::run(argc, argv); }

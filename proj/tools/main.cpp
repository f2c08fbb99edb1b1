#include "causaldr/cli.hpp"

int main(int argc, char** argv) { return causaldr::cli::run(argc, argv); }

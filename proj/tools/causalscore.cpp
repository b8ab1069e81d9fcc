#include "causalscore/cli.hpp"

int main(int argc, char** argv) { return causalscore::cli::main(argc, argv); }

#include "extflow/cli.hpp"

int main(int argc, char** argv) { return extflow::cli::run(argc, argv); }

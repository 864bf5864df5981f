#include "macroq/cli.hpp"

int main(int argc, char** argv) { return macroq::run_cli(argc, argv); }

#include "fsde/cli.hpp"

int main(int argc, char** argv) { return fsde::run_cli(argc, argv); }

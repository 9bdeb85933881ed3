#include "pogamp/cli.hpp"

int main(int argc, char** argv) { return pogamp::run_cli(argc, argv); }

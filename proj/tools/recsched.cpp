#include "rec/cli.hpp"

int main(int argc, char** argv) { return rec::run_cli(argc, argv); }

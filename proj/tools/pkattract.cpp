#include "pkattract/cli.hpp"

int main(int argc, char** argv) { return pkattract::run_command(argc, argv); }

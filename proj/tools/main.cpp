#include "ahop/cli.hpp"

int main(int argc, char** argv) { return ahop::run_cli(argc, argv); }

#include "fpcfg/cli.hpp"

int main(int argc, char** argv) { return fpcfg::run_cli(argc, argv); }

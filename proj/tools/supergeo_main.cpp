#include "supergeo/cli.hpp"

int main(int argc, char** argv) { return supergeo::run_cli(argc, argv); }

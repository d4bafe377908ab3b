#include "nbgec/cli.hpp"

int main(int argc, char** argv) { return nbgec::run_cli(argc, argv); }

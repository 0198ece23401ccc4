#include "coagfrag/cli.hpp"

int main(int argc, char** argv) { return coagfrag::run_cli(argc, argv); }

#include "creditnn/cli.hpp"

int main(int argc, char** argv) { return creditnn::cli_main(argc, argv); }

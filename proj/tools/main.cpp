#include "cli.hpp"

int main(int argc, char** argv) { return mirate::cli_main(argc, argv); }

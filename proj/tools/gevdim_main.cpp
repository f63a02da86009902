#include "gevdim/harness.hpp"

int main(int argc, char** argv) { return gevdim::cli_main(argc, argv); }

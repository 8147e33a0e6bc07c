#include "crad/harness.hpp"

int main(int argc, char** argv) { return crad::cli_main(argc, argv); }

#include "oivar/cli.hpp"

int main(int argc, char** argv) { return oivar::cli_main(argc, argv); }

#include "qpfs/cli.hpp"

int main(int argc, char** argv) { return qpfs::cli::run(argc, argv); }

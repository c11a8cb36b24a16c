#include "coldrec/cli.hpp"

int main(int argc, char** argv) { return coldrec::cli::run(argc, argv); }

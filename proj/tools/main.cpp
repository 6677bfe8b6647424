#include "cli.hpp"

int main(int argc, char** argv) { return qsn::cli::run(argc, argv); }

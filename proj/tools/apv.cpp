#include "apv/cli.hpp"

int main(int argc, char** argv) { return apv::cli::run(argc, argv); }

#include "fprna/cli.hpp"

int main(int argc, char** argv) { return fprna::run(argc, argv); }

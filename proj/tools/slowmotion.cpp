#include "slowmotion/cli.hpp"

int main(int argc, char** argv) { return slowmotion::cli::main(argc, argv); }

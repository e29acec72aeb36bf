#include "fokas/cli.hpp"

int main(int argc, char** argv) { return fokas::cli::main_entry(argc, argv); }

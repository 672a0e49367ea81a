#include "tgat/cli/commands.hpp"

int main(int argc, char** argv) { return tgat::cli::main_entry(argc, argv); }

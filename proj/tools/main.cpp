#include "commands.hpp"

int main(int argc, char** argv) { return peacock::cli::run_cli(argc, argv); }

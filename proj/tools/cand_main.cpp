#include "commands.hpp"

int main(int argc, char** argv) { return cand::cli::run(argc, argv); }

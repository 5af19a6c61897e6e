#include "commands.hpp"

int main(int argc, char** argv) { return gasrank::cli::run(argc, argv); }

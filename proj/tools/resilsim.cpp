#include "resilsim/cli.hpp"

int main(int argc, char** argv) { return resilsim::run_cli(argc, argv); }

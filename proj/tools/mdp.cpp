#include "mdp/cli.hpp"

int main(int argc, char** argv) { return mdp::cli::run(argc, argv); }

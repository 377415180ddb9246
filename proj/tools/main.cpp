#include "pillowkit/cli/cli.hpp"

int main(int argc, char** argv) { return pillowkit::cli::run(argc, argv); }

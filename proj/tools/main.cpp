#include "hfts/cli.hpp"

int main(int argc, char** argv) { return hfts::cli::run(argc, argv); }

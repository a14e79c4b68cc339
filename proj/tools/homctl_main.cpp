#include "homctl/cli.hpp"

int main(int argc, char** argv) { return homctl::cli::run(argc, argv); }

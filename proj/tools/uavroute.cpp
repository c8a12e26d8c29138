#include "uavroute/cli.hpp"

int main(int argc, char** argv) { return uavroute::cli::run(argc, argv); }

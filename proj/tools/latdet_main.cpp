#include "latdet/harness.hpp"

int main(int argc, char** argv) { return latdet::run_cli(argc, argv); }

#include "dvcm/cli.hpp"

int main(int argc, char** argv) { return dvcm::cli_dispatch(argc, argv); }

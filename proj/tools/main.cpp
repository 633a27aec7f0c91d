#include "commands.hpp"

int main(int argc, char** argv) { return arq::app::cli_dispatch(argc, argv); }

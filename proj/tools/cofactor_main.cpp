#include "cofactor/io.hpp"

int main(int argc, char** argv) { return cofactor::run_cli(argc, argv); }

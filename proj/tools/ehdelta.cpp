#include "ehdelta/cli.hpp"

int main(int argc, char** argv) { return ehd::cli::run(argc, argv); }

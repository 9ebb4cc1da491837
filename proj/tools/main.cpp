#include <tamekit/cli.hpp>

int main(int argc, char** argv) { return tamekit::cli::run(argc, argv); }
